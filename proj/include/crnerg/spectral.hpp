#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "crnerg/network.hpp"

namespace crnerg {

/// Numeric tolerances shared by the stability tests.
struct StabilityTolerances {
    /// Margin required of strict LP rows (v^T M <= -epsilon).
    double epsilon = 1e-7;
    /// |lambda_PF| at or below this is reported as Marginal.
    double marginal = 1e-5;
};

/// All off-diagonal entries >= -tol.
bool is_metzler(const Eigen::MatrixXd& m, double tol = 1e-12);

/// Dominant (Perron-Frobenius) eigenvalue of a Metzler matrix.
///
/// Bisection on t over [max diagonal, max row sum]: t > lambda_PF exactly when
/// M - tI is Hurwitz, which for a Metzler matrix holds iff the solution of
/// (M - tI) x = -1 is strictly positive. Unlike a general eigensolver this
/// stays accurate for defective spectra. Throws ContractViolation if not Metzler.
double pf_eigenvalue(const Eigen::MatrixXd& m);

/// Largest real part over the spectrum from a general eigensolver. Kept as an
/// independent cross-check of pf_eigenvalue.
double max_real_eigenvalue(const Eigen::MatrixXd& m);

enum class Stability { Stable, Unstable, Marginal };

const char* to_string(Stability s);

/// Solves {v >= 1, v^T M <= -epsilon} by linear programming (minimizing sum v).
std::optional<Eigen::VectorXd> lp_hurwitz_certificate(const Eigen::MatrixXd& m, double epsilon = 1e-7);

struct HurwitzResult {
    Stability verdict = Stability::Marginal;
    double lambda_pf = 0.0;
    /// v > 0 with v^T M < 0, present when Stable.
    std::optional<Eigen::VectorXd> certificate;
};

/// Hurwitz test for Metzler matrices by two routes (eigenvalue sign and LP
/// certificate). Disagreement outside the marginal band throws
/// NumericalInconsistency.
HurwitzResult is_hurwitz_metzler(const Eigen::MatrixXd& m, const StabilityTolerances& tol = {});

struct RadiusResult {
    double radius = 0.0;
    /// Decided on the support graph: nilpotent iff it has no directed cycle.
    bool nilpotent = true;
    /// A directed cycle of the support graph when not nilpotent.
    std::vector<std::size_t> cycle;
};

/// Spectral radius of an entrywise nonnegative matrix. Entries with
/// |m_ij| <= support_tol are structural zeros. Throws ContractViolation on
/// entries below -1e-12.
RadiusResult spectral_radius_nonneg(const Eigen::MatrixXd& m, double support_tol = 1e-12);

/// Directed cycle in the graph with an edge i -> j whenever support(i, j).
std::optional<std::vector<std::size_t>> find_cycle(const std::vector<std::vector<bool>>& support);

/// Integer basis of the left null space of `sb` (rows y with y^T sb = 0),
/// full row rank; the d x d identity when `sb` has no columns. Rows that
/// come out entirely nonpositive are negated.
IntMatrix left_nullspace_basis(const IntMatrix& sb);

}  // namespace crnerg
