#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "crnerg/network.hpp"
#include "crnerg/param_matrix.hpp"
#include "crnerg/positivity.hpp"
#include "crnerg/spectral.hpp"

namespace crnerg {

enum class AnalysisMode { Nominal, RobustParametric, RobustConstantV, Structural, Bimolecular };
enum class Verdict { Certified, Refuted, Inconclusive };

const char* to_string(AnalysisMode m);
const char* to_string(Verdict v);

struct AnalysisOptions {
    StabilityTolerances tolerances;
    /// Handelman degree for box positivity; -1 selects max(deg p, 2).
    int handelman_degree = -1;
    /// Sample points for the spot check of a polynomial certificate.
    int spot_checks = 50;
    /// Fresh sample points used by verify_report.
    int recheck_points = 100;
    /// Orthant points for the nilpotency test of the structural fallback.
    int nilpotency_samples = 20;
    /// Starts of the counterexample search on boxes.
    int multistart = 512;
    /// Largest number of conversion parameters for vertex enumeration.
    std::size_t vertex_limit = 20;
    std::uint64_t seed = 1;
    /// Use the OpenMP kernels where available.
    bool parallel = true;
};

// ---------------------------------------------------------------------------
// Bimolecular reduction
// ---------------------------------------------------------------------------

/// First-order system projected by the left null space of S_b.
///
/// Row i of `sb_perp` becomes reduced coordinate i and is paired with the
/// species kept[i]; columns of S_b^perp A that are nonpositive (with a
/// strictly negative entry) are dropped because any positive weight makes
/// them negative.
struct Reduction {
    IntMatrix sb_perp;
    std::vector<std::string> row_labels;
    std::vector<std::size_t> kept;
    std::vector<std::size_t> dropped;
    /// Each row has a column where it is the only nonzero entry, so
    /// v = S_b^perp^T w is positive exactly when w is. Then the reduced
    /// condition is equivalent to the full one, and refutations are valid.
    bool exact = false;
    FirstOrderSystem system;
};

/// The reduced system, or nullopt with the reason written to `why`.
std::optional<Reduction> reduce_bimolecular(const ReactionNetwork& net, std::string* why = nullptr);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// Constant vector v with v >= 1 and v^T M(p) <= -epsilon at every listed
/// parameter point p (and v^T S_b = 0 when `with_sb`).
struct VectorCertificate {
    Eigen::VectorXd v;
    /// "A" (characteristic matrix) or "A+" (worst-case matrix).
    std::string matrix = "A";
    std::vector<Assignment> points;
    std::vector<Eigen::MatrixXd> matrices;
    bool with_sb = false;
    bool reduced = false;
};

/// Adjugate certificate v(rho) with the determinant positivity proof on a box.
struct PolynomialCertificate {
    std::vector<MultiPoly> v;
    /// (-1)^d det(A+(rho_cv)).
    MultiPoly det;
    Box box;
    std::string positivity_method;
    std::optional<HandelmanCertificate> handelman;
    Assignment anchor;
    double anchor_lambda = 0.0;
    bool reduced = false;
};

/// Witness for structural ergodicity.
struct StructuralCertificate {
    /// "unit-rates": test at unit rates (conversions X -> Y only);
    /// "orthant": orthant determinant test with sampled nilpotency.
    std::string route = "unit-rates";
    Eigen::MatrixXd a_one;
    double lambda_pf = 0.0;
    /// -W_ct A^{-1} S_ct at unit rates (or at the first orthant sample).
    Eigen::MatrixXd coupling;
    bool nilpotent = true;
    std::vector<std::size_t> cycle;
    double radius = 0.0;
    std::optional<MultiPoly> det;
    std::string det_method;
    int samples = 0;
    bool reduced = false;
};

using Certificate = std::variant<std::monostate, VectorCertificate, PolynomialCertificate, StructuralCertificate>;

struct Diagnostics {
    std::uint64_t seed = 0;
    StabilityTolerances tolerances;
    int handelman_degree = -1;
    int spot_checks = 0;
    int recheck_points = 0;
    int nilpotency_samples = 0;
    int multistart = 0;
    double wall_time_ms = 0.0;
};

struct ErgodicityReport {
    AnalysisMode mode = AnalysisMode::Nominal;
    Verdict verdict = Verdict::Inconclusive;
    /// One-line explanation of the verdict.
    std::string reason;
    Certificate certificate;
    /// Parameter point where the tested matrix has lambda_PF >= -marginal.
    std::optional<Assignment> counterexample;
    std::optional<double> counterexample_lambda;
    std::optional<Reduction> reduction;
    std::vector<std::string> notes;
    Diagnostics diagnostics;
};

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

/// Fixed first-order rates: LP {v >= 1, v^T S_b = 0, v^T A <= -eps}.
/// Throws WrongMode when a first-order rate is Free or a proper interval.
ErgodicityReport nominal_check(const ReactionNetwork& net, const AnalysisOptions& opts = {});

/// Unimolecular networks with interval rates: midpoint anchor, determinant
/// positivity on the conversion box, adjugate certificate.
ErgodicityReport robust_check_unimolecular(const ReactionNetwork& net, const AnalysisOptions& opts = {});

/// One v for every vertex of the conversion box (valid for time-varying rates).
ErgodicityReport robust_check_constant_v(const ReactionNetwork& net, const AnalysisOptions& opts = {});

/// Structural ergodicity for all positive rates; bimolecular networks go
/// through reduce_bimolecular.
ErgodicityReport structural_check(const ReactionNetwork& net, const AnalysisOptions& opts = {});

/// Interval rates with bimolecular reactions: constant-v LP, then the
/// parametric pipeline on the reduced system.
ErgodicityReport robust_check_bimolecular(const ReactionNetwork& net, const AnalysisOptions& opts = {});

/// Strongest applicable mode: any Free rate -> structural; any interval ->
/// robust (bimolecular variant when S_b is nonempty); otherwise nominal.
AnalysisMode auto_mode(const ReactionNetwork& net);

ErgodicityReport analyze(const ReactionNetwork& net, AnalysisMode mode, const AnalysisOptions& opts = {});

struct CheckResult {
    bool ok = true;
    std::vector<std::string> problems;
};

/// Re-derives the matrices from the network and checks the certificate (or
/// the counterexample) without reusing the analysis code paths.
CheckResult verify_report(const ReactionNetwork& net, const ErgodicityReport& report, const AnalysisOptions& opts = {});

// ---------------------------------------------------------------------------
// Antithetic integral control
// ---------------------------------------------------------------------------

struct ControllerSpec {
    /// Species whose mean is regulated.
    std::size_t controlled = 0;
    /// Species produced by the actuation reaction.
    std::size_t actuated = 0;
    double mu = 1.0;
    double theta = 1.0;
    double eta = 1.0;
    double k = 1.0;
};

struct ControllerReport {
    Eigen::MatrixXd a;
    Eigen::VectorXd b0;
    /// Solution of w^T A = -e_l^T.
    Eigen::VectorXd w;
    bool output_controllable = false;
    Eigen::VectorXd v;
    double c = 0.0;
    double setpoint_lower_bound = 0.0;
    double requested_setpoint = 0.0;
    bool feasible = false;
    std::vector<std::string> notes;
};

/// Throws WrongMode (non-fixed rates or bimolecular reactions),
/// PrerequisiteFailed (A not Hurwitz) and ContractViolation (bad spec).
ControllerReport controller_feasibility(const ReactionNetwork& net, const ControllerSpec& spec,
                                        const AnalysisOptions& opts = {});

}  // namespace crnerg
