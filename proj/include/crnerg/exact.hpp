#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

#include "crnerg/network.hpp"

namespace crnerg {

using Rational = boost::multiprecision::cpp_rational;

/// Dense row-major matrix over the rationals, for small exact computations.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static RationalMatrix from_int(const IntMatrix& m);
    /// Exact conversion of doubles (every finite double is a dyadic rational).
    static RationalMatrix from_double(const Eigen::MatrixXd& m);
    static RationalMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    RationalMatrix transpose() const;
    friend RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b);
    bool is_zero() const;
    Eigen::MatrixXd to_double() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

/// Exact inverse by Gauss-Jordan elimination; throws ContractViolation when singular.
RationalMatrix inverse(const RationalMatrix& m);

/// Basis of {x : M x = 0} from the reduced row echelon form. Columns are
/// scanned from the last to the first when choosing pivots, so free
/// variables are the leading ones. One basis vector per free column, in
/// increasing column order.
std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m);

}  // namespace crnerg
