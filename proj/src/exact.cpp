#include "crnerg/exact.hpp"

#include <cmath>

#include "crnerg/error.hpp"

namespace crnerg {

RationalMatrix RationalMatrix::from_int(const IntMatrix& m) {
    RationalMatrix r(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            r(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Rational(m(i, j));
    return r;
}

namespace {

Rational exact_rational(double x) {
    if (!std::isfinite(x)) throw ContractViolation("non-finite value in exact conversion");
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    // mant * 2^53 is an integer for every double.
    const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
    Rational r(scaled);
    exp -= 53;
    const Rational two(2);
    if (exp > 0)
        for (int k = 0; k < exp; ++k) r *= two;
    else
        for (int k = 0; k < -exp; ++k) r /= two;
    return r;
}

}  // namespace

RationalMatrix RationalMatrix::from_double(const Eigen::MatrixXd& m) {
    RationalMatrix r(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            r(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = exact_rational(m(i, j));
    return r;
}

RationalMatrix RationalMatrix::identity(std::size_t n) {
    RationalMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) r(i, i) = 1;
    return r;
}

RationalMatrix RationalMatrix::transpose() const {
    RationalMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

RationalMatrix operator*(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols_ != b.rows_) throw ContractViolation("dimension mismatch in rational product");
    RationalMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

bool RationalMatrix::is_zero() const {
    for (const auto& x : data_)
        if (x != 0) return false;
    return true;
}

Eigen::MatrixXd RationalMatrix::to_double() const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j).convert_to<double>();
    return m;
}

RationalMatrix inverse(const RationalMatrix& m) {
    if (m.rows() != m.cols()) throw ContractViolation("inverse of a non-square matrix");
    const auto n = m.rows();
    RationalMatrix a = m;
    RationalMatrix inv = RationalMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a(piv, col) == 0) ++piv;
        if (piv == n) throw ContractViolation("matrix is singular");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        const Rational p = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a(r, col) == 0) continue;
            const Rational f = a(r, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

std::vector<std::vector<Rational>> nullspace(const RationalMatrix& m) {
    const auto rows = m.rows();
    const auto cols = m.cols();
    RationalMatrix a = m;
    std::vector<std::size_t> pivot_col;  // pivot column of each reduced row
    std::vector<bool> is_pivot(cols, false);
    std::size_t r = 0;
    for (std::size_t step = 0; step < cols && r < rows; ++step) {
        const std::size_t col = cols - 1 - step;
        std::size_t piv = r;
        while (piv < rows && a(piv, col) == 0) ++piv;
        if (piv == rows) continue;
        if (piv != r)
            for (std::size_t j = 0; j < cols; ++j) std::swap(a(r, j), a(piv, j));
        const Rational p = a(r, col);
        for (std::size_t j = 0; j < cols; ++j) a(r, j) /= p;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a(i, col) == 0) continue;
            const Rational f = a(i, col);
            for (std::size_t j = 0; j < cols; ++j) a(i, j) -= f * a(r, j);
        }
        pivot_col.push_back(col);
        is_pivot[col] = true;
        ++r;
    }
    std::vector<std::vector<Rational>> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        std::vector<Rational> v(cols);
        v[free] = 1;
        for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -a(i, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace crnerg
