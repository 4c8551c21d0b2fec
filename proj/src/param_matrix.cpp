#include "crnerg/param_matrix.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>

#include "crnerg/error.hpp"

namespace crnerg {

// ---------------------------------------------------------------------------
// FirstOrderSystem
// ---------------------------------------------------------------------------

std::vector<std::string> FirstOrderSystem::param_names() const {
    std::vector<std::string> out;
    for (const auto& t : terms)
        if (std::find(out.begin(), out.end(), t.param) == out.end()) out.push_back(t.param);
    return out;
}

std::vector<std::string> FirstOrderSystem::params_of_kind(UniKind k) const {
    std::vector<std::string> out;
    for (const auto& t : terms)
        if (t.kind == k && std::find(out.begin(), out.end(), t.param) == out.end()) out.push_back(t.param);
    return out;
}

std::vector<const LinearTerm*> FirstOrderSystem::terms_of_kind(UniKind k) const {
    std::vector<const LinearTerm*> out;
    for (const auto& t : terms)
        if (t.kind == k) out.push_back(&t);
    return out;
}

bool FirstOrderSystem::has_kind(UniKind k) const {
    return std::any_of(terms.begin(), terms.end(), [k](const LinearTerm& t) { return t.kind == k; });
}

FirstOrderSystem first_order_system(const ReactionNetwork& net) {
    FirstOrderSystem sys;
    sys.species = net.species();
    const auto d = net.num_species();
    for (std::size_t k = 0; k < net.num_reactions(); ++k) {
        const auto& r = net.reactions()[k];
        if (r.order() != 1) continue;
        LinearTerm t;
        t.param = r.rate;
        t.stoich = r.stoichiometry(d);
        t.reactant = r.sole_reactant();
        t.kind = classify_column(t.stoich);
        t.reaction = k;
        sys.domain.emplace(r.rate, net.param(r.rate));
        sys.terms.push_back(std::move(t));
    }
    return sys;
}

// ---------------------------------------------------------------------------
// ParamMatrix
// ---------------------------------------------------------------------------

ParamMatrix::ParamMatrix(std::size_t rows, std::size_t cols, std::vector<std::string> vars)
    : rows_(rows), cols_(cols), vars_(std::move(vars)), cells_(rows * cols, MultiPoly(vars_)) {}

void ParamMatrix::ensure_variable(const std::string& v) {
    if (std::find(vars_.begin(), vars_.end(), v) != vars_.end()) return;
    vars_.push_back(v);
    for (auto& c : cells_) c = c.with_variables(vars_);
}

void ParamMatrix::add(std::size_t i, std::size_t j, double coeff, const std::string& var) {
    if (i >= rows_ || j >= cols_) throw ContractViolation("ParamMatrix index out of range");
    if (coeff == 0.0) return;
    Exponent e(vars_.size(), 0);
    if (!var.empty()) {
        ensure_variable(var);
        e.assign(vars_.size(), 0);
        e[static_cast<std::size_t>(std::find(vars_.begin(), vars_.end(), var) - vars_.begin())] = 1;
    }
    cells_[i * cols_ + j].add_term(e, coeff);
}

void ParamMatrix::set(std::size_t i, std::size_t j, MultiPoly p) {
    for (const auto& v : p.variables())
        if (p.degree_in(static_cast<std::size_t>(std::find(p.variables().begin(), p.variables().end(), v) -
                                                 p.variables().begin())) > 0)
            ensure_variable(v);
    cells_.at(i * cols_ + j) = p.with_variables(vars_);
}

int ParamMatrix::max_degree() const {
    int deg = -1;
    for (const auto& c : cells_) deg = std::max(deg, c.total_degree());
    return deg;
}

bool ParamMatrix::structurally_metzler() const {
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) {
            if (i == j) continue;
            for (const auto& [e, c] : (*this)(i, j).terms())
                if (c < 0.0) return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

ParamMatrix assemble_matrix(const FirstOrderSystem& sys, const TermRate& rate) {
    const auto d = sys.dim();
    ParamMatrix m(d, d);
    for (const auto& t : sys.terms) {
        const auto value = rate(t);
        for (std::size_t i = 0; i < d; ++i) {
            if (t.stoich[i] == 0) continue;
            if (value)
                m.add(i, t.reactant, t.stoich[i] * *value);
            else
                m.add(i, t.reactant, t.stoich[i], t.param);
        }
        if (!value) m.domain.emplace(t.param, sys.domain.at(t.param));
    }
    return m;
}

ParamMatrix characteristic_matrix(const FirstOrderSystem& sys) {
    return assemble_matrix(sys, [](const LinearTerm&) { return std::optional<double>{}; });
}

ParamMatrix characteristic_matrix(const ReactionNetwork& net) { return characteristic_matrix(first_order_system(net)); }

ParamMatrix offset_vector(const ReactionNetwork& net) {
    const auto d = net.num_species();
    ParamMatrix b(d, 1);
    for (const auto& r : net.reactions()) {
        if (r.order() != 0) continue;
        const auto z = r.stoichiometry(d);
        for (std::size_t i = 0; i < d; ++i) b.add(i, 0, z[i], r.rate);
        b.domain.emplace(r.rate, net.param(r.rate));
    }
    return b;
}

ParamMatrix upper_bound_matrix(const FirstOrderSystem& sys) {
    return assemble_matrix(sys, [&sys](const LinearTerm& t) -> std::optional<double> {
        const auto& p = sys.domain.at(t.param);
        switch (t.kind) {
            case UniKind::Degradation:
                if (auto lo = p.lower()) return *lo;
                throw UnboundedParameter("degradation rate '" + t.param + "' needs a lower bound");
            case UniKind::Catalytic:
                if (auto hi = p.upper()) return *hi;
                throw UnboundedParameter("catalytic rate '" + t.param + "' needs an upper bound");
            case UniKind::Conversion:
                if (p.is_free()) throw UnboundedParameter("conversion rate '" + t.param + "' needs finite bounds");
                return p.point_value();  // nullopt keeps a proper interval symbolic
        }
        return std::nullopt;
    });
}

ParamMatrix upper_bound_matrix(const ReactionNetwork& net, const UniClass& cls) {
    auto sys = first_order_system(net);
    for (auto& t : sys.terms)
        if (auto k = cls.kind_of(t.reaction)) t.kind = *k;
    return upper_bound_matrix(sys);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

Eigen::MatrixXd eval_matrix(const ParamMatrix& m, const Assignment& a) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).eval(a);
    return out;
}

Eigen::MatrixXd eval_matrix(const ParamMatrix& m, std::span<const double> point) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).eval(point);
    return out;
}

// ---------------------------------------------------------------------------
// Determinant and adjugate
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kMaxSymbolicDim = 16;

/// Determinant of the square sub-matrix picking `rows` (in order) and all
/// columns in `cols` (in order). Laplace expansion along the top row with the
/// minors of the lower rows memoized by column subset: O(2^n n) products, no
/// division, so the result is exact up to coefficient rounding.
MultiPoly subdeterminant(const std::vector<const MultiPoly*>& cells, std::size_t stride,
                         const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                         const std::vector<std::string>& vars) {
    const std::size_t n = rows.size();
    if (n == 0) return MultiPoly::constant(1.0, vars);
    if (n > kMaxSymbolicDim) throw ContractViolation("symbolic determinant limited to dimension 16");
    const std::uint32_t full = (1u << n) - 1u;
    std::vector<MultiPoly> minor(std::size_t{1} << n, MultiPoly(vars));
    minor[0] = MultiPoly::constant(1.0, vars);
    // Minors over the bottom k rows, for each k-subset of columns.
    for (std::size_t k = 1; k <= n; ++k) {
        const std::size_t r = n - k;
        for (std::uint32_t mask = 1; mask <= full; ++mask) {
            if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
            MultiPoly acc(vars);
            int pos = 0;
            for (std::size_t j = 0; j < n; ++j) {
                const std::uint32_t bit = 1u << j;
                if (!(mask & bit)) continue;
                const MultiPoly& entry = *cells[rows[r] * stride + cols[j]];
                const MultiPoly& sub = minor[mask & ~bit];
                if (!entry.is_zero() && !sub.is_zero()) {
                    MultiPoly prod = entry * sub;
                    if (pos % 2) prod = -prod;
                    acc += prod;
                }
                ++pos;
            }
            minor[mask] = std::move(acc);
        }
    }
    return minor[full];
}

std::vector<const MultiPoly*> cell_pointers(const ParamMatrix& m) {
    std::vector<const MultiPoly*> out;
    out.reserve(m.rows() * m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out.push_back(&m(i, j));
    return out;
}

std::vector<std::size_t> iota_except(std::size_t n, std::optional<std::size_t> skip = std::nullopt) {
    std::vector<std::size_t> v;
    for (std::size_t i = 0; i < n; ++i)
        if (!skip || *skip != i) v.push_back(i);
    return v;
}

void require_square(const ParamMatrix& m) {
    if (m.rows() != m.cols()) throw ContractViolation("square matrix required");
}

}  // namespace

MultiPoly det_poly(const ParamMatrix& m) {
    require_square(m);
    const auto n = m.rows();
    return subdeterminant(cell_pointers(m), n, iota_except(n), iota_except(n), m.variables());
}

ParamMatrix adjugate(const ParamMatrix& m) {
    require_square(m);
    const auto n = m.rows();
    const auto cells = cell_pointers(m);
    ParamMatrix adj(n, n, m.variables());
    adj.domain = m.domain;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            // Adj(i, j) = (-1)^(i+j) * minor deleting row j and column i.
            MultiPoly c = subdeterminant(cells, n, iota_except(n, j), iota_except(n, i), m.variables());
            if ((i + j) % 2) c = -c;
            adj.set(i, j, std::move(c));
        }
    return adj;
}

std::vector<MultiPoly> adjugate_vector(const ParamMatrix& m) {
    require_square(m);
    const auto n = m.rows();
    const auto vars = m.variables();
    const MultiPoly one = MultiPoly::constant(1.0, vars);
    std::vector<MultiPoly> v;
    v.reserve(n);
    // Sum of row j of cofactors = det of M with row j replaced by ones.
    for (std::size_t j = 0; j < n; ++j) {
        auto cells = cell_pointers(m);
        for (std::size_t c = 0; c < n; ++c) cells[j * n + c] = &one;
        MultiPoly vj = subdeterminant(cells, n, iota_except(n), iota_except(n), vars);
        if (n % 2 == 0) vj = -vj;  // (-1)^(n+1)
        v.push_back(std::move(vj));
    }
    return v;
}

}  // namespace crnerg
