#include "crnerg/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "crnerg/error.hpp"

namespace crnerg {

std::vector<std::string> merge_variables(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    auto out = a;
    for (const auto& v : b)
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    return out;
}

std::vector<Exponent> monomials_up_to(std::size_t n, int max_degree) {
    std::vector<Exponent> out;
    if (max_degree < 0) return out;
    Exponent e(n, 0);
    // Enumerate by total degree, then lexicographically within a degree.
    for (int deg = 0; deg <= max_degree; ++deg) {
        if (n == 0) {
            if (deg == 0) out.push_back(e);
            continue;
        }
        // Compositions of `deg` into n parts.
        std::fill(e.begin(), e.end(), 0);
        e[0] = deg;
        for (;;) {
            out.push_back(e);
            // Next composition: find rightmost non-last index with positive entry.
            std::size_t i = n - 1;
            int tail = e[n - 1];
            e[n - 1] = 0;
            do {
                if (i == 0) goto next_degree;
                --i;
            } while (e[i] == 0);
            --e[i];
            e[i + 1] = tail + 1;
        }
    next_degree:;
    }
    return out;
}

MultiPoly MultiPoly::constant(double c, std::vector<std::string> vars) {
    MultiPoly p(std::move(vars));
    p.add_term(Exponent(p.vars_.size(), 0), c);
    return p;
}

MultiPoly MultiPoly::variable(const std::string& name, std::vector<std::string> vars) {
    if (std::find(vars.begin(), vars.end(), name) == vars.end()) vars.push_back(name);
    MultiPoly p(std::move(vars));
    Exponent e(p.vars_.size(), 0);
    e[static_cast<std::size_t>(std::find(p.vars_.begin(), p.vars_.end(), name) - p.vars_.begin())] = 1;
    p.add_term(e, 1.0);
    return p;
}

bool MultiPoly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && total_degree() == 0);
}

double MultiPoly::constant_term() const { return coeff(Exponent(vars_.size(), 0)); }

int MultiPoly::total_degree() const {
    int deg = terms_.empty() ? -1 : 0;
    for (const auto& [e, c] : terms_) deg = std::max(deg, std::accumulate(e.begin(), e.end(), 0));
    return deg;
}

int MultiPoly::degree_in(std::size_t var) const {
    int deg = 0;
    for (const auto& [e, c] : terms_) deg = std::max(deg, e.at(var));
    return deg;
}

double MultiPoly::coeff(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? 0.0 : it->second;
}

void MultiPoly::add_term(const Exponent& e, double c) {
    if (e.size() != vars_.size()) throw ContractViolation("exponent length does not match variable count");
    if (c == 0.0) return;
    auto [it, inserted] = terms_.emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0.0) terms_.erase(it);
    }
}

MultiPoly MultiPoly::with_variables(const std::vector<std::string>& vars) const {
    std::vector<std::size_t> where(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = std::find(vars.begin(), vars.end(), vars_[i]);
        if (it == vars.end()) {
            if (degree_in(i) > 0) throw ContractViolation("variable '" + vars_[i] + "' dropped while in use");
            where[i] = vars.size();
        } else {
            where[i] = static_cast<std::size_t>(it - vars.begin());
        }
    }
    MultiPoly out(vars);
    for (const auto& [e, c] : terms_) {
        Exponent ne(vars.size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i)
            if (where[i] < vars.size()) ne[where[i]] = e[i];
        out.add_term(ne, c);
    }
    return out;
}

void MultiPoly::align_with(const MultiPoly& o) {
    if (vars_ == o.vars_) return;
    *this = with_variables(merge_variables(vars_, o.vars_));
}

double MultiPoly::eval(std::span<const double> point) const {
    if (point.size() != vars_.size()) throw ContractViolation("evaluation point has wrong dimension");
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double m = c;
        for (std::size_t i = 0; i < e.size(); ++i)
            for (int k = 0; k < e[i]; ++k) m *= point[i];
        sum += m;
    }
    return sum;
}

double MultiPoly::eval(const Assignment& a) const {
    std::vector<double> pt(vars_.size(), 0.0);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        auto it = a.find(vars_[i]);
        if (it != a.end())
            pt[i] = it->second;
        else if (degree_in(i) > 0)
            throw MissingParameter("no value for parameter '" + vars_[i] + "'");
    }
    return eval(pt);
}

namespace {

double horner_rec(const std::vector<std::pair<Exponent, double>>& terms, std::span<const double> x, std::size_t var) {
    if (terms.empty()) return 0.0;
    if (var == x.size()) {
        double s = 0.0;
        for (const auto& t : terms) s += t.second;
        return s;
    }
    int top = 0;
    for (const auto& t : terms) top = std::max(top, t.first[var]);
    std::vector<std::vector<std::pair<Exponent, double>>> by_power(static_cast<std::size_t>(top) + 1);
    for (const auto& t : terms) by_power[static_cast<std::size_t>(t.first[var])].push_back(t);
    double acc = 0.0;
    for (int k = top; k >= 0; --k) acc = acc * x[var] + horner_rec(by_power[static_cast<std::size_t>(k)], x, var + 1);
    return acc;
}

}  // namespace

double MultiPoly::eval_horner(std::span<const double> point) const {
    if (point.size() != vars_.size()) throw ContractViolation("evaluation point has wrong dimension");
    std::vector<std::pair<Exponent, double>> t(terms_.begin(), terms_.end());
    return horner_rec(t, point, 0);
}

MultiPoly MultiPoly::substitute(const Assignment& a) const {
    MultiPoly out(vars_);
    std::vector<std::optional<double>> fixed(vars_.size());
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (auto it = a.find(vars_[i]); it != a.end()) fixed[i] = it->second;
    for (const auto& [e, c] : terms_) {
        Exponent ne = e;
        double nc = c;
        for (std::size_t i = 0; i < e.size(); ++i)
            if (fixed[i]) {
                nc *= std::pow(*fixed[i], e[i]);
                ne[i] = 0;
            }
        out.add_term(ne, nc);
    }
    return out;
}

MultiPoly MultiPoly::derivative(std::size_t var) const {
    MultiPoly out(vars_);
    for (const auto& [e, c] : terms_) {
        if (e[var] == 0) continue;
        Exponent ne = e;
        --ne[var];
        out.add_term(ne, c * e[var]);
    }
    return out;
}

MultiPoly MultiPoly::pruned(double tol) const {
    double scale = 0.0;
    for (const auto& [e, c] : terms_) scale = std::max(scale, std::abs(c));
    MultiPoly out(vars_);
    for (const auto& [e, c] : terms_)
        if (std::abs(c) > tol * scale) out.terms_.emplace(e, c);
    return out;
}

MultiPoly MultiPoly::operator-() const {
    MultiPoly out = *this;
    for (auto& [e, c] : out.terms_) c = -c;
    return out;
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    align_with(o);
    const MultiPoly& rhs = (o.vars_ == vars_) ? o : o.with_variables(vars_);
    if (&rhs == &o) {
        for (const auto& [e, c] : o.terms_) add_term(e, c);
    } else {
        for (const auto& [e, c] : rhs.terms_) add_term(e, c);
    }
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) { return *this += -o; }

MultiPoly& MultiPoly::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    const auto vars = merge_variables(a.vars_, b.vars_);
    const MultiPoly x = a.vars_ == vars ? a : a.with_variables(vars);
    const MultiPoly y = b.vars_ == vars ? b : b.with_variables(vars);
    MultiPoly out(vars);
    Exponent e(vars.size());
    for (const auto& [ea, ca] : x.terms_)
        for (const auto& [eb, cb] : y.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    return out;
}

double MultiPoly::max_coeff_diff(const MultiPoly& a, const MultiPoly& b) {
    const MultiPoly d = a - b;
    double m = 0.0;
    for (const auto& [e, c] : d.terms_) m = std::max(m, std::abs(c));
    return m;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    os.precision(12);
    bool first = true;
    // Highest degree first reads more naturally.
    std::vector<std::pair<Exponent, double>> t(terms_.begin(), terms_.end());
    std::stable_sort(t.begin(), t.end(), [](const auto& l, const auto& r) {
        return std::accumulate(l.first.begin(), l.first.end(), 0) > std::accumulate(r.first.begin(), r.first.end(), 0);
    });
    for (const auto& [e, c] : t) {
        const bool is_const = std::all_of(e.begin(), e.end(), [](int k) { return k == 0; });
        double mag = std::abs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        first = false;
        bool wrote = false;
        if (mag != 1.0 || is_const) {
            os << mag;
            wrote = true;
        }
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            os << (wrote ? "*" : "") << vars_[i];
            if (e[i] > 1) os << "^" << e[i];
            wrote = true;
        }
    }
    return os.str();
}

}  // namespace crnerg
