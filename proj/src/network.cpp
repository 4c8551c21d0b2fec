#include "crnerg/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "crnerg/error.hpp"

namespace crnerg {

// ---------------------------------------------------------------------------
// RateParam
// ---------------------------------------------------------------------------

bool RateParam::is_point() const { return point_value().has_value(); }

std::optional<double> RateParam::point_value() const {
    if (const auto* f = std::get_if<Fixed>(&kind)) return f->value;
    if (const auto* i = std::get_if<Interval>(&kind); i && i->lo == i->hi) return i->lo;
    return std::nullopt;
}

std::optional<double> RateParam::lower() const {
    if (const auto* f = std::get_if<Fixed>(&kind)) return f->value;
    if (const auto* i = std::get_if<Interval>(&kind)) return i->lo;
    return std::nullopt;
}

std::optional<double> RateParam::upper() const {
    if (const auto* f = std::get_if<Fixed>(&kind)) return f->value;
    if (const auto* i = std::get_if<Interval>(&kind)) return i->hi;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Reaction
// ---------------------------------------------------------------------------

Complex normalize_complex(Complex c) {
    std::sort(c.begin(), c.end(),
              [](const ComplexTerm& a, const ComplexTerm& b) { return a.species < b.species; });
    Complex out;
    for (const auto& t : c) {
        if (t.multiplicity == 0) continue;
        if (!out.empty() && out.back().species == t.species)
            out.back().multiplicity += t.multiplicity;
        else
            out.push_back(t);
    }
    return out;
}

int Reaction::order() const {
    int n = 0;
    for (const auto& t : reactants) n += t.multiplicity;
    return n;
}

std::size_t Reaction::sole_reactant() const {
    if (order() != 1) throw ContractViolation("sole_reactant() on a reaction of order " + std::to_string(order()));
    return reactants.front().species;
}

std::vector<int> Reaction::stoichiometry(std::size_t num_species) const {
    std::vector<int> z(num_species, 0);
    for (const auto& t : products) z.at(t.species) += t.multiplicity;
    for (const auto& t : reactants) z.at(t.species) -= t.multiplicity;
    return z;
}

std::vector<int> Reaction::reactant_vector(std::size_t num_species) const {
    std::vector<int> z(num_species, 0);
    for (const auto& t : reactants) z.at(t.species) += t.multiplicity;
    return z;
}

// ---------------------------------------------------------------------------
// ReactionNetwork
// ---------------------------------------------------------------------------

std::size_t ReactionNetwork::add_species(const std::string& name) {
    species_.push_back(name);
    return species_.size() - 1;
}

void ReactionNetwork::add_param(RateParam p) { params_.push_back(std::move(p)); }

void ReactionNetwork::add_reaction(Reaction r) {
    r.reactants = normalize_complex(std::move(r.reactants));
    r.products = normalize_complex(std::move(r.products));
    reactions_.push_back(std::move(r));
}

std::optional<std::size_t> ReactionNetwork::species_index(const std::string& name) const {
    auto it = std::find(species_.begin(), species_.end(), name);
    if (it == species_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - species_.begin());
}

const RateParam* ReactionNetwork::find_param(const std::string& name) const {
    for (const auto& p : params_)
        if (p.name == name) return &p;
    return nullptr;
}

const RateParam& ReactionNetwork::param(const std::string& name) const {
    const auto* p = find_param(name);
    if (!p) throw MissingParameter("unknown rate parameter '" + name + "'");
    return *p;
}

bool ReactionNetwork::has_free_params() const {
    return std::any_of(params_.begin(), params_.end(), [](const RateParam& p) { return p.is_free(); });
}

bool ReactionNetwork::has_interval_params() const {
    return std::any_of(params_.begin(), params_.end(), [](const RateParam& p) {
        return std::holds_alternative<Interval>(p.kind) && !p.is_point();
    });
}

bool ReactionNetwork::has_bimolecular() const {
    return std::any_of(reactions_.begin(), reactions_.end(), [](const Reaction& r) { return r.order() == 2; });
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

const char* to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::EmptySpecies: return "EmptySpecies";
        case ViolationKind::UnsupportedOrder: return "UnsupportedOrder";
        case ViolationKind::MissingParameter: return "MissingParameter";
        case ViolationKind::NonpositiveRate: return "NonpositiveRate";
        case ViolationKind::BadInterval: return "BadInterval";
        case ViolationKind::DuplicateParameter: return "DuplicateParameter";
        case ViolationKind::DuplicateSpecies: return "DuplicateSpecies";
        case ViolationKind::BadSpeciesIndex: return "BadSpeciesIndex";
    }
    return "?";
}

std::vector<Violation> validate_network(const ReactionNetwork& net) {
    std::vector<Violation> out;
    if (net.species().empty())
        out.push_back({ViolationKind::EmptySpecies, "network declares no species", std::nullopt});

    std::set<std::string> seen;
    for (const auto& s : net.species())
        if (!seen.insert(s).second)
            out.push_back({ViolationKind::DuplicateSpecies, "species '" + s + "' declared twice", std::nullopt});

    seen.clear();
    for (const auto& p : net.params()) {
        if (!seen.insert(p.name).second)
            out.push_back({ViolationKind::DuplicateParameter, "parameter '" + p.name + "' declared twice", std::nullopt});
        if (const auto* f = std::get_if<Fixed>(&p.kind); f && !(f->value > 0.0))
            out.push_back({ViolationKind::NonpositiveRate, "parameter '" + p.name + "' must be positive", std::nullopt});
        if (const auto* i = std::get_if<Interval>(&p.kind);
            i && !(i->lo >= 0.0 && i->lo <= i->hi && i->hi > 0.0 && std::isfinite(i->hi)))
            out.push_back({ViolationKind::BadInterval, "parameter '" + p.name + "' needs 0 <= lo <= hi < inf, hi > 0",
                           std::nullopt});
    }

    const auto d = net.num_species();
    for (std::size_t k = 0; k < net.num_reactions(); ++k) {
        const auto& r = net.reactions()[k];
        const auto tag = "reaction " + std::to_string(k + 1);
        if (r.order() > 2)
            out.push_back({ViolationKind::UnsupportedOrder,
                           tag + " has order " + std::to_string(r.order()) + " (at most 2 supported)", k});
        if (!net.has_param(r.rate))
            out.push_back({ViolationKind::MissingParameter, tag + " uses undeclared parameter '" + r.rate + "'", k});
        for (const auto* side : {&r.reactants, &r.products})
            for (const auto& t : *side)
                if (t.species >= d || t.multiplicity < 0)
                    out.push_back({ViolationKind::BadSpeciesIndex, tag + " references an invalid species", k});
    }
    return out;
}

void require_valid(const ReactionNetwork& net) {
    const auto v = validate_network(net);
    if (v.empty()) return;
    const auto& first = v.front();
    switch (first.kind) {
        case ViolationKind::UnsupportedOrder: throw UnsupportedOrder(first.message);
        case ViolationKind::MissingParameter: throw MissingParameter(first.message);
        default: throw Error(std::string(to_string(first.kind)) + ": " + first.message);
    }
}

// ---------------------------------------------------------------------------
// Stoichiometry
// ---------------------------------------------------------------------------

IntMatrix Stoichiometry::concatenated() const {
    const auto rows = zeroth.rows();
    IntMatrix s(rows, zeroth.cols() + first.cols() + second.cols());
    s << zeroth, first, second;
    return s;
}

namespace {

IntMatrix columns_of(const ReactionNetwork& net, const std::vector<std::size_t>& idx) {
    const auto d = net.num_species();
    IntMatrix m = IntMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t c = 0; c < idx.size(); ++c) {
        const auto z = net.reactions()[idx[c]].stoichiometry(d);
        for (std::size_t i = 0; i < d; ++i) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = z[i];
    }
    return m;
}

}  // namespace

Stoichiometry build_stoichiometry(const ReactionNetwork& net) {
    Stoichiometry s;
    for (std::size_t k = 0; k < net.num_reactions(); ++k) {
        switch (net.reactions()[k].order()) {
            case 0: s.zeroth_index.push_back(k); break;
            case 1: s.first_index.push_back(k); break;
            case 2: s.second_index.push_back(k); break;
            default:
                throw UnsupportedOrder("reaction " + std::to_string(k + 1) + " has order " +
                                       std::to_string(net.reactions()[k].order()));
        }
    }
    s.zeroth = columns_of(net, s.zeroth_index);
    s.first = columns_of(net, s.first_index);
    s.second = columns_of(net, s.second_index);
    return s;
}

IntMatrix stoichiometric_matrix(const ReactionNetwork& net) {
    std::vector<std::size_t> all(net.num_reactions());
    for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
    return columns_of(net, all);
}

// ---------------------------------------------------------------------------
// Classification
// ---------------------------------------------------------------------------

const char* to_string(UniKind k) {
    switch (k) {
        case UniKind::Degradation: return "degradation";
        case UniKind::Catalytic: return "catalytic";
        case UniKind::Conversion: return "conversion";
    }
    return "?";
}

UniKind classify_column(const std::vector<int>& column) {
    int negatives = 0;
    int positives = 0;
    for (int z : column) {
        negatives += z < 0;
        positives += z > 0;
    }
    if (positives == 0) return UniKind::Degradation;  // includes the zero column
    if (negatives == 0) return UniKind::Catalytic;
    if (negatives == 1) return UniKind::Conversion;
    throw ClassificationError("first-order column with " + std::to_string(negatives) + " negative entries");
}

std::optional<UniKind> UniClass::kind_of(std::size_t reaction) const {
    auto in = [reaction](const std::vector<std::size_t>& v) {
        return std::find(v.begin(), v.end(), reaction) != v.end();
    };
    if (in(dg)) return UniKind::Degradation;
    if (in(ct)) return UniKind::Catalytic;
    if (in(cv)) return UniKind::Conversion;
    return std::nullopt;
}

UniClass classify_unimolecular(const ReactionNetwork& net) {
    UniClass c;
    const auto d = net.num_species();
    for (std::size_t k = 0; k < net.num_reactions(); ++k) {
        const auto& r = net.reactions()[k];
        if (r.order() != 1) continue;
        switch (classify_column(r.stoichiometry(d))) {
            case UniKind::Degradation: c.dg.push_back(k); break;
            case UniKind::Catalytic: c.ct.push_back(k); break;
            case UniKind::Conversion: c.cv.push_back(k); break;
        }
    }
    return c;
}

}  // namespace crnerg
