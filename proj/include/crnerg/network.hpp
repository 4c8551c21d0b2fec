#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace crnerg {

using IntMatrix = Eigen::MatrixXi;

// ---------------------------------------------------------------------------
// Rate parameters
// ---------------------------------------------------------------------------

struct Fixed {
    double value = 1.0;
    bool operator==(const Fixed&) const = default;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    bool operator==(const Interval&) const = default;
};

/// Structurally unknown: any positive value.
struct Free {
    bool operator==(const Free&) const = default;
};

using RateKind = std::variant<Fixed, Interval, Free>;

struct RateParam {
    std::string name;
    RateKind kind;

    bool operator==(const RateParam&) const = default;

    bool is_free() const { return std::holds_alternative<Free>(kind); }
    /// Fixed, or an interval with lo == hi.
    bool is_point() const;
    std::optional<double> point_value() const;
    std::optional<double> lower() const;
    std::optional<double> upper() const;
};

// ---------------------------------------------------------------------------
// Reactions and networks
// ---------------------------------------------------------------------------

struct ComplexTerm {
    std::size_t species = 0;
    int multiplicity = 1;
    bool operator==(const ComplexTerm&) const = default;
};

/// Terms sorted by species index, merged, multiplicities > 0. Empty = the empty complex.
using Complex = std::vector<ComplexTerm>;

Complex normalize_complex(Complex c);

struct Reaction {
    Complex reactants;
    Complex products;
    std::string rate;

    bool operator==(const Reaction&) const = default;

    int order() const;
    /// Species index of the reactant of a first-order reaction.
    std::size_t sole_reactant() const;
    std::vector<int> stoichiometry(std::size_t num_species) const;
    std::vector<int> reactant_vector(std::size_t num_species) const;
};

class ReactionNetwork {
public:
    ReactionNetwork() = default;

    std::size_t add_species(const std::string& name);
    void add_param(RateParam p);
    void add_reaction(Reaction r);

    const std::vector<std::string>& species() const { return species_; }
    const std::vector<Reaction>& reactions() const { return reactions_; }
    const std::vector<RateParam>& params() const { return params_; }

    std::size_t num_species() const { return species_.size(); }
    std::size_t num_reactions() const { return reactions_.size(); }

    std::optional<std::size_t> species_index(const std::string& name) const;
    const RateParam* find_param(const std::string& name) const;
    const RateParam& param(const std::string& name) const;
    bool has_param(const std::string& name) const { return find_param(name) != nullptr; }

    bool has_free_params() const;
    bool has_interval_params() const;
    bool has_bimolecular() const;

    bool operator==(const ReactionNetwork&) const = default;

private:
    std::vector<std::string> species_;
    std::vector<Reaction> reactions_;
    std::vector<RateParam> params_;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

enum class ViolationKind {
    EmptySpecies,
    UnsupportedOrder,
    MissingParameter,
    NonpositiveRate,
    BadInterval,
    DuplicateParameter,
    DuplicateSpecies,
    BadSpeciesIndex,
};

const char* to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::string message;
    std::optional<std::size_t> reaction;
};

/// Never throws; an empty result means the network is well formed.
std::vector<Violation> validate_network(const ReactionNetwork& net);

/// Throws the typed error matching the first violation, if any.
void require_valid(const ReactionNetwork& net);

// ---------------------------------------------------------------------------
// Stoichiometry and first-order classification
// ---------------------------------------------------------------------------

/// S partitioned by reactant order. Columns keep the original reaction order
/// within each block; the *_index vectors map columns back to reactions.
struct Stoichiometry {
    IntMatrix zeroth;
    IntMatrix first;
    IntMatrix second;
    std::vector<std::size_t> zeroth_index;
    std::vector<std::size_t> first_index;
    std::vector<std::size_t> second_index;

    /// [S0 Su Sb] concatenated.
    IntMatrix concatenated() const;
};

Stoichiometry build_stoichiometry(const ReactionNetwork& net);

/// Unpartitioned d x K matrix, one column per reaction.
IntMatrix stoichiometric_matrix(const ReactionNetwork& net);

enum class UniKind { Degradation, Catalytic, Conversion };

const char* to_string(UniKind k);

/// Sign-pattern class of a single first-order stoichiometric column.
/// Zero columns count as degradation.
UniKind classify_column(const std::vector<int>& column);

/// Partition of first-order reactions (indices into reactions()).
struct UniClass {
    std::vector<std::size_t> dg;
    std::vector<std::size_t> ct;
    std::vector<std::size_t> cv;

    std::optional<UniKind> kind_of(std::size_t reaction) const;
};

UniClass classify_unimolecular(const ReactionNetwork& net);

}  // namespace crnerg
