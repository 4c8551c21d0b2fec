#include <doctest.h>

#include <algorithm>
#include <random>

#include "crnerg/error.hpp"
#include "crnerg/network.hpp"
#include "support.hpp"

using namespace crnerg;
using crnerg::testing::load;

namespace {

ReactionNetwork birth_death() {
    ReactionNetwork net;
    net.add_species("X");
    net.add_param({"k", Fixed{1.0}});
    net.add_param({"g", Fixed{1.0}});
    net.add_reaction({{}, {{0, 1}}, "k"});
    net.add_reaction({{{0, 1}}, {}, "g"});
    return net;
}

bool has_kind(const std::vector<Violation>& v, ViolationKind k) {
    return std::any_of(v.begin(), v.end(), [k](const Violation& x) { return x.kind == k; });
}

}  // namespace

TEST_CASE("SIR bimolecular block is the contamination column") {
    const auto s = build_stoichiometry(load("sir.crn"));
    REQUIRE(s.second.cols() == 1);
    CHECK(s.second(0, 0) == -1);
    CHECK(s.second(1, 0) == 1);
    CHECK(s.second(2, 0) == 0);
    CHECK(s.zeroth.cols() == 1);
    CHECK(s.first.cols() == 5);
}

TEST_CASE("network without reactions gives empty blocks with d rows") {
    ReactionNetwork net;
    net.add_species("A");
    net.add_species("B");
    const auto s = build_stoichiometry(net);
    CHECK(s.zeroth.rows() == 2);
    CHECK(s.first.rows() == 2);
    CHECK(s.second.rows() == 2);
    CHECK(s.zeroth.cols() + s.first.cols() + s.second.cols() == 0);
}

TEST_CASE("birth-death stoichiometry") {
    const auto s = build_stoichiometry(birth_death());
    REQUIRE(s.zeroth.cols() == 1);
    REQUIRE(s.first.cols() == 1);
    CHECK(s.zeroth(0, 0) == 1);
    CHECK(s.first(0, 0) == -1);
    CHECK(s.second.cols() == 0);
}

TEST_CASE("third-order reactions are rejected") {
    ReactionNetwork net;
    net.add_species("X");
    net.add_param({"g", Fixed{1.0}});
    net.add_reaction({{{0, 3}}, {}, "g"});
    const auto v = validate_network(net);
    CHECK(has_kind(v, ViolationKind::UnsupportedOrder));
    CHECK_THROWS_AS(build_stoichiometry(net), UnsupportedOrder);
    CHECK_THROWS_AS(require_valid(net), UnsupportedOrder);
}

TEST_CASE("validation findings") {
    CHECK(validate_network(load("sir.crn")).empty());

    ReactionNetwork zero_rate = birth_death();
    zero_rate.add_param({"z", Fixed{0.0}});
    CHECK(has_kind(validate_network(zero_rate), ViolationKind::NonpositiveRate));

    ReactionNetwork missing = birth_death();
    missing.add_reaction({{{0, 1}}, {}, "nope"});
    CHECK(has_kind(validate_network(missing), ViolationKind::MissingParameter));

    CHECK(has_kind(validate_network(ReactionNetwork{}), ViolationKind::EmptySpecies));

    ReactionNetwork bad_interval = birth_death();
    bad_interval.add_param({"i", Interval{2.0, 1.0}});
    CHECK(has_kind(validate_network(bad_interval), ViolationKind::BadInterval));
}

TEST_CASE("classification of the worked examples") {
    SUBCASE("SIR: three degradations, two conversions") {
        const auto c = classify_unimolecular(load("sir.crn"));
        CHECK(c.dg.size() == 3);
        CHECK(c.ct.empty());
        CHECK(c.cv.size() == 2);
    }
    SUBCASE("circadian clock: 4 dg, 2 ct, 1 cv") {
        const auto c = classify_unimolecular(load("circadian.crn"));
        CHECK(c.dg.size() == 4);
        CHECK(c.ct.size() == 2);
        CHECK(c.cv.size() == 1);
    }
    SUBCASE("toy model without alpha: k2, k3 catalytic, k1 conversion") {
        const auto net = load("toy_case2.crn");
        const auto c = classify_unimolecular(net);
        CHECK(c.dg.size() == 2);
        REQUIRE(c.ct.size() == 2);
        REQUIRE(c.cv.size() == 1);
        CHECK(net.reactions()[c.cv[0]].rate == "k1");
        CHECK(net.reactions()[c.ct[0]].rate == "k2");
        CHECK(net.reactions()[c.ct[1]].rate == "k3");
    }
}

TEST_CASE("column classes") {
    CHECK(classify_column({-1, 0}) == UniKind::Degradation);
    CHECK(classify_column({0, 0}) == UniKind::Degradation);
    CHECK(classify_column({0, 1}) == UniKind::Catalytic);
    CHECK(classify_column({-1, 2}) == UniKind::Conversion);
    CHECK_THROWS_AS(classify_column({-1, -1, 1}), ClassificationError);
}

TEST_CASE("net-null reaction X -> X counts as degradation") {
    ReactionNetwork net;
    net.add_species("X");
    net.add_param({"r", Fixed{1.0}});
    net.add_reaction({{{0, 1}}, {{0, 1}}, "r"});
    const auto c = classify_unimolecular(net);
    CHECK(c.dg.size() == 1);
}

TEST_CASE("property: concatenated blocks reproduce S and partitions survive reordering") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        ReactionNetwork net;
        const int d = 1 + static_cast<int>(rng() % 4);
        for (int i = 0; i < d; ++i) net.add_species("S" + std::to_string(i));
        std::vector<Reaction> rs;
        const int K = static_cast<int>(rng() % 8);
        for (int k = 0; k < K; ++k) {
            net.add_param({"p" + std::to_string(k), Fixed{1.0}});
            Reaction r;
            const int order = static_cast<int>(rng() % 3);
            for (int o = 0; o < order; ++o) r.reactants.push_back({rng() % static_cast<unsigned>(d), 1});
            const int np = static_cast<int>(rng() % 3);
            for (int o = 0; o < np; ++o) r.products.push_back({rng() % static_cast<unsigned>(d), 1});
            r.rate = "p" + std::to_string(k);
            rs.push_back(r);
            net.add_reaction(r);
        }
        const auto s = build_stoichiometry(net);
        const auto direct = stoichiometric_matrix(net);
        const auto cat = s.concatenated();
        std::vector<std::size_t> order = s.zeroth_index;
        order.insert(order.end(), s.first_index.begin(), s.first_index.end());
        order.insert(order.end(), s.second_index.begin(), s.second_index.end());
        REQUIRE(order.size() == net.num_reactions());
        for (std::size_t c = 0; c < order.size(); ++c)
            CHECK(cat.col(static_cast<Eigen::Index>(c)) == direct.col(static_cast<Eigen::Index>(order[c])));

        // Reverse the reaction order: each reaction keeps its class.
        ReactionNetwork rev;
        for (const auto& sp : net.species()) rev.add_species(sp);
        for (const auto& p : net.params()) rev.add_param(p);
        for (auto it = rs.rbegin(); it != rs.rend(); ++it) rev.add_reaction(*it);
        const auto a = classify_unimolecular(net);
        const auto b = classify_unimolecular(rev);
        const auto flip = [&](std::size_t k) { return net.num_reactions() - 1 - k; };
        for (std::size_t k : a.dg) CHECK(b.kind_of(flip(k)) == UniKind::Degradation);
        for (std::size_t k : a.ct) CHECK(b.kind_of(flip(k)) == UniKind::Catalytic);
        for (std::size_t k : a.cv) CHECK(b.kind_of(flip(k)) == UniKind::Conversion);
    }
}
