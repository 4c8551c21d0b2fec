#include <doctest.h>

#include "crnerg/error.hpp"
#include "crnerg/netparse.hpp"
#include "support.hpp"

using namespace crnerg;
using crnerg::testing::load;

namespace {

/// Location of the ParseError thrown by `text`, or {0, 0} when none is thrown.
std::pair<std::size_t, std::size_t> error_at(const std::string& text) {
    try {
        parse_network(text);
    } catch (const ParseError& e) {
        return {e.line(), e.column()};
    }
    return {0, 0};
}

}  // namespace

TEST_CASE("minimal document") {
    const auto net = parse_network("species: X\nparam g = 1.0\nreaction: X -> 0 @ g");
    REQUIRE(net.num_species() == 1);
    REQUIRE(net.num_reactions() == 1);
    CHECK(net.reactions()[0].order() == 1);
    const auto c = classify_unimolecular(net);
    CHECK(c.dg.size() == 1);
}

TEST_CASE("SIR document") {
    const auto net = load("sir.crn");
    CHECK(net.num_species() == 3);
    CHECK(net.num_reactions() == 7);
    CHECK(net.has_free_params());
    CHECK(net.has_bimolecular());
    CHECK(net.param("gs").is_free());
}

TEST_CASE("parameter forms") {
    const auto net = parse_network("species: X\nparam k in [0.5, 2.0]\nparam f free\nparam h = free\nparam c = 3\n");
    const auto* k = std::get_if<Interval>(&net.param("k").kind);
    REQUIRE(k != nullptr);
    CHECK(k->lo == 0.5);
    CHECK(k->hi == 2.0);
    CHECK(net.param("f").is_free());
    CHECK(net.param("h").is_free());
    CHECK(net.param("c").point_value() == 3.0);
}

TEST_CASE("complexes: multiplicity, repetition and the empty set") {
    const auto net = parse_network(
        "species: X, Y\nparam a = 1\nreaction: 2 X -> 0 @ a\nreaction: X + X -> Y @ a\nreaction: ∅ -> X + Y @ a\n");
    CHECK(net.reactions()[0] == net.reactions()[1 - 1]);
    CHECK(net.reactions()[0].reactants == net.reactions()[1].reactants);
    CHECK(net.reactions()[0].order() == 2);
    CHECK(net.reactions()[2].order() == 0);
    CHECK(net.reactions()[2].products.size() == 2);
}

TEST_CASE("comments and blank lines are ignored; unicode species names allowed") {
    const auto net = parse_network("# header\n\nspecies: Zα, B # trailing\nparam k = 2 # note\nreaction: Zα -> B @ k\n");
    CHECK(net.species()[0] == "Zα");
    CHECK(net.num_reactions() == 1);
}

TEST_CASE("errors carry locations") {
    CHECK(error_at("species: X\nparam g = 1\nreaction: Y -> 0 @ g\n").first == 3);
    CHECK(error_at("species: X\nparam g = 1\nparam g = 2\n").first == 3);
    CHECK(error_at("species: X\nparam g = 1\nreaction: 3 X -> 0 @ g\n").first == 3);
    CHECK(error_at("species: X\nreaction: X -> 0 @ nope\n").first == 2);
    CHECK(error_at("species: X\nparam g = 0\n").first == 2);
    CHECK(error_at("species: X\nparam g in [2, 1]\n").first == 2);
    CHECK(error_at("species: X\nbogus line\n").first == 2);
    CHECK(error_at("species: X\nparam g = 1\nreaction: X 0 @ g\n").first == 3);
    const auto [line, col] = error_at("species: X\nparam g = 1\nreaction: X -> 0 @ g extra\n");
    CHECK(line == 3);
    CHECK(col > 1);
}

TEST_CASE("round trip parse(serialize(n)) == n") {
    for (const char* f : {"sir.crn", "sir_interval.crn", "circadian.crn", "toy_case1.crn", "toy_case2.crn",
                          "toy_robust.crn", "gene_expression.crn", "birth_death.crn", "empty.crn"}) {
        CAPTURE(f);
        const auto net = load(f);
        CHECK(parse_network(serialize_network(net)) == net);
    }
}

TEST_CASE("serialization details") {
    CHECK(serialize_network(ReactionNetwork{}).rfind("species:", 0) == 0);
    const auto text = serialize_network(parse_network("species: X\nparam x free\n"));
    CHECK(text.find("param x free") != std::string::npos);
}
