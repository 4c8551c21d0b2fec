#include <doctest.h>

#include <random>

#include "crnerg/error.hpp"
#include "crnerg/poly.hpp"
#include "support.hpp"

using namespace crnerg;

namespace {

MultiPoly random_poly(std::mt19937_64& rng, std::size_t nvars, int degree, int terms) {
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < nvars; ++i) vars.push_back("x" + std::to_string(i));
    MultiPoly p(vars);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    for (int t = 0; t < terms; ++t) {
        Exponent e(nvars, 0);
        int budget = static_cast<int>(rng() % static_cast<unsigned>(degree + 1));
        while (budget-- > 0) ++e[rng() % nvars];
        p.add_term(e, coef(rng));
    }
    return p;
}

}  // namespace

TEST_CASE("construction keeps no zero coefficients") {
    MultiPoly p({"a", "b"});
    p.add_term({1, 0}, 2.0);
    p.add_term({1, 0}, -2.0);
    CHECK(p.is_zero());
    CHECK(p.total_degree() == -1);
    p.add_term({0, 0}, 0.0);
    CHECK(p.num_terms() == 0);
}

TEST_CASE("arithmetic merges variable lists") {
    const auto a = MultiPoly::variable("a");
    const auto b = MultiPoly::variable("b");
    const auto prod = (a + b) * (a - b);  // a^2 - b^2
    REQUIRE(prod.variables() == std::vector<std::string>{"a", "b"});
    CHECK(prod.coeff({2, 0}) == 1.0);
    CHECK(prod.coeff({0, 2}) == -1.0);
    CHECK(prod.coeff({1, 1}) == 0.0);
    CHECK(prod.total_degree() == 2);
    CHECK(prod.eval(Assignment{{"a", 3.0}, {"b", 2.0}}) == doctest::Approx(5.0));
}

TEST_CASE("evaluation with a missing variable throws") {
    const auto p = MultiPoly::variable("a") * MultiPoly::variable("b");
    CHECK_THROWS_AS(p.eval(Assignment{{"a", 1.0}}), MissingParameter);
}

TEST_CASE("substitute and derivative") {
    const auto a = MultiPoly::variable("a");
    const auto b = MultiPoly::variable("b");
    const auto p = a * a * b + 3.0 * b;
    const auto s = p.substitute({{"a", 2.0}});
    CHECK(s.eval(Assignment{{"a", 99.0}, {"b", 5.0}}) == doctest::Approx(4 * 5 + 15));
    const auto da = p.derivative(0);  // 2ab
    CHECK(da.eval(Assignment{{"a", 1.5}, {"b", 2.0}}) == doctest::Approx(6.0));
}

TEST_CASE("monomial enumeration counts") {
    CHECK(monomials_up_to(2, 2).size() == 6);
    CHECK(monomials_up_to(3, 0).size() == 1);
    CHECK(monomials_up_to(4, 3).size() == 35);
    CHECK(monomials_up_to(0, 3).size() == 1);
}

TEST_CASE("property: direct evaluation agrees with Horner within 1e-12 relative") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pt(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_poly(rng, 1 + rng() % 5, 5, 12);
        std::vector<double> x(p.variables().size());
        for (auto& v : x) v = pt(rng);
        double scale = 0.0;
        for (const auto& [e, c] : p.terms()) {
            double m = std::abs(c);
            for (std::size_t i = 0; i < e.size(); ++i) m *= std::pow(std::abs(x[i]), e[i]);
            scale += m;
        }
        CHECK(std::abs(p.eval(x) - p.eval_horner(x)) <= 1e-12 * std::max(1.0, scale));
    }
}

TEST_CASE("property: ring identities") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_poly(rng, 3, 3, 6);
        const auto q = random_poly(rng, 3, 3, 6);
        const auto r = random_poly(rng, 3, 2, 4);
        CHECK(MultiPoly::max_coeff_diff(p * (q + r), p * q + p * r) < 1e-12);
        CHECK(MultiPoly::max_coeff_diff(p * q, q * p) < 1e-12);
        CHECK((p - p).is_zero());
        if (!p.is_zero() && !q.is_zero()) CHECK((p * q).total_degree() == p.total_degree() + q.total_degree());
    }
}
