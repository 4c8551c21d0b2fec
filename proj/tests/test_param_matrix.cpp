#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "crnerg/error.hpp"
#include "crnerg/param_matrix.hpp"
#include "crnerg/spectral.hpp"
#include "support.hpp"

using namespace crnerg;
using namespace crnerg::testing;

namespace {

Assignment ones(const std::vector<std::string>& vars) {
    Assignment a;
    for (const auto& v : vars) a[v] = 1.0;
    return a;
}

/// Random draw of every parameter of `m` (uniform in [lo, hi]).
Assignment draw(std::mt19937_64& rng, const std::vector<std::string>& vars, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Assignment a;
    for (const auto& v : vars) a[v] = u(rng);
    return a;
}

ParamMatrix diag(const std::string& a, const std::string& b) {
    ParamMatrix m(2, 2);
    m.add(0, 0, -1.0, a);
    m.add(1, 1, -1.0, b);
    return m;
}

}  // namespace

TEST_CASE("SIR characteristic matrix") {
    const auto A = characteristic_matrix(load("sir.crn"));
    REQUIRE(A.rows() == 3);
    const Assignment p{{"gs", 2}, {"gi", 3}, {"gr", 5}, {"kir", 7}, {"krs", 11}};
    Eigen::Matrix3d expect;
    expect << -2, 0, 11, 0, -(3 + 7), 0, 0, 7, -(5 + 11);
    CHECK(eval_matrix(A, p) == expect);
    CHECK(A.structurally_metzler());
    CHECK(A.max_degree() == 1);
}

TEST_CASE("toy model with tied rates, evaluated at ones") {
    const auto A = characteristic_matrix(load("toy_case1.crn"));
    Eigen::Matrix3d expect;
    expect << -2, 0, 1, 1, -2, 0, 0, 1, -1;
    CHECK(eval_matrix(A, ones(A.variables())) == expect);
    // k2 appears on the diagonal and below it.
    const Assignment p{{"g1", 1}, {"g2", 1}, {"k1", 1}, {"k2", 4}, {"k3", 1}};
    const auto m = eval_matrix(A, p);
    CHECK(m(0, 0) == -5);
    CHECK(m(1, 0) == 4);
}

TEST_CASE("single degradation gives [-g]") {
    const auto A = characteristic_matrix(parse_network("species: X\nparam g = 1\nreaction: X -> 0 @ g"));
    REQUIRE(A.rows() == 1);
    CHECK(A(0, 0).coeff({1}) == -1.0);
}

TEST_CASE("offset vectors") {
    const auto b1 = offset_vector(parse_network("species: X\nparam k = 2\nreaction: 0 -> X @ k"));
    CHECK(eval_matrix(b1, Assignment{{"k", 2.0}})(0, 0) == 2.0);
    const auto b0 = offset_vector(parse_network("species: X\nparam g = 1\nreaction: X -> 0 @ g"));
    CHECK(b0(0, 0).is_zero());
    const auto b2 = offset_vector(
        parse_network("species: X1\nparam k1 = 1\nparam k2 = 1\nreaction: 0 -> X1 @ k1\nreaction: 0 -> X1 @ k2"));
    CHECK(eval_matrix(b2, Assignment{{"k1", 2.0}, {"k2", 5.0}})(0, 0) == 7.0);
}

TEST_CASE("upper bound matrix of the toy model keeps only k1 symbolic") {
    const auto Ap = upper_bound_matrix(first_order_system(load("toy_robust.crn")));
    REQUIRE(Ap.variables() == std::vector<std::string>{"k1"});
    Eigen::Matrix3d expect;
    expect << -2, 0, 4, 1, -2, 0, 0, 1, -4;
    CHECK(eval_matrix(Ap, Assignment{{"k1", 4.0}}) == expect);

    SUBCASE("determinant is k1 (k2+ k3+ - g1- g2-) = -3 k1") {
        const auto det = det_poly(Ap);
        MultiPoly expect_det({"k1"});
        expect_det.add_term({1}, -3.0);
        CHECK(MultiPoly::max_coeff_diff(det, expect_det) < 1e-12);
    }
}

TEST_CASE("upper bound matrix edge cases") {
    SUBCASE("all fixed: only point values") {
        const auto Ap = upper_bound_matrix(first_order_system(load("gene_expression.crn")));
        CHECK(Ap.variables().empty());
        CHECK(Ap.max_degree() <= 0);
    }
    SUBCASE("free degradation is unbounded") {
        CHECK_THROWS_AS(upper_bound_matrix(first_order_system(load("toy_case2.crn"))), UnboundedParameter);
    }
    SUBCASE("no conversion reactions: fully numeric") {
        const auto net = parse_network("species: X, Y\nparam a in [1, 2]\nparam b in [0, 3]\n"
                                       "reaction: X -> 0 @ a\nreaction: X -> X + Y @ b\nreaction: Y -> 0 @ a\n");
        const auto Ap = upper_bound_matrix(first_order_system(net));
        CHECK(Ap.variables().empty());
        Eigen::Matrix2d expect;
        expect << -1, 0, 3, -1;
        CHECK(eval_matrix(Ap, Assignment{}) == expect);
    }
}

TEST_CASE("determinant examples") {
    ParamMatrix num(3, 3);
    const double v[3][3] = {{-2, 0, 1}, {1, -2, 0}, {0, 1, -1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) num.add(i, j, v[i][j]);
    CHECK(det_poly(num).constant_term() == doctest::Approx(-3.0).epsilon(1e-15));

    const auto d = det_poly(diag("a", "b"));
    CHECK(d.coeff({1, 1}) == 1.0);
    CHECK(d.num_terms() == 1);
}

TEST_CASE("adjugate vector examples") {
    ParamMatrix one(1, 1);
    one.add(0, 0, -1.0, "a");
    const auto v1 = adjugate_vector(one);
    REQUIRE(v1.size() == 1);
    CHECK(v1[0].is_constant());
    CHECK(v1[0].constant_term() == 1.0);

    const auto v2 = adjugate_vector(diag("a", "b"));
    CHECK(v2[0].eval(Assignment{{"a", 2.0}, {"b", 3.0}}) == 3.0);
    CHECK(v2[1].eval(Assignment{{"a", 2.0}, {"b", 3.0}}) == 2.0);
}

TEST_CASE("toy adjugate identity v^T A+ = -(-1)^d det 1^T at 20 points") {
    const auto Ap = upper_bound_matrix(first_order_system(load("toy_robust.crn")));
    const auto v = adjugate_vector(Ap);
    const auto det = det_poly(Ap);
    for (const auto& p : v) CHECK(p.total_degree() <= 2);
    std::mt19937_64 rng(3);
    for (int s = 0; s < 20; ++s) {
        const auto a = draw(rng, {"k1"}, 0.1, 10.0);
        const auto M = eval_matrix(Ap, a);
        Eigen::RowVector3d vv;
        for (int i = 0; i < 3; ++i) vv(i) = v[static_cast<std::size_t>(i)].eval(a);
        const Eigen::RowVector3d lhs = vv * M;
        const double rhs = det.eval(a);  // -(-1)^3 det = det
        for (int i = 0; i < 3; ++i) CHECK(rel_err(lhs(i), rhs) < 1e-9);
    }
}

TEST_CASE("property: det_poly and adjugate agree with numeric linear algebra (5 <= d <= 8)") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t d = 5 + static_cast<std::size_t>(trial % 4);
        const auto net = random_unimolecular(rng, d, d + 2, RateStyle::Free);
        const auto A = characteristic_matrix(net);
        const auto det = det_poly(A);
        const auto adj = adjugate(A);
        CHECK(det.total_degree() <= static_cast<int>(d));
        for (int s = 0; s < 5; ++s) {
            const auto a = draw(rng, A.variables(), 0.1, 2.0);
            const Eigen::MatrixXd M = eval_matrix(A, a);
            const double ref = M.determinant();
            CHECK(std::abs(det.eval(a) - ref) <= 1e-9 * std::max(1.0, std::abs(ref)));
            const Eigen::MatrixXd prod = eval_matrix(adj, a) * M;
            const Eigen::MatrixXd target = ref * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            CHECK((prod - target).cwiseAbs().maxCoeff() <= 1e-9 * std::max(1.0, M.cwiseAbs().maxCoeff() * std::abs(ref)));
        }
    }
}

TEST_CASE("property: characteristic matrices are Metzler at nonnegative draws; A <= A+ in the box") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const auto net = random_unimolecular(rng, 2 + rng() % 4, 4, RateStyle::Interval);
        const auto sys = first_order_system(net);
        const auto A = characteristic_matrix(sys);
        const auto Ap = upper_bound_matrix(sys);
        CHECK(A.structurally_metzler());
        for (int s = 0; s < 100; ++s) {
            Assignment a;
            for (const auto& name : A.variables()) {
                const auto& p = net.param(name);
                std::uniform_real_distribution<double> u(*p.lower(), *p.upper());
                a[name] = u(rng);
            }
            const auto M = eval_matrix(A, a);
            CHECK(is_metzler(M));
            CHECK(((eval_matrix(Ap, a) - M).array() >= -1e-12).all());
        }
    }
}
