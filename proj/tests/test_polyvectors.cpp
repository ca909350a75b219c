#include <catch2/catch_amalgamated.hpp>

#include "duflo/polyvector.hpp"
#include "test_helpers.hpp"

using namespace duflo;

namespace {

PolyVector coord_field(int dim, int i) {
    return PolyVector::basis(dim, {i}, Polynomial::constant(dim, 1));
}

} // namespace

TEST_CASE("wedge product", "[polyvectors]") {
    const int dim = 3;
    auto d1 = coord_field(dim, 0), d2 = coord_field(dim, 1);
    auto w = wedge(d1, d2);
    REQUIRE(w.degree == 2);
    CHECK(w.comps.at({0, 1}) == Polynomial::constant(dim, 1));
    CHECK(wedge(d2, d1) == -w);
    CHECK(wedge(d1, d1).is_zero());

    std::mt19937 rng(17);
    auto a = testing::random_polyvector(dim, 1, 2, rng);
    auto b = testing::random_polyvector(dim, 2, 2, rng);
    // graded commutativity of the exterior product
    CHECK(wedge(a, b) == ((1 * 2) % 2 == 0 ? wedge(b, a) : -wedge(b, a)));
}

TEST_CASE("tensor expansion carries sign over p!", "[polyvectors]") {
    const int dim = 3;
    auto w12 = wedge(coord_field(dim, 0), coord_field(dim, 1));
    auto t = to_tensor(w12);
    REQUIRE(t.size() == 2);
    CHECK(t.at({0, 1}) == Polynomial::constant(dim, Scalar(1, 2)));
    CHECK(t.at({1, 0}) == Polynomial::constant(dim, Scalar(-1, 2)));

    auto v = coord_field(dim, 2);
    auto tv = to_tensor(v);
    REQUIRE(tv.size() == 1);
    CHECK(tv.at({2}) == Polynomial::constant(dim, 1));

    auto w123 = wedge(w12, coord_field(dim, 2));
    auto t3 = to_tensor(w123);
    REQUIRE(t3.size() == 6);
    for (const auto& [key, poly] : t3) {
        REQUIRE(poly.terms.size() == 1);
        CHECK((poly.terms.begin()->second == Scalar(1, 6) || poly.terms.begin()->second == Scalar(-1, 6)));
    }
}

TEST_CASE("schouten on simple inputs", "[polyvectors]") {
    const int dim = 2;
    // [x2 d1, x1] = x2
    PolyVector xi = PolyVector::basis(dim, {0}, Polynomial::coordinate(dim, 1));
    PolyVector h = PolyVector::from_polynomial(Polynomial::coordinate(dim, 0));
    auto lie = schouten(xi, h);
    REQUIRE(lie.degree == 0);
    CHECK(lie.comps.at({}) == Polynomial::coordinate(dim, 1));

    // constant fields commute
    CHECK(schouten(coord_field(dim, 0), coord_field(dim, 1)).is_zero());

    // [gamma, gamma] = 0 for aff1
    auto gamma = kirillov_kostant(catalog("aff1"));
    CHECK(schouten(gamma, gamma).is_zero());
}

TEST_CASE("jacobi identity is equivalent to [gamma,gamma] = 0", "[polyvectors]") {
    for (const auto& name : catalog_names())
        CHECK(schouten(kirillov_kostant(catalog(name)), kirillov_kostant(catalog(name))).is_zero());

    // perturbed sl2 violates Jacobi, and its bivector detects it
    LieAlgebra bad("bad", {"e", "h", "f"});
    std::vector<Scalar> c1(3, Scalar(0)), c2(3, Scalar(0)), c3(3, Scalar(0));
    c1[1] = 1;
    c2[0] = 3;
    c3[2] = -2;
    bad.set_bracket(0, 2, c1);
    bad.set_bracket(1, 0, c2);
    bad.set_bracket(1, 2, c3);
    REQUIRE_FALSE(validate(bad).ok);
    auto gamma = kirillov_kostant(bad);
    CHECK_FALSE(schouten(gamma, gamma).is_zero());
}

TEST_CASE("kirillov_kostant coefficients", "[polyvectors]") {
    SECTION("abelian is zero") { CHECK(kirillov_kostant(catalog("abelian2")).is_zero()); }
    SECTION("aff1 is x2 d1^d2") {
        auto gamma = kirillov_kostant(catalog("aff1"));
        REQUIRE(gamma.comps.size() == 1);
        CHECK(gamma.comps.at({0, 1}) == Polynomial::coordinate(2, 1));
    }
    SECTION("sl2 matches the bracket table") {
        auto gamma = kirillov_kostant(catalog("sl2"));
        CHECK(gamma.comps.at({0, 1}) == Scalar(-2) * Polynomial::coordinate(3, 0));
        CHECK(gamma.comps.at({0, 2}) == Polynomial::coordinate(3, 1));
        CHECK(gamma.comps.at({1, 2}) == Scalar(-2) * Polynomial::coordinate(3, 2));
    }
}

TEST_CASE("poisson differential on known elements", "[polyvectors]") {
    SECTION("abelian kills everything") {
        std::mt19937 rng(2);
        auto alg = catalog("abelian2");
        for (int p = 0; p <= 2; ++p)
            CHECK(poisson_differential(alg, testing::random_polyvector(2, p, 3, rng)).is_zero());
    }
    SECTION("sl2 casimir is closed") {
        auto alg = catalog("sl2");
        Polynomial casimir(3);
        casimir.add_term({1, 0, 1}, 1);
        casimir.add_term({0, 2, 0}, Scalar(1, 4));
        CHECK(poisson_differential(alg, PolyVector::from_polynomial(casimir)).is_zero());
    }
    SECTION("aff1 coordinate gives its hamiltonian field") {
        auto alg = catalog("aff1");
        auto d = poisson_differential(alg, PolyVector::from_polynomial(Polynomial::coordinate(2, 1)));
        REQUIRE(d.degree == 1);
        CHECK(d.comps.at({0}) == Polynomial::coordinate(2, 1));  // x2 d1
    }
}

TEST_CASE("schouten graded properties", "[polyvectors]") {
    std::mt19937 rng(41);
    const int dim = 3;
    for (int pa = 0; pa <= 3; ++pa)
        for (int pb = 0; pb <= 3; ++pb) {
            auto a = testing::random_polyvector(dim, pa, 2, rng);
            auto b = testing::random_polyvector(dim, pb, 2, rng);
            const int sign = (((pa - 1) * (pb - 1)) % 2 == 0) ? -1 : 1;
            CHECK(schouten(a, b) == Scalar(sign) * schouten(b, a));
        }
    // graded Jacobi: [a,[b,c]] = [[a,b],c] + (-1)^{(|a|-1)(|b|-1)} [b,[a,c]]
    for (int trial = 0; trial < 10; ++trial) {
        int pa = trial % 3, pb = (trial / 3) % 3, pc = 1 + trial % 2;
        auto a = testing::random_polyvector(dim, pa, 1, rng);
        auto b = testing::random_polyvector(dim, pb, 1, rng);
        auto c = testing::random_polyvector(dim, pc, 1, rng);
        const int sign = (((pa - 1) * (pb - 1)) % 2 == 0) ? 1 : -1;
        CHECK(schouten(a, schouten(b, c)) ==
              schouten(schouten(a, b), c) + Scalar(sign) * schouten(b, schouten(a, c)));
    }
}

TEST_CASE("poisson differential squares to zero on slice bases", "[polyvectors]") {
    for (const auto& name : catalog_names()) {
        const LieAlgebra alg = catalog(name);
        for (int p = 0; p <= alg.dim; ++p)
            for (const auto& key : wedge_keys(alg.dim, p))
                for (const auto& e : monomial_basis_upto(alg.dim, 4)) {
                    auto v = PolyVector::basis(alg.dim, key, Polynomial::monomial(alg.dim, e, 1));
                    CHECK(poisson_differential(alg, poisson_differential(alg, v)).is_zero());
                }
    }
}

TEST_CASE("poisson differential is a graded derivation of wedge", "[polyvectors]") {
    std::mt19937 rng(19);
    for (const auto& name : {"aff1", "sl2", "heisenberg3"}) {
        const LieAlgebra alg = catalog(name);
        for (int pa = 0; pa <= alg.dim; ++pa)
            for (int pb = 0; pb <= alg.dim; ++pb) {
                auto a = testing::random_polyvector(alg.dim, pa, 2, rng);
                auto b = testing::random_polyvector(alg.dim, pb, 2, rng);
                auto lhs = poisson_differential(alg, wedge(a, b));
                auto rhs = wedge(poisson_differential(alg, a), b) +
                           Scalar(pa % 2 == 0 ? 1 : -1) * wedge(a, poisson_differential(alg, b));
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("poisson differential preserves coefficient degree", "[polyvectors]") {
    std::mt19937 rng(23);
    const LieAlgebra alg = catalog("sl2");
    for (int p = 0; p <= 2; ++p)
        for (int d = 0; d <= 3; ++d)
            for (const auto& key : wedge_keys(3, p))
                for (const auto& e : monomial_basis_exact(3, d)) {
                    auto v = PolyVector::basis(3, key, Polynomial::monomial(3, e, 1));
                    auto dv = poisson_differential(alg, v);
                    for (const auto& [k, poly] : dv.comps) CHECK(poly.total_degree() == d);
                }
}

TEST_CASE("polyvector rendering", "[polyvectors]") {
    auto gamma = kirillov_kostant(catalog("aff1"));
    CHECK(gamma.str({"e1", "e2"}) == "(e2) d_e1^d_e2");
    CHECK(PolyVector::zero(2, 1).str({"e1", "e2"}) == "0");
}
