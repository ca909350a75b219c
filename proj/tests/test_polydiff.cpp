#include <catch2/catch_amalgamated.hpp>

#include "duflo/polydiff.hpp"
#include "test_helpers.hpp"

using namespace duflo;

TEST_CASE("composition of polydifferential operators", "[polydiff]") {
    const int dim = 2;
    const PolyDiffOp mu = PolyDiffOp::multiplication(dim);
    SECTION("mu o mu vanishes (associativity of multiplication)") {
        CHECK(compose(mu, mu).is_zero());
    }
    SECTION("derivation composed with mu is the leibniz expansion") {
        PolyDiffOp d1(dim, 1);
        d1.add_term({{1, 0}}, Polynomial::constant(dim, 1));
        auto c = compose(d1, mu);
        // (f,g) -> d1(fg) = d1(f) g + f d1(g)
        std::mt19937 rng(3);
        auto f = testing::random_polynomial(dim, 3, rng);
        auto g = testing::random_polynomial(dim, 3, rng);
        CHECK(c.apply({f, g}) == f.derivative(0) * g + f * g.derivative(0));
        CHECK(c.arity == 2);
    }
    SECTION("arity bookkeeping") {
        std::mt19937 rng(9);
        auto a = testing::random_op(dim, 2, 1, 1, rng);
        auto b = testing::random_op(dim, 3, 1, 1, rng);
        CHECK(compose(a, b).arity == 4);
    }
    SECTION("composition matches pointwise evaluation") {
        std::mt19937 rng(27);
        auto a = testing::random_op(dim, 2, 2, 2, rng);
        auto b = testing::random_op(dim, 2, 2, 2, rng);
        auto c = compose(a, b);
        std::vector<Polynomial> args;
        for (int t = 0; t < 3; ++t) args.push_back(testing::random_polynomial(dim, 2, rng));
        Polynomial direct(dim);
        for (int j = 0; j < 2; ++j) {
            const int sign = ((2 - 1) * j) % 2 == 0 ? 1 : -1;
            std::vector<Polynomial> outer;
            for (int t = 0; t < j; ++t) outer.push_back(args[static_cast<std::size_t>(t)]);
            outer.push_back(b.apply({args[static_cast<std::size_t>(j)], args[static_cast<std::size_t>(j + 1)]}));
            for (int t = j + 2; t < 3; ++t) outer.push_back(args[static_cast<std::size_t>(t)]);
            direct += Scalar(sign) * a.apply(outer);
        }
        CHECK(c.apply(args) == direct);
    }
}

TEST_CASE("gerstenhaber bracket", "[polydiff]") {
    const int dim = 2;
    const PolyDiffOp mu = PolyDiffOp::multiplication(dim);
    SECTION("[mu,mu] = 0") { CHECK(gerstenhaber(mu, mu).is_zero()); }
    SECTION("derivations are closed: [D, mu] = 0 gives dD = 0") {
        PolyDiffOp d(dim, 1);
        d.add_term({{0, 1}}, Polynomial::coordinate(dim, 0));
        CHECK(hochschild_differential(d).is_zero());
    }
    SECTION("identity operator is not a cocycle") {
        auto d_id = hochschild_differential(PolyDiffOp::identity_op(dim));
        CHECK_FALSE(d_id.is_zero());
        CHECK(d_id.arity == 2);
        // dA = -[mu, id] = -mu here: (f,g) -> -fg
        std::mt19937 rng(4);
        auto f = testing::random_polynomial(dim, 2, rng);
        auto g = testing::random_polynomial(dim, 2, rng);
        CHECK(d_id.apply({f, g}) == -(f * g));
    }
    SECTION("graded antisymmetry") {
        std::mt19937 rng(8);
        for (int ma = 1; ma <= 3; ++ma)
            for (int mb = 1; mb <= 3; ++mb) {
                auto a = testing::random_op(dim, ma, 1, 1, rng);
                auto b = testing::random_op(dim, mb, 1, 1, rng);
                const int sign = ((ma - 1) * (mb - 1)) % 2 == 0 ? -1 : 1;
                CHECK(gerstenhaber(a, b) == Scalar(sign) * gerstenhaber(b, a));
            }
    }
}

TEST_CASE("hochschild differential squares to zero", "[polydiff]") {
    std::mt19937 rng(15);
    for (int arity = 1; arity <= 3; ++arity)
        for (int trial = 0; trial < 4; ++trial) {
            auto a = testing::random_op(2, arity, 2, 2, rng);
            CHECK(hochschild_differential(hochschild_differential(a)).is_zero());
        }
}

TEST_CASE("hkr map", "[polydiff]") {
    const int dim = 3;
    SECTION("bivector gives the halved antisymmetric biderivation") {
        PolyVector a(dim, 2);
        a.add_term({0, 1}, Polynomial::constant(dim, 1));
        auto op = hkr(a);
        std::mt19937 rng(2);
        auto f = testing::random_polynomial(dim, 3, rng);
        auto g = testing::random_polynomial(dim, 3, rng);
        auto expect = Scalar(1, 2) * (f.derivative(0) * g.derivative(1) - f.derivative(1) * g.derivative(0));
        CHECK(op.apply({f, g}) == expect);
    }
    SECTION("degree-0 polyvector becomes a 0-ary constant") {
        auto h = Polynomial::monomial(dim, {2, 0, 1}, Scalar(3, 4));
        auto op = hkr(PolyVector::from_polynomial(h));
        CHECK(op.arity == 0);
        CHECK(op.apply({}) == h);
    }
    SECTION("hkr images are hochschild cocycles") {
        for (const auto& name : catalog_names()) {
            const LieAlgebra alg = catalog(name);
            for (int p = 0; p <= alg.dim; ++p)
                for (const auto& key : wedge_keys(alg.dim, p)) {
                    auto v = PolyVector::basis(alg.dim, key, Polynomial::constant(alg.dim, 1));
                    CHECK(hochschild_differential(hkr(v)).is_zero());
                }
            // also with polynomial coefficients: the kirillov-kostant bivector
            CHECK(hochschild_differential(hkr(kirillov_kostant(alg))).is_zero());
        }
    }
}

TEST_CASE("functional cochains", "[polydiff]") {
    const LieAlgebra sl2 = catalog("sl2");
    const DufloTruncation trunc = duflo_truncation(sl2, 6);
    SECTION("from_op evaluation agrees with the operator") {
        std::mt19937 rng(21);
        auto op = testing::random_op(3, 2, 2, 2, rng);
        auto c = MultilinearCochain::from_op(op, 3);
        auto f = testing::random_polynomial(3, 3, rng);
        auto g = testing::random_polynomial(3, 3, rng);
        CHECK(c.eval({f, g}) == op.apply({f, g}));
    }
    SECTION("bound overflow raises") {
        auto star = MultilinearCochain::star(sl2, trunc, 3);
        auto big = Polynomial::monomial(3, {4, 0, 0}, 1);
        CHECK_THROWS_AS(star.eval({big, big}), bound_error);
        CHECK_THROWS_AS(MultilinearCochain::star(sl2, trunc, 4), bound_error);
    }
    SECTION("star cochain evaluates the transported product") {
        auto star = MultilinearCochain::star(sl2, trunc, 3);
        std::mt19937 rng(22);
        auto f = testing::random_polynomial(3, 3, rng);
        auto g = testing::random_polynomial(3, 3, rng);
        CHECK(star.eval({f, g}) == star_product(f, g, sl2, trunc));
    }
}

TEST_CASE("cup product on the tangent complex", "[polydiff]") {
    const LieAlgebra sl2 = catalog("sl2");
    const DufloTruncation trunc = duflo_truncation(sl2, 12);
    auto star = MultilinearCochain::star(sl2, trunc, 6);
    std::mt19937 rng(33);
    SECTION("0-ary constants multiply through star") {
        auto one = PolyDiffOp::constant_op(Polynomial::constant(3, 1));
        auto cup = cup_tangent(one, one, star);
        CHECK(cup.arity == 0);
        CHECK(cup.eval({}) == Polynomial::constant(3, 1));
    }
    SECTION("identity cup identity is star") {
        auto id = PolyDiffOp::identity_op(3);
        auto cup = cup_tangent(id, id, star);
        auto f = testing::random_polynomial(3, 2, rng);
        auto g = testing::random_polynomial(3, 2, rng);
        CHECK(cup.eval({f, g}) == star_product(f, g, sl2, trunc));
    }
    SECTION("associativity through star") {
        auto a = testing::random_op(3, 1, 1, 1, rng);
        auto b = testing::random_op(3, 1, 1, 1, rng);
        auto c = testing::random_op(3, 1, 1, 1, rng);
        auto ab_c = cup_tangent(a, b, star);
        auto bc = cup_tangent(b, c, star);
        // compare (a u b) u c with a u (b u c) on monomial tuples of degree 1
        for (const auto& e1 : monomial_basis_exact(3, 1))
            for (const auto& e2 : monomial_basis_exact(3, 1))
                for (const auto& e3 : monomial_basis_exact(3, 1)) {
                    std::vector<Polynomial> args = {Polynomial::monomial(3, e1, 1),
                                                    Polynomial::monomial(3, e2, 1),
                                                    Polynomial::monomial(3, e3, 1)};
                    auto lhs = star.eval({ab_c.eval({args[0], args[1]}), c.apply({args[2]})});
                    auto rhs = star.eval({a.apply({args[0]}), bc.eval({args[1], args[2]})});
                    CHECK(lhs == rhs);
                }
    }
}

TEST_CASE("antisymmetrizer", "[polydiff]") {
    const LieAlgebra sl2 = catalog("sl2");
    SECTION("symmetric bilinear maps die") {
        std::map<std::vector<Exponents>, Polynomial> table;
        for (const auto& e1 : monomial_basis_upto(3, 2))
            for (const auto& e2 : monomial_basis_upto(3, 2))
                table[{e1, e2}] = Polynomial::monomial(3, exponent_sum(e1, e2), 1);
        auto f = MultilinearCochain::from_table(3, 2, 2, table);
        CHECK(antisymmetrizer(f, sl2).is_zero());
    }
    SECTION("hkr of a wedge evaluates to 1") {
        PolyVector v(3, 2);
        v.add_term({0, 1}, Polynomial::constant(3, 1));
        auto c = antisymmetrizer(MultilinearCochain::from_op(hkr(v), 1), sl2);
        REQUIRE(c.degree == 2);
        CHECK(c.comps.at({0, 1}) == PbwElement::unit(3));
        CHECK(c.comps.size() == 1);
    }
    SECTION("identity cochain maps e_i to e_i") {
        auto c = antisymmetrizer(MultilinearCochain::from_op(PolyDiffOp::identity_op(3), 1), sl2);
        REQUIRE(c.degree == 1);
        for (int i = 0; i < 3; ++i) CHECK(c.comps.at({i}) == PbwElement::generator(3, i));
    }
    SECTION("arity above the dimension gives the zero cochain") {
        std::mt19937 rng(3);
        const LieAlgebra aff1 = catalog("aff1");
        auto f = testing::random_cochain(2, 3, 2, rng);
        CHECK(antisymmetrizer(f, aff1).is_zero());
    }
    SECTION("bound below the linear inputs raises") {
        std::map<std::vector<Exponents>, Polynomial> table;
        auto f = MultilinearCochain::from_table(3, 1, 0, table);
        CHECK_THROWS_AS(antisymmetrizer(f, sl2), bound_error);
    }
}

TEST_CASE("antisymmetrizer intertwines the differentials", "[polydiff]") {
    // Psi*([star, f]_G) = delta(Psi* f) exactly, for random functional
    // cochains of arity <= 2 with degree bound 3.
    std::mt19937 rng(123);
    for (const auto& name : {"aff1", "sl2"}) {
        const LieAlgebra alg = catalog(name);
        const int bound = 3;
        const DufloTruncation trunc = duflo_truncation(alg, 2 * bound);
        auto star = MultilinearCochain::star(alg, trunc, bound);
        for (int arity = 0; arity <= 2; ++arity)
            for (int trial = 0; trial < 4; ++trial) {
                auto f = testing::random_cochain(alg.dim, arity, bound, rng);
                auto lhs = antisymmetrizer(fn_gerstenhaber(star, f), alg);
                auto rhs = ce_differential(antisymmetrizer(f, alg), alg);
                CHECK(lhs == rhs);
            }
    }
}
