// Acceptance suite: runs each gate criterion end to end and prints one
// pass/fail line per criterion. Exit status 0 iff every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "duflo/cli.hpp"
#include "duflo/cohomology.hpp"
#include "duflo/kgraphs.hpp"
#include "duflo/polydiff.hpp"
#include "test_helpers.hpp"

using namespace duflo;

namespace {

struct Harness {
    int failed = 0;

    template <typename Fn>
    void criterion(int number, const std::string& label, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        std::string detail;
        bool ok = false;
        try {
            ok = fn(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const auto stop = std::chrono::steady_clock::now();
        const double secs =
            std::chrono::duration_cast<std::chrono::milliseconds>(stop - start).count() / 1000.0;
        std::printf("[%s] criterion %d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", number, label.c_str(),
                    secs, detail.empty() ? "" : " - ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failed;
    }
};

bool require(bool cond, std::string& detail, const std::string& message) {
    if (!cond && detail.empty()) detail = message;
    return cond;
}

} // namespace

int main() {
    Harness h;

    h.criterion(1, "structural exactness suite", [](std::string& detail) {
        bool ok = true;
        std::mt19937 rng(1001);
        for (const auto& name : catalog_names()) {
            const LieAlgebra alg = catalog(name);
            ok &= require(validate(alg).ok, detail, name + ": validate failed");
            const PolyVector gamma = kirillov_kostant(alg);
            ok &= require(schouten(gamma, gamma).is_zero(), detail, name + ": [gamma,gamma] != 0");
            for (int p = 0; p <= alg.dim && ok; ++p)
                for (const auto& key : wedge_keys(alg.dim, p))
                    for (const auto& e : monomial_basis_upto(alg.dim, 4)) {
                        auto v = PolyVector::basis(alg.dim, key, Polynomial::monomial(alg.dim, e, 1));
                        if (!poisson_differential(alg, poisson_differential(alg, v)).is_zero()) {
                            ok = require(false, detail, name + ": d_gamma^2 != 0");
                            break;
                        }
                    }
            for (int p = 0; p <= alg.dim && ok; ++p)
                for (int trial = 0; trial < 4; ++trial) {
                    auto c = testing::random_ce_cochain(alg.dim, p, 3, rng);
                    if (!ce_differential(ce_differential(c, alg), alg).is_zero())
                        ok = require(false, detail, name + ": delta^2 != 0");
                }
        }
        ok &= require(gerstenhaber(PolyDiffOp::multiplication(2), PolyDiffOp::multiplication(2)).is_zero(),
                      detail, "[mu,mu] != 0");
        for (int arity = 1; arity <= 3 && ok; ++arity)
            for (int trial = 0; trial < 4; ++trial) {
                auto a = testing::random_op(2, arity, 2, 2, rng);
                if (!hochschild_differential(hochschild_differential(a)).is_zero())
                    ok = require(false, detail, "hochschild d^2 != 0");
            }
        return ok;
    });

    h.criterion(2, "HKR and antisymmetrizer suite", [](std::string& detail) {
        bool ok = true;
        for (const auto& name : catalog_names()) {
            const LieAlgebra alg = catalog(name);
            for (int p = 0; p <= alg.dim && ok; ++p)
                for (const auto& key : wedge_keys(alg.dim, p)) {
                    auto v = PolyVector::basis(alg.dim, key, Polynomial::constant(alg.dim, 1));
                    if (!hochschild_differential(hkr(v)).is_zero())
                        ok = require(false, detail, name + ": d(hkr) != 0");
                }
        }
        std::mt19937 rng(2002);
        int checked = 0;
        for (const auto& name : {"aff1", "sl2"}) {
            const LieAlgebra alg = catalog(name);
            const int bound = 3;
            const DufloTruncation trunc = duflo_truncation(alg, 2 * bound);
            auto star = MultilinearCochain::star(alg, trunc, bound);
            for (int arity = 0; arity <= 2 && ok; ++arity)
                for (int trial = 0; trial < 4; ++trial) {
                    auto f = testing::random_cochain(alg.dim, arity, bound, rng);
                    auto lhs = antisymmetrizer(fn_gerstenhaber(star, f), alg);
                    auto rhs = ce_differential(antisymmetrizer(f, alg), alg);
                    ++checked;
                    if (!(lhs == rhs))
                        ok = require(false, detail,
                                     std::string(name) + ": chain identity fails at arity " +
                                         std::to_string(arity));
                }
        }
        ok &= require(checked >= 20, detail, "fewer than 20 cochains checked");
        return ok;
    });

    h.criterion(3, "classical Duflo", [](std::string& detail) {
        bool ok = true;
        const LieAlgebra sl2 = catalog("sl2");
        const DufloTruncation trunc = duflo_truncation(sl2, 8);
        Polynomial casimir(3);
        casimir.add_term({1, 0, 1}, 1);
        casimir.add_term({0, 2, 0}, Scalar(1, 4));
        std::vector<PbwElement> images;  // images[k] = D(casimir^k)
        Polynomial power = Polynomial::constant(3, 1);
        for (int k = 0; k <= 3; ++k) {
            images.push_back(duflo_map(power, sl2, trunc));
            power = power * casimir;
        }
        for (int k = 1; k <= 3 && ok; ++k)
            for (int i = 0; i < 3; ++i)
                if (!adjoint_action(sl2, i, images[static_cast<std::size_t>(k)]).is_zero())
                    ok = require(false, detail, "D(casimir^" + std::to_string(k) + ") not central");
        for (int k = 0; k <= 3 && ok; ++k)
            for (int m = 0; m + k <= 3; ++m)
                if (!(pbw_product(images[static_cast<std::size_t>(k)], images[static_cast<std::size_t>(m)], sl2) ==
                      images[static_cast<std::size_t>(k + m)]))
                    ok = require(false, detail, "multiplicativity fails at k+m = " + std::to_string(k + m));
        const LieAlgebra heis = catalog("heisenberg3");
        const DufloTruncation ht = duflo_truncation(heis, 4);
        for (const auto& e : monomial_basis_upto(3, 4))
            if (!(duflo_map(Polynomial::monomial(3, e, 1), heis, ht) ==
                  symmetrization(Polynomial::monomial(3, e, 1), heis)))
                ok = require(false, detail, "heisenberg3: duflo_map differs from symmetrization");
        return ok;
    });

    h.criterion(4, "main theorem at desk scale (verify, 5 algebras)", [](std::string& detail) {
        bool ok = true;
        for (const auto& name : catalog_names()) {
            std::ostringstream out, err;
            int rc = cli_main({"verify", "--algebra", name, "--format", "json"}, out, err);
            if (rc != 0) {
                ok = require(false, detail, name + ": verify exited " + std::to_string(rc));
                continue;
            }
            auto j = nlohmann::json::parse(out.str());
            const int fails = j["report"]["counts"]["fail"];
            const int inconclusive = j["report"]["counts"]["inconclusive"];
            ok &= require(fails == 0, detail, name + ": " + std::to_string(fails) + " failed checks");
            ok &= require(inconclusive == 0, detail,
                          name + ": " + std::to_string(inconclusive) + " inconclusive checks at N = " +
                              std::to_string(static_cast<int>(j["config"]["search_bound"])));
        }
        return ok;
    });

    h.criterion(5, "Bernoulli endpoint weights, closed form", [](std::string& detail) {
        bool ok = require(bernoulli_weight(0).difference == 1, detail, "p=0 difference != 1");
        ok &= require(bernoulli_weight(0).value_at_zero == Scalar(1, 2), detail, "p=0 endpoint != 1/2");
        for (int p = 1; p <= 6; ++p)
            ok &= require(bernoulli_weight(p).difference == 0, detail,
                          "p=" + std::to_string(p) + " difference != 0");
        return ok;
    });

    h.criterion(6, "weight Monte-Carlo corroboration (seed 42, 1e6 samples)", [](std::string& detail) {
        bool ok = true;
        const long long samples = 1000000;
        const std::uint64_t seed = 42;

        KGraph snail;
        snail.aerial = 2;
        snail.ground = 1;
        snail.edges = {{1, {false, 2}}, {2, {true, 1}}, {2, {false, 1}}};
        auto s = weight_mc(snail, samples, seed);
        ok &= require(std::fabs(s.mean) < 3 * s.std_error, detail,
                      "snail(1) mean " + std::to_string(s.mean) + " exceeds 3 stderr");
        ok &= require(s.std_error < 0.02, detail, "snail(1) stderr too large");

        KGraph bern;
        bern.aerial = 2;
        bern.ground = 2;
        bern.edges = {{1, {true, 1}}, {1, {true, 2}}, {2, {false, 1}}, {2, {true, 2}}};
        auto b = weight_mc(bern, samples, seed);
        ok &= require(std::fabs(b.mean - 1.0 / 12.0) < 3 * b.std_error, detail,
                      "deployed endpoint " + std::to_string(b.mean) + " not within 3 stderr of 1/12");

        const LieAlgebra alg = catalog("aff1");
        auto gamma = kirillov_kostant(alg);
        auto x = Polynomial::coordinate(2, 0);
        auto y = Polynomial::coordinate(2, 1);
        const Exponents x2{0, 1};
        double graph_coeff = 0.0, variance = 0.0;
        for (bool swapped : {false, true}) {
            KGraph g;
            g.aerial = 1;
            g.ground = 2;
            g.edges = swapped ? std::vector<KEdge>{{1, {true, 2}}, {1, {true, 1}}}
                              : std::vector<KEdge>{{1, {true, 1}}, {1, {true, 2}}};
            if (!star_term_dimension_ok(g, {2})) return require(false, detail, "dimension bookkeeping");
            auto est = weight_mc(g, samples, seed);
            Polynomial contr = b_gamma(g, {gamma}, {x, y}) - b_gamma(g, {gamma}, {y, x});
            const Scalar c = contr.terms.count(x2) ? contr.terms.at(x2) : Scalar(0);
            graph_coeff += est.mean * static_cast<double>(c);
            variance += est.std_error * est.std_error * static_cast<double>(c * c);
        }
        auto exact = star_product(x, y, alg, duflo_truncation(alg, 2)) -
                     star_product(y, x, alg, duflo_truncation(alg, 2));
        const double target = static_cast<double>(exact.terms.at(x2));
        ok &= require(std::fabs(graph_coeff - target) < 3 * std::sqrt(variance), detail,
                      "order-1 graph side " + std::to_string(graph_coeff) + " vs exact " +
                          std::to_string(target));
        return ok;
    });

    h.criterion(7, "determinism of reports and estimates", [](std::string& detail) {
        bool ok = true;
        const std::vector<std::string> verify_args = {"verify", "--algebra", "sl2", "--format", "json"};
        std::ostringstream o1, o2, e1, e2;
        ok &= require(cli_main(verify_args, o1, e1) == 0, detail, "verify run 1 failed");
        ok &= require(cli_main(verify_args, o2, e2) == 0, detail, "verify run 2 failed");
        ok &= require(o1.str() == o2.str(), detail, "verify reports differ between runs");

        const std::vector<std::string> weight_args = {"weight", "--graph", "1->G1,1->G2",
                                                      "--samples", "200000", "--seed", "42",
                                                      "--format", "json"};
        std::ostringstream w1, w2, we1, we2;
        ok &= require(cli_main(weight_args, w1, we1) == 0, detail, "weight run 1 failed");
        ok &= require(cli_main(weight_args, w2, we2) == 0, detail, "weight run 2 failed");
        ok &= require(w1.str() == w2.str(), detail, "weight estimates differ between runs");
        return ok;
    });

    if (h.failed == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", h.failed);
    return 1;
}
