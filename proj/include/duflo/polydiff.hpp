#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "duflo/enveloping.hpp"
#include "duflo/errors.hpp"
#include "duflo/polynomial.hpp"
#include "duflo/polyvector.hpp"

namespace duflo {

/// Polydifferential operator with polynomial coefficients, acting as
/// f_1 x ... x f_m -> sum coeff * prod D^{multi_j} f_j. Grading |A| = m - 1.
struct PolyDiffOp {
    int dim = 0;
    int arity = 0;
    std::map<std::vector<Exponents>, Polynomial> terms;

    PolyDiffOp() = default;
    PolyDiffOp(int dimension, int m) : dim(dimension), arity(m) {}

    static PolyDiffOp zero(int dim, int m) { return PolyDiffOp(dim, m); }

    /// Pointwise multiplication mu(f,g) = fg.
    static PolyDiffOp multiplication(int dim) {
        PolyDiffOp op(dim, 2);
        op.terms[{Exponents(dim, 0), Exponents(dim, 0)}] = Polynomial::constant(dim, 1);
        return op;
    }

    static PolyDiffOp identity_op(int dim) {
        PolyDiffOp op(dim, 1);
        op.terms[{Exponents(dim, 0)}] = Polynomial::constant(dim, 1);
        return op;
    }

    /// 0-ary operator returning a fixed polynomial.
    static PolyDiffOp constant_op(const Polynomial& value) {
        PolyDiffOp op(value.dim, 0);
        if (!value.is_zero()) op.terms[{}] = value;
        return op;
    }

    bool is_zero() const { return terms.empty(); }

    void add_term(const std::vector<Exponents>& multi, const Polynomial& coeff) {
        if (coeff.is_zero()) return;
        auto it = terms.find(multi);
        if (it == terms.end()) {
            terms.emplace(multi, coeff);
        } else {
            it->second += coeff;
            if (it->second.is_zero()) terms.erase(it);
        }
    }

    PolyDiffOp& operator+=(const PolyDiffOp& other) {
        for (const auto& [m, c] : other.terms) add_term(m, c);
        return *this;
    }

    friend PolyDiffOp operator+(PolyDiffOp a, const PolyDiffOp& b) { return a += b; }

    friend PolyDiffOp operator*(const Scalar& s, const PolyDiffOp& op) {
        PolyDiffOp r(op.dim, op.arity);
        if (s == 0) return r;
        for (const auto& [m, c] : op.terms) r.terms[m] = s * c;
        return r;
    }

    friend PolyDiffOp operator-(const PolyDiffOp& op) { return Scalar(-1) * op; }
    friend PolyDiffOp operator-(PolyDiffOp a, const PolyDiffOp& b) { return a += -b; }

    friend bool operator==(const PolyDiffOp& a, const PolyDiffOp& b) {
        return a.dim == b.dim && a.arity == b.arity && a.terms == b.terms;
    }

    Polynomial apply(const std::vector<Polynomial>& args) const {
        if (static_cast<int>(args.size()) != arity)
            throw precondition_error("PolyDiffOp::apply: expected " + std::to_string(arity) +
                                     " arguments");
        Polynomial result(dim);
        for (const auto& [multi, coeff] : terms) {
            Polynomial prod = coeff;
            for (int j = 0; j < arity && !prod.is_zero(); ++j)
                prod = prod * args[j].multi_derivative(multi[j]);
            result += prod;
        }
        return result;
    }
};

namespace detail {

// All splittings of a multi-index into `parts` summands, with the Leibniz
// multinomial coefficient of each splitting.
inline void enumerate_splittings(const Exponents& beta, int parts,
                                 const std::function<void(const std::vector<Exponents>&, const Integer&)>& visit) {
    const int dim = static_cast<int>(beta.size());
    std::vector<Exponents> split(parts, Exponents(dim, 0));
    Integer coeff = 1;
    auto rec = [&](auto&& self, int var) -> void {
        if (var == dim) {
            visit(split, coeff);
            return;
        }
        // distribute beta[var] over the parts
        std::vector<int> alloc(parts, 0);
        auto dist = [&](auto&& inner, int part, int remaining, Integer partial) -> void {
            if (part == parts - 1) {
                alloc[part] = remaining;
                Integer mult = partial / factorial(remaining);
                for (int t = 0; t < parts; ++t) split[t][var] = alloc[t];
                Integer saved = coeff;
                coeff *= mult;
                self(self, var + 1);
                coeff = saved;
                return;
            }
            for (int k = 0; k <= remaining; ++k) {
                alloc[part] = k;
                inner(inner, part + 1, remaining - k, partial / factorial(k));
            }
        };
        if (parts == 0) {
            if (beta[var] == 0) {
                self(self, var + 1);
            }
            return;
        }
        dist(dist, 0, beta[var], factorial(beta[var]));
        for (int t = 0; t < parts; ++t) split[t][var] = 0;
    };
    rec(rec, 0);
}

} // namespace detail

/// Insertion composition with the standard signs (-1)^{(m2-1)(j-1)}; the
/// inserted operator's output is differentiated by the slot's multi-index
/// via the Leibniz expansion.
inline PolyDiffOp compose(const PolyDiffOp& a, const PolyDiffOp& b) {
    const int m1 = a.arity, m2 = b.arity;
    PolyDiffOp result(a.dim, m1 + m2 - 1);
    for (const auto& [ma, ca] : a.terms) {
        for (int j = 0; j < m1; ++j) {
            const int sign = (((m2 - 1) * j) % 2 == 0) ? 1 : -1;
            for (const auto& [mb, cb] : b.terms) {
                const Exponents& beta = ma[j];
                detail::enumerate_splittings(
                    beta, m2 + 1, [&](const std::vector<Exponents>& split, const Integer& mult) {
                        Polynomial coeff = (Scalar(sign) * Scalar(mult)) * (ca * cb.multi_derivative(split[0]));
                        if (coeff.is_zero()) return;
                        std::vector<Exponents> multi;
                        multi.reserve(static_cast<std::size_t>(m1 + m2 - 1));
                        for (int t = 0; t < j; ++t) multi.push_back(ma[t]);
                        for (int r = 0; r < m2; ++r) multi.push_back(exponent_sum(mb[r], split[r + 1]));
                        for (int t = j + 1; t < m1; ++t) multi.push_back(ma[t]);
                        result.add_term(multi, coeff);
                    });
            }
        }
    }
    return result;
}

/// Graded commutator [a,b]_G = a o b - (-1)^{|a||b|} b o a with |A| = arity-1.
inline PolyDiffOp gerstenhaber(const PolyDiffOp& a, const PolyDiffOp& b) {
    const int sign = (((a.arity - 1) * (b.arity - 1)) % 2 == 0) ? 1 : -1;
    return compose(a, b) - Scalar(sign) * compose(b, a);
}

/// Hochschild differential dA = -[mu, A]_G; satisfies d o d = 0.
inline PolyDiffOp hochschild_differential(const PolyDiffOp& a) {
    return -gerstenhaber(PolyDiffOp::multiplication(a.dim), a);
}

/// Antisymmetrized first-order multiderivation attached to a polyvector;
/// degree-0 polyvectors become 0-ary constants.
inline PolyDiffOp hkr(const PolyVector& alpha) {
    if (alpha.degree == 0) {
        Polynomial value(alpha.dim);
        auto it = alpha.comps.find({});
        if (it != alpha.comps.end()) value = it->second;
        return PolyDiffOp::constant_op(value);
    }
    PolyDiffOp op(alpha.dim, alpha.degree);
    for (const auto& [tuple, coeff] : to_tensor(alpha)) {
        std::vector<Exponents> multi;
        multi.reserve(tuple.size());
        for (int idx : tuple) {
            Exponents e(alpha.dim, 0);
            e[idx] = 1;
            multi.push_back(e);
        }
        op.add_term(multi, coeff);
    }
    return op;
}

/// Hochschild cochain represented functionally: a multilinear map defined on
/// polynomials of total degree <= bound in each slot. Values are computed on
/// demand; closures capture immutable data only.
struct MultilinearCochain {
    int dim = 0;
    int arity = 0;
    int bound = 0;
    std::function<Polynomial(const std::vector<Exponents>&)> on_monomials;

    Polynomial eval_monomials(const std::vector<Exponents>& monomials) const {
        if (static_cast<int>(monomials.size()) != arity)
            throw precondition_error("MultilinearCochain: wrong argument count");
        for (const auto& e : monomials)
            if (exponent_degree(e) > bound)
                throw bound_error("MultilinearCochain: input degree " +
                                  std::to_string(exponent_degree(e)) + " exceeds bound " +
                                  std::to_string(bound) + "; raise the bound");
        return on_monomials(monomials);
    }

    /// Multilinear extension to arbitrary polynomial arguments.
    Polynomial eval(const std::vector<Polynomial>& args) const {
        if (static_cast<int>(args.size()) != arity)
            throw precondition_error("MultilinearCochain: wrong argument count");
        Polynomial result(dim);
        std::vector<Exponents> tuple(static_cast<std::size_t>(arity), Exponents());
        auto rec = [&](auto&& self, int slot, const Scalar& coeff) -> void {
            if (slot == arity) {
                result += coeff * eval_monomials(tuple);
                return;
            }
            for (const auto& [e, c] : args[slot].terms) {
                tuple[slot] = e;
                self(self, slot + 1, coeff * c);
            }
        };
        rec(rec, 0, Scalar(1));
        return result;
    }

    static MultilinearCochain from_op(const PolyDiffOp& op, int input_bound) {
        MultilinearCochain c;
        c.dim = op.dim;
        c.arity = op.arity;
        c.bound = input_bound;
        c.on_monomials = [op](const std::vector<Exponents>& ms) {
            std::vector<Polynomial> args;
            args.reserve(ms.size());
            for (const auto& e : ms) args.push_back(Polynomial::monomial(static_cast<int>(e.size()), e, 1));
            return op.apply(args);
        };
        return c;
    }

    static MultilinearCochain from_table(int dim, int arity, int input_bound,
                                         std::map<std::vector<Exponents>, Polynomial> table) {
        MultilinearCochain c;
        c.dim = dim;
        c.arity = arity;
        c.bound = input_bound;
        c.on_monomials = [dim, table = std::move(table)](const std::vector<Exponents>& ms) {
            auto it = table.find(ms);
            return it == table.end() ? Polynomial::zero(dim) : it->second;
        };
        return c;
    }

    /// The transported star product as an arity-2 cochain; the truncation
    /// must cover twice the input bound.
    static MultilinearCochain star(const LieAlgebra& alg, const DufloTruncation& trunc, int input_bound) {
        if (2 * input_bound > trunc.order)
            throw bound_error("star cochain: truncation order " + std::to_string(trunc.order) +
                              " cannot multiply two degree-" + std::to_string(input_bound) +
                              " inputs; raise the truncation");
        MultilinearCochain c;
        c.dim = alg.dim;
        c.arity = 2;
        c.bound = input_bound;
        c.on_monomials = [alg, trunc](const std::vector<Exponents>& ms) {
            const int dim = alg.dim;
            return star_product(Polynomial::monomial(dim, ms[0], 1), Polynomial::monomial(dim, ms[1], 1),
                                alg, trunc);
        };
        return c;
    }
};

/// Insertion composition in the functional representation.
inline MultilinearCochain fn_compose(const MultilinearCochain& a, const MultilinearCochain& b) {
    if (a.arity == 0 && b.arity == 0)
        throw precondition_error("fn_compose: both arities zero");
    MultilinearCochain r;
    r.dim = a.dim;
    r.arity = a.arity + b.arity - 1;
    r.bound = std::min(a.bound, b.bound);
    r.on_monomials = [a, b](const std::vector<Exponents>& ms) {
        Polynomial total(a.dim);
        const int m1 = a.arity, m2 = b.arity;
        for (int j = 0; j < m1; ++j) {
            const int sign = (((m2 - 1) * j) % 2 == 0) ? 1 : -1;
            std::vector<Exponents> inner(ms.begin() + j, ms.begin() + j + m2);
            Polynomial inserted = b.eval_monomials(inner);
            std::vector<Polynomial> outer;
            outer.reserve(static_cast<std::size_t>(m1));
            for (int t = 0; t < j; ++t)
                outer.push_back(Polynomial::monomial(a.dim, ms[t], 1));
            outer.push_back(inserted);
            for (int t = j + m2; t < static_cast<int>(ms.size()); ++t)
                outer.push_back(Polynomial::monomial(a.dim, ms[t], 1));
            total += Scalar(sign) * a.eval(outer);
        }
        return total;
    };
    return r;
}

/// Gerstenhaber bracket in the functional representation.
inline MultilinearCochain fn_gerstenhaber(const MultilinearCochain& a, const MultilinearCochain& b) {
    MultilinearCochain ab = fn_compose(a, b);
    MultilinearCochain ba = fn_compose(b, a);
    const int sign = (((a.arity - 1) * (b.arity - 1)) % 2 == 0) ? 1 : -1;
    MultilinearCochain r;
    r.dim = ab.dim;
    r.arity = ab.arity;
    r.bound = ab.bound;
    r.on_monomials = [ab, ba, sign](const std::vector<Exponents>& ms) {
        return ab.eval_monomials(ms) - Scalar(sign) * ba.eval_monomials(ms);
    };
    return r;
}

/// Cup product on the tangent complex: values multiplied through the star
/// cochain.
inline MultilinearCochain cup_tangent(const PolyDiffOp& a, const PolyDiffOp& b,
                                      const MultilinearCochain& star) {
    MultilinearCochain r;
    r.dim = a.dim;
    r.arity = a.arity + b.arity;
    r.bound = star.bound;
    const int m1 = a.arity;
    r.on_monomials = [a, b, star, m1](const std::vector<Exponents>& ms) {
        std::vector<Polynomial> first, second;
        for (int t = 0; t < static_cast<int>(ms.size()); ++t) {
            Polynomial mono = Polynomial::monomial(a.dim, ms[t], 1);
            (t < m1 ? first : second).push_back(mono);
        }
        return star.eval({a.apply(first), b.apply(second)});
    };
    return r;
}

/// Sign of the antisymmetrization at each arity, chosen so that the
/// bracket-with-star differential corresponds to the CE differential under
/// this map (the chain identity is asserted exactly by the test suite).
inline Scalar antisym_factor(int arity) {
    const int exponent = arity * (arity + 1) / 2 + 1;
    return (exponent % 2 == 0) ? Scalar(1) : Scalar(-1);
}

/// Evaluation on antisymmetrized coordinate tuples, with values carried to
/// U(g) through the Duflo map; packages a functional cochain as a CE cochain.
inline CeCochain antisymmetrizer(const MultilinearCochain& f, const LieAlgebra& alg) {
    const int n = f.arity;
    CeCochain result(alg.dim, n);
    if (n > alg.dim) return result;
    std::map<WedgeKey, Polynomial> raw;
    int max_degree = 0;
    for (const auto& key : wedge_keys(alg.dim, n)) {
        Polynomial value(alg.dim);
        std::vector<int> positions(key.size());
        for (std::size_t i = 0; i < key.size(); ++i) positions[i] = static_cast<int>(i);
        do {
            std::vector<Exponents> tuple;
            tuple.reserve(key.size());
            for (std::size_t i = 0; i < key.size(); ++i) {
                Exponents e(alg.dim, 0);
                e[key[positions[i]]] = 1;
                tuple.push_back(e);
            }
            value += (Scalar(permutation_sign(positions)) * antisym_factor(n)) * f.eval_monomials(tuple);
        } while (std::next_permutation(positions.begin(), positions.end()));
        if (!value.is_zero()) {
            max_degree = std::max(max_degree, value.total_degree());
            raw.emplace(key, std::move(value));
        }
    }
    DufloTruncation trunc = duflo_truncation(alg, max_degree);
    for (const auto& [key, value] : raw) result.add_term(key, duflo_map(value, alg, trunc));
    return result;
}

} // namespace duflo
