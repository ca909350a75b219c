#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "duflo/errors.hpp"
#include "duflo/lie_algebra.hpp"
#include "duflo/polynomial.hpp"
#include "duflo/polyvector.hpp"

namespace duflo {

/// Element of the universal enveloping algebra in the PBW basis
/// e_1^{a_1} ... e_d^{a_d}; basis order = declaration order of the algebra.
struct PbwElement {
    int dim = 0;
    std::map<Exponents, Scalar> terms;

    PbwElement() = default;
    explicit PbwElement(int dimension) : dim(dimension) {}

    static PbwElement zero(int dim) { return PbwElement(dim); }

    static PbwElement unit(int dim) {
        PbwElement u(dim);
        u.terms[Exponents(dim, 0)] = 1;
        return u;
    }

    static PbwElement generator(int dim, int i) {
        PbwElement u(dim);
        Exponents e(dim, 0);
        e[i] = 1;
        u.terms[e] = 1;
        return u;
    }

    static PbwElement monomial(int dim, const Exponents& e, const Scalar& c) {
        PbwElement u(dim);
        if (c != 0) u.terms[e] = c;
        return u;
    }

    bool is_zero() const { return terms.empty(); }

    /// PBW filtration degree; -1 for zero.
    int filtration_degree() const {
        int d = -1;
        for (const auto& [e, c] : terms) d = std::max(d, exponent_degree(e));
        return d;
    }

    void add_term(const Exponents& e, const Scalar& c) {
        if (c == 0) return;
        auto it = terms.find(e);
        if (it == terms.end()) {
            terms.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) terms.erase(it);
        }
    }

    PbwElement& operator+=(const PbwElement& other) {
        for (const auto& [e, c] : other.terms) add_term(e, c);
        return *this;
    }

    PbwElement& operator-=(const PbwElement& other) {
        for (const auto& [e, c] : other.terms) add_term(e, -c);
        return *this;
    }

    friend PbwElement operator+(PbwElement a, const PbwElement& b) { return a += b; }
    friend PbwElement operator-(PbwElement a, const PbwElement& b) { return a -= b; }

    friend PbwElement operator*(const Scalar& s, const PbwElement& u) {
        PbwElement r(u.dim);
        if (s == 0) return r;
        for (const auto& [e, c] : u.terms) r.terms[e] = s * c;
        return r;
    }

    friend PbwElement operator-(const PbwElement& u) { return Scalar(-1) * u; }

    friend bool operator==(const PbwElement& a, const PbwElement& b) {
        return a.dim == b.dim && a.terms == b.terms;
    }

    std::string str(const std::vector<std::string>& labels) const {
        Polynomial view{};
        view.dim = dim;
        view.terms = terms;
        return view.str(labels);
    }
};

namespace detail {

using Word = std::vector<int>;

inline Word exponents_to_word(const Exponents& e) {
    Word w;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (int k = 0; k < e[i]; ++k) w.push_back(static_cast<int>(i));
    return w;
}

inline Exponents word_to_exponents(int dim, const Word& w) {
    Exponents e(dim, 0);
    for (int g : w) e[g] += 1;
    return e;
}

/// Normal-orders coeff * e_{w_1} ... e_{w_k} by rewriting descents
/// e_j e_i -> e_i e_j + [e_j, e_i]; terminates since each rewrite lowers
/// either the inversion count or the word length.
inline PbwElement normal_order_word(const LieAlgebra& alg, Word word, Scalar coeff) {
    PbwElement result(alg.dim);
    std::vector<std::pair<Word, Scalar>> stack;
    stack.emplace_back(std::move(word), std::move(coeff));
    while (!stack.empty()) {
        auto [w, c] = std::move(stack.back());
        stack.pop_back();
        std::size_t pos = 0;
        bool sorted = true;
        for (std::size_t i = 0; i + 1 < w.size(); ++i)
            if (w[i] > w[i + 1]) {
                pos = i;
                sorted = false;
                break;
            }
        if (sorted) {
            result.add_term(word_to_exponents(alg.dim, w), c);
            continue;
        }
        const int hi = w[pos], lo = w[pos + 1];
        Word swapped = w;
        std::swap(swapped[pos], swapped[pos + 1]);
        stack.emplace_back(std::move(swapped), c);
        for (int k = 0; k < alg.dim; ++k) {
            const Scalar& cc = alg.c[hi][lo][k];
            if (cc == 0) continue;
            Word contracted;
            contracted.reserve(w.size() - 1);
            contracted.insert(contracted.end(), w.begin(), w.begin() + static_cast<long>(pos));
            contracted.push_back(k);
            contracted.insert(contracted.end(), w.begin() + static_cast<long>(pos) + 2, w.end());
            stack.emplace_back(std::move(contracted), c * cc);
        }
    }
    return result;
}

} // namespace detail

/// Product in U(g): concatenate PBW monomials and normal-order.
inline PbwElement pbw_product(const PbwElement& a, const PbwElement& b, const LieAlgebra& alg) {
    PbwElement result(alg.dim);
    for (const auto& [ea, ca] : a.terms)
        for (const auto& [eb, cb] : b.terms) {
            detail::Word w = detail::exponents_to_word(ea);
            detail::Word wb = detail::exponents_to_word(eb);
            w.insert(w.end(), wb.begin(), wb.end());
            result += detail::normal_order_word(alg, std::move(w), ca * cb);
        }
    return result;
}

/// Adjoint action ad(e_i) u = e_i u - u e_i.
inline PbwElement adjoint_action(const LieAlgebra& alg, int i, const PbwElement& u) {
    PbwElement gen = PbwElement::generator(alg.dim, i);
    return pbw_product(gen, u, alg) - pbw_product(u, gen, alg);
}

/// Symmetrization beta: x^a maps to the average over all orderings of the
/// corresponding product in U(g), normal-ordered.
inline PbwElement symmetrization(const Polynomial& p, const LieAlgebra& alg) {
    PbwElement result(alg.dim);
    for (const auto& [e, c] : p.terms) {
        detail::Word w = detail::exponents_to_word(e);
        Integer perms = factorial(static_cast<int>(w.size()));
        for (int i = 0; i < static_cast<int>(e.size()); ++i) perms /= factorial(e[i]);
        const Scalar weight = c / Scalar(perms);
        detail::Word sorted = w;
        std::sort(sorted.begin(), sorted.end());
        do {
            result += detail::normal_order_word(alg, sorted, weight);
        } while (std::next_permutation(sorted.begin(), sorted.end()));
    }
    return result;
}

/// Inverse of beta by back-substitution along the PBW filtration: the top
/// filtration part of beta(x^a) is the monomial e^a, so peeling the top
/// degree strictly lowers the remainder.
inline Polynomial symmetrization_inverse(const PbwElement& u, const LieAlgebra& alg) {
    Polynomial result(alg.dim);
    PbwElement remainder = u;
    while (!remainder.is_zero()) {
        const int top = remainder.filtration_degree();
        Polynomial head(alg.dim);
        for (const auto& [e, c] : remainder.terms)
            if (exponent_degree(e) == top) head.add_term(e, c);
        result += head;
        remainder -= symmetrization(head, alg);
    }
    return result;
}

namespace detail {

using PolyMatrix = std::vector<std::vector<Polynomial>>;

inline PolyMatrix poly_mat_identity(int n, int dim) {
    PolyMatrix m(n, std::vector<Polynomial>(n, Polynomial(dim)));
    for (int i = 0; i < n; ++i) m[i][i] = Polynomial::constant(dim, 1);
    return m;
}

inline PolyMatrix poly_mat_mul(const PolyMatrix& a, const PolyMatrix& b, int bound) {
    const int n = static_cast<int>(a.size());
    const int dim = a[0][0].dim;
    PolyMatrix r(n, std::vector<Polynomial>(n, Polynomial(dim)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Polynomial acc(dim);
            for (int k = 0; k < n; ++k) acc += a[i][k] * b[k][j];
            r[i][j] = acc.truncate(bound);
        }
    return r;
}

inline Polynomial poly_mat_trace(const PolyMatrix& a) {
    Polynomial t(a[0][0].dim);
    for (std::size_t i = 0; i < a.size(); ++i) t += a[i][i];
    return t;
}

} // namespace detail

/// Truncation of the Duflo series q(x) = det(sinh(ad x/2)/(ad x/2))^{1/2}
/// to polynomial degree <= order, stored together with the matching
/// truncation of 1/q. Both are exact rational polynomials; acting on
/// polynomials of degree <= order they agree with all higher truncations.
struct DufloTruncation {
    int order = 0;
    Polynomial q_series;
    Polynomial q_inverse;
};

/// Expands log q = (1/2) tr log(sinh(ad x/2)/(ad x/2)) as an exact
/// polynomial of degree <= order and exponentiates the truncated series.
inline DufloTruncation duflo_truncation(const LieAlgebra& alg, int order) {
    if (order < 0) throw precondition_error("duflo_truncation: order must be >= 0");
    const int dim = alg.dim;
    detail::PolyMatrix ad = ad_matrix_symbolic(alg);

    // A = sum_{k>=1} (ad x)^{2k} / (4^k (2k+1)!), entries of degree <= order.
    detail::PolyMatrix power = detail::poly_mat_identity(dim, dim);
    detail::PolyMatrix accum(dim, std::vector<Polynomial>(dim, Polynomial(dim)));
    for (int k = 1; 2 * k <= order; ++k) {
        power = detail::poly_mat_mul(power, ad, order);
        power = detail::poly_mat_mul(power, ad, order);
        Integer denom = factorial(2 * k + 1);
        Integer four_k = 1;
        for (int t = 0; t < k; ++t) four_k *= 4;
        const Scalar coeff = Scalar(1) / Scalar(denom * four_k);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) accum[i][j] += coeff * power[i][j];
    }

    // log(I + A) = A - A^2/2 + A^3/3 - ...; A starts in degree 2.
    detail::PolyMatrix a_power = detail::poly_mat_identity(dim, dim);
    detail::PolyMatrix log_mat(dim, std::vector<Polynomial>(dim, Polynomial(dim)));
    for (int j = 1; 2 * j <= order; ++j) {
        a_power = detail::poly_mat_mul(a_power, accum, order);
        const Scalar coeff = Scalar((j % 2 == 1) ? 1 : -1) / Scalar(j);
        for (int r = 0; r < dim; ++r)
            for (int s = 0; s < dim; ++s) log_mat[r][s] += coeff * a_power[r][s];
    }
    Polynomial t = Scalar(1, 2) * detail::poly_mat_trace(log_mat);
    t = t.truncate(order);

    auto exp_series = [&](const Polynomial& arg) {
        Polynomial result = Polynomial::constant(dim, 1);
        Polynomial term = Polynomial::constant(dim, 1);
        for (int j = 1; 2 * j <= order; ++j) {
            term = (term * arg).truncate(order);
            result += (Scalar(1) / Scalar(factorial(j))) * term;
        }
        return result.truncate(order);
    };

    DufloTruncation trunc;
    trunc.order = order;
    trunc.q_series = exp_series(t);
    trunc.q_inverse = exp_series(-t);
    return trunc;
}

/// Applies the constant-coefficient operator of a series: a monomial x^a in
/// the series acts as the derivative d^a.
inline Polynomial apply_series_diffop(const Polynomial& series, const Polynomial& target) {
    Polynomial result(target.dim);
    for (const auto& [e, c] : series.terms) {
        if (exponent_degree(e) > target.total_degree()) continue;
        result += c * target.multi_derivative(e);
    }
    return result;
}

/// Duflo map beta(d(q) p).
inline PbwElement duflo_map(const Polynomial& p, const LieAlgebra& alg, const DufloTruncation& trunc) {
    if (p.total_degree() > trunc.order)
        throw bound_error("duflo_map: polynomial degree " + std::to_string(p.total_degree()) +
                          " exceeds truncation order " + std::to_string(trunc.order) +
                          "; raise the truncation");
    return symmetrization(apply_series_diffop(trunc.q_series, p), alg);
}

/// Inverse Duflo map d(1/q)(beta^{-1} u).
inline Polynomial duflo_inverse(const PbwElement& u, const LieAlgebra& alg, const DufloTruncation& trunc) {
    Polynomial p = symmetrization_inverse(u, alg);
    if (p.total_degree() > trunc.order)
        throw bound_error("duflo_inverse: filtration degree " + std::to_string(p.total_degree()) +
                          " exceeds truncation order " + std::to_string(trunc.order) +
                          "; raise the truncation");
    return apply_series_diffop(trunc.q_inverse, p);
}

/// Star product transported from U(g) through the Duflo map:
/// f * g = D^{-1}(D(f) . D(g)). Associative by construction.
inline Polynomial star_product(const Polynomial& f, const Polynomial& g, const LieAlgebra& alg,
                               const DufloTruncation& trunc) {
    const int df = std::max(f.total_degree(), 0);
    const int dg = std::max(g.total_degree(), 0);
    if (df + dg > trunc.order)
        throw bound_error("star_product: degrees " + std::to_string(df) + "+" + std::to_string(dg) +
                          " exceed truncation order " + std::to_string(trunc.order) +
                          "; raise the truncation");
    PbwElement prod = pbw_product(duflo_map(f, alg, trunc), duflo_map(g, alg, trunc), alg);
    return duflo_inverse(prod, alg, trunc);
}

/// Chevalley-Eilenberg cochain with U(g) coefficients: wedge-degree p keys
/// against PbwElement values. The module action is adjoint.
struct CeCochain {
    int dim = 0;
    int degree = 0;
    std::map<WedgeKey, PbwElement> comps;

    CeCochain() = default;
    CeCochain(int dimension, int p) : dim(dimension), degree(p) {}

    static CeCochain zero(int dim, int p) { return CeCochain(dim, p); }

    static CeCochain from_value(const PbwElement& u) {
        CeCochain c(u.dim, 0);
        if (!u.is_zero()) c.comps[{}] = u;
        return c;
    }

    bool is_zero() const { return comps.empty(); }

    void add_term(const WedgeKey& key, const PbwElement& value) {
        if (value.is_zero()) return;
        auto it = comps.find(key);
        if (it == comps.end()) {
            comps.emplace(key, value);
        } else {
            it->second += value;
            if (it->second.is_zero()) comps.erase(it);
        }
    }

    /// Value on an arbitrary index tuple, antisymmetrized through sorting.
    PbwElement value_at(std::vector<int> key) const {
        int sign = sort_with_sign(key);
        if (sign == 0) return PbwElement::zero(dim);
        auto it = comps.find(key);
        if (it == comps.end()) return PbwElement::zero(dim);
        return Scalar(sign) * it->second;
    }

    CeCochain& operator+=(const CeCochain& other) {
        for (const auto& [k, v] : other.comps) add_term(k, v);
        return *this;
    }

    friend CeCochain operator+(CeCochain a, const CeCochain& b) { return a += b; }

    friend CeCochain operator*(const Scalar& s, const CeCochain& c) {
        CeCochain r(c.dim, c.degree);
        if (s == 0) return r;
        for (const auto& [k, v] : c.comps) r.comps[k] = s * v;
        return r;
    }

    friend CeCochain operator-(const CeCochain& c) { return Scalar(-1) * c; }
    friend CeCochain operator-(CeCochain a, const CeCochain& b) { return a += -b; }

    friend bool operator==(const CeCochain& a, const CeCochain& b) {
        return a.dim == b.dim && a.comps == b.comps;
    }

    /// Maximal PBW filtration degree over all values; -1 if zero.
    int value_degree() const {
        int d = -1;
        for (const auto& [k, v] : comps) d = std::max(d, v.filtration_degree());
        return d;
    }
};

/// All strictly increasing index tuples of the given length, in lex order.
inline std::vector<WedgeKey> wedge_keys(int dim, int p) {
    std::vector<WedgeKey> out;
    if (p < 0 || p > dim) return out;
    WedgeKey cur;
    auto rec = [&](auto&& self, int start) -> void {
        if (static_cast<int>(cur.size()) == p) {
            out.push_back(cur);
            return;
        }
        for (int i = start; i < dim; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

/// Chevalley-Eilenberg differential with the adjoint action
/// e.u = eu - ue; delta o delta = 0.
inline CeCochain ce_differential(const CeCochain& c, const LieAlgebra& alg) {
    const int p = c.degree;
    CeCochain result(alg.dim, p + 1);
    if (p + 1 > alg.dim) return result;
    for (const auto& key : wedge_keys(alg.dim, p + 1)) {
        PbwElement value(alg.dim);
        for (int t = 0; t <= p; ++t) {
            WedgeKey rest;
            for (int r = 0; r <= p; ++r)
                if (r != t) rest.push_back(key[r]);
            auto it = c.comps.find(rest);
            if (it == c.comps.end()) continue;
            PbwElement acted = adjoint_action(alg, key[t], it->second);
            value += Scalar((t % 2 == 0) ? 1 : -1) * acted; // (-1)^{t+1} with 1-based t
        }
        for (int s = 0; s <= p; ++s)
            for (int t = s + 1; t <= p; ++t) {
                WedgeKey rest;
                for (int r = 0; r <= p; ++r)
                    if (r != s && r != t) rest.push_back(key[r]);
                const int outer_sign = (((s + 1) + (t + 1)) % 2 == 0) ? 1 : -1;
                for (int k = 0; k < alg.dim; ++k) {
                    const Scalar& cc = alg.c[key[s]][key[t]][k];
                    if (cc == 0) continue;
                    std::vector<int> inserted;
                    inserted.reserve(p);
                    inserted.push_back(k);
                    inserted.insert(inserted.end(), rest.begin(), rest.end());
                    int koszul = sort_with_sign(inserted);
                    if (koszul == 0) continue;
                    auto it = c.comps.find(inserted);
                    if (it == c.comps.end()) continue;
                    value += (Scalar(outer_sign * koszul) * cc) * it->second;
                }
            }
        result.add_term(key, value);
    }
    return result;
}

/// Shuffle cup product on CE cochains with pbw_product on values.
inline CeCochain cup_ce(const CeCochain& a, const CeCochain& b, const LieAlgebra& alg) {
    const int p = a.degree, q = b.degree;
    if (p + q > alg.dim)
        throw precondition_error("cup_ce: degree " + std::to_string(p + q) + " exceeds dimension");
    CeCochain result(alg.dim, p + q);
    for (const auto& key : wedge_keys(alg.dim, p + q)) {
        PbwElement value(alg.dim);
        // Choose the p positions sent to a; the complement goes to b.
        std::vector<int> mask(static_cast<std::size_t>(p + q), 0);
        std::fill(mask.end() - p, mask.end(), 1);
        do {
            WedgeKey left, right;
            std::vector<int> order;
            for (int pos = 0; pos < p + q; ++pos)
                if (mask[pos] == 1) {
                    left.push_back(key[pos]);
                    order.push_back(pos);
                }
            for (int pos = 0; pos < p + q; ++pos)
                if (mask[pos] == 0) {
                    right.push_back(key[pos]);
                    order.push_back(pos);
                }
            const int sign = permutation_sign(order);
            auto ita = a.comps.find(left);
            if (ita == a.comps.end()) continue;
            auto itb = b.comps.find(right);
            if (itb == b.comps.end()) continue;
            value += Scalar(sign) * pbw_product(ita->second, itb->second, alg);
        } while (std::next_permutation(mask.begin(), mask.end()));
        result.add_term(key, value);
    }
    return result;
}

/// Coefficientwise Duflo map from polyvectors to CE cochains.
inline CeCochain duflo_extension(const PolyVector& alpha, const LieAlgebra& alg,
                                 const DufloTruncation& trunc) {
    CeCochain result(alg.dim, alpha.degree);
    for (const auto& [key, coeff] : alpha.comps) result.add_term(key, duflo_map(coeff, alg, trunc));
    return result;
}

} // namespace duflo
