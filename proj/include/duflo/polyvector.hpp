#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "duflo/errors.hpp"
#include "duflo/lie_algebra.hpp"
#include "duflo/polynomial.hpp"

namespace duflo {

/// Strictly increasing index tuple naming a wedge of coordinate vector
/// fields d_{i1} ^ ... ^ d_{ip}; 0-based indices.
using WedgeKey = std::vector<int>;

/// Sorts an index tuple, returning the Koszul sign, or 0 on a repeated index.
inline int sort_with_sign(std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        std::size_t j = i;
        while (j > 0 && idx[j - 1] > idx[j]) {
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
            --j;
        }
    }
    for (std::size_t i = 1; i < idx.size(); ++i)
        if (idx[i - 1] == idx[i]) return 0;
    return sign;
}

inline int permutation_sign(const std::vector<int>& perm) {
    std::vector<int> copy = perm;
    return sort_with_sign(copy);
}

/// Polyvector field on the dual space: a sparse sum of polynomial
/// coefficients against wedge-basis keys. Degree 0 is a bare polynomial
/// stored under the empty key. Zero is an empty map at any nominal degree.
struct PolyVector {
    int dim = 0;
    int degree = 0;
    std::map<WedgeKey, Polynomial> comps;

    PolyVector() = default;
    PolyVector(int dimension, int p) : dim(dimension), degree(p) {}

    static PolyVector zero(int dim, int p) { return PolyVector(dim, p); }

    static PolyVector from_polynomial(const Polynomial& f) {
        PolyVector v(f.dim, 0);
        if (!f.is_zero()) v.comps[{}] = f;
        return v;
    }

    static PolyVector basis(int dim, const WedgeKey& key, const Polynomial& coeff) {
        PolyVector v(dim, static_cast<int>(key.size()));
        if (!coeff.is_zero()) v.comps[key] = coeff;
        return v;
    }

    bool is_zero() const { return comps.empty(); }

    void add_term(const WedgeKey& key, const Polynomial& coeff) {
        if (coeff.is_zero()) return;
        auto it = comps.find(key);
        if (it == comps.end()) {
            comps.emplace(key, coeff);
        } else {
            it->second += coeff;
            if (it->second.is_zero()) comps.erase(it);
        }
    }

    PolyVector& operator+=(const PolyVector& other) {
        for (const auto& [k, f] : other.comps) add_term(k, f);
        return *this;
    }

    friend PolyVector operator+(PolyVector a, const PolyVector& b) { return a += b; }

    friend PolyVector operator*(const Scalar& s, const PolyVector& v) {
        PolyVector r(v.dim, v.degree);
        if (s == 0) return r;
        for (const auto& [k, f] : v.comps) r.comps[k] = s * f;
        return r;
    }

    friend PolyVector operator-(const PolyVector& v) { return Scalar(-1) * v; }

    friend PolyVector operator-(PolyVector a, const PolyVector& b) { return a += -b; }

    friend bool operator==(const PolyVector& a, const PolyVector& b) {
        return a.dim == b.dim && a.comps == b.comps;
    }

    /// Maximal total degree of the coefficient polynomials; -1 if zero.
    int coefficient_degree() const {
        int d = -1;
        for (const auto& [k, f] : comps) d = std::max(d, f.total_degree());
        return d;
    }

    std::string str(const std::vector<std::string>& labels) const {
        if (comps.empty()) return "0";
        std::string out;
        for (const auto& [k, f] : comps) {
            if (!out.empty()) out += " + ";
            out += "(" + f.str(labels) + ")";
            for (std::size_t t = 0; t < k.size(); ++t) {
                out += (t == 0) ? " d_" : "^d_";
                out += labels.empty() ? std::to_string(k[t] + 1) : labels[k[t]];
            }
        }
        return out;
    }
};

/// Exterior product; Koszul sign from merging the index tuples.
inline PolyVector wedge(const PolyVector& a, const PolyVector& b) {
    PolyVector r(a.dim, a.degree + b.degree);
    for (const auto& [ka, fa] : a.comps)
        for (const auto& [kb, fb] : b.comps) {
            std::vector<int> merged = ka;
            merged.insert(merged.end(), kb.begin(), kb.end());
            int sign = sort_with_sign(merged);
            if (sign == 0) continue;
            r.add_term(merged, Scalar(sign) * (fa * fb));
        }
    return r;
}

/// Expansion into antisymmetric tensor components: each wedge key spreads
/// over all its permutations with sign/p! coefficients.
inline std::map<std::vector<int>, Polynomial> to_tensor(const PolyVector& a) {
    std::map<std::vector<int>, Polynomial> out;
    const Scalar inv_fact = Scalar(1) / Scalar(factorial(a.degree));
    for (const auto& [key, coeff] : a.comps) {
        std::vector<int> positions(key.size());
        for (std::size_t i = 0; i < key.size(); ++i) positions[i] = static_cast<int>(i);
        do {
            std::vector<int> perm_key(key.size());
            for (std::size_t i = 0; i < key.size(); ++i) perm_key[i] = key[positions[i]];
            const int sign = permutation_sign(positions);
            Polynomial contribution = (Scalar(sign) * inv_fact) * coeff;
            auto it = out.find(perm_key);
            if (it == out.end())
                out.emplace(perm_key, contribution);
            else
                it->second += contribution;
        } while (std::next_permutation(positions.begin(), positions.end()));
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

namespace detail {

// One decomposable summand is handled as a list of vector fields with the
// polynomial coefficient attached to the first factor.
struct SchoutenAccumulator {
    PolyVector& result;

    void add(int sign, const Polynomial& coeff, std::vector<int> indices) {
        int koszul = sort_with_sign(indices);
        if (koszul == 0) return;
        result.add_term(indices, Scalar(sign * koszul) * coeff);
    }
};

// Bracket of two decomposable terms f d_{ka} and g d_{kb}, p,q >= 1.
// With the polynomial coefficient attached to the first factor of each
// wedge, [xi_i, eta_j] vanishes unless it touches a coefficient-carrying
// factor, which leaves exactly the two classical sums.
inline void schouten_pair_terms(const WedgeKey& ka, const Polynomial& fa, const WedgeKey& kb,
                                const Polynomial& fb, PolyVector& result) {
    const int p = static_cast<int>(ka.size());
    const int q = static_cast<int>(kb.size());
    SchoutenAccumulator acc{result};
    for (int i = 0; i < p; ++i) {
        // (xi_i, eta_0) term: f (d_{ka[i]} g) d_{kb[0]} ^ ka\i ^ kb\0
        Polynomial w = fa * fb.derivative(ka[i]);
        if (w.is_zero()) continue;
        std::vector<int> idx;
        idx.reserve(p + q - 1);
        idx.push_back(kb[0]);
        for (int r = 0; r < p; ++r)
            if (r != i) idx.push_back(ka[r]);
        for (int s = 1; s < q; ++s) idx.push_back(kb[s]);
        acc.add((i % 2 == 0) ? 1 : -1, w, idx);
    }
    for (int j = 0; j < q; ++j) {
        // (xi_0, eta_j) term: -g (d_{kb[j]} f) d_{ka[0]} ^ ka\0 ^ kb\j
        Polynomial w = fb * fa.derivative(kb[j]);
        if (w.is_zero()) continue;
        std::vector<int> idx;
        idx.reserve(p + q - 1);
        idx.push_back(ka[0]);
        for (int r = 1; r < p; ++r) idx.push_back(ka[r]);
        for (int s = 0; s < q; ++s)
            if (s != j) idx.push_back(kb[s]);
        acc.add((j % 2 == 0) ? -1 : 1, w, idx);
    }
}

// Contraction case [f d_{ka}, h] = (-1)^{p-1} sum_i (-1)^i f (d_{ka[i]} h) d_{ka\i}.
// The global (-1)^{p-1} makes the bracket a biderivation of the wedge
// together with the pair case; at p = 1 it reduces to [xi, h] = xi(h).
inline void schouten_on_function(const WedgeKey& ka, const Polynomial& fa, const Polynomial& h,
                                 PolyVector& result) {
    const int p = static_cast<int>(ka.size());
    for (int i = 0; i < p; ++i) {
        const int sign = ((p - 1 + i) % 2 == 0) ? 1 : -1;
        Polynomial w = fa * h.derivative(ka[i]);
        if (w.is_zero()) continue;
        std::vector<int> rest;
        rest.reserve(p - 1);
        for (int r = 0; r < p; ++r)
            if (r != i) rest.push_back(ka[r]);
        result.add_term(rest, Scalar(sign) * w);
    }
}

} // namespace detail

/// Schouten-Nijenhuis bracket, extended bilinearly over wedge-basis terms.
/// Result degree is deg a + deg b - 1; zero when that would be negative.
inline PolyVector schouten(const PolyVector& a, const PolyVector& b) {
    const int p = a.degree, q = b.degree;
    if (p == 0 && q == 0) return PolyVector::zero(a.dim, 0);
    if (p == 0) {
        // Graded symmetry: [a,b] = -(-1)^{(|a|-1)(|b|-1)} [b,a].
        PolyVector flipped = schouten(b, a);
        const int sign = (((p - 1) * (q - 1)) % 2 == 0) ? -1 : 1;
        return Scalar(sign) * flipped;
    }
    PolyVector result(a.dim, p + q - 1);
    for (const auto& [ka, fa] : a.comps) {
        for (const auto& [kb, fb] : b.comps) {
            if (q == 0)
                detail::schouten_on_function(ka, fa, fb, result);
            else
                detail::schouten_pair_terms(ka, fa, kb, fb, result);
        }
    }
    return result;
}

/// Linear Poisson bivector of a Lie algebra: the (i,j) wedge coefficient is
/// the linear polynomial sum_k c[i][j][k] x_k.
inline PolyVector kirillov_kostant(const LieAlgebra& alg) {
    PolyVector gamma(alg.dim, 2);
    for (int i = 0; i < alg.dim; ++i)
        for (int j = i + 1; j < alg.dim; ++j) {
            Polynomial coeff(alg.dim);
            for (int k = 0; k < alg.dim; ++k) {
                Exponents e(alg.dim, 0);
                e[k] = 1;
                coeff.add_term(e, alg.c[i][j][k]);
            }
            gamma.add_term({i, j}, coeff);
        }
    return gamma;
}

/// Poisson differential [gamma, -]; raises polyvector degree by one and
/// preserves coefficient degree.
inline PolyVector poisson_differential(const LieAlgebra& alg, const PolyVector& a) {
    return schouten(kirillov_kostant(alg), a);
}

} // namespace duflo
