#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "duflo/errors.hpp"
#include "duflo/rational.hpp"

namespace duflo {

/// Exponent vector of a monomial; length equals the ambient dimension.
using Exponents = std::vector<int>;

inline int exponent_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

inline Exponents exponent_sum(const Exponents& a, const Exponents& b) {
    Exponents r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

/// Sparse multivariate polynomial over Scalar. No zero coefficients are
/// stored; the zero polynomial has an empty term map.
struct Polynomial {
    int dim = 0;
    std::map<Exponents, Scalar> terms;

    Polynomial() = default;
    explicit Polynomial(int dimension) : dim(dimension) {}

    static Polynomial zero(int dim) { return Polynomial(dim); }

    static Polynomial constant(int dim, const Scalar& c) {
        Polynomial p(dim);
        if (c != 0) p.terms[Exponents(dim, 0)] = c;
        return p;
    }

    static Polynomial coordinate(int dim, int i) {
        Polynomial p(dim);
        Exponents e(dim, 0);
        e[i] = 1;
        p.terms[e] = 1;
        return p;
    }

    static Polynomial monomial(int dim, const Exponents& e, const Scalar& c) {
        Polynomial p(dim);
        if (c != 0) p.terms[e] = c;
        return p;
    }

    bool is_zero() const { return terms.empty(); }

    /// Total degree; -1 for the zero polynomial.
    int total_degree() const {
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

    Polynomial& operator+=(const Polynomial& other) {
        for (const auto& [e, c] : other.terms) add_term(e, c);
        return *this;
    }

    Polynomial& operator-=(const Polynomial& other) {
        for (const auto& [e, c] : other.terms) add_term(e, -c);
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r(a.dim);
        for (const auto& [ea, ca] : a.terms)
            for (const auto& [eb, cb] : b.terms) r.add_term(exponent_sum(ea, eb), ca * cb);
        return r;
    }

    friend Polynomial operator*(const Scalar& s, const Polynomial& p) {
        Polynomial r(p.dim);
        if (s == 0) return r;
        for (const auto& [e, c] : p.terms) r.terms[e] = s * c;
        return r;
    }

    friend Polynomial operator-(const Polynomial& p) { return Scalar(-1) * p; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) {
        return a.dim == b.dim && a.terms == b.terms;
    }

    /// Partial derivative with respect to the i-th coordinate.
    Polynomial derivative(int i) const {
        Polynomial r(dim);
        for (const auto& [e, c] : terms) {
            if (e[i] == 0) continue;
            Exponents d = e;
            d[i] -= 1;
            r.add_term(d, c * e[i]);
        }
        return r;
    }

    /// Applies the constant-coefficient operator prod_i d_i^{multi[i]}.
    Polynomial multi_derivative(const Exponents& multi) const {
        Polynomial r = *this;
        for (int i = 0; i < dim; ++i)
            for (int k = 0; k < multi[i]; ++k) r = r.derivative(i);
        return r;
    }

    /// Truncation to total degree <= bound.
    Polynomial truncate(int bound) const {
        Polynomial r(dim);
        for (const auto& [e, c] : terms)
            if (exponent_degree(e) <= bound) r.terms[e] = c;
        return r;
    }

    std::string str(const std::vector<std::string>& labels) const {
        if (terms.empty()) return "0";
        std::string out;
        bool first = true;
        for (const auto& [e, c] : terms) {
            Scalar coeff = c;
            if (first) {
                if (coeff < 0) {
                    out += "-";
                    coeff = -coeff;
                }
            } else {
                out += (coeff < 0) ? " - " : " + ";
                if (coeff < 0) coeff = -coeff;
            }
            first = false;
            std::string mono;
            for (int i = 0; i < dim; ++i) {
                if (e[i] == 0) continue;
                if (!mono.empty()) mono += "*";
                mono += labels.empty() ? ("x" + std::to_string(i + 1)) : labels[i];
                if (e[i] > 1) mono += "^" + std::to_string(e[i]);
            }
            if (mono.empty()) {
                out += scalar_str(coeff);
            } else if (coeff == 1) {
                out += mono;
            } else {
                out += scalar_str(coeff) + "*" + mono;
            }
        }
        return out;
    }
};

/// Appends all exponent vectors of the given length with total degree
/// exactly d, in lexicographic order.
inline void exponents_of_degree(int dim, int d, std::vector<Exponents>& out) {
    if (dim == 0) {
        if (d == 0) out.push_back({});
        return;
    }
    Exponents cur(dim, 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == dim - 1) {
            cur[pos] = remaining;
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= remaining; ++k) {
            cur[pos] = k;
            self(self, pos + 1, remaining - k);
        }
    };
    rec(rec, 0, d);
}

inline std::vector<Exponents> monomial_basis_exact(int dim, int d) {
    std::vector<Exponents> out;
    exponents_of_degree(dim, d, out);
    return out;
}

/// Basis of polynomials of total degree <= bound, ordered by degree then
/// lexicographically.
inline std::vector<Exponents> monomial_basis_upto(int dim, int bound) {
    std::vector<Exponents> out;
    for (int d = 0; d <= bound; ++d) exponents_of_degree(dim, d, out);
    return out;
}

} // namespace duflo
