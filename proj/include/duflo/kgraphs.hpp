#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "duflo/errors.hpp"
#include "duflo/polynomial.hpp"
#include "duflo/polyvector.hpp"
#include "duflo/rational.hpp"

namespace duflo {

/// Target of a graph edge: aerial vertex 1..n or ground vertex 1..m.
struct KTarget {
    bool is_ground = false;
    int index = 0;  // 1-based

    friend bool operator==(const KTarget& a, const KTarget& b) {
        return a.is_ground == b.is_ground && a.index == b.index;
    }
    friend bool operator<(const KTarget& a, const KTarget& b) {
        if (a.is_ground != b.is_ground) return !a.is_ground;  // aerial targets first
        return a.index < b.index;
    }
    std::string str() const { return is_ground ? ("G" + std::to_string(index)) : std::to_string(index); }
};

struct KEdge {
    int src = 0;  // aerial, 1-based
    KTarget dst;

    friend bool operator==(const KEdge& a, const KEdge& b) { return a.src == b.src && a.dst == b.dst; }
};

/// Labeled directed graph with aerial and ground vertices. Edges start at
/// aerial vertices, carry a total order grouped by source, and contain no
/// loops or repeats. The optional partition marks V^{1,1} for
/// l-admissibility.
struct KGraph {
    int aerial = 0;
    int ground = 0;
    std::vector<KEdge> edges;
    std::optional<std::vector<int>> first_part;

    std::vector<KEdge> out_edges(int vertex) const {
        std::vector<KEdge> out;
        for (const auto& e : edges)
            if (e.src == vertex) out.push_back(e);
        return out;
    }

    int out_degree(int vertex) const {
        int n = 0;
        for (const auto& e : edges)
            if (e.src == vertex) ++n;
        return n;
    }

    int aerial_in_degree(int vertex) const {
        int n = 0;
        for (const auto& e : edges)
            if (!e.dst.is_ground && e.dst.index == vertex) ++n;
        return n;
    }

    int ground_in_degree(int g) const {
        int n = 0;
        for (const auto& e : edges)
            if (e.dst.is_ground && e.dst.index == g) ++n;
        return n;
    }

    std::string str() const {
        std::string out;
        for (const auto& e : edges) {
            if (!out.empty()) out += ",";
            out += std::to_string(e.src) + "->" + e.dst.str();
        }
        return out;
    }
};

/// Checks the admissibility invariants; throws structural_error otherwise.
inline void validate_graph(const KGraph& g) {
    if (g.aerial < 0 || g.ground < 0) throw structural_error("graph: negative vertex counts");
    std::set<std::pair<int, std::pair<bool, int>>> seen;
    int last_src = 0;
    for (const auto& e : g.edges) {
        if (e.src < 1 || e.src > g.aerial) throw structural_error("graph: edge source must be aerial");
        if (e.dst.is_ground) {
            if (e.dst.index < 1 || e.dst.index > g.ground)
                throw structural_error("graph: ground target out of range");
        } else {
            if (e.dst.index < 1 || e.dst.index > g.aerial)
                throw structural_error("graph: aerial target out of range");
            if (e.dst.index == e.src) throw structural_error("graph: loop edge");
        }
        if (!seen.insert({e.src, {e.dst.is_ground, e.dst.index}}).second)
            throw structural_error("graph: repeated edge " + std::to_string(e.src) + "->" + e.dst.str());
        if (e.src < last_src)
            throw structural_error("graph: edge order must be grouped by source vertex");
        last_src = e.src;
    }
    if (g.first_part) {
        for (int v : *g.first_part)
            if (v < 1 || v > g.aerial) throw structural_error("graph: partition vertex out of range");
    }
}

/// In-degree <= 1 on aerial vertices. The optional exemption skips a
/// distinguished vertex whose coefficients are not linear (the alpha vertex
/// of the tangent-map graphs, which may receive arbitrarily many returns).
inline bool is_linear(const KGraph& g, int exempt_vertex = 0) {
    for (int v = 1; v <= g.aerial; ++v) {
        if (v == exempt_vertex) continue;
        if (g.aerial_in_degree(v) > 1) return false;
    }
    return true;
}

/// All admissible linear graphs (each aerial vertex receives at most one
/// aerial edge) in deterministic order. Edge count may be pinned; the
/// weight-bearing count is 2n+m-2. Optional per-vertex out-degrees restrict
/// the enumeration.
inline std::vector<KGraph> enumerate_linear_graphs(int n, int m, std::optional<int> edge_count,
                                                   const std::optional<std::vector<int>>& out_degrees = std::nullopt) {
    if (n < 0 || m < 0 || n + m < 1)
        throw precondition_error("enumerate_linear_graphs: need n,m >= 0 and n+m >= 1");
    if (n == 0) return {};  // edges start at aerial vertices
    std::vector<KTarget> all_targets;
    for (int a = 1; a <= n; ++a) all_targets.push_back({false, a});
    for (int g = 1; g <= m; ++g) all_targets.push_back({true, g});

    std::vector<KGraph> out;
    std::vector<std::vector<KEdge>> chosen(static_cast<std::size_t>(n) + 1);
    std::vector<int> in_deg(static_cast<std::size_t>(n) + 1, 0);

    const int max_per_vertex = n - 1 + m;
    auto max_remaining = [&](int from_vertex) {
        int cap = 0;
        for (int v = from_vertex; v <= n; ++v)
            cap += out_degrees ? (*out_degrees)[static_cast<std::size_t>(v - 1)] : max_per_vertex;
        return cap;
    };

    int edges_so_far = 0;
    auto emit = [&]() {
        if (edge_count && edges_so_far != *edge_count) return;
        KGraph g;
        g.aerial = n;
        g.ground = m;
        for (int v = 1; v <= n; ++v)
            g.edges.insert(g.edges.end(), chosen[static_cast<std::size_t>(v)].begin(),
                           chosen[static_cast<std::size_t>(v)].end());
        out.push_back(std::move(g));
    };

    // Per vertex, pick an ordered tuple of distinct targets, shortest first.
    auto rec = [&](auto&& self, int vertex) -> void {
        if (vertex > n) {
            emit();
            return;
        }
        if (edge_count && edges_so_far + max_remaining(vertex) < *edge_count) return;
        const int lo = out_degrees ? (*out_degrees)[static_cast<std::size_t>(vertex - 1)] : 0;
        const int hi = out_degrees ? lo : max_per_vertex;
        for (int s = lo; s <= hi; ++s) {
            if (edge_count && edges_so_far + s > *edge_count) break;
            std::vector<int> pick;
            auto tuple_rec = [&](auto&& inner) -> void {
                if (static_cast<int>(pick.size()) == s) {
                    edges_so_far += s;
                    self(self, vertex + 1);
                    edges_so_far -= s;
                    return;
                }
                for (int t = 0; t < static_cast<int>(all_targets.size()); ++t) {
                    const KTarget& tgt = all_targets[static_cast<std::size_t>(t)];
                    if (!tgt.is_ground && tgt.index == vertex) continue;
                    if (std::find(pick.begin(), pick.end(), t) != pick.end()) continue;
                    if (!tgt.is_ground && in_deg[static_cast<std::size_t>(tgt.index)] >= 1) continue;
                    pick.push_back(t);
                    if (!tgt.is_ground) in_deg[static_cast<std::size_t>(tgt.index)] += 1;
                    chosen[static_cast<std::size_t>(vertex)].push_back({vertex, tgt});
                    inner(inner);
                    chosen[static_cast<std::size_t>(vertex)].pop_back();
                    if (!tgt.is_ground) in_deg[static_cast<std::size_t>(tgt.index)] -= 1;
                    pick.pop_back();
                }
            };
            tuple_rec(tuple_rec);
        }
    };
    rec(rec, 1);
    return out;
}

/// l-admissibility: V^{1,1} = {1..l+1}, no edge joins two of its vertices,
/// and the edge count matches the type (n, m, 2n+m-2-l).
inline bool is_l_admissible(const KGraph& g, int l) {
    if (!g.first_part) throw structural_error("is_l_admissible: graph has no partition");
    validate_graph(g);
    std::vector<int> part = *g.first_part;
    std::sort(part.begin(), part.end());
    std::vector<int> expected;
    for (int v = 1; v <= l + 1; ++v) expected.push_back(v);
    if (part != expected) return false;
    std::set<int> members(part.begin(), part.end());
    for (const auto& e : g.edges)
        if (!e.dst.is_ground && members.count(e.src) && members.count(e.dst.index)) return false;
    return static_cast<int>(g.edges.size()) == 2 * g.aerial + g.ground - 2 - l;
}

/// Dimension bookkeeping for star-product terms: m - 2 = sum s_k - 2n.
inline bool star_term_dimension_ok(const KGraph& g, const std::vector<int>& polyvector_degrees) {
    int total = 0;
    for (int s : polyvector_degrees) total += s;
    return g.ground - 2 == total - 2 * g.aerial;
}

/// The contraction operator of a labeled graph: polyvector tensor
/// coefficients routed along the edges, with incoming edges differentiating.
inline Polynomial b_gamma(const KGraph& g, const std::vector<PolyVector>& alphas,
                          const std::vector<Polynomial>& functions) {
    validate_graph(g);
    const int n = g.aerial, m = g.ground;
    if (static_cast<int>(alphas.size()) != n)
        throw precondition_error("b_gamma: need one polyvector per aerial vertex");
    if (static_cast<int>(functions.size()) != m)
        throw precondition_error("b_gamma: need one function per ground vertex");
    const int dim = n > 0 ? alphas[0].dim : (m > 0 ? functions[0].dim : 0);
    for (int k = 1; k <= n; ++k)
        if (g.out_degree(k) != alphas[static_cast<std::size_t>(k - 1)].degree)
            throw precondition_error("b_gamma: aerial vertex " + std::to_string(k) + " has out-degree " +
                                     std::to_string(g.out_degree(k)) + " but its polyvector has degree " +
                                     std::to_string(alphas[static_cast<std::size_t>(k - 1)].degree));

    std::vector<std::map<std::vector<int>, Polynomial>> tensors;
    tensors.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) tensors.push_back(to_tensor(alphas[static_cast<std::size_t>(k)]));

    std::vector<std::vector<int>> out_slots(static_cast<std::size_t>(n) + 1);
    for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
        out_slots[static_cast<std::size_t>(g.edges[static_cast<std::size_t>(e)].src)].push_back(e);

    const int n_edges = static_cast<int>(g.edges.size());
    Polynomial result(dim);
    std::vector<int> labels(static_cast<std::size_t>(n_edges), 0);
    while (true) {
        // factor for this labeling
        Polynomial term = Polynomial::constant(dim, 1);
        bool zero = false;
        for (int k = 1; k <= n && !zero; ++k) {
            std::vector<int> slot_labels;
            for (int e : out_slots[static_cast<std::size_t>(k)])
                slot_labels.push_back(labels[static_cast<std::size_t>(e)]);
            const auto& tensor = tensors[static_cast<std::size_t>(k - 1)];
            auto it = tensor.find(slot_labels);
            if (it == tensor.end()) {
                zero = true;
                break;
            }
            Polynomial factor = it->second;
            for (int e = 0; e < n_edges; ++e) {
                const KEdge& edge = g.edges[static_cast<std::size_t>(e)];
                if (!edge.dst.is_ground && edge.dst.index == k)
                    factor = factor.derivative(labels[static_cast<std::size_t>(e)]);
            }
            if (factor.is_zero()) {
                zero = true;
                break;
            }
            term = term * factor;
        }
        for (int l = 1; l <= m && !zero; ++l) {
            Exponents multi(static_cast<std::size_t>(dim), 0);
            for (int e = 0; e < n_edges; ++e) {
                const KEdge& edge = g.edges[static_cast<std::size_t>(e)];
                if (edge.dst.is_ground && edge.dst.index == l)
                    multi[static_cast<std::size_t>(labels[static_cast<std::size_t>(e)])] += 1;
            }
            Polynomial factor = functions[static_cast<std::size_t>(l - 1)].multi_derivative(multi);
            if (factor.is_zero()) {
                zero = true;
                break;
            }
            term = term * factor;
        }
        if (!zero) result += term;
        // next labeling
        int pos = n_edges - 1;
        while (pos >= 0) {
            labels[static_cast<std::size_t>(pos)] += 1;
            if (labels[static_cast<std::size_t>(pos)] < dim) break;
            labels[static_cast<std::size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return result;
}

/// Decomposition of a 0-admissible linear graph after removing the
/// distinguished vertex 1 and its edges.
struct ZeroAdmissibleDecomposition {
    int trivial_edges = 0;
    std::vector<int> snails;  // chain lengths
    std::vector<int> wheels;  // cycle lengths
    int other = 0;

    bool pure() const { return other == 0; }
};

inline ZeroAdmissibleDecomposition classify_zero_admissible(const KGraph& g) {
    KGraph marked = g;
    if (!marked.first_part) marked.first_part = std::vector<int>{1};
    if (!is_l_admissible(marked, 0))
        throw precondition_error("classify_zero_admissible: graph is not 0-admissible");
    if (!is_linear(g, 1))
        throw precondition_error("classify_zero_admissible: graph is not linear away from the alpha vertex");

    const int n = g.aerial, m = g.ground;
    // Union-find over non-alpha nodes: aerial 2..n and grounds.
    const int nodes = (n - 1) + m;
    auto node_of_aerial = [&](int v) { return v - 2; };
    auto node_of_ground = [&](int gi) { return (n - 1) + gi - 1; };
    std::vector<int> parent(static_cast<std::size_t>(std::max(nodes, 1)));
    for (int i = 0; i < nodes; ++i) parent[static_cast<std::size_t>(i)] = i;
    auto find = [&](auto&& self, int x) -> int {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        (void)self;
        return x;
    };
    auto unite = [&](int a, int b) {
        int ra = find(find, a), rb = find(find, b);
        if (ra != rb) parent[static_cast<std::size_t>(ra)] = rb;
    };
    for (const auto& e : g.edges) {
        if (e.src == 1) continue;
        if (e.dst.is_ground)
            unite(node_of_aerial(e.src), node_of_ground(e.dst.index));
        else if (e.dst.index != 1)
            unite(node_of_aerial(e.src), node_of_aerial(e.dst.index));
    }

    std::map<int, std::vector<int>> comp_aerial;   // root -> aerial members
    std::map<int, std::vector<int>> comp_grounds;  // root -> ground members
    for (int v = 2; v <= n; ++v) comp_aerial[find(find, node_of_aerial(v))].push_back(v);
    for (int gi = 1; gi <= m; ++gi) comp_grounds[find(find, node_of_ground(gi))].push_back(gi);

    std::set<int> roots;
    for (const auto& [r, _] : comp_aerial) roots.insert(r);
    for (const auto& [r, _] : comp_grounds) roots.insert(r);

    ZeroAdmissibleDecomposition result;
    for (int root : roots) {
        const auto aerials = comp_aerial.count(root) ? comp_aerial[root] : std::vector<int>{};
        const auto grounds = comp_grounds.count(root) ? comp_grounds[root] : std::vector<int>{};
        std::set<int> aset(aerials.begin(), aerials.end());
        std::set<int> gset(grounds.begin(), grounds.end());

        int alpha_edges_to_grounds = 0;
        std::vector<int> alpha_edges_to_aerials;
        for (const auto& e : g.edges) {
            if (e.src != 1) continue;
            if (e.dst.is_ground && gset.count(e.dst.index)) ++alpha_edges_to_grounds;
            if (!e.dst.is_ground && aset.count(e.dst.index)) alpha_edges_to_aerials.push_back(e.dst.index);
        }

        if (aerials.empty()) {
            // isolated ground: a trivial edge iff alpha reaches it exactly once
            if (grounds.size() == 1 && alpha_edges_to_grounds == 1 &&
                g.ground_in_degree(grounds[0]) == 1)
                result.trivial_edges += 1;
            else
                result.other += 1;
            continue;
        }

        const int p = static_cast<int>(aerials.size());
        int internal = 0, to_ground = 0, to_alpha = 0, stray = 0;
        std::map<int, int> internal_out, internal_in, alpha_returns;
        int ground_leg_src = 0;
        for (const auto& e : g.edges) {
            if (e.src == 1 || !aset.count(e.src)) continue;
            if (e.dst.is_ground) {
                ++to_ground;
                ground_leg_src = e.src;
                if (!gset.count(e.dst.index)) ++stray;
            } else if (e.dst.index == 1) {
                ++to_alpha;
                alpha_returns[e.src] += 1;
            } else if (aset.count(e.dst.index)) {
                ++internal;
                internal_out[e.src] += 1;
                internal_in[e.dst.index] += 1;
            } else {
                ++stray;
            }
        }
        bool everyone_returns = true;
        for (int v : aerials)
            if (alpha_returns[v] != 1) everyone_returns = false;

        bool is_wheel = grounds.empty() && alpha_edges_to_grounds == 0 &&
                        alpha_edges_to_aerials.empty() && stray == 0 && everyone_returns &&
                        internal == p && to_ground == 0;
        if (is_wheel) {
            // single directed cycle covering the component
            for (int v : aerials)
                if (internal_out[v] != 1 || internal_in[v] != 1) is_wheel = false;
        }
        if (is_wheel) {
            result.wheels.push_back(p);
            continue;
        }

        bool is_snail = grounds.size() == 1 && alpha_edges_to_grounds == 0 && stray == 0 &&
                        everyone_returns && to_ground == 1 && internal == p - 1 &&
                        alpha_edges_to_aerials.size() == 1;
        if (is_snail) {
            // internal edges must form a path ending at the ground-leg vertex,
            // with alpha feeding the in-degree-0 tail.
            int tail = 0;
            for (int v : aerials) {
                if (internal_in[v] == 0) tail = (tail == 0) ? v : -1;
                if (internal_out[v] > 1 || internal_in[v] > 1) is_snail = false;
            }
            if (tail <= 0 || alpha_edges_to_aerials[0] != tail) is_snail = false;
            if (is_snail) {
                // walk the chain from the tail
                int cur = tail, steps = 0;
                std::set<int> visited;
                while (steps < p) {
                    visited.insert(cur);
                    int next = 0;
                    for (const auto& e : g.edges)
                        if (e.src == cur && !e.dst.is_ground && e.dst.index != 1 && aset.count(e.dst.index))
                            next = e.dst.index;
                    if (next == 0) break;
                    cur = next;
                    ++steps;
                }
                if (static_cast<int>(visited.size()) != p || cur != ground_leg_src) is_snail = false;
            }
        }
        if (is_snail) {
            result.snails.push_back(p);
            continue;
        }
        result.other += 1;
    }
    return result;
}

/// Exact Bernoulli numbers, B_1 = -1/2 convention.
inline Scalar bernoulli_number(int n) {
    static std::vector<Scalar> cache{Scalar(1)};
    while (static_cast<int>(cache.size()) <= n) {
        const int k = static_cast<int>(cache.size());
        Scalar sum = 0;
        for (int j = 0; j < k; ++j) sum += Scalar(binomial(k + 1, j)) * cache[static_cast<std::size_t>(j)];
        cache.push_back(-sum / Scalar(k + 1));
    }
    return cache[static_cast<std::size_t>(n)];
}

/// Coefficients of the Bernoulli polynomial b_n(x) = sum_k C(n,k) B_k x^{n-k},
/// indexed by the power of x.
inline std::vector<Scalar> bernoulli_polynomial(int n) {
    std::vector<Scalar> coeffs(static_cast<std::size_t>(n) + 1, Scalar(0));
    for (int k = 0; k <= n; ++k) coeffs[static_cast<std::size_t>(n - k)] = Scalar(binomial(n, k)) * bernoulli_number(k);
    return coeffs;
}

inline Scalar bernoulli_polynomial_at(int n, const Scalar& x) {
    const auto coeffs = bernoulli_polynomial(n);
    Scalar value = 0;
    for (int k = n; k >= 0; --k) value = value * x + coeffs[static_cast<std::size_t>(k)];
    return value;
}

/// Closed-form endpoint weights of the deployed chain graph with p+2 aerial
/// vertices: (-1)^{p+1}/(p+1)! b_{p+1} at 0 and 1, and their difference,
/// which is the snail weight.
struct BernoulliWeight {
    Scalar value_at_zero;
    Scalar value_at_one;
    Scalar difference;
};

inline BernoulliWeight bernoulli_weight(int p) {
    if (p < 0) throw precondition_error("bernoulli_weight: p must be >= 0");
    const Scalar scale = Scalar((p % 2 == 0) ? 1 : -1) * (Scalar(1) / Scalar(factorial(p + 1)));
    // (-1)^{p+1} = -(-1)^p; fold the minus into the endpoint values.
    const Scalar v0 = -scale * bernoulli_polynomial_at(p + 1, Scalar(0));
    const Scalar v1 = -scale * bernoulli_polynomial_at(p + 1, Scalar(1));
    return {v0, v1, v0 - v1};
}

/// Monte-Carlo weight estimate; the standard error is the sample standard
/// deviation over sqrt(count).
struct WeightEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    long long samples = 0;
    std::uint64_t seed = 0;
};

namespace detail {

// Counter-based stream: each sample index opens an independent, splittable
// generator, so block-parallel evaluation reproduces the sequential result.
struct CounterRng {
    std::uint64_t state;

    static CounterRng at(std::uint64_t seed, std::uint64_t index) {
        CounterRng r{seed + 0x9E3779B97F4A7C15ULL * (index + 1)};
        r.next();
        return r;
    }

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

using Cx = std::complex<double>;

// Half-plane point from unit-disk coordinates, 0 -> i.
inline Cx cayley(const Cx& zeta) { return Cx(0, 1) * (Cx(1, 0) + zeta) / (Cx(1, 0) - zeta); }
inline Cx cayley_velocity(const Cx& zeta) {
    Cx d = Cx(1, 0) - zeta;
    return Cx(0, 2) / (d * d);
}

inline int lu_det_sign(std::vector<std::vector<double>>& m, double& log_abs) {
    const int n = static_cast<int>(m.size());
    int sign = 1;
    log_abs = 0.0;
    for (int c = 0; c < n; ++c) {
        int pivot = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) >
                std::fabs(m[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(c)]))
                pivot = r;
        if (m[static_cast<std::size_t>(pivot)][static_cast<std::size_t>(c)] == 0.0) return 0;
        if (pivot != c) {
            std::swap(m[static_cast<std::size_t>(pivot)], m[static_cast<std::size_t>(c)]);
            sign = -sign;
        }
        const double d = m[static_cast<std::size_t>(c)][static_cast<std::size_t>(c)];
        if (d < 0) sign = -sign;
        log_abs += std::log(std::fabs(d));
        for (int r = c + 1; r < n; ++r) {
            const double f = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] / d;
            if (f == 0.0) continue;
            for (int k = c; k < n; ++k)
                m[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] -=
                    f * m[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)];
        }
    }
    return sign;
}

} // namespace detail

/// Orientation of the gauge slice, pinned once by the wedge-graph
/// cross-check against the first-order star commutator.
inline constexpr double kWeightOrientation = 1.0;

/// Monte-Carlo estimate of the configuration-space weight integral of a
/// labeled graph. Gauge: first ground pinned at 0; scale fixed by the last
/// ground at 1 when m >= 2, by |p_1| = 1 when m == 1, and by p_1 = i when
/// m == 0. Integration runs over the open stratum with the signed Jacobian
/// of the angle maps.
inline WeightEstimate weight_mc(const KGraph& g, long long samples, std::uint64_t seed) {
    validate_graph(g);
    if (samples <= 0) throw precondition_error("weight_mc: sample count must be positive");
    const int n = g.aerial, m = g.ground;
    const int n_edges = static_cast<int>(g.edges.size());
    const int dim = 2 * n + m - 2;
    if (n_edges != dim) return {0.0, 0.0, 0, seed};  // weight vanishes; no sampling
    if (dim == 0) return {1.0, 0.0, samples, seed};

    // Coordinate layout: per-vertex parameters in vertex order, then
    // interior ground positions in ascending order.
    enum class VertexKind { pinned, angle, disk };
    std::vector<VertexKind> kind(static_cast<std::size_t>(n) + 1, VertexKind::disk);
    if (m == 0) kind[1] = VertexKind::pinned;
    if (m == 1) kind[1] = VertexKind::angle;
    int n_coords = 0;
    std::vector<int> vertex_coord(static_cast<std::size_t>(n) + 1, -1);
    for (int v = 1; v <= n; ++v) {
        vertex_coord[static_cast<std::size_t>(v)] = n_coords;
        if (kind[static_cast<std::size_t>(v)] == VertexKind::angle) n_coords += 1;
        if (kind[static_cast<std::size_t>(v)] == VertexKind::disk) n_coords += 2;
    }
    const int ground_coord0 = n_coords;
    const int interior_grounds = std::max(0, m - 2);
    n_coords += interior_grounds;
    if (n_coords != dim)
        throw structural_error("weight_mc: gauge slice dimension mismatch");

    int disk_count = 0;
    for (int v = 1; v <= n; ++v)
        if (kind[static_cast<std::size_t>(v)] == VertexKind::disk) ++disk_count;
    const double pi = 3.14159265358979323846;
    double density_factor = std::pow(pi, disk_count);  // 1/(1/pi)^k
    if (m == 1) density_factor *= pi;
    for (int k = 2; k <= interior_grounds; ++k) density_factor /= static_cast<double>(k);
    const double measure_norm = std::pow(2.0 * pi, -n_edges) * density_factor;

    long double sum = 0.0L, sum_sq = 0.0L;
    std::vector<detail::Cx> pos(static_cast<std::size_t>(n) + 1);
    std::vector<double> ground_pos(static_cast<std::size_t>(m) + 1, 0.0);
    // velocity of each vertex with respect to each of its coordinates
    std::vector<std::array<detail::Cx, 2>> velocity(static_cast<std::size_t>(n) + 1);

    for (long long it = 0; it < samples; ++it) {
        detail::CounterRng rng = detail::CounterRng::at(seed, static_cast<std::uint64_t>(it));
        double theta = 0.0;
        for (int v = 1; v <= n; ++v) {
            switch (kind[static_cast<std::size_t>(v)]) {
                case VertexKind::pinned:
                    pos[static_cast<std::size_t>(v)] = detail::Cx(0.0, 1.0);
                    break;
                case VertexKind::angle: {
                    theta = pi * rng.unit();
                    pos[static_cast<std::size_t>(v)] = detail::Cx(std::cos(theta), std::sin(theta));
                    velocity[static_cast<std::size_t>(v)][0] =
                        detail::Cx(0, 1) * pos[static_cast<std::size_t>(v)];
                    break;
                }
                case VertexKind::disk: {
                    const double r = std::sqrt(rng.unit());
                    const double ang = 2.0 * pi * rng.unit();
                    const detail::Cx zeta(r * std::cos(ang), r * std::sin(ang));
                    pos[static_cast<std::size_t>(v)] = detail::cayley(zeta);
                    const detail::Cx vel = detail::cayley_velocity(zeta);
                    velocity[static_cast<std::size_t>(v)][0] = vel;
                    velocity[static_cast<std::size_t>(v)][1] = detail::Cx(0, 1) * vel;
                    break;
                }
            }
        }
        if (m >= 1) ground_pos[1] = 0.0;
        if (m >= 2) {
            ground_pos[static_cast<std::size_t>(m)] = 1.0;
            std::vector<double> interior(static_cast<std::size_t>(interior_grounds));
            for (auto& x : interior) x = rng.unit();
            std::sort(interior.begin(), interior.end());
            for (int k = 0; k < interior_grounds; ++k)
                ground_pos[static_cast<std::size_t>(k) + 2] = interior[static_cast<std::size_t>(k)];
        }

        // Jacobian of the angle maps with respect to the slice coordinates.
        std::vector<std::vector<double>> jac(static_cast<std::size_t>(n_edges),
                                             std::vector<double>(static_cast<std::size_t>(n_edges), 0.0));
        bool degenerate = false;
        for (int e = 0; e < n_edges && !degenerate; ++e) {
            const KEdge& edge = g.edges[static_cast<std::size_t>(e)];
            const detail::Cx p = pos[static_cast<std::size_t>(edge.src)];
            const detail::Cx q = edge.dst.is_ground
                                     ? detail::Cx(ground_pos[static_cast<std::size_t>(edge.dst.index)], 0.0)
                                     : pos[static_cast<std::size_t>(edge.dst.index)];
            const detail::Cx den = q - std::conj(p);
            const detail::Cx num = q - p;
            if (std::abs(num) < 1e-300 || std::abs(den) < 1e-300) {
                degenerate = true;
                break;
            }
            const detail::Cx w = num / den;
            const detail::Cx w_p = -1.0 / den;
            const detail::Cx w_pbar = num / (den * den);
            const detail::Cx w_q = (p - std::conj(p)) / (den * den);
            auto phi_dot = [&](const detail::Cx& dw) { return std::imag(dw / w); };

            // source vertex contribution
            const int src = edge.src;
            if (kind[static_cast<std::size_t>(src)] != VertexKind::pinned) {
                const int base = vertex_coord[static_cast<std::size_t>(src)];
                const int ncomp = kind[static_cast<std::size_t>(src)] == VertexKind::angle ? 1 : 2;
                for (int c = 0; c < ncomp; ++c) {
                    const detail::Cx z = velocity[static_cast<std::size_t>(src)][static_cast<std::size_t>(c)];
                    jac[static_cast<std::size_t>(e)][static_cast<std::size_t>(base + c)] +=
                        phi_dot(w_p * z + w_pbar * std::conj(z));
                }
            }
            // target vertex contribution
            if (edge.dst.is_ground) {
                const int gi = edge.dst.index;
                if (gi >= 2 && gi <= m - 1) {
                    jac[static_cast<std::size_t>(e)][static_cast<std::size_t>(ground_coord0 + gi - 2)] +=
                        phi_dot(w_q);
                }
            } else {
                const int tgt = edge.dst.index;
                if (kind[static_cast<std::size_t>(tgt)] != VertexKind::pinned) {
                    const int base = vertex_coord[static_cast<std::size_t>(tgt)];
                    const int ncomp = kind[static_cast<std::size_t>(tgt)] == VertexKind::angle ? 1 : 2;
                    for (int c = 0; c < ncomp; ++c) {
                        const detail::Cx z =
                            velocity[static_cast<std::size_t>(tgt)][static_cast<std::size_t>(c)];
                        jac[static_cast<std::size_t>(e)][static_cast<std::size_t>(base + c)] +=
                            phi_dot(w_q * z);
                    }
                }
            }
        }

        double value = 0.0;
        if (!degenerate) {
            double log_abs = 0.0;
            const int sign = detail::lu_det_sign(jac, log_abs);
            if (sign != 0) {
                const double det = sign * std::exp(log_abs);
                if (std::isfinite(det)) value = kWeightOrientation * det * measure_norm;
            }
        }
        sum += value;
        sum_sq += value * value;
    }

    const double mean = static_cast<double>(sum / static_cast<long double>(samples));
    double stderr_value = 0.0;
    if (samples > 1) {
        const long double var =
            (sum_sq - static_cast<long double>(mean) * sum) / static_cast<long double>(samples - 1);
        stderr_value = std::sqrt(std::max(0.0, static_cast<double>(var)) / static_cast<double>(samples));
    }
    return {mean, stderr_value, samples, seed};
}

/// Parses the CLI edge-list syntax "1->G1,1->G2" (also accepting the arrow
/// character). Vertex counts are inferred from the maxima unless given.
inline KGraph parse_graph(const std::string& text, std::optional<int> n_override = std::nullopt,
                          std::optional<int> m_override = std::nullopt) {
    KGraph g;
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == ',' || ch == ';') {
            parts.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    if (!cur.empty()) parts.push_back(cur);
    int max_aerial = 0, max_ground = 0;
    for (const auto& part : parts) {
        std::size_t arrow = part.find("->");
        std::size_t skip = 2;
        if (arrow == std::string::npos) {
            arrow = part.find("→");
            skip = 3;
        }
        if (arrow == std::string::npos) throw parse_error("graph edge '" + part + "': expected '->'");
        const std::string lhs = part.substr(0, arrow);
        const std::string rhs = part.substr(arrow + skip);
        if (lhs.empty() || rhs.empty()) throw parse_error("graph edge '" + part + "': missing endpoint");
        KEdge e;
        try {
            e.src = std::stoi(lhs);
        } catch (const std::exception&) {
            throw parse_error("graph edge '" + part + "': bad source");
        }
        try {
            if (rhs[0] == 'G' || rhs[0] == 'g') {
                e.dst.is_ground = true;
                e.dst.index = std::stoi(rhs.substr(1));
            } else {
                e.dst.is_ground = false;
                e.dst.index = std::stoi(rhs);
            }
        } catch (const std::exception&) {
            throw parse_error("graph edge '" + part + "': bad target");
        }
        max_aerial = std::max({max_aerial, e.src, e.dst.is_ground ? 0 : e.dst.index});
        if (e.dst.is_ground) max_ground = std::max(max_ground, e.dst.index);
        g.edges.push_back(e);
    }
    g.aerial = n_override.value_or(max_aerial);
    g.ground = m_override.value_or(max_ground);
    validate_graph(g);
    return g;
}

} // namespace duflo
