#pragma once

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "duflo/errors.hpp"
#include "duflo/polynomial.hpp"
#include "duflo/rational.hpp"

namespace duflo {

/// Finite-dimensional Lie algebra given by structure constants over the
/// rationals: [e_i, e_j] = sum_k c[i][j][k] e_k, indices 0-based internally.
/// The table is stored fully (both (i,j) and (j,i)); the bracket-based
/// constructors enforce antisymmetry so consumers never re-derive signs.
struct LieAlgebra {
    std::string name;
    int dim = 0;
    std::vector<std::string> labels;
    std::vector<std::vector<std::vector<Scalar>>> c;

    LieAlgebra() = default;

    LieAlgebra(std::string algebra_name, std::vector<std::string> basis_labels)
        : name(std::move(algebra_name)),
          dim(static_cast<int>(basis_labels.size())),
          labels(std::move(basis_labels)),
          c(dim, std::vector<std::vector<Scalar>>(dim, std::vector<Scalar>(dim, Scalar(0)))) {
        if (dim < 1) throw structural_error("Lie algebra dimension must be >= 1");
        std::set<std::string> seen(labels.begin(), labels.end());
        if (static_cast<int>(seen.size()) != dim)
            throw structural_error("basis labels must be distinct");
    }

    /// Sets [e_i, e_j] = sum_k coeffs[k] e_k and the antisymmetric mirror.
    void set_bracket(int i, int j, const std::vector<Scalar>& coeffs) {
        if (i < 0 || i >= dim || j < 0 || j >= dim)
            throw structural_error("bracket index out of range");
        if (static_cast<int>(coeffs.size()) != dim)
            throw structural_error("bracket coefficient vector has wrong length");
        if (i == j) throw structural_error("bracket [e_i,e_i] must be zero");
        for (int k = 0; k < dim; ++k) {
            c[i][j][k] = coeffs[k];
            c[j][i][k] = -coeffs[k];
        }
    }

    const Scalar& structure_constant(int i, int j, int k) const { return c[i][j][k]; }

    /// Coefficient vector of [e_i, e_j].
    std::vector<Scalar> bracket(int i, int j) const { return c[i][j]; }

    int label_index(const std::string& label) const {
        for (int i = 0; i < dim; ++i)
            if (labels[i] == label) return i;
        throw lookup_error("unknown basis label '" + label + "'");
    }
};

struct ValidationIssue {
    std::string kind;          // "antisymmetry" | "jacobi"
    std::vector<int> indices;  // 0-based witness indices
    std::string detail;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;
};

/// Checks antisymmetry and the Jacobi identity exactly.
inline ValidationReport validate(const LieAlgebra& alg) {
    ValidationReport report;
    const int n = alg.dim;
    if (static_cast<int>(alg.labels.size()) != n || static_cast<int>(alg.c.size()) != n)
        throw structural_error("structure table does not match dimension");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(alg.c[i].size()) != n)
            throw structural_error("structure table does not match dimension");
        for (int j = 0; j < n; ++j)
            if (static_cast<int>(alg.c[i][j].size()) != n)
                throw structural_error("structure table does not match dimension");
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (alg.c[i][j][k] != -alg.c[j][i][k]) {
                    report.ok = false;
                    report.issues.push_back({"antisymmetry",
                                             {i, j, k},
                                             "c[" + alg.labels[i] + "][" + alg.labels[j] + "] is not minus c[" +
                                                 alg.labels[j] + "][" + alg.labels[i] + "]"});
                }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    Scalar sum = 0;
                    for (int m = 0; m < n; ++m)
                        sum += alg.c[i][j][m] * alg.c[m][k][l] + alg.c[j][k][m] * alg.c[m][i][l] +
                               alg.c[k][i][m] * alg.c[m][j][l];
                    if (sum != 0) {
                        report.ok = false;
                        report.issues.push_back({"jacobi",
                                                 {i, j, k, l},
                                                 "Jacobi fails at (" + alg.labels[i] + "," + alg.labels[j] + "," +
                                                     alg.labels[k] + "), component " + alg.labels[l] +
                                                     ", defect " + scalar_str(sum)});
                    }
                }
    return report;
}

/// Matrix of ad(sum_i coeffs[i] e_i): M[k][j] = sum_i coeffs[i] c[i][j][k].
inline std::vector<std::vector<Scalar>> ad_matrix(const LieAlgebra& alg,
                                                  const std::vector<Scalar>& coeffs) {
    if (static_cast<int>(coeffs.size()) != alg.dim)
        throw structural_error("ad_matrix: coefficient vector length does not match dimension");
    std::vector<std::vector<Scalar>> m(alg.dim, std::vector<Scalar>(alg.dim, Scalar(0)));
    for (int k = 0; k < alg.dim; ++k)
        for (int j = 0; j < alg.dim; ++j)
            for (int i = 0; i < alg.dim; ++i) m[k][j] += coeffs[i] * alg.c[i][j][k];
    return m;
}

/// ad x with symbolic x: entry (k,j) is the linear polynomial
/// sum_i x_i c[i][j][k] on the dual space.
inline std::vector<std::vector<Polynomial>> ad_matrix_symbolic(const LieAlgebra& alg) {
    std::vector<std::vector<Polynomial>> m(alg.dim, std::vector<Polynomial>(alg.dim, Polynomial(alg.dim)));
    for (int k = 0; k < alg.dim; ++k)
        for (int j = 0; j < alg.dim; ++j)
            for (int i = 0; i < alg.dim; ++i) {
                Exponents e(alg.dim, 0);
                e[i] = 1;
                m[k][j].add_term(e, alg.c[i][j][k]);
            }
    return m;
}

inline std::vector<std::string> catalog_names() {
    return {"abelian2", "aff1", "heisenberg3", "sl2", "so3"};
}

/// Built-in test algebras. Basis order is the declaration order and doubles
/// as the PBW order downstream.
inline LieAlgebra catalog(const std::string& name) {
    auto one_at = [](int dim, int k, const Scalar& v) {
        std::vector<Scalar> coeffs(dim, Scalar(0));
        coeffs[k] = v;
        return coeffs;
    };
    if (name == "abelian2") {
        return LieAlgebra("abelian2", {"x1", "x2"});
    }
    if (name == "aff1") {
        LieAlgebra alg("aff1", {"e1", "e2"});
        alg.set_bracket(0, 1, one_at(2, 1, 1)); // [e1,e2] = e2
        return alg;
    }
    if (name == "heisenberg3") {
        LieAlgebra alg("heisenberg3", {"x", "y", "z"});
        alg.set_bracket(0, 1, one_at(3, 2, 1)); // [x,y] = z
        return alg;
    }
    if (name == "sl2") {
        LieAlgebra alg("sl2", {"e", "h", "f"});
        alg.set_bracket(0, 2, one_at(3, 1, 1));  // [e,f] = h
        alg.set_bracket(1, 0, one_at(3, 0, 2));  // [h,e] = 2e
        alg.set_bracket(1, 2, one_at(3, 2, -2)); // [h,f] = -2f
        return alg;
    }
    if (name == "so3") {
        LieAlgebra alg("so3", {"e1", "e2", "e3"});
        alg.set_bracket(0, 1, one_at(3, 2, 1)); // [e1,e2] = e3
        alg.set_bracket(1, 2, one_at(3, 0, 1)); // [e2,e3] = e1
        alg.set_bracket(2, 0, one_at(3, 1, 1)); // [e3,e1] = e2
        return alg;
    }
    throw lookup_error("unknown catalog algebra '" + name + "'");
}

/// Loads the JSON input format: {"name", "labels", "brackets": [{"i","j","coeffs"}]},
/// 1-based indices, coefficients as rational strings, omitted pairs zero.
inline LieAlgebra lie_algebra_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw structural_error("algebra file: top level must be an object");
    if (!j.contains("labels") || !j["labels"].is_array())
        throw structural_error("algebra file: missing 'labels' array");
    std::vector<std::string> labels;
    for (const auto& l : j["labels"]) {
        if (!l.is_string()) throw structural_error("algebra file: labels must be strings");
        labels.push_back(l.get<std::string>());
    }
    std::string name = j.value("name", std::string("custom"));
    LieAlgebra alg(name, labels);
    std::set<std::pair<int, int>> seen;
    if (j.contains("brackets")) {
        if (!j["brackets"].is_array()) throw structural_error("algebra file: 'brackets' must be an array");
        for (const auto& b : j["brackets"]) {
            if (!b.contains("i") || !b.contains("j") || !b.contains("coeffs"))
                throw structural_error("algebra file: bracket entries need 'i', 'j', 'coeffs'");
            int i = b["i"].get<int>();
            int jdx = b["j"].get<int>();
            if (i < 1 || i > alg.dim || jdx < 1 || jdx > alg.dim)
                throw structural_error("algebra file: bracket index out of range (1-based)");
            if (seen.count({i, jdx}) || seen.count({jdx, i}))
                throw structural_error("algebra file: duplicate bracket entry for (" + std::to_string(i) +
                                       "," + std::to_string(jdx) + ")");
            seen.insert({i, jdx});
            const auto& coeffs_json = b["coeffs"];
            if (!coeffs_json.is_array() || static_cast<int>(coeffs_json.size()) != alg.dim)
                throw structural_error("algebra file: 'coeffs' must list one rational per basis element");
            std::vector<Scalar> coeffs;
            for (const auto& cj : coeffs_json) {
                if (!cj.is_string()) throw structural_error("algebra file: coefficients must be strings");
                coeffs.push_back(parse_scalar(cj.get<std::string>()));
            }
            alg.set_bracket(i - 1, jdx - 1, coeffs);
        }
    }
    return alg;
}

inline LieAlgebra load_lie_algebra(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw structural_error("cannot open algebra file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw parse_error("algebra file '" + path + "': " + e.what());
    }
    return lie_algebra_from_json(j);
}

} // namespace duflo
