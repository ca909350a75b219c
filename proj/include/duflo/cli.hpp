#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "duflo/cohomology.hpp"
#include "duflo/enveloping.hpp"
#include "duflo/errors.hpp"
#include "duflo/kgraphs.hpp"
#include "duflo/lie_algebra.hpp"
#include "duflo/version.hpp"

namespace duflo {

/// Parser for the star subcommand's infix syntax over basis labels:
/// rationals, labels, +, -, *, ^, parentheses.
class PolynomialParser {
  public:
    PolynomialParser(std::string text, const LieAlgebra& alg) : text_(std::move(text)), alg_(alg) {}

    Polynomial parse() {
        Polynomial p = expression();
        skip_space();
        if (pos_ != text_.size()) throw parse_error("unexpected input at '" + text_.substr(pos_) + "'");
        return p;
    }

  private:
    std::string text_;
    const LieAlgebra& alg_;
    std::size_t pos_ = 0;

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool eat(char ch) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ch) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Polynomial expression() {
        Polynomial acc = eat('-') ? -term() : term();
        while (true) {
            if (eat('+'))
                acc += term();
            else if (eat('-'))
                acc -= term();
            else
                return acc;
        }
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (eat('*')) acc = acc * factor();
        return acc;
    }

    Polynomial factor() {
        Polynomial base = atom();
        if (eat('^')) {
            skip_space();
            std::string digits;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) digits += text_[pos_++];
            if (digits.empty()) throw parse_error("expected exponent after '^'");
            int e = std::stoi(digits);
            Polynomial acc = Polynomial::constant(alg_.dim, 1);
            for (int k = 0; k < e; ++k) acc = acc * base;
            return acc;
        }
        return base;
    }

    Polynomial atom() {
        skip_space();
        if (pos_ >= text_.size()) throw parse_error("unexpected end of expression");
        char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            Polynomial inner = expression();
            if (!eat(')')) throw parse_error("missing ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            std::string lit;
            while (pos_ < text_.size() &&
                   (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/'))
                lit += text_[pos_++];
            return Polynomial::constant(alg_.dim, parse_scalar(lit));
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::string name;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '_'))
                name += text_[pos_++];
            return Polynomial::coordinate(alg_.dim, alg_.label_index(name));
        }
        throw parse_error(std::string("unexpected character '") + ch + "'");
    }
};

inline Polynomial parse_polynomial(const std::string& text, const LieAlgebra& alg) {
    return PolynomialParser(text, alg).parse();
}

namespace cli_detail {

struct CommonOptions {
    std::string algebra;
    std::string file;
    int p_max = -1;
    int d_max = 3;
    int search_bound = -1;  // default d_max + 2
    long long samples = 1000000;
    std::uint64_t seed = 42;
    std::string format = "text";
    std::string out_path;
};

inline LieAlgebra resolve_algebra(const CommonOptions& opts) {
    if (!opts.file.empty()) return load_lie_algebra(opts.file);
    if (!opts.algebra.empty()) return catalog(opts.algebra);
    throw lookup_error("no algebra given; use --algebra <name> or --file <path>");
}

inline std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

inline int emit(const CommonOptions& opts, const std::string& payload, std::ostream& out,
                std::ostream& err) {
    if (!opts.out_path.empty()) {
        std::ofstream file(opts.out_path, std::ios::binary);
        if (!file) {
            err << "cannot write '" << opts.out_path << "'\n";
            return 2;
        }
        file << payload;
        return 0;
    }
    out << payload;
    return 0;
}

inline nlohmann::json config_json(const CommonOptions& opts, bool with_bounds, bool with_mc) {
    nlohmann::json j;
    j["algebra"] = opts.file.empty() ? opts.algebra : opts.file;
    if (with_bounds) {
        j["p_max"] = opts.p_max;
        j["d_max"] = opts.d_max;
        j["search_bound"] = opts.search_bound;
    }
    if (with_mc) {
        j["samples"] = opts.samples;
        j["seed"] = opts.seed;
    }
    j["format"] = opts.format;
    return j;
}

} // namespace cli_detail

inline int cmd_validate(cli_detail::CommonOptions opts, std::ostream& out, std::ostream& err) {
    const LieAlgebra alg = cli_detail::resolve_algebra(opts);
    const ValidationReport report = validate(alg);
    std::string payload;
    if (opts.format == "json") {
        nlohmann::json j;
        j["version"] = kToolVersion;
        j["command"] = "validate";
        j["config"] = cli_detail::config_json(opts, false, false);
        j["algebra"] = alg.name;
        j["ok"] = report.ok;
        nlohmann::json issues = nlohmann::json::array();
        for (const auto& issue : report.issues) {
            nlohmann::json one;
            one["kind"] = issue.kind;
            nlohmann::json idx = nlohmann::json::array();
            for (int i : issue.indices) idx.push_back(i + 1);
            one["indices"] = idx;
            one["detail"] = issue.detail;
            issues.push_back(one);
        }
        j["issues"] = issues;
        payload = j.dump(2) + "\n";
    } else {
        payload = alg.name + ": " + (report.ok ? "ok" : "invalid") + "\n";
        for (const auto& issue : report.issues) payload += "  " + issue.kind + ": " + issue.detail + "\n";
    }
    int rc = cli_detail::emit(opts, payload, out, err);
    if (rc != 0) return rc;
    return report.ok ? 0 : 1;
}

inline int cmd_poisson_cohomology(cli_detail::CommonOptions opts, std::ostream& out, std::ostream& err) {
    const LieAlgebra alg = cli_detail::resolve_algebra(opts);
    const ValidationReport vr = validate(alg);
    if (!vr.ok) {
        err << alg.name << ": algebra is invalid; run the validate subcommand\n";
        return 1;
    }
    if (opts.p_max < 0) opts.p_max = alg.dim;
    opts.p_max = std::min(opts.p_max, alg.dim);
    std::vector<std::vector<int>> dims(static_cast<std::size_t>(opts.p_max) + 1,
                                       std::vector<int>(static_cast<std::size_t>(opts.d_max) + 1, 0));
    for (int p = 0; p <= opts.p_max; ++p)
        for (int d = 0; d <= opts.d_max; ++d)
            dims[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)] =
                poisson_cohomology(alg, p, d).dimension;
    std::string payload;
    if (opts.format == "json") {
        nlohmann::json j;
        j["version"] = kToolVersion;
        j["command"] = "poisson-cohomology";
        j["config"] = cli_detail::config_json(opts, true, false);
        j["algebra"] = alg.name;
        nlohmann::json table = nlohmann::json::array();
        for (int p = 0; p <= opts.p_max; ++p)
            for (int d = 0; d <= opts.d_max; ++d)
                table.push_back({{"p", p},
                                 {"d", d},
                                 {"dim", dims[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)]}});
        j["table"] = table;
        payload = j.dump(2) + "\n";
    } else {
        payload = "Poisson cohomology dimensions for " + alg.name + " (rows p, columns d)\n";
        payload += "p\\d";
        for (int d = 0; d <= opts.d_max; ++d) payload += "\t" + std::to_string(d);
        payload += "\n";
        for (int p = 0; p <= opts.p_max; ++p) {
            payload += std::to_string(p);
            for (int d = 0; d <= opts.d_max; ++d)
                payload += "\t" + std::to_string(dims[static_cast<std::size_t>(p)][static_cast<std::size_t>(d)]);
            payload += "\n";
        }
    }
    return cli_detail::emit(opts, payload, out, err);
}

inline int cmd_verify(cli_detail::CommonOptions opts, std::ostream& out, std::ostream& err) {
    const LieAlgebra alg = cli_detail::resolve_algebra(opts);
    const ValidationReport vr = validate(alg);
    if (!vr.ok) {
        err << alg.name << ": algebra is invalid; run the validate subcommand\n";
        return 1;
    }
    if (opts.p_max < 0) opts.p_max = alg.dim;
    if (opts.search_bound < 0) opts.search_bound = opts.d_max + 2;
    const VerificationReport report = verify_theorem(alg, opts.p_max, opts.d_max, opts.search_bound);
    std::string payload;
    if (opts.format == "json") {
        nlohmann::json j;
        j["version"] = kToolVersion;
        j["command"] = "verify";
        j["config"] = cli_detail::config_json(opts, true, false);
        j["report"] = report_json(report);
        payload = j.dump(2) + "\n";
    } else {
        payload = report_text(report);
        if (report.count("inconclusive") > 0)
            payload += "warning: " + std::to_string(report.count("inconclusive")) +
                       " inconclusive check(s); consider raising --search-bound\n";
    }
    int rc = cli_detail::emit(opts, payload, out, err);
    if (rc != 0) return rc;
    return report.failed() ? 1 : 0;
}

struct WeightOptions {
    std::string graph;
    int n_override = 0;
    int m_override = 0;
    int bernoulli_p = -1;
};

inline int cmd_weight(cli_detail::CommonOptions opts, const WeightOptions& wopts, std::ostream& out,
                      std::ostream& err) {
    std::string payload;
    if (wopts.bernoulli_p >= 0) {
        const BernoulliWeight w = bernoulli_weight(wopts.bernoulli_p);
        if (opts.format == "json") {
            nlohmann::json j;
            j["version"] = kToolVersion;
            j["command"] = "weight";
            j["mode"] = "bernoulli";
            j["p"] = wopts.bernoulli_p;
            j["value_at_zero"] = scalar_str(w.value_at_zero);
            j["value_at_one"] = scalar_str(w.value_at_one);
            j["difference"] = scalar_str(w.difference);
            payload = j.dump(2) + "\n";
        } else {
            payload = "deployed chain endpoints for p=" + std::to_string(wopts.bernoulli_p) + ": " +
                      scalar_str(w.value_at_zero) + " and " + scalar_str(w.value_at_one) +
                      "; snail weight (difference) = " + scalar_str(w.difference) + "\n";
        }
        return cli_detail::emit(opts, payload, out, err);
    }
    if (wopts.graph.empty()) {
        err << "weight: give --graph <edges> or --bernoulli <p>\n";
        return 2;
    }
    const KGraph g = parse_graph(
        wopts.graph, wopts.n_override > 0 ? std::optional<int>(wopts.n_override) : std::nullopt,
        wopts.m_override > 0 ? std::optional<int>(wopts.m_override) : std::nullopt);
    const WeightEstimate est = weight_mc(g, opts.samples, opts.seed);
    if (opts.format == "json") {
        nlohmann::json j;
        j["version"] = kToolVersion;
        j["command"] = "weight";
        j["mode"] = "monte-carlo";
        j["graph"] = g.str();
        j["n"] = g.aerial;
        j["m"] = g.ground;
        j["mean"] = est.mean;
        j["stderr"] = est.std_error;
        j["samples"] = est.samples;
        j["seed"] = est.seed;
        payload = j.dump(2) + "\n";
    } else {
        payload = "w(" + g.str() + ") = " + cli_detail::format_double(est.mean) + " +/- " +
                  cli_detail::format_double(est.std_error) + " (samples=" + std::to_string(est.samples) +
                  ", seed=" + std::to_string(est.seed) + ")\n";
        if (est.samples == 0) payload += "edge count differs from 2n+m-2; weight is exactly 0\n";
    }
    return cli_detail::emit(opts, payload, out, err);
}

struct StarOptions {
    std::string lhs;
    std::string rhs;
    int trunc = -1;
};

inline int cmd_star(cli_detail::CommonOptions opts, const StarOptions& sopts, std::ostream& out,
                    std::ostream& err) {
    const LieAlgebra alg = cli_detail::resolve_algebra(opts);
    if (sopts.lhs.empty() || sopts.rhs.empty()) {
        err << "star: give --lhs and --rhs polynomial expressions\n";
        return 2;
    }
    const Polynomial f = parse_polynomial(sopts.lhs, alg);
    const Polynomial g = parse_polynomial(sopts.rhs, alg);
    int order = sopts.trunc;
    if (order < 0) order = std::max(f.total_degree(), 0) + std::max(g.total_degree(), 0);
    const DufloTruncation trunc = duflo_truncation(alg, order);
    const Polynomial result = star_product(f, g, alg, trunc);
    std::string payload;
    if (opts.format == "json") {
        nlohmann::json j;
        j["version"] = kToolVersion;
        j["command"] = "star";
        j["config"] = cli_detail::config_json(opts, false, false);
        j["lhs"] = f.str(alg.labels);
        j["rhs"] = g.str(alg.labels);
        j["result"] = result.str(alg.labels);
        payload = j.dump(2) + "\n";
    } else {
        payload = "(" + f.str(alg.labels) + ") * (" + g.str(alg.labels) + ") = " + result.str(alg.labels) +
                  "\n";
    }
    return cli_detail::emit(opts, payload, out, err);
}

/// Entry point shared by the binary and the tests. Exit codes: 0 success,
/// 1 verification failure, 2 usage or I/O error.
inline int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"exact verification toolkit for the Duflo isomorphism on Lie-algebra cohomology"};
    app.require_subcommand(1);

    cli_detail::CommonOptions opts;
    WeightOptions wopts;
    StarOptions sopts;

    auto add_common = [&](CLI::App* sub, bool bounds, bool mc) {
        sub->add_option("--algebra", opts.algebra, "catalog algebra name");
        sub->add_option("--file", opts.file, "algebra JSON file");
        if (bounds) {
            sub->add_option("--p-max", opts.p_max, "maximal polyvector degree (default: dim)");
            sub->add_option("--d-max", opts.d_max, "maximal polynomial degree");
            sub->add_option("--search-bound", opts.search_bound,
                            "PBW bound for coboundary certificates (default: d-max + 2)");
        }
        if (mc) {
            sub->add_option("--samples", opts.samples, "Monte-Carlo sample count");
            sub->add_option("--seed", opts.seed, "random seed");
        }
        sub->add_option("--format", opts.format, "output format: text | json")
            ->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--out", opts.out_path, "write the report to this path");
    };

    CLI::App* validate_cmd = app.add_subcommand("validate", "check antisymmetry and the Jacobi identity");
    add_common(validate_cmd, false, false);
    CLI::App* pc_cmd = app.add_subcommand("poisson-cohomology", "dimensions of the Poisson cohomology slices");
    add_common(pc_cmd, true, false);
    CLI::App* verify_cmd = app.add_subcommand("verify", "run the full cohomology verification");
    add_common(verify_cmd, true, false);
    CLI::App* weight_cmd = app.add_subcommand("weight", "graph weights: Monte-Carlo or closed form");
    add_common(weight_cmd, false, true);
    weight_cmd->add_option("--graph", wopts.graph, "edge list, e.g. \"1->G1,1->G2\"");
    weight_cmd->add_option("--n", wopts.n_override, "number of aerial vertices (default: inferred)");
    weight_cmd->add_option("--m", wopts.m_override, "number of ground vertices (default: inferred)");
    weight_cmd->add_option("--bernoulli", wopts.bernoulli_p, "closed-form endpoint weights for chain length p");
    CLI::App* star_cmd = app.add_subcommand("star", "star product of two polynomials");
    add_common(star_cmd, false, false);
    star_cmd->add_option("--lhs", sopts.lhs, "left factor, e.g. \"e*h + 2\"");
    star_cmd->add_option("--rhs", sopts.rhs, "right factor");
    star_cmd->add_option("--trunc", sopts.trunc, "truncation order (default: sum of degrees)");

    std::vector<const char*> argv;
    argv.push_back(kToolName);
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(opts, out, err);
        if (pc_cmd->parsed()) return cmd_poisson_cohomology(opts, out, err);
        if (verify_cmd->parsed()) return cmd_verify(opts, out, err);
        if (weight_cmd->parsed()) return cmd_weight(opts, wopts, out, err);
        if (star_cmd->parsed()) return cmd_star(opts, sopts, out, err);
    } catch (const parse_error& e) {
        err << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const lookup_error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const structural_error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const bound_error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const precondition_error& e) {
        err << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace duflo
