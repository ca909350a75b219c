#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "duflo/cli.hpp"

using namespace duflo;

namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli_main(args, out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST_CASE("validate subcommand", "[cli]") {
    SECTION("catalog sl2 passes") {
        auto r = run({"validate", "--algebra", "sl2"});
        CHECK(r.code == 0);
        CHECK(r.out.find("ok") != std::string::npos);
    }
    SECTION("perturbed file fails with the violated identity") {
        const char* path = "cli_bad_algebra.json";
        {
            std::ofstream f(path);
            f << R"({"name":"bad","labels":["e","h","f"],"brackets":[
                 {"i":1,"j":3,"coeffs":["0","1","0"]},
                 {"i":2,"j":1,"coeffs":["3","0","0"]},
                 {"i":2,"j":3,"coeffs":["0","0","-2"]}]})";
        }
        auto r = run({"validate", "--file", path});
        CHECK(r.code == 1);
        CHECK(r.out.find("jacobi") != std::string::npos);
        std::remove(path);
    }
    SECTION("missing file is a usage error") {
        auto r = run({"validate", "--file", "missing_algebra.json"});
        CHECK(r.code == 2);
    }
    SECTION("no algebra given") {
        auto r = run({"validate"});
        CHECK(r.code == 2);
    }
    SECTION("unknown subcommand") {
        auto r = run({"frobnicate"});
        CHECK(r.code == 2);
    }
}

TEST_CASE("poisson-cohomology subcommand", "[cli]") {
    auto r = run({"poisson-cohomology", "--algebra", "abelian2", "--p-max", "2", "--d-max", "2",
                  "--format", "json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    for (const auto& cell : j["table"]) {
        const int p = cell["p"], d = cell["d"], dim = cell["dim"];
        CHECK(dim == static_cast<int>(binomial(2, p)) * (d + 1));
    }
    auto r2 = run({"poisson-cohomology", "--algebra", "sl2", "--format", "json"});
    REQUIRE(r2.code == 0);
    auto j2 = nlohmann::json::parse(r2.out);
    bool found = false;
    for (const auto& cell : j2["table"])
        if (cell["p"] == 0 && cell["d"] == 2) {
            CHECK(cell["dim"] == 1);
            found = true;
        }
    CHECK(found);
}

TEST_CASE("verify subcommand", "[cli]") {
    auto r = run({"verify", "--algebra", "aff1", "--format", "json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    SECTION("schema fields") {
        CHECK(j.contains("version"));
        CHECK(j["command"] == "verify");
        CHECK(j["config"].contains("search_bound"));
        CHECK(j["report"].contains("chain_map"));
        CHECK(j["report"]["counts"].contains("pass"));
        CHECK(j["report"]["checks"].is_array());
        for (const auto& check : j["report"]["checks"]) {
            CHECK(check.contains("name"));
            CHECK(check.contains("status"));
            CHECK(check.contains("witness"));
        }
    }
    SECTION("defaults fill in dim and d_max + 2") {
        CHECK(j["config"]["p_max"] == 2);
        CHECK(j["config"]["d_max"] == 3);
        CHECK(j["config"]["search_bound"] == 5);
    }
    SECTION("no failures on aff1") {
        CHECK(j["report"]["counts"]["fail"] == 0);
    }
}

TEST_CASE("verify reports are byte-identical across runs", "[cli]") {
    const std::vector<std::string> args = {"verify", "--algebra", "heisenberg3", "--d-max", "2",
                                           "--search-bound", "4", "--format", "json"};
    auto r1 = run(args);
    auto r2 = run(args);
    REQUIRE(r1.code == 0);
    CHECK(r1.out == r2.out);
}

TEST_CASE("weight subcommand", "[cli]") {
    SECTION("closed-form endpoints") {
        auto r = run({"weight", "--bernoulli", "0", "--format", "json"});
        REQUIRE(r.code == 0);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["difference"] == "1");
        CHECK(j["value_at_zero"] == "1/2");
        CHECK(j["value_at_one"] == "-1/2");
    }
    SECTION("wrong edge count returns exact zero without sampling") {
        auto r = run({"weight", "--graph", "1->G1", "--m", "2", "--samples", "1000", "--seed", "1",
                      "--format", "json"});
        REQUIRE(r.code == 0);
        auto j = nlohmann::json::parse(r.out);
        CHECK(j["mean"] == 0.0);
        CHECK(j["samples"] == 0);
    }
    SECTION("malformed graph text") {
        auto r = run({"weight", "--graph", "1=>G1"});
        CHECK(r.code == 2);
    }
    SECTION("identical seeds give identical estimates") {
        const std::vector<std::string> args = {"weight", "--graph", "1->G1,1->G2", "--samples",
                                               "20000", "--seed", "42", "--format", "json"};
        auto r1 = run(args);
        auto r2 = run(args);
        REQUIRE(r1.code == 0);
        CHECK(r1.out == r2.out);
    }
}

TEST_CASE("star subcommand", "[cli]") {
    auto r = run({"star", "--algebra", "sl2", "--lhs", "e*f", "--rhs", "h + 1/2", "--format", "json"});
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    const LieAlgebra sl2 = catalog("sl2");
    auto lhs = parse_polynomial("e*f", sl2);
    auto rhs = parse_polynomial("h + 1/2", sl2);
    auto expect = star_product(lhs, rhs, sl2, duflo_truncation(sl2, 3));
    CHECK(j["result"] == expect.str(sl2.labels));

    auto bad = run({"star", "--algebra", "sl2", "--lhs", "e**f", "--rhs", "h"});
    CHECK(bad.code == 2);

    auto unknown = run({"star", "--algebra", "sl2", "--lhs", "q", "--rhs", "h"});
    CHECK(unknown.code == 2);
}

TEST_CASE("polynomial expression parser", "[cli]") {
    const LieAlgebra sl2 = catalog("sl2");
    auto p = parse_polynomial("2*e^2 - 1/3*h*f + (e + f)^2", sl2);
    Polynomial expect(3);
    expect.add_term({2, 0, 0}, 3);  // 2e^2 + e^2 from the square
    expect.add_term({0, 1, 1}, Scalar(-1, 3));
    expect.add_term({1, 0, 1}, 2);
    expect.add_term({0, 0, 2}, 1);
    CHECK(p == expect);
    CHECK(parse_polynomial("-e", sl2) == -Polynomial::coordinate(3, 0));
    CHECK_THROWS_AS(parse_polynomial("e +", sl2), parse_error);
}

TEST_CASE("reports can be written to a file", "[cli]") {
    const char* path = "cli_report_out.json";
    auto r = run({"validate", "--algebra", "so3", "--format", "json", "--out", path});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    CHECK(j["ok"] == true);
    std::remove(path);
}
