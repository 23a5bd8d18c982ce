#include "doctest.h"

#include "json.hpp"
#include "pdm/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace pdm::cli;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "pdmsolve");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    const int code = pdm::cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch_dir(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("pdm_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_text(const fs::path& p, const std::string& text)
{
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("CSV header is exact")
{
    const auto r = invoke({"solve", "--levels", "1", "--ordering", "naive", "--method", "fd"});
    CHECK(r.code == 0);
    CHECK(r.out.substr(0, r.out.find('\n')) ==
          "ordering,method,N,l,n,nu,lambda,omega,E,error_estimate,residual,trusted,r_max,grid_points");
}

TEST_CASE("compare at constant mass")
{
    const auto r = invoke({"compare", "--dim", "3", "--ell", "0", "--lambda", "0", "--omega", "1", "--levels", "3"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 1 + 3 * 4);
    std::map<std::pair<std::string, int>, double> fd;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int n = std::stoi(rows[i][4]);
        const double e = std::stod(rows[i][8]);
        CHECK(std::abs(e - (1.5 + 2 * n)) < 1e-6);
        if (rows[i][1] == "fd") fd[{rows[i][0], n}] = e;
    }
    for (int n = 0; n < 3; ++n) CHECK(std::abs(fd[{"naive", n}] - fd[{"bdd", n}]) <= 1e-8);
}

TEST_CASE("solve naive ground state")
{
    const auto r = invoke({"solve", "--ordering", "naive", "--lambda", "0.1", "--levels", "1"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][8]) == doctest::Approx(1.291781).epsilon(1e-6));
}

TEST_CASE("sweep cardinality and ordering")
{
    const auto r = invoke({"sweep", "--lambda-list", "0.1,0.2", "--ell-list", "0,1", "--levels", "2"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 9);
    std::vector<std::tuple<double, int, int>> keys;
    for (std::size_t i = 1; i < rows.size(); ++i)
        keys.emplace_back(std::stod(rows[i][6]), std::stoi(rows[i][3]), std::stoi(rows[i][4]));
    CHECK(std::is_sorted(keys.begin(), keys.end()));
    CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());
}

TEST_CASE("nu column")
{
    const auto r = invoke({"sweep", "--dim", "4", "--ell-list", "0,2", "--levels", "3", "--method", "both"});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double nu = 2 * std::stod(rows[i][4]) + std::stod(rows[i][3]) + std::stod(rows[i][2]) / 2;
        CHECK(std::stod(rows[i][5]) == nu);
    }
}

TEST_CASE("config precedence and defaults")
{
    const auto dir = scratch_dir("precedence");
    const auto cfg = write_text(dir / "run.cfg", "# comment\nlambda = 0.1\nlevels=2 # trailing\n\nordering=naive\n");
    const auto merged = load_config(cfg, {{"lambda", "0.2"}});
    CHECK(merged.lambda == 0.2);
    CHECK(merged.levels == 2);
    CHECK(*merged.ordering == "naive");

    const auto d = load_config(std::nullopt, {});
    CHECK(d.dim == 3);
    CHECK(d.ell == 0);
    CHECK(d.lambda == 0.1);
    CHECK(d.omega == 1.0);
    CHECK(d.levels == 6);
    CHECK(d.orderings().size() == 2);
    CHECK(d.methods().size() == 2);
    CHECK(d.format == Format::Csv);
}

TEST_CASE("exit codes for malformed input")
{
    const auto dir = scratch_dir("exit");
    const auto unknown = write_text(dir / "unknown.cfg", "lambda=0.1\nfrobnicate=2\n");
    const auto negative = write_text(dir / "negative.cfg", "lambda=-1\n");

    struct Case {
        std::vector<std::string> args;
        int code;
        std::string message;
    };
    const std::vector<Case> cases{
        {{"solve", "--config", unknown.string()}, 1, "frobnicate"},
        {{"solve", "--config", negative.string()}, 1, "lambda must be ≥ 0"},
        {{"solve", "--lambda", "-1"}, 1, "lambda must be ≥ 0"},
        {{"solve", "--lambda", "0.1x"}, 1, "lambda"},
        {{"solve", "--omega", "0"}, 1, "omega must be > 0"},
        {{"solve", "--dim", "2.5"}, 1, "dim"},
        {{"solve", "--levels", "0"}, 1, "levels must be ≥ 1"},
        {{"solve", "--ordering", "weyl"}, 1, "ordering"},
        {{"solve", "--method", "magic"}, 1, "method"},
        {{"solve", "--grid-points", "10"}, 1, "grid_points"},
        {{"solve", "--r-max", "-3"}, 1, "r_max"},
        {{"solve", "--format", "xml"}, 1, "format"},
        {{"solve", "--lambda-list", "0.1,oops"}, 1, "lambda_list"},
        {{"explode"}, 1, "explode"},
        {{"solve", "--no-such-flag", "1"}, 1, ""},
        {{}, 1, ""},
        {{"solve", "--config", (dir / "missing.cfg").string()}, 3, "missing.cfg"},
        {{"solve", "--levels", "1", "--output", (dir / "no" / "such" / "dir.csv").string()}, 3, "dir.csv"},
        {{"solve", "--levels", "40", "--method", "fd"}, 2, "level likely in continuum"},
    };
    for (const auto& c : cases) {
        CAPTURE(c.message);
        const auto r = invoke(c.args);
        CHECK(r.code == c.code);
        CHECK(r.err.find(c.message) != std::string::npos);
        if (c.code == 1) CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
    }
}

TEST_CASE("numerical failure still writes flagged rows")
{
    const auto r = invoke({"solve", "--levels", "40", "--ordering", "naive", "--method", "fd"});
    CHECK(r.code == 2);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 41);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i][8].empty());
        CHECK(rows[i][11] == "false");
    }
}

TEST_CASE("JSON document structure and canonical bytes")
{
    const auto r = invoke({"compare", "--levels", "2", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::ordered_json::parse(r.out);
    CHECK(doc.dump(2) + "\n" == r.out);
    std::vector<std::string> keys;
    for (const auto& [k, v] : doc.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"manifest", "results", "comparisons", "notes"});
    CHECK(doc["manifest"]["tool_version"] == kToolVersion);
    CHECK(doc["manifest"]["timestamp"].is_null());
    CHECK(doc["manifest"]["effective_config"]["hbar"] == 1.0);
    CHECK(doc["results"].size() == 8);
    CHECK(doc["comparisons"]["records"].size() == 2);
    CHECK(doc["comparisons"]["records"][0]["orderings_differ"] == true);
    CHECK(doc["notes"].size() >= 3);
    // Every result row is traceable to a run in the manifest.
    for (const auto& row : doc["results"]) {
        bool found = false;
        for (const auto& run : doc["manifest"]["runs"])
            found = found || (run["ordering"] == row["ordering"] && run["method"] == row["method"] &&
                              run["r_max"] == row["r_max"] && run["grid_points"] == row["grid_points"]);
        CHECK(found);
    }
}

TEST_CASE("repeated runs are byte-identical; timestamp only in the sidecar")
{
    const auto dir = scratch_dir("determinism");
    for (const std::string format : {"csv", "json"}) {
        const auto a = dir / ("a." + format);
        const auto b = dir / ("b." + format);
        const std::vector<std::string> base{"compare", "--levels", "2", "--format", format, "--output"};
        auto args_a = base;
        args_a.push_back(a.string());
        auto args_b = base;
        args_b.push_back(b.string());
        REQUIRE(invoke(args_a).code == 0);
        REQUIRE(invoke(args_b).code == 0);
        CHECK(slurp(a) == slurp(b));
        CHECK(!slurp(a).empty());
        const auto manifest = nlohmann::json::parse(slurp(a.string() + ".manifest.json"));
        CHECK(manifest["timestamp"].is_string());
        CHECK(manifest["effective_config"]["output"] == a.string());
    }
}

TEST_CASE("output directory variable")
{
    const auto dir = scratch_dir("envdir");
    setenv(kOutputDirVariable, dir.c_str(), 1);
    const auto r = invoke({"solve", "--levels", "1", "--method", "fd", "--output", "rel.csv"});
    unsetenv(kOutputDirVariable);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "rel.csv"));
    CHECK(fs::exists(dir / "rel.csv.manifest.json"));
}

TEST_CASE("eigenfunction dumps")
{
    const auto dir = scratch_dir("dumps");
    const auto r = invoke({"solve", "--levels", "2", "--ordering", "bdd", "--lambda", "0.1", "--dump-eigenfunctions",
                           (dir / "ef").string()});
    REQUIRE(r.code == 0);
    int files = 0;
    for (const auto& entry : fs::directory_iterator(dir / "ef")) {
        ++files;
        const auto rows = parse_csv(slurp(entry.path()));
        CHECK(rows[0] == std::vector<std::string>{"r", "R"});
        const double h = std::stod(rows[2][0]) - std::stod(rows[1][0]);
        double norm = 0.0;
        for (std::size_t i = 1; i < rows.size(); ++i) norm += std::pow(std::stod(rows[i][1]), 2) * h;
        CHECK(norm == doctest::Approx(1.0).epsilon(1e-6));
    }
    CHECK(files == 4);
}

TEST_CASE("converge rows carry the grid sizes")
{
    const auto r = invoke({"converge", "--levels", "1", "--ordering", "bdd", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    std::vector<int> grids;
    for (const auto& row : doc["results"])
        if (row["method"] == "fd") grids.push_back(row["grid_points"]);
    CHECK(grids == std::vector<int>{1000, 2001, 4003});
    for (const auto& study : doc["comparisons"]["convergence"]) {
        const double order = study["levels"][0]["orders"][0];
        CHECK(std::abs(order - (study["method"] == "fd" ? 2.0 : 4.0)) < 0.5);
    }
}

TEST_CASE("config text parsing")
{
    const auto kv = parse_config_text("  a = 1 \n# only comment\nb=x#y\n r-max = 3\n");
    CHECK(kv.at("a") == "1");
    CHECK(kv.at("b") == "x");
    CHECK(kv.at("r_max") == "3");
    CHECK_THROWS_AS(parse_config_text("novalue\n"), ConfigError);
}

TEST_CASE("number formatting is shortest round trip")
{
    CHECK(format_number(1.5) == "1.5");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.2917811312283944) == "1.2917811312283944");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
