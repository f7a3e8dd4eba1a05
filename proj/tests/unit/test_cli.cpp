#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "strobo/cli.hpp"
#include "strobo/errors.hpp"

using namespace strobo;
using nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "strobo");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::filesystem::path scratch_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("strobo_test_" + std::to_string(::getpid()) + "_" + name);
}

}  // namespace

TEST_CASE("size lists") {
    CHECK(cli::parse_size_list("64,128,512") == std::vector<std::size_t>{64, 128, 512});
    CHECK(cli::parse_size_list("64,128,...,1024") == std::vector<std::size_t>{64, 128, 256, 512, 1024});
    CHECK(cli::parse_size_list("10, 20, ..., 50") == std::vector<std::size_t>{10, 20, 30, 40, 50});
    CHECK_THROWS_AS(cli::parse_size_list("64,128,...,1000"), ContractViolation);
    CHECK_THROWS_AS(cli::parse_size_list("64,32"), ContractViolation);
    CHECK_THROWS_AS(cli::parse_size_list("64,x"), ContractViolation);
    CHECK_THROWS_AS(cli::parse_size_list(""), ContractViolation);
}

TEST_CASE("spectrum csv carries numeric, formula and error columns") {
    const auto r = invoke({"spectrum", "--model", "osc-b", "--N", "64", "--omega", "1", "--delta", "-0.5"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("# command=spectrum\n") == 0);
    CHECK(r.out.find("# N=64\n") != std::string::npos);
    CHECK(r.out.find("# delta=-0.5\n") != std::string::npos);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 65);
    CHECK(rows[0] == std::vector<std::string>{"m", "E_numeric_re", "E_numeric_im", "E_formula_re", "E_formula_im",
                                              "abs_error"});
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(std::stoul(rows[i][0]) == i);
        CHECK(std::stod(rows[i][5]) <= 1e-10);
    }
}

TEST_CASE("spectrum json for Case A") {
    const auto r = invoke({"spectrum", "--model", "osc-a", "--N", "16", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["config"]["model"] == "osc-a");
    CHECK(doc["rows"].size() == 16);
    CHECK(doc["max_abs_error"].get<double>() <= 1e-10);
    CHECK_FALSE(doc["hermitian"].get<bool>());
}

TEST_CASE("su2-check json reports identity residuals") {
    const auto r = invoke({"su2-check", "--s", "10", "--omega", "1"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["schema_version"] == 1);
    CHECK(doc["config"]["s"] == "10");
    for (const char* key : {"hsq", "commutator", "sumsqu", "hsq1"}) CHECK(doc["residuals"][key].get<double>() <= 1e-10);
    CHECK(doc["pass"].get<bool>());
    CHECK(doc["emergent_min_over_omega"].get<double>() == doctest::Approx(3.0));

    CHECK(invoke({"su2-check", "--s", "0.3"}).code == 2);
}

TEST_CASE("converge reports the fitted order") {
    const auto r = invoke({"converge", "--model", "osc-a", "--mode", "1", "--delta", "-0.5", "--Ns", "64,128,...,4096"});
    REQUIRE(r.code == 0);
    const auto doc = json::parse(r.out);
    CHECK(doc["accepted"].get<bool>());
    CHECK(std::abs(doc["fitted_order"].get<double>() + 1.0) <= 0.1);
    CHECK(doc["Ns"].size() == 7);

    const auto svg = invoke({"converge", "--model", "osc-b", "--Ns", "64,128,...,1024", "--format", "svg"});
    REQUIRE(svg.code == 0);
    CHECK(svg.out.find("<svg") == 0);
    CHECK(svg.out.find("<polyline") != std::string::npos);

    CHECK(invoke({"spectrum", "--format", "svg"}).code == 2);
}

TEST_CASE("evolve, particle and report run") {
    const auto e = invoke({"evolve", "--model", "osc-b", "--N", "32", "--clock", "gaussian", "--steps", "3"});
    REQUIRE(e.code == 0);
    const auto rows = csv_rows(e.out);
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][4]) <= 1e-8);

    const auto p = invoke({"particle", "--s", "1", "--format", "json"});
    REQUIRE(p.code == 0);
    CHECK(json::parse(p.out)["modes"].size() == 27);

    const auto rep = invoke({"report", "--N", "16", "--Ns", "64,128,256", "--s", "2"});
    REQUIRE(rep.code == 0);
    const auto doc = json::parse(rep.out);
    CHECK(doc["su2"]["max_identity_residual"].get<double>() <= 1e-10);
}

TEST_CASE("identical configs give byte-identical output") {
    for (const std::vector<std::string>& args :
         {std::vector<std::string>{"spectrum", "--model", "osc-a", "--N", "32", "--delta", "0.3"},
          {"converge", "--model", "osc-b", "--Ns", "64,128,...,1024", "--format", "json"},
          {"evolve", "--clock", "uniform", "--steps", "2"},
          {"particle", "--s", "1.5"}}) {
        setenv("STROBO_THREADS", "1", 1);
        const auto first = invoke(args);
        setenv("STROBO_THREADS", "3", 1);
        const auto second = invoke(args);
        unsetenv("STROBO_THREADS");
        REQUIRE(first.code == 0);
        CHECK(first.out == second.out);
    }
}

TEST_CASE("config files are merged under flags and unknown keys are rejected") {
    const auto good = scratch_file("good.toml");
    std::ofstream(good) << "[spectrum]\nN = 6\nomega = 2.0\n";
    const auto merged = invoke({"--config", good.string(), "spectrum", "--N", "4"});
    REQUIRE(merged.code == 0);
    CHECK(merged.out.find("# N=4\n") != std::string::npos);
    CHECK(merged.out.find("# omega=2\n") != std::string::npos);

    const auto bad = scratch_file("bad.toml");
    std::ofstream(bad) << "[spectrum]\nbogus = 1\n";
    CHECK(invoke({"--config", bad.string(), "spectrum"}).code == 2);
    std::filesystem::remove(good);
    std::filesystem::remove(bad);
}

TEST_CASE("usage errors exit with 2") {
    CHECK(invoke({"spectrum", "--N", "1"}).code == 2);
    CHECK(invoke({"spectrum", "--omega", "-1"}).code == 2);
    CHECK(invoke({"spectrum", "--bogus", "3"}).code == 2);
    CHECK(invoke({"converge", "--Ns", "64"}).code == 2);
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("--out writes the artifact to a file") {
    const auto path = scratch_file("spectrum.csv");
    const auto r = invoke({"spectrum", "--N", "8", "--out", path.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::stringstream content;
    content << in.rdbuf();
    CHECK(content.str() == invoke({"spectrum", "--N", "8"}).out);
    std::filesystem::remove(path);

    CHECK(invoke({"spectrum", "--out", "/nonexistent-dir/x.csv"}).code == 1);
}

TEST_CASE("installed binary reports exit codes") {
    const char* binary = std::getenv("STROBO_CLI");
    REQUIRE(binary != nullptr);
    const std::string quiet = " >/dev/null 2>&1";
    const int ok = std::system((std::string(binary) + " spectrum --N 8" + quiet).c_str());
    CHECK(WEXITSTATUS(ok) == 0);
    const int usage = std::system((std::string(binary) + " spectrum --N 1" + quiet).c_str());
    CHECK(WEXITSTATUS(usage) == 2);
}
