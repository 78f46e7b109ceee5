#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcd/montecarlo.hpp"

#ifndef MCD_CLI_PATH
#error "MCD_CLI_PATH must be defined by the build"
#endif
#ifndef MCD_SCHEMA_DIR
#error "MCD_SCHEMA_DIR must be defined by the build"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "mcd_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    const fs::path out = work_dir() / "stdout.txt";
    const fs::path err = work_dir() / "stderr.txt";
    const std::string command = std::string(MCD_CLI_PATH) + " " + args + " > " +
                                out.string() + " 2> " + err.string();
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

// minimal checker for the shipped schema subset: type / required /
// properties / items
void check_schema(const json& doc, const json& schema, const std::string& where) {
    if (schema.contains("type")) {
        const std::string type = schema["type"];
        bool ok = false;
        if (type == "object") ok = doc.is_object();
        if (type == "array") ok = doc.is_array();
        if (type == "string") ok = doc.is_string();
        if (type == "boolean") ok = doc.is_boolean();
        if (type == "integer") ok = doc.is_number_integer() || doc.is_number_unsigned();
        if (type == "number") ok = doc.is_number();
        INFO("at ", where, ": expected type ", type);
        REQUIRE(ok);
    }
    if (schema.contains("required")) {
        for (const auto& key : schema["required"]) {
            INFO("at ", where, ": missing required key ", key.get<std::string>());
            REQUIRE(doc.contains(key.get<std::string>()));
        }
    }
    if (schema.contains("properties") && doc.is_object()) {
        for (const auto& [key, sub] : schema["properties"].items()) {
            if (doc.contains(key)) check_schema(doc[key], sub, where + "." + key);
        }
    }
    if (schema.contains("items") && doc.is_array()) {
        for (std::size_t i = 0; i < doc.size(); ++i) {
            check_schema(doc[i], schema["items"], where + "[" + std::to_string(i) + "]");
        }
    }
}

void validate_against(const json& doc, const std::string& schema_name) {
    const fs::path schema_path = fs::path(MCD_SCHEMA_DIR) / schema_name;
    const json schema = json::parse(slurp(schema_path));
    check_schema(doc, schema, schema_name);
}

fs::path gaussian_csv(int n, int k, std::uint64_t seed) {
    const mcd::SampleSet samples = mcd::sample_elliptical(
        mcd::radial_gaussian(k), mcd::Vector::Zero(k), mcd::PDSMatrix::identity(k), n, seed);
    const fs::path p = work_dir() / ("gaussian_" + std::to_string(n) + "_" +
                                     std::to_string(k) + ".csv");
    std::ofstream out(p);
    out.precision(17);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < k; ++j) out << (j ? "," : "") << samples.X(i, j);
        out << "\n";
    }
    return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("estimate on the four-point line") {
    const fs::path csv = work_dir() / "line.csv";
    write_file(csv, "0\n1\n2\n10\n");

    const CliResult r = run_cli("estimate " + csv.string() + " --gamma 0.75 --exact");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    validate_against(doc, "estimate.schema.json");
    CHECK(doc["fit"]["subset"] == json::array({0, 1, 2}));
    CHECK(doc["fit"]["T"][0].get<double>() == doctest::Approx(1.0));
    CHECK(doc["fit"]["C"][0][0].get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(doc["fit"]["method"] == "exact");
}

TEST_CASE("estimate validates the sample size") {
    const fs::path csv = work_dir() / "tiny.csv";
    write_file(csv, "0\n1\n2\n");
    CHECK(run_cli("estimate " + csv.string() + " --gamma 0.75").exit_code == 1);
}

TEST_CASE("estimate is deterministic for a fixed seed") {
    const fs::path csv = gaussian_csv(80, 2, 5);
    const CliResult a = run_cli("estimate " + csv.string() + " --gamma 0.75 --seed 9");
    const CliResult b = run_cli("estimate " + csv.string() + " --gamma 0.75 --seed 9");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("io errors carry exit code 2") {
    CHECK(run_cli("estimate /nonexistent/file.csv").exit_code == 2);

    const fs::path bad = work_dir() / "bad.csv";
    write_file(bad, "1,2\n3,4\n5,oops\n");
    const CliResult r = run_cli("estimate " + bad.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("theory constants and failure modes") {
    const CliResult r = run_cli("theory --model gaussian --k 2 --gamma 0.5");
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(r.out);
    validate_against(doc, "theory.schema.json");
    CHECK(doc["r"].get<double>() == doctest::Approx(1.177410).epsilon(1e-5));
    const double alpha = doc["alpha"].get<double>();
    CHECK(alpha * alpha == doctest::Approx(0.306853).epsilon(1e-5));

    CHECK(run_cli("theory --model gaussian --k 2 --gamma 1.0").exit_code == 1);
    CHECK(run_cli("theory --model cauchy --k 2 --gamma 0.5").exit_code == 5);

    const CliResult t5 = run_cli("theory --model student_t --nu 5 --k 2 --gamma 0.75");
    REQUIRE(t5.exit_code == 0);
    const json tdoc = json::parse(t5.out);
    CHECK(tdoc["beta1"].get<double>() < 0.0);
    CHECK(tdoc["beta2"].get<double>() < 0.0);
    CHECK(tdoc["beta6"].get<double>() > 0.0);
    CHECK(tdoc["sigma1"].get<double>() > 0.0);
}

TEST_CASE("variance command") {
    const fs::path csv = gaussian_csv(600, 2, 21);
    const CliResult oracle_run =
        run_cli("variance " + csv.string() + " --gamma 0.75 --density gaussian --seed 4");
    REQUIRE(oracle_run.exit_code == 0);
    const json doc = json::parse(oracle_run.out);
    validate_against(doc, "variance.schema.json");
    CHECK(doc["coordinates"] == json::array({"h1", "h2", "A11", "A12", "A22", "s"}));
    CHECK(doc["condition_number"].get<double>() > 1.0);
    CHECK(doc["sandwich_covariance"].size() == 6);

    // mu block loosely near tau
    const CliResult theory = run_cli("theory --model gaussian --k 2 --gamma 0.75");
    const double tau = json::parse(theory.out)["tau"].get<double>();
    const double mu_block = 0.5 * (doc["sandwich_covariance"][0][0].get<double>() +
                                   doc["sandwich_covariance"][1][1].get<double>());
    CHECK(mu_block > 0.3 * tau);
    CHECK(mu_block < 3.0 * tau);

    // KDE route also runs
    const CliResult kde_run = run_cli("variance " + csv.string() + " --gamma 0.75 --seed 4");
    REQUIRE(kde_run.exit_code == 0);
    CHECK(json::parse(kde_run.out)["density"] == "kde");

    CHECK(run_cli("variance " + csv.string() + " --bandwidth -1").exit_code == 1);
}

TEST_CASE("influence table") {
    const CliResult r =
        run_cli("influence --model gaussian --k 2 --gamma 0.5 --grid-points 61 --grid-max 3");
    REQUIRE(r.exit_code == 0);

    const CliResult theory = run_cli("theory --model gaussian --k 2 --gamma 0.5");
    const json th = json::parse(theory.out);
    const double rr = th["r"].get<double>();
    const double l2 = th["lambda2"].get<double>();
    const double l3 = th["lambda3"].get<double>();
    const double k4 = th["kappa4"].get<double>();

    std::stringstream ss(r.out);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "norm_x,if_mu_norm,if_sigma_11,if_sigma_12,if_sigma_22,if_rho");
    bool checked_center = false;
    int outside_rows = 0;
    while (std::getline(ss, line)) {
        std::stringstream row(line);
        std::string field;
        std::vector<double> v;
        while (std::getline(row, field, ',')) v.push_back(std::stod(field));
        REQUIRE(v.size() == 6);
        if (v[0] == 0.0) {
            CHECK(v[5] == doctest::Approx(l2 + l3).epsilon(1e-12));
            checked_center = true;
        }
        if (v[0] > rr) {
            ++outside_rows;
            CHECK(v[1] == 0.0);
            CHECK(v[2] == doctest::Approx(k4).epsilon(1e-12));
            CHECK(v[5] == doctest::Approx(l3).epsilon(1e-12));
        }
    }
    CHECK(checked_center);
    CHECK(outside_rows > 10);
}

TEST_CASE("simulate is deterministic and writes valid reports") {
    const std::string args =
        "simulate --check clt --n 100 --reps 20 --seed 7 --restarts 5 --threads 2";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.out == b.out);
    const json doc = json::parse(a.out);
    validate_against(doc, "simreport.schema.json");
    CHECK(doc["check"] == "clt");

    const fs::path reps_csv = work_dir() / "reps.csv";
    const CliResult with_dump = run_cli(args + " --dump-reps " + reps_csv.string());
    REQUIRE(with_dump.exit_code == 0);
    std::stringstream ss(slurp(reps_csv));
    std::string header;
    std::getline(ss, header);
    CHECK(header == "rep,muhat_1,muhat_2,sigmahat_11,sigmahat_12,sigmahat_21,sigmahat_22,rhohat");

    const CliResult expansion = run_cli(
        "simulate --check expansion --ladder 100,200 --reps 16 --seed 3 --restarts 5");
    REQUIRE(expansion.exit_code == 0);
    const json exp_doc = json::parse(expansion.out);
    validate_against(exp_doc, "simreport.schema.json");
    CHECK(exp_doc["rungs"].size() == 2);

    CHECK(run_cli("simulate --check clt --gamma 1.5 --n 100 --reps 10").exit_code == 1);
    CHECK(run_cli("simulate --check nonsense --n 100 --reps 10").exit_code == 1);
}

}  // TEST_SUITE
