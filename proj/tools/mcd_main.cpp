#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mcd/csv.hpp"
#include "mcd/elliptical.hpp"
#include "mcd/estimator.hpp"
#include "mcd/functional.hpp"
#include "mcd/json_out.hpp"
#include "mcd/montecarlo.hpp"

namespace {

using namespace mcd;

void write_output(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot write file: " + out_path);
    out << text;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string compose_model(const std::string& model, double nu) {
    if (model == "student_t") return "student_t(" + fmt17(nu) + ")";
    return model;
}

std::vector<std::string> tangent_coord_names(int k) {
    std::vector<std::string> names;
    for (int i = 0; i < k; ++i) names.push_back("h" + std::to_string(i + 1));
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j)
            names.push_back("A" + std::to_string(i + 1) + std::to_string(j + 1));
    names.push_back("s");
    return names;
}

Json fit_json(const McdFit& fit) {
    Json j;
    j["method"] = fit.exact ? "exact" : "cstep";
    j["gamma"] = fit.gamma;
    j["h"] = static_cast<int>(fit.subset.size());
    j["T"] = to_json(fit.T);
    j["C"] = to_json(fit.C);
    j["B"] = to_json(fit.G.mat());
    j["r_hat"] = fit.r_hat;
    j["det_C"] = fit.det_C;
    Json subset = Json::array();
    for (int idx : fit.subset) subset.push_back(idx);
    j["subset"] = subset;
    return j;
}

int cmd_estimate(const std::string& input, double gamma, bool exact, int restarts,
                 std::uint64_t seed, bool header, const std::string& out) {
    const SampleSet samples = SampleSet::from_csv(input, header);
    if (samples.n() < 4 * samples.k()) {
        std::cerr << "error: need n >= 4k observations (n=" << samples.n()
                  << ", k=" << samples.k() << ")\n";
        return 1;
    }
    McdFit fit = exact ? mcd_exact(samples, gamma) : mcd_cstep(samples, gamma, restarts, seed);
    Json j;
    j["n"] = samples.n();
    j["k"] = samples.k();
    j["fit"] = fit_json(fit);
    write_output(out, dump_json(j));
    return 0;
}

int cmd_theory(const std::string& model, double nu, int k, double gamma,
               const std::string& out) {
    const RadialDensity radial = make_radial(compose_model(model, nu), k);
    const EllipticalConstants c = compute_constants(radial, gamma);
    write_output(out, dump_json(constants_json(c)));
    return 0;
}

int cmd_variance(const std::string& input, double gamma, const std::string& bandwidth,
                 const std::string& density, bool exact, int restarts, std::uint64_t seed,
                 bool header, const std::string& out) {
    const SampleSet samples = SampleSet::from_csv(input, header);
    McdFit fit = exact ? mcd_exact(samples, gamma) : mcd_cstep(samples, gamma, restarts, seed);

    Bandwidth bw = Bandwidth::automatic();
    if (!bandwidth.empty() && bandwidth != "auto") bw = Bandwidth::fixed(std::stod(bandwidth));

    const SphereRule rule = SphereRule::make(samples.k(), 1.0);
    DensityModel oracle;
    const DensityModel* override_density = nullptr;
    if (!density.empty()) {
        oracle = make_density(density, samples.k());
        override_density = &oracle;
    }
    const LambdaPrimeMap map = plug_in_lambda_prime(samples, fit, bw, rule, override_density);

    Eigen::JacobiSVD<Matrix> svd(map.mat);
    const double cond =
        svd.singularValues().maxCoeff() / svd.singularValues().minCoeff();
    const Matrix sandwich = sandwich_covariance(samples, fit, map);

    Json j;
    j["n"] = samples.n();
    j["k"] = samples.k();
    j["fit"] = fit_json(fit);
    j["density"] = density.empty() ? std::string("kde") : density;
    Json names = Json::array();
    for (const auto& name : tangent_coord_names(samples.k())) names.push_back(name);
    j["coordinates"] = names;
    j["lambda_prime"] = to_json(map.mat);
    j["condition_number"] = cond;
    j["sandwich_covariance"] = to_json(sandwich);
    write_output(out, dump_json(j));
    return 0;
}

int cmd_influence(const std::string& model, double nu, int k, double gamma, int grid_points,
                  double grid_max, const std::string& out) {
    const RadialDensity radial = make_radial(compose_model(model, nu), k);
    const EllipticalConstants c = compute_constants(radial, gamma);

    std::ostringstream csv;
    csv << "norm_x,if_mu_norm,if_sigma_11";
    if (k >= 2) csv << ",if_sigma_12,if_sigma_22";
    csv << ",if_rho\n";
    for (int i = 0; i < grid_points; ++i) {
        const double t = grid_max * c.r * i / (grid_points - 1);
        if (std::abs(t - c.r) < 1e-12) {
            std::cerr << "warning: skipping grid point on the boundary shell ||x|| = r\n";
            continue;
        }
        Vector x = Vector::Zero(k);
        x[0] = t;
        const InfluenceValue iv = influence(x, c);
        csv << fmt17(t) << ',' << fmt17(iv.mu.norm()) << ',' << fmt17(iv.sigma(0, 0));
        if (k >= 2) csv << ',' << fmt17(iv.sigma(0, 1)) << ',' << fmt17(iv.sigma(1, 1));
        csv << ',' << fmt17(iv.rho) << '\n';
    }
    write_output(out, csv.str());
    return 0;
}

void write_reps_csv(const std::string& path, const CltReport& report, int k) {
    std::ostringstream csv;
    csv << "rep";
    for (int i = 0; i < k; ++i) csv << ",muhat_" << (i + 1);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) csv << ",sigmahat_" << (i + 1) << (j + 1);
    csv << ",rhohat\n";
    for (std::size_t rep = 0; rep < report.records.size(); ++rep) {
        const RepRecord& rec = report.records[rep];
        if (!rec.ok) continue;
        csv << rep;
        for (int i = 0; i < k; ++i) csv << ',' << fmt17(rec.muhat[i]);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) csv << ',' << fmt17(rec.sigmahat(i, j));
        csv << ',' << fmt17(rec.rhohat) << '\n';
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write file: " + path);
    out << csv.str();
}

int cmd_simulate(const SimConfig& cfg, const std::string& check,
                 const std::string& dump_path, const std::string& out) {
    Json j;
    if (check == "expansion") {
        j = expansion_remainder(cfg).to_json();
    } else if (check == "clt") {
        const CltReport report = clt_check(cfg);
        if (!dump_path.empty()) write_reps_csv(dump_path, report, cfg.k);
        j = report.to_json();
    } else if (check == "plugin") {
        j = plugin_check(cfg).to_json();
    } else {
        std::cerr << "error: unknown check '" << check << "'\n";
        return 1;
    }
    write_output(out, dump_json(j));
    return 0;
}

int dispatch(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateSample& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const TooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const UnknownModel& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 5;
    } catch (const SingularDerivative& e) {
        std::cerr << "error: " << e.what() << " (condition " << e.condition << ")\n";
        return 6;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimum covariance determinant estimation and asymptotics"};
    app.require_subcommand(1);

    std::string input, out, model = "gaussian", bandwidth = "auto", density, check;
    std::string estimator = "cstep", ladder = "200,800,3200", dump_path;
    double gamma = 0.75, nu = 5.0, grid_max = 3.0;
    int k = 2, restarts = 50, grid_points = 121, n = 2000, reps = 1000, threads = 0;
    std::uint64_t seed = 1;
    bool exact = false, header = false, oracle_density = false;

    auto* est = app.add_subcommand("estimate", "MCD fit of a CSV sample");
    est->add_option("input", input, "CSV file, one observation per row")->required();
    est->add_option("--gamma", gamma, "trimming fraction");
    est->add_flag("--exact", exact, "force exact enumeration");
    est->add_option("--restarts", restarts, "C-step restarts");
    est->add_option("--seed", seed, "RNG seed");
    est->add_flag("--header", header, "skip the first CSV line");
    est->add_option("--out", out, "output path (default stdout)");

    auto* theory = app.add_subcommand("theory", "closed-form elliptical constants");
    theory->add_option("--model", model, "gaussian | student_t | uniform_ball");
    theory->add_option("--nu", nu, "degrees of freedom for student_t");
    theory->add_option("--k", k, "dimension");
    theory->add_option("--gamma", gamma, "trimming fraction");
    theory->add_option("--out", out, "output path (default stdout)");

    auto* var = app.add_subcommand("variance", "plug-in sandwich variance of a CSV sample");
    var->add_option("input", input, "CSV file")->required();
    var->add_option("--gamma", gamma, "trimming fraction");
    var->add_option("--bandwidth", bandwidth, "KDE bandwidth ('auto' or a number)");
    var->add_option("--density", density, "oracle density name (bypasses the KDE)");
    var->add_flag("--exact", exact, "force exact enumeration");
    var->add_option("--restarts", restarts, "C-step restarts");
    var->add_option("--seed", seed, "RNG seed");
    var->add_flag("--header", header, "skip the first CSV line");
    var->add_option("--out", out, "output path (default stdout)");

    auto* infl = app.add_subcommand("influence", "influence functions on a radial grid");
    infl->add_option("--model", model, "gaussian | student_t | uniform_ball");
    infl->add_option("--nu", nu, "degrees of freedom for student_t");
    infl->add_option("--k", k, "dimension");
    infl->add_option("--gamma", gamma, "trimming fraction");
    infl->add_option("--grid-points", grid_points, "number of radial grid points");
    infl->add_option("--grid-max", grid_max, "grid extent in units of r");
    infl->add_option("--out", out, "output path (default stdout)");

    auto* sim = app.add_subcommand("simulate", "Monte-Carlo checks of the asymptotics");
    sim->add_option("--check", check, "expansion | clt | plugin")->required();
    sim->add_option("--model", model, "gaussian | student_t | uniform_ball");
    sim->add_option("--nu", nu, "degrees of freedom for student_t");
    sim->add_option("--k", k, "dimension");
    sim->add_option("--gamma", gamma, "trimming fraction");
    sim->add_option("--n", n, "sample size per replication");
    sim->add_option("--reps", reps, "number of replications");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--ladder", ladder, "comma-separated sample sizes for --check expansion");
    sim->add_option("--estimator", estimator, "cstep | exact");
    sim->add_option("--restarts", restarts, "C-step restarts");
    sim->add_option("--dump-reps", dump_path, "write per-replication CSV to this path");
    sim->add_flag("--oracle-density", oracle_density, "plugin check with the true density");
    sim->add_option("--threads", threads, "worker threads (0 = all cores)");
    sim->add_option("--out", out, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (est->parsed()) {
        return dispatch([&] {
            return cmd_estimate(input, gamma, exact, restarts, seed, header, out);
        });
    }
    if (theory->parsed()) {
        return dispatch([&] { return cmd_theory(model, nu, k, gamma, out); });
    }
    if (var->parsed()) {
        return dispatch([&] {
            return cmd_variance(input, gamma, bandwidth, density, exact, restarts, seed,
                                header, out);
        });
    }
    if (infl->parsed()) {
        return dispatch(
            [&] { return cmd_influence(model, nu, k, gamma, grid_points, grid_max, out); });
    }
    if (sim->parsed()) {
        return dispatch([&] {
            SimConfig cfg;
            cfg.model = compose_model(model, nu);
            cfg.k = k;
            cfg.n = n;
            cfg.reps = reps;
            cfg.gamma = gamma;
            cfg.seed = seed;
            cfg.estimator = estimator == "exact" ? SimConfig::Estimator::exact
                                                 : SimConfig::Estimator::cstep;
            cfg.restarts = restarts;
            cfg.dump_reps = !dump_path.empty();
            cfg.oracle_density = oracle_density;
            cfg.threads = threads;
            cfg.ladder.clear();
            std::stringstream ss(ladder);
            std::string item;
            while (std::getline(ss, item, ',')) cfg.ladder.push_back(std::stoi(item));
            return cmd_simulate(cfg, check, dump_path, out);
        });
    }
    return 1;
}
