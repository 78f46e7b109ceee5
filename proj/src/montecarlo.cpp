#include "mcd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "mcd/functional.hpp"
#include "mcd/rng.hpp"

namespace mcd {

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (index * 0x9e3779b97f4a7c15ULL + 0x243f6a8885a308d3ULL);
    splitmix64(s);
    return splitmix64(s);
}

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 0) {
        threads = static_cast<int>(std::thread::hardware_concurrency());
        if (threads <= 0) threads = 1;
    }
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

double variance(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return acc / (n - 1.0);
}

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

McdFit fit_one(const SampleSet& samples, const SimConfig& cfg, std::uint64_t fit_seed) {
    if (cfg.estimator == SimConfig::Estimator::exact) {
        return mcd_exact(samples, cfg.gamma);
    }
    return mcd_cstep(samples, cfg.gamma, cfg.restarts, fit_seed);
}

Json config_json(const SimConfig& cfg) {
    Json j;
    j["model"] = cfg.model;
    j["k"] = cfg.k;
    j["n"] = cfg.n;
    j["reps"] = cfg.reps;
    j["gamma"] = cfg.gamma;
    j["seed"] = cfg.seed;
    j["estimator"] = cfg.estimator == SimConfig::Estimator::exact ? "exact" : "cstep";
    j["restarts"] = cfg.restarts;
    return j;
}

}  // namespace

void SimConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw BadFraction("SimConfig: gamma must lie in (0,1)");
    if (n < 4 * k) throw Error("SimConfig: need n >= 4k");
    if (reps < 2) throw Error("SimConfig: need at least 2 replications");
    if (k < 1) throw Error("SimConfig: dimension must be positive");
}

SampleSet sample_elliptical(const RadialDensity& model, const Vector& mu,
                            const PDSMatrix& sigma, int n, std::uint64_t seed) {
    if (!model.has_sampler()) {
        throw UnknownModel("sample_elliptical: model '" + model.name + "' has no sampler");
    }
    if (mu.size() != model.k || sigma.dim() != model.k) {
        throw ShapeError("sample_elliptical: dimension mismatch");
    }
    const Matrix root = pds_sqrt(sigma).mat();
    Rng rng = Rng::stream(seed, 0);
    Matrix x(n, model.k);
    for (int i = 0; i < n; ++i) {
        x.row(i) = (mu + root * model.spherical_sampler(rng)).transpose();
    }
    return SampleSet(std::move(x));
}

ExpansionReport expansion_remainder(const SimConfig& config) {
    config.validate();
    const RadialDensity model = make_radial(config.model, config.k);
    const EllipticalConstants th = compute_constants(model, config.gamma);
    const int k = config.k;
    const Vector mu0 = Vector::Zero(k);
    const PDSMatrix eye = PDSMatrix::identity(k);
    const Matrix alpha_eye = th.alpha * th.alpha * Matrix::Identity(k, k);

    ExpansionReport report;
    report.config = config;
    report.theory = th;

    for (std::size_t rung = 0; rung < config.ladder.size(); ++rung) {
        const int n = config.ladder[rung];
        if (n < 4 * k) throw Error("expansion_remainder: ladder rung below 4k");
        std::vector<double> norms(config.reps, -1.0);
        std::vector<double> theta_errs(config.reps, -1.0);
        std::atomic<int> failures{0};

        parallel_for(config.reps, config.threads, [&](int rep) {
            const std::uint64_t id =
                static_cast<std::uint64_t>(rung) * 1000003ULL + static_cast<std::uint64_t>(rep);
            try {
                const SampleSet samples =
                    sample_elliptical(model, mu0, eye, n, derive_seed(config.seed, 2 * id));
                const McdFit fit = fit_one(samples, config, derive_seed(config.seed, 2 * id + 1));
                const double sqn = std::sqrt(static_cast<double>(n));

                Vector sum_mu = Vector::Zero(k);
                Matrix sum_sig = Matrix::Zero(k, k);
                double sum_rho = 0.0;
                for (int i = 0; i < n; ++i) {
                    const Vector x = samples.row(i);
                    const double q = x.squaredNorm();
                    const double ind = std::sqrt(q) <= th.r ? 1.0 : 0.0;
                    sum_mu += th.pi * ind * x;
                    sum_sig += ind * (th.kappa1 * Matrix::Identity(k, k) +
                                      th.kappa2 * q * Matrix::Identity(k, k) +
                                      th.kappa3 * x * x.transpose()) +
                               th.kappa4 * Matrix::Identity(k, k);
                    sum_rho += th.lambda1 * ind * q + th.lambda2 * ind + th.lambda3;
                }
                const Vector rn_mu = sqn * fit.T - sum_mu / sqn;
                const Matrix rn_sig = sqn * (fit.C - alpha_eye) - sum_sig / sqn;
                const double rn_rho = sqn * (fit.r_hat - th.rho0) - sum_rho / sqn;
                norms[rep] = std::sqrt(rn_mu.squaredNorm() + rn_sig.squaredNorm() +
                                       rn_rho * rn_rho);
                theta_errs[rep] =
                    std::sqrt(fit.T.squaredNorm() +
                              (fit.G.mat() - th.alpha * Matrix::Identity(k, k)).squaredNorm() +
                              (fit.r_hat - th.rho0) * (fit.r_hat - th.rho0));
            } catch (const Error&) {
                failures.fetch_add(1);
            }
        });

        RungStats stats;
        stats.n = n;
        stats.failures = failures.load();
        std::vector<double> good, errs;
        for (int rep = 0; rep < config.reps; ++rep) {
            if (norms[rep] >= 0.0) {
                good.push_back(norms[rep]);
                errs.push_back(theta_errs[rep]);
            }
        }
        double sq = 0.0;
        for (double v : good) sq += v * v;
        stats.rms = good.empty() ? 0.0 : std::sqrt(sq / static_cast<double>(good.size()));
        stats.median_norm = median(good);
        stats.median_theta_err = median(errs);
        report.rungs.push_back(stats);
    }

    // monotone RMS across the ladder, allowing one inversion within 10%
    report.rms_decreasing = true;
    int inversions = 0;
    for (std::size_t i = 1; i < report.rungs.size(); ++i) {
        if (report.rungs[i].rms > report.rungs[i - 1].rms) {
            ++inversions;
            if (inversions > 1 || report.rungs[i].rms > 1.10 * report.rungs[i - 1].rms) {
                report.rms_decreasing = false;
            }
        }
    }
    if (report.rungs.size() >= 2) {
        const double first = report.rungs.front().median_norm;
        const double last = report.rungs.back().median_norm;
        report.median_drop = first > 0.0 ? 1.0 - last / first : 0.0;
    }
    report.passed = report.rms_decreasing && report.median_drop >= 0.30;
    return report;
}

Json ExpansionReport::to_json() const {
    Json j;
    j["check"] = "expansion";
    j["config"] = config_json(config);
    j["theory"] = constants_json(theory);
    Json rungs_json = Json::array();
    for (const auto& s : rungs) {
        Json r;
        r["n"] = s.n;
        r["failures"] = s.failures;
        r["rms_remainder"] = s.rms;
        r["median_remainder"] = s.median_norm;
        r["median_theta_error"] = s.median_theta_err;
        rungs_json.push_back(r);
    }
    j["rungs"] = rungs_json;
    j["rms_decreasing"] = rms_decreasing;
    j["median_drop"] = median_drop;
    j["passed"] = passed;
    return j;
}

CltReport clt_check(const SimConfig& config) {
    config.validate();
    const RadialDensity model = make_radial(config.model, config.k);
    const EllipticalConstants th = compute_constants(model, config.gamma);
    const int k = config.k;
    const Vector mu0 = Vector::Zero(k);
    const PDSMatrix eye = PDSMatrix::identity(k);

    CltReport report;
    report.config = config;
    report.theory = th;
    report.records.assign(static_cast<std::size_t>(config.reps), RepRecord{});

    parallel_for(config.reps, config.threads, [&](int rep) {
        try {
            const std::uint64_t id = static_cast<std::uint64_t>(rep);
            const SampleSet samples =
                sample_elliptical(model, mu0, eye, config.n, derive_seed(config.seed, 2 * id));
            const McdFit fit = fit_one(samples, config, derive_seed(config.seed, 2 * id + 1));
            RepRecord& rec = report.records[static_cast<std::size_t>(rep)];
            rec.ok = true;
            rec.muhat = fit.T;
            rec.sigmahat = fit.C;
            rec.rhohat = fit.r_hat;
        } catch (const Error&) {
        }
    });

    const double sqn = std::sqrt(static_cast<double>(config.n));
    std::vector<std::vector<double>> series;  // scaled coordinates per rep
    std::vector<std::string> names;
    for (int a = 0; a < k; ++a) names.push_back("mu" + std::to_string(a + 1));
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b)
            names.push_back("sigma" + std::to_string(a + 1) + std::to_string(b + 1));
    names.push_back("rho");
    series.assign(names.size(), {});

    const double a2 = th.alpha * th.alpha;
    for (const auto& rec : report.records) {
        if (!rec.ok) {
            ++report.failures;
            continue;
        }
        std::size_t c = 0;
        for (int a = 0; a < k; ++a) series[c++].push_back(sqn * rec.muhat[a]);
        for (int a = 0; a < k; ++a)
            for (int b = a; b < k; ++b)
                series[c++].push_back(sqn * (rec.sigmahat(a, b) - (a == b ? a2 : 0.0)));
        series[c].push_back(sqn * (rec.rhohat - th.rho0));
    }

    auto index_of = [&](const std::string& name) {
        return static_cast<std::size_t>(
            std::find(names.begin(), names.end(), name) - names.begin());
    };
    report.var_mu1 = variance(series[index_of("mu1")]);
    report.var_sigma11 = variance(series[index_of("sigma11")]);
    report.var_rho = variance(series[index_of("rho")]);
    report.var_sigma12 = k >= 2 ? variance(series[index_of("sigma12")]) : 0.0;
    report.ratio_mu = report.var_mu1 / th.tau;
    report.ratio_sigma11 = report.var_sigma11 / (2.0 * th.sigma1 + th.sigma2);
    report.ratio_rho = report.var_rho / th.sigma_rho_sq;
    report.ratio_sigma12 = k >= 2 ? report.var_sigma12 / th.sigma1 : 0.0;

    // part (i): mu-block against the (Sigma, rho)-block, diagonal against
    // off-diagonal entries, distinct off-diagonal pairs
    auto add_corr = [&](const std::string& a, const std::string& b) {
        CrossCorrelation c;
        c.a = a;
        c.b = b;
        c.value = correlation(series[index_of(a)], series[index_of(b)]);
        report.cross_correlations.push_back(c);
    };
    for (int a = 0; a < k; ++a) {
        const std::string mu_name = "mu" + std::to_string(a + 1);
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j)
                add_corr(mu_name, "sigma" + std::to_string(i + 1) + std::to_string(j + 1));
        add_corr(mu_name, "rho");
    }
    for (int d = 0; d < k; ++d)
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                add_corr("sigma" + std::to_string(d + 1) + std::to_string(d + 1),
                         "sigma" + std::to_string(i + 1) + std::to_string(j + 1));
    std::vector<std::string> offdiag;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            offdiag.push_back("sigma" + std::to_string(i + 1) + std::to_string(j + 1));
    for (std::size_t i = 0; i < offdiag.size(); ++i)
        for (std::size_t j = i + 1; j < offdiag.size(); ++j) add_corr(offdiag[i], offdiag[j]);

    report.max_abs_cross_correlation = 0.0;
    for (const auto& c : report.cross_correlations) {
        report.max_abs_cross_correlation =
            std::max(report.max_abs_cross_correlation, std::abs(c.value));
    }

    const bool mu_ok = report.ratio_mu > 0.85 && report.ratio_mu < 1.15;
    const bool s12_ok = k < 2 || (report.ratio_sigma12 > 0.80 && report.ratio_sigma12 < 1.20);
    const bool s11_ok = report.ratio_sigma11 > 0.80 && report.ratio_sigma11 < 1.20;
    const bool rho_ok = report.ratio_rho > 0.80 && report.ratio_rho < 1.20;
    report.passed =
        mu_ok && s12_ok && s11_ok && rho_ok && report.max_abs_cross_correlation < 0.10;
    return report;
}

Json CltReport::to_json() const {
    Json j;
    j["check"] = "clt";
    j["config"] = config_json(config);
    j["theory"] = constants_json(theory);
    j["failures"] = failures;
    j["var_mu1"] = var_mu1;
    j["var_sigma12"] = var_sigma12;
    j["var_sigma11"] = var_sigma11;
    j["var_rho"] = var_rho;
    j["ratio_mu"] = ratio_mu;
    j["ratio_sigma12"] = ratio_sigma12;
    j["ratio_sigma11"] = ratio_sigma11;
    j["ratio_rho"] = ratio_rho;
    Json corrs = Json::array();
    for (const auto& c : cross_correlations) {
        Json e;
        e["a"] = c.a;
        e["b"] = c.b;
        e["corr"] = c.value;
        corrs.push_back(e);
    }
    j["cross_correlations"] = corrs;
    j["max_abs_cross_correlation"] = max_abs_cross_correlation;
    j["passed"] = passed;
    return j;
}

PluginReport plugin_check(const SimConfig& config) {
    config.validate();
    const RadialDensity model = make_radial(config.model, config.k);
    const EllipticalConstants th = compute_constants(model, config.gamma);
    const int k = config.k;
    const Vector mu0 = Vector::Zero(k);
    const PDSMatrix eye = PDSMatrix::identity(k);
    const DensityModel truth = to_density(model);
    const SphereRule rule = SphereRule::make(k, 1.0);

    PluginReport report;
    report.config = config;
    report.theory = th;
    std::vector<double> mu_vars(config.reps, -1.0);

    parallel_for(config.reps, config.threads, [&](int rep) {
        try {
            const std::uint64_t id = static_cast<std::uint64_t>(rep);
            const SampleSet samples =
                sample_elliptical(model, mu0, eye, config.n, derive_seed(config.seed, 2 * id));
            const McdFit fit = fit_one(samples, config, derive_seed(config.seed, 2 * id + 1));
            const LambdaPrimeMap map = plug_in_lambda_prime(
                samples, fit, Bandwidth::automatic(), rule,
                config.oracle_density ? &truth : nullptr);
            const Matrix cov = sandwich_covariance(samples, fit, map);
            mu_vars[rep] = cov.topLeftCorner(k, k).diagonal().mean();
        } catch (const Error&) {
        }
    });

    std::vector<double> good;
    for (double v : mu_vars) {
        if (v >= 0.0) {
            good.push_back(v);
        } else {
            ++report.failures;
        }
    }
    report.median_mu_block_var = median(good);
    report.median_ratio = report.median_mu_block_var / th.tau;
    const double lo = config.oracle_density ? 0.85 : 0.70;
    const double hi = config.oracle_density ? 1.15 : 1.30;
    report.passed = report.median_ratio > lo && report.median_ratio < hi;
    return report;
}

Json PluginReport::to_json() const {
    Json j;
    j["check"] = "plugin";
    j["config"] = config_json(config);
    j["theory"] = constants_json(theory);
    j["oracle_density"] = config.oracle_density;
    j["failures"] = failures;
    j["median_mu_block_var"] = median_mu_block_var;
    j["median_ratio"] = median_ratio;
    j["passed"] = passed;
    return j;
}

}  // namespace mcd
