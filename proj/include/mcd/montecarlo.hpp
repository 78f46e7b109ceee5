#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mcd/elliptical.hpp"
#include "mcd/estimator.hpp"
#include "mcd/json_out.hpp"

namespace mcd {

/// Configuration of one simulation run. Seed-complete: identical configs
/// produce byte-identical reports.
struct SimConfig {
    std::string model = "gaussian";  // radial registry spec
    int k = 2;
    int n = 2000;
    int reps = 1000;
    double gamma = 0.75;
    std::uint64_t seed = 1;
    enum class Estimator { cstep, exact };
    Estimator estimator = Estimator::cstep;
    int restarts = 20;
    std::vector<int> ladder = {200, 800, 3200};
    bool dump_reps = false;
    bool oracle_density = false;  // plugin check: use the true density, not the KDE
    int threads = 0;              // 0 = hardware concurrency

    void validate() const;  // n >= 4k, reps >= 2, gamma in (0,1)
};

/// One estimator run inside a replication.
struct RepRecord {
    bool ok = false;
    Vector muhat;
    Matrix sigmahat;
    double rhohat = 0.0;
};

/// n iid draws from the elliptical model with location mu and scatter
/// Sigma: X = mu + Sigma^{1/2} Z with Z spherical.
SampleSet sample_elliptical(const RadialDensity& model, const Vector& mu,
                            const PDSMatrix& sigma, int n, std::uint64_t seed);

/// Remainder of the asymptotic expansion at one sample size.
struct RungStats {
    int n = 0;
    int failures = 0;
    double rms = 0.0;
    double median_norm = 0.0;
    double median_theta_err = 0.0;  // median ||theta_hat - theta0||
};

struct ExpansionReport {
    SimConfig config;
    EllipticalConstants theory;
    std::vector<RungStats> rungs;
    bool rms_decreasing = false;  // monotone, one inversion within 10% allowed
    double median_drop = 0.0;     // 1 - median(last) / median(first)
    bool passed = false;

    Json to_json() const;
};

/// Per replication: R_n = sqrt(n)(theta_hat - theta0) minus the explicit
/// iid expansion sums; reports RMS and median of ||R_n|| per ladder rung.
ExpansionReport expansion_remainder(const SimConfig& config);

struct CrossCorrelation {
    std::string a;
    std::string b;
    double value = 0.0;
};

struct CltReport {
    SimConfig config;
    EllipticalConstants theory;
    int failures = 0;
    double var_mu1 = 0.0;      // Var(sqrt(n) muhat_1)
    double var_sigma12 = 0.0;  // Var(sqrt(n) Sigmahat_12)
    double var_sigma11 = 0.0;  // Var(sqrt(n)(Sigmahat_11 - alpha^2))
    double var_rho = 0.0;      // Var(sqrt(n)(rhohat - rho0))
    double ratio_mu = 0.0;     // var_mu1 / tau, and so on
    double ratio_sigma12 = 0.0;
    double ratio_sigma11 = 0.0;
    double ratio_rho = 0.0;
    std::vector<CrossCorrelation> cross_correlations;
    double max_abs_cross_correlation = 0.0;
    bool passed = false;
    std::vector<RepRecord> records;  // kept for dump_reps

    Json to_json() const;
};

/// Empirical covariance structure of sqrt(n)(muhat, vec(Sigmahat) -
/// alpha^2 vec(I), rhohat - rho0) against tau, sigma1, 2 sigma1 + sigma2,
/// sigma_rho^2, plus the part (i) independence cross-correlations.
CltReport clt_check(const SimConfig& config);

struct PluginReport {
    SimConfig config;
    EllipticalConstants theory;
    int failures = 0;
    double median_mu_block_var = 0.0;
    double median_ratio = 0.0;  // median mu-block variance / tau
    bool passed = false;

    Json to_json() const;
};

/// Sandwich variance per replication via the plug-in derivative estimate;
/// compares the median estimated mu-block variance against tau.
PluginReport plugin_check(const SimConfig& config);

}  // namespace mcd
