#include "mcd/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mcd/csv.hpp"
#include "mcd/rng.hpp"

namespace mcd {

SampleSet::SampleSet(Matrix data) : X(std::move(data)) {
    if (X.rows() < 1 || X.cols() < 1) throw ShapeError("SampleSet: empty data");
    if (!X.allFinite()) throw Error("SampleSet: non-finite entries");
}

SampleSet SampleSet::from_csv(const std::string& path, bool skip_header) {
    return SampleSet(load_csv(path, skip_header));
}

int subset_size(int n, double gamma) {
    if (!(gamma > 0.0) || gamma > 1.0) {
        throw BadFraction("gamma must lie in (0, 1]");
    }
    return static_cast<int>(std::ceil(n * gamma - 1e-12));
}

std::pair<Vector, Matrix> trimmed_moments(const SampleSet& samples,
                                          const std::vector<int>& subset) {
    if (subset.empty()) throw Error("trimmed_moments: empty subset");
    const int k = samples.k();
    const double h = static_cast<double>(subset.size());
    Vector t = Vector::Zero(k);
    for (int idx : subset) t += samples.X.row(idx).transpose();
    t /= h;
    Matrix c = Matrix::Zero(k, k);
    for (int idx : subset) {
        const Vector d = samples.X.row(idx).transpose() - t;
        c.noalias() += d * d.transpose();
    }
    c /= h;
    return {std::move(t), symmetrize(c)};
}

namespace {

// Rank check shared by the search routines; a subset is degenerate when its
// covariance is numerically rank deficient.
bool is_degenerate(const Matrix& c) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c, Eigen::EigenvaluesOnly);
    const double hi = eig.eigenvalues().maxCoeff();
    const double lo = eig.eigenvalues().minCoeff();
    return !(lo > kPdFloor * std::max(hi, 1e-300));
}

double safe_det(const Matrix& c) { return c.determinant(); }

McdFit finalize_fit(const SampleSet& samples, std::vector<int> subset, double gamma,
                    bool exact) {
    auto [t, c] = trimmed_moments(samples, subset);
    if (is_degenerate(c)) {
        throw DegenerateSubset("subset covariance is rank deficient");
    }
    McdFit fit;
    fit.subset = std::move(subset);
    fit.T = std::move(t);
    fit.C = std::move(c);
    fit.G = pds_sqrt(PDSMatrix(fit.C));
    fit.r_hat = coverage_radius(fit.T, fit.C, samples, gamma);
    fit.det_C = safe_det(fit.C);
    fit.gamma = gamma;
    fit.exact = exact;
    return fit;
}

}  // namespace

Vector mahalanobis_sq(const Vector& T, const Matrix& C, const SampleSet& samples) {
    Eigen::LDLT<Matrix> ldlt(C);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw DegenerateMatrix("mahalanobis_sq: covariance not positive definite");
    }
    const int n = samples.n();
    Vector d(n);
    for (int i = 0; i < n; ++i) {
        const Vector diff = samples.X.row(i).transpose() - T;
        d[i] = diff.dot(ldlt.solve(diff));
    }
    return d;
}

double coverage_radius(const Vector& T, const Matrix& C, const SampleSet& samples,
                       double gamma) {
    if (is_degenerate(C)) {
        throw DegenerateMatrix("coverage_radius: singular covariance");
    }
    const int h = subset_size(samples.n(), gamma);
    Vector d = mahalanobis_sq(T, C, samples);
    std::nth_element(d.data(), d.data() + (h - 1), d.data() + d.size());
    return std::sqrt(std::max(d[h - 1], 0.0));
}

McdFit mcd_exact(const SampleSet& samples, double gamma) {
    const int n = samples.n();
    const int k = samples.k();
    const int h = subset_size(n, gamma);
    if (h < k + 1) throw Error("mcd_exact: subset size below k+1");

    double count = 1.0;  // C(n, h), overflow-safe in double
    for (int i = 1; i <= h; ++i) {
        count *= static_cast<double>(n - h + i) / i;
        if (count > 1e6) throw TooLarge("mcd_exact: C(n,h) exceeds the enumeration guard");
    }

    std::vector<int> idx(h);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> best;
    double best_det = std::numeric_limits<double>::infinity();
    bool any_candidate = false;

    for (;;) {
        auto [t, c] = trimmed_moments(samples, idx);
        if (!is_degenerate(c)) {
            any_candidate = true;
            const double det = safe_det(c);
            // lexicographic enumeration: strict improvement keeps the
            // lexicographically smallest argmin
            if (det < best_det) {
                best_det = det;
                best = idx;
            }
        }
        // next h-combination of {0,...,n-1} in lexicographic order
        int j = h - 1;
        while (j >= 0 && idx[j] == n - h + j) --j;
        if (j < 0) break;
        ++idx[j];
        for (int m = j + 1; m < h; ++m) idx[m] = idx[m - 1] + 1;
    }

    if (!any_candidate) {
        throw DegenerateSample("mcd_exact: every size-h subset is degenerate");
    }
    return finalize_fit(samples, best, gamma, true);
}

namespace {

// Keep the h points of smallest Mahalanobis distance; ties resolved by index.
std::vector<int> select_h_closest(const Vector& dist_sq, int h) {
    std::vector<int> order(dist_sq.size());
    std::iota(order.begin(), order.end(), 0);
    std::nth_element(order.begin(), order.begin() + (h - 1), order.end(),
                     [&](int a, int b) {
                         return dist_sq[a] != dist_sq[b] ? dist_sq[a] < dist_sq[b] : a < b;
                     });
    std::vector<int> subset(order.begin(), order.begin() + h);
    std::sort(subset.begin(), subset.end());
    return subset;
}

}  // namespace

std::pair<std::vector<int>, std::vector<double>> cstep_refine(const SampleSet& samples,
                                                              std::vector<int> start,
                                                              double gamma, int max_iter) {
    const int h = subset_size(samples.n(), gamma);
    std::vector<double> dets;
    std::vector<int> subset = std::move(start);
    for (int iter = 0; iter < max_iter; ++iter) {
        auto [t, c] = trimmed_moments(samples, subset);
        if (is_degenerate(c)) {
            throw DegenerateSubset("cstep_refine: rank-deficient covariance in chain");
        }
        subset = select_h_closest(mahalanobis_sq(t, c, samples), h);
        auto [t2, c2] = trimmed_moments(samples, subset);
        if (is_degenerate(c2)) {
            throw DegenerateSubset("cstep_refine: concentrated subset is degenerate");
        }
        const double det = safe_det(c2);
        if (!dets.empty() &&
            std::abs(dets.back() - det) <= 1e-12 * std::max(det, 1e-300)) {
            dets.push_back(det);
            break;
        }
        dets.push_back(det);
    }
    return {std::move(subset), std::move(dets)};
}

McdFit mcd_cstep(const SampleSet& samples, double gamma, int restarts, std::uint64_t seed,
                 int max_iter) {
    const int n = samples.n();
    const int k = samples.k();
    const int h = subset_size(n, gamma);
    if (h < k + 1) throw Error("mcd_cstep: subset size below k+1");
    if (restarts < 1) throw Error("mcd_cstep: need at least one restart");

    std::vector<int> best;
    double best_det = std::numeric_limits<double>::infinity();
    int degenerate_restarts = 0;

    for (int restart = 0; restart < restarts; ++restart) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(restart));
        std::vector<int> subset;
        bool chain_ok = false;
        // a restart draws fresh seed subsets until one admits a full chain
        for (int attempt = 0; attempt < 100 && !chain_ok; ++attempt) {
            try {
                auto [refined, dets] = cstep_refine(samples, rng.sample_indices(n, k + 1),
                                                    gamma, max_iter);
                subset = std::move(refined);
                chain_ok = true;
            } catch (const DegenerateSubset&) {
            }
        }
        if (!chain_ok) {
            ++degenerate_restarts;
            continue;
        }
        auto [t, c] = trimmed_moments(samples, subset);
        const double det = safe_det(c);
        const double scale = 1e-15 * std::max(std::abs(det), 1.0);
        if (best.empty() || det < best_det - scale ||
            (std::abs(det - best_det) <= scale && subset < best)) {
            best_det = det;
            best = subset;
        }
    }

    if (best.empty()) {
        throw DegenerateSample("mcd_cstep: all " + std::to_string(degenerate_restarts) +
                               " restarts collapsed onto degenerate subsets");
    }
    return finalize_fit(samples, best, gamma, false);
}

bool separation_check(const McdFit& fit, const SampleSet& samples) {
    const Vector d = mahalanobis_sq(fit.T, fit.C, samples);
    const double r2 = fit.r_hat * fit.r_hat;
    const double tol = 1e-9 * std::max(r2, 1.0);
    std::vector<char> in_subset(samples.n(), 0);
    for (int idx : fit.subset) in_subset[idx] = 1;
    for (int i = 0; i < samples.n(); ++i) {
        if (in_subset[i] && d[i] > r2 + tol) return false;
        if (!in_subset[i] && d[i] < r2 - tol) return false;
    }
    return true;
}

}  // namespace mcd
