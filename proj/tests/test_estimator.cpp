#include <doctest.h>

#include <numeric>
#include <random>

#include "mcd/estimator.hpp"
#include "mcd/rng.hpp"

using namespace mcd;

namespace {

SampleSet gaussian_cloud(int n, int k, std::uint64_t seed) {
    Rng rng(seed);
    Matrix x(n, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) x(i, j) = rng.normal();
    return SampleSet(std::move(x));
}

// test-side enumeration oracle, independent of mcd_exact
struct BruteResult {
    std::vector<int> subset;
    double det;
};

BruteResult brute_force_mcd(const SampleSet& samples, int h) {
    const int n = samples.n();
    std::vector<int> idx(h);
    std::iota(idx.begin(), idx.end(), 0);
    BruteResult best{{}, std::numeric_limits<double>::infinity()};
    for (;;) {
        auto [t, c] = trimmed_moments(samples, idx);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(c, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() > 1e-10 * std::max(eig.eigenvalues().maxCoeff(), 1e-300)) {
            const double det = c.determinant();
            if (det < best.det) best = {idx, det};
        }
        int j = h - 1;
        while (j >= 0 && idx[j] == n - h + j) --j;
        if (j < 0) break;
        ++idx[j];
        for (int m = j + 1; m < h; ++m) idx[m] = idx[m - 1] + 1;
    }
    return best;
}

}  // namespace

TEST_SUITE("estimator") {

TEST_CASE("trimmed moments by direct arithmetic") {
    Matrix x(3, 2);
    x << 0.0, 0.0, 2.0, 0.0, 10.0, 10.0;
    const SampleSet samples(x);

    auto [t, c] = trimmed_moments(samples, {0, 1});
    CHECK(t[0] == doctest::Approx(1.0));
    CHECK(t[1] == doctest::Approx(0.0));
    CHECK(c(0, 0) == doctest::Approx(1.0));
    CHECK(c(1, 1) == doctest::Approx(0.0));
    CHECK(c(0, 1) == doctest::Approx(0.0));
    // rank-deficient covariance rejected once a PDS matrix is demanded
    CHECK_THROWS_AS(PDSMatrix{c}, DegenerateMatrix);
}

TEST_CASE("whole-sample subset gives the ordinary biased moments") {
    const SampleSet samples = gaussian_cloud(40, 2, 99);
    std::vector<int> all(40);
    std::iota(all.begin(), all.end(), 0);
    auto [t, c] = trimmed_moments(samples, all);

    const Vector mean = samples.X.colwise().mean();
    Matrix centered = samples.X.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / 40.0;
    CHECK((t - mean).norm() < 1e-14);
    CHECK((c - cov).norm() < 1e-13 * cov.norm());
}

TEST_CASE("trimmed moments match the two-pass oracle on random subsets") {
    const SampleSet samples = gaussian_cloud(30, 3, 123);
    std::mt19937 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<int> subset;
        for (int i = 0; i < 30; ++i)
            if (rng() % 2) subset.push_back(i);
        if (subset.size() < 2) continue;

        Vector t = Vector::Zero(3);
        for (int i : subset) t += samples.row(i);
        t /= static_cast<double>(subset.size());
        Matrix c = Matrix::Zero(3, 3);
        for (int i : subset) c += (samples.row(i) - t) * (samples.row(i) - t).transpose();
        c /= static_cast<double>(subset.size());

        auto [t2, c2] = trimmed_moments(samples, subset);
        CHECK((t - t2).norm() < 1e-13);
        CHECK((c - c2).norm() < 1e-13 * std::max(c.norm(), 1.0));
    }
}

TEST_CASE("coverage radius is the h-th order statistic") {
    Matrix x(4, 1);
    x << -1.0, 0.0, 2.0, 5.0;
    const SampleSet samples(x);
    const Vector t = Vector::Zero(1);
    const Matrix c = Matrix::Identity(1, 1);

    CHECK(coverage_radius(t, c, samples, 0.5) == doctest::Approx(1.0));
    CHECK(coverage_radius(t, c, samples, 1.0) == doctest::Approx(5.0));

    const SampleSet cloud = gaussian_cloud(50, 2, 17);
    auto [tm, cm] = trimmed_moments(cloud, [] {
        std::vector<int> v(50);
        std::iota(v.begin(), v.end(), 0);
        return v;
    }());
    Vector d = mahalanobis_sq(tm, cm, cloud);
    std::sort(d.data(), d.data() + d.size());
    for (double gamma : {0.3, 0.62, 0.8}) {
        const int h = subset_size(50, gamma);
        CHECK(coverage_radius(tm, cm, cloud, gamma) ==
              doctest::Approx(std::sqrt(d[h - 1])).epsilon(1e-12));
    }
    CHECK_THROWS_AS(coverage_radius(tm, Matrix::Zero(2, 2), cloud, 0.5), DegenerateMatrix);
}

TEST_CASE("exact search on the four-point line") {
    Matrix x(4, 1);
    x << 0.0, 1.0, 2.0, 10.0;
    const SampleSet samples(x);
    const McdFit fit = mcd_exact(samples, 0.75);

    CHECK(fit.subset == std::vector<int>{0, 1, 2});
    CHECK(fit.T[0] == doctest::Approx(1.0));
    CHECK(fit.C(0, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(fit.exact);
    CHECK(separation_check(fit, samples));

    // enumeration oracle over all four subsets of size 3
    const BruteResult oracle = brute_force_mcd(samples, 3);
    CHECK(oracle.subset == fit.subset);
    CHECK(oracle.det == doctest::Approx(fit.det_C));
}

TEST_CASE("exact search with h = n returns the whole sample") {
    const SampleSet samples = gaussian_cloud(8, 2, 4);
    const McdFit fit = mcd_exact(samples, 1.0);
    CHECK(static_cast<int>(fit.subset.size()) == 8);
    const Vector mean = samples.X.colwise().mean();
    CHECK((fit.T - mean).norm() < 1e-13);
}

TEST_CASE("exact search drops a far outlier") {
    Rng rng(2024);
    Matrix x(8, 2);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 2; ++j) x(i, j) = rng.normal();
    x.row(7) << 50.0, -40.0;
    const SampleSet samples(x);

    const McdFit fit = mcd_exact(samples, 7.0 / 8.0);
    CHECK(std::find(fit.subset.begin(), fit.subset.end(), 7) == fit.subset.end());
    const BruteResult oracle = brute_force_mcd(samples, 7);
    CHECK(oracle.subset == fit.subset);
}

TEST_CASE("enumeration guard and degenerate samples") {
    CHECK_THROWS_AS(mcd_exact(gaussian_cloud(40, 2, 1), 0.5), TooLarge);

    Matrix line(6, 2);
    for (int i = 0; i < 6; ++i) line.row(i) << static_cast<double>(i), 2.0 * i;
    CHECK_THROWS_AS(mcd_exact(SampleSet(line), 0.5), DegenerateSample);
}

TEST_CASE("cstep never beats exact and usually matches it") {
    int matches = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const SampleSet samples = gaussian_cloud(20, 2, 1000 + trial);
        const McdFit exact = mcd_exact(samples, 0.75);
        const McdFit heur = mcd_cstep(samples, 0.75, 50, 77 + trial);
        CHECK(heur.det_C >= exact.det_C - 1e-12);
        if (heur.subset == exact.subset) ++matches;
    }
    CHECK(matches >= 18);  // >= 90 percent
}

TEST_CASE("cstep determinism and monotone chains") {
    const SampleSet samples = gaussian_cloud(60, 2, 31);
    const McdFit a = mcd_cstep(samples, 0.75, 10, 5);
    const McdFit b = mcd_cstep(samples, 0.75, 10, 5);
    CHECK(a.subset == b.subset);
    CHECK(a.det_C == b.det_C);
    CHECK((a.T - b.T).norm() == 0.0);

    Rng rng(8);
    for (int trial = 0; trial < 5; ++trial) {
        auto [subset, dets] = cstep_refine(samples, rng.sample_indices(60, 3), 0.75);
        for (std::size_t i = 1; i < dets.size(); ++i) {
            CHECK(dets[i] <= dets[i - 1] + 1e-9 * std::abs(dets[i - 1]));
        }
        CHECK(separation_check(
            [&] {
                auto [t, c] = trimmed_moments(samples, subset);
                McdFit fit;
                fit.subset = subset;
                fit.T = t;
                fit.C = c;
                fit.G = pds_sqrt(PDSMatrix(c));
                fit.r_hat = coverage_radius(t, c, samples, 0.75);
                fit.gamma = 0.75;
                return fit;
            }(),
            samples));
    }
}

TEST_CASE("cstep flags a sample dominated by a repeated point") {
    // seven copies of the origin plus three collinear remote points: every
    // concentration chain collapses onto a rank-deficient subset
    Matrix x(10, 2);
    for (int i = 0; i < 7; ++i) x.row(i) << 0.0, 0.0;
    x.row(7) << 10.0, 10.0;
    x.row(8) << 11.0, 11.0;
    x.row(9) << 12.0, 12.0;
    CHECK_THROWS_AS(mcd_cstep(SampleSet(x), 0.7, 20, 3), DegenerateSample);
}

TEST_CASE("separation check rejects a swapped pair and allows boundary ties") {
    const SampleSet samples = gaussian_cloud(16, 2, 55);
    McdFit fit = mcd_exact(samples, 0.75);
    CHECK(separation_check(fit, samples));

    // swap one interior point for an exterior one
    std::vector<char> inside(16, 0);
    for (int i : fit.subset) inside[i] = 1;
    int outside = -1;
    for (int i = 0; i < 16; ++i)
        if (!inside[i]) outside = i;
    McdFit broken = fit;
    broken.subset[0] = outside;
    std::sort(broken.subset.begin(), broken.subset.end());
    CHECK_FALSE(separation_check(broken, samples));

    // boundary tie: two points at the same distance, one in and one out
    Matrix tie(4, 1);
    tie << -1.0, 1.0, 1.0, 5.0;
    const SampleSet tied(tie);
    McdFit tie_fit;
    tie_fit.subset = {0, 1};
    tie_fit.T = Vector::Zero(1);
    tie_fit.C = Matrix::Identity(1, 1);
    tie_fit.G = PDSMatrix::identity(1);
    tie_fit.r_hat = 1.0;
    tie_fit.gamma = 0.5;
    CHECK(separation_check(tie_fit, tied));
}

TEST_CASE("affine equivariance of the exact search") {
    std::mt19937 mt(77);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 5; ++trial) {
        const SampleSet samples = gaussian_cloud(12, 2, 300 + trial);
        Matrix b(2, 2);
        do {
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) b(i, j) = normal(mt);
        } while (std::abs(b.determinant()) < 0.3);
        Vector shift(2);
        shift << normal(mt), normal(mt);

        Matrix mapped = (samples.X * b.transpose()).rowwise() + shift.transpose();
        const McdFit base = mcd_exact(samples, 0.75);
        const McdFit image = mcd_exact(SampleSet(mapped), 0.75);

        CHECK(image.subset == base.subset);
        CHECK((image.T - (b * base.T + shift)).norm() < 1e-9);
        CHECK((image.C - b * base.C * b.transpose()).norm() < 1e-9 * image.C.norm());
    }
}

}  // TEST_SUITE
