#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mcd/linalg.hpp"

namespace mcd {

/// Observations as rows of an n x k matrix. All entries must be finite.
struct SampleSet {
    Matrix X;

    SampleSet() = default;
    explicit SampleSet(Matrix data);
    static SampleSet from_csv(const std::string& path, bool skip_header = false);

    int n() const { return static_cast<int>(X.rows()); }
    int k() const { return static_cast<int>(X.cols()); }
    Vector row(int i) const { return X.row(i).transpose(); }
};

/// Result of an MCD search: the h-subset, its trimmed moments, the shape
/// square root, and the empirical coverage radius.
struct McdFit {
    std::vector<int> subset;  // sorted indices, |subset| = ceil(n*gamma)
    Vector T;
    Matrix C;
    PDSMatrix G;  // G*G = C
    double r_hat = 0.0;
    double det_C = 0.0;
    double gamma = 0.0;
    bool exact = false;

    ThetaParams theta() const { return ThetaParams(T, G, r_hat); }
};

/// Subset size h = ceil(n * gamma); throws BadFraction unless 0 < gamma <= 1.
int subset_size(int n, double gamma);

/// Trimmed mean and covariance of the given subset (covariance divisor is
/// the subset size). No rank requirement is imposed here.
std::pair<Vector, Matrix> trimmed_moments(const SampleSet& samples,
                                          const std::vector<int>& subset);

/// Squared Mahalanobis distances of every row with respect to (T, C).
Vector mahalanobis_sq(const Vector& T, const Matrix& C, const SampleSet& samples);

/// Smallest s such that at least ceil(n*gamma) points satisfy
/// (x-T)'C^{-1}(x-T) <= s^2, i.e. the h-th smallest Mahalanobis distance.
double coverage_radius(const Vector& T, const Matrix& C, const SampleSet& samples,
                       double gamma);

/// Global minimizer of det(C(S)) over all subsets of size exactly h, by
/// enumeration. Guarded by C(n,h) <= 10^6 (throws TooLarge). Degenerate
/// subsets are skipped unless every subset is degenerate (DegenerateSample).
/// Ties are broken by the lexicographically smallest index set.
McdFit mcd_exact(const SampleSet& samples, double gamma);

/// One concentration chain from a starting subset: repeatedly fit (T, C)
/// and keep the h points closest in Mahalanobis distance, until det(C)
/// stalls (relative change < 1e-12) or max_iter. Returns the final
/// h-subset and the det(C) sequence, which is non-increasing. Throws
/// DegenerateSubset if the chain hits a rank-deficient covariance.
std::pair<std::vector<int>, std::vector<double>> cstep_refine(
    const SampleSet& samples, std::vector<int> start, double gamma, int max_iter = 100);

/// Concentration-step heuristic: random (k+1)-point seeds, iterate
/// "fit, then keep the h closest" until det(C) stalls; best fit over
/// all restarts. Deterministic for a fixed seed.
McdFit mcd_cstep(const SampleSet& samples, double gamma, int restarts,
                 std::uint64_t seed, int max_iter = 100);

/// True iff every selected point lies within r_hat and the subset attains
/// the h smallest Mahalanobis distances (ties at the boundary allowed).
bool separation_check(const McdFit& fit, const SampleSet& samples);

}  // namespace mcd
