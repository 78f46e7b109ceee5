#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mcd/linalg.hpp"

namespace mcd {

/// Deterministic pairwise tree reduction of term(lo), ..., term(hi-1).
/// The summation order depends only on [lo, hi), never on evaluation
/// order, and the tree keeps rounding error at O(log n).
template <class T, class F>
T pairwise_reduce(std::size_t lo, std::size_t hi, F&& term) {
    if (hi - lo == 1) return term(lo);
    const std::size_t mid = lo + (hi - lo) / 2;
    T left = pairwise_reduce<T>(lo, mid, term);
    T right = pairwise_reduce<T>(mid, hi, term);
    return left + right;
}

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Adaptive Gauss-Legendre integration of f on [a, b] to absolute
/// tolerance tol; throws QuadratureError if the subdivision limit is hit.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// Area of the sphere of given radius in R^k: 2 pi^{k/2} rho^{k-1} / Gamma(k/2).
double sphere_area(int k, double radius);

/// Quadrature rule on the sphere of a given radius in R^k. Weights sum to
/// the surface area. k = 1 is the two-point counting measure {-r, +r};
/// k = 2 is the N-node trapezoid rule on the circle; k >= 3 is a product of
/// Gauss-Legendre rules in the polar angles and a trapezoid rule in azimuth.
struct SphereRule {
    int k = 0;
    double radius = 0.0;
    Matrix nodes;    // one node per row
    Vector weights;  // matching weights

    /// resolution <= 0 selects the default (256 azimuth nodes for k = 2;
    /// 32 polar x 64 azimuth for k >= 3).
    static SphereRule make(int k, double radius, int resolution = 0);

    /// Same angular layout scaled to a different radius.
    SphereRule rescaled(double new_radius) const;

    std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

}  // namespace mcd
