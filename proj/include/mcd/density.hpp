#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mcd/linalg.hpp"
#include "mcd/rng.hpp"

namespace mcd {

/// A density on R^k: an evaluator, an optional sampler, a name, and a
/// human-readable support description.
struct DensityModel {
    int k = 0;
    std::string name;
    std::string support = "R^k";
    std::function<double(const Vector&)> pdf;
    std::function<Vector(Rng&)> sampler;  // may be empty

    bool has_sampler() const { return static_cast<bool>(sampler); }
};

/// Standard normal on R^k.
DensityModel gaussian_density(int k);

/// Spherical multivariate Student-t with nu degrees of freedom.
DensityModel student_t_density(int k, double nu);

/// Uniform density on the ball of the given radius.
DensityModel uniform_ball_density(int k, double radius = 1.0);

/// Product of named symmetric 1-d marginals; names from
/// {gaussian, laplace, uniform}.
DensityModel product_symmetric_density(const std::vector<std::string>& marginals);

/// Gaussian product-kernel density estimate over the rows of x with
/// per-coordinate bandwidths. Throws BadBandwidth on non-positive entries.
DensityModel kde_density(const Matrix& x, const Vector& bandwidth);

/// Per-coordinate rule-of-thumb bandwidth: sd_j * n^{-1/(k+4)}.
Vector kde_default_bandwidth(const Matrix& x);

/// Parse a registry spec such as "gaussian", "student_t(5)",
/// "uniform_ball", or "product_symmetric(gaussian,laplace)".
/// Throws UnknownModel for anything else.
DensityModel make_density(const std::string& spec, int k);

}  // namespace mcd
