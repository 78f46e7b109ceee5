#pragma once

#include <functional>
#include <limits>
#include <string>

#include "mcd/density.hpp"
#include "mcd/linalg.hpp"

namespace mcd {

/// Radial generator of a spherical density f(x) = h(||x||^2); h is
/// non-increasing so the density is unimodal. support_radius bounds the
/// support (finite only for the uniform ball).
struct RadialDensity {
    int k = 0;
    std::string name;
    std::function<double(double)> h;  // h(t), t = ||x||^2
    std::function<Vector(Rng&)> spherical_sampler;  // may be empty
    double support_radius = std::numeric_limits<double>::infinity();

    bool has_sampler() const { return static_cast<bool>(spherical_sampler); }
};

RadialDensity radial_gaussian(int k);
RadialDensity radial_student_t(int k, double nu);
RadialDensity radial_uniform_ball(int k, double radius = 1.0);

/// Parse "gaussian", "student_t(5)", "uniform_ball", "uniform_ball(2)".
RadialDensity make_radial(const std::string& spec, int k);

/// Spherical density model f(x) = h(||x||^2).
DensityModel to_density(const RadialDensity& model);

/// Elliptical density f(x) = det(Sigma)^{-1/2} h((x-mu)'Sigma^{-1}(x-mu)).
DensityModel to_density(const RadialDensity& model, const Vector& mu, const PDSMatrix& sigma);

/// Everything the closed-form theory produces for one (model, gamma).
struct EllipticalConstants {
    int k = 0;
    double gamma = 0.0;
    double r = 0.0;       // r(gamma)
    double alpha = 0.0;   // alpha(gamma)
    double rho0 = 0.0;    // r / alpha
    double nu0 = 0.0;     // boundary mass nu(dB_0)
    double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0, beta4 = 0.0, beta5 = 0.0, beta6 = 0.0;
    double pi = 0.0;
    double kappa1 = 0.0, kappa2 = 0.0, kappa3 = 0.0, kappa4 = 0.0;
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double tau = 0.0;
    double sigma1 = 0.0, sigma2 = 0.0, sigma_rho_sq = 0.0;
    double m2 = 0.0, m4 = 0.0;  // truncated moments E 1 ||X||^p, p = 2, 4
};

struct Betas {
    double b1, b2, b3, b4, b5, b6;
};

/// Root of the radial mass equation: the radius enclosing probability gamma.
double r_gamma(const RadialDensity& model, double gamma);

/// Scatter scaling alpha(gamma), given r = r_gamma(model, gamma).
double alpha_gamma(const RadialDensity& model, double gamma, double r);

/// Truncated radial moment E 1{||X|| <= r} ||X||^p for p in {0, 2, 4}.
double truncated_radial_moment(const RadialDensity& model, double r, int p);

/// MCD functional at the elliptical model: (mu, alpha * Sigma^{1/2}, r/alpha).
ThetaParams theta0_elliptical(const Vector& mu, const PDSMatrix& sigma,
                              const RadialDensity& model, double gamma);

/// Boundary mass nu_0 = (2 pi^{k/2} / Gamma(k/2)) h(r^2) r^{k-1} alpha.
double nu_zero(const RadialDensity& model, double gamma);

/// The six derivative coefficients of the spherical block form.
Betas betas(const RadialDensity& model, double gamma);

/// Block-form derivative map D and its inverse, acting on tangent vectors.
TangentVector d_map(const TangentVector& t, const EllipticalConstants& c);
TangentVector d_inv_map(const TangentVector& t, const EllipticalConstants& c);

/// Matrix representations in canonical tangent coordinates.
Matrix d_map_matrix(const EllipticalConstants& c);
Matrix d_inv_map_matrix(const EllipticalConstants& c);

/// Fill pi, kappa1..4, lambda1..3 from the betas; asserts the closed-form
/// and beta-route expressions agree to 1e-10.
void expansion_coefficients(EllipticalConstants& c);

/// Fill tau, sigma1, sigma2, sigma_rho_sq from the truncated moments.
/// sigma2 uses the closed form (which matches the summand variance);
/// sigma_rho_sq uses the summand variance of the rho expansion terms.
void asymptotic_variances(EllipticalConstants& c);

/// All constants for one (model, gamma).
EllipticalConstants compute_constants(const RadialDensity& model, double gamma);

/// Limiting covariances at a general scatter: (tau * Sigma,
/// sigma1 (I + C_{k,k})(Sigma x Sigma) + sigma2 vec(Sigma) vec(Sigma)').
struct GeneralCovariance {
    Matrix location;
    Matrix scatter_vec;
};
GeneralCovariance general_covariance(const PDSMatrix& sigma, const EllipticalConstants& c);

/// Influence function of (mu, Sigma, rho) at the spherical model; undefined
/// on the shell ||x|| = r (throws BoundaryUndefined within 1e-12 of it).
struct InfluenceValue {
    Vector mu;
    Matrix sigma;
    double rho;
};
InfluenceValue influence(const Vector& x, const EllipticalConstants& c);

}  // namespace mcd
