#pragma once

#include <optional>
#include <vector>

#include "mcd/density.hpp"
#include "mcd/estimator.hpp"
#include "mcd/linalg.hpp"
#include "mcd/quadrature.hpp"

namespace mcd {

/// Value of the estimating-equation integrand Psi = (Psi_1, Psi_2, Psi_3).
struct PsiValue {
    Vector v1;
    Matrix v2;  // symmetric
    double v3 = 0.0;

    /// Flatten to canonical tangent coordinates.
    Vector to_coords() const;
};

/// Psi(y, theta): indicator 1{||G^{-1}(y-m)|| <= r} (boundary inclusive),
/// Psi_1 = 1 * G^{-1}(y-m), Psi_2 = 1 * (G^{-1}(y-m)(y-m)'G^{-1} - I),
/// Psi_3 = 1 - gamma.
PsiValue psi(const Vector& y, const ThetaParams& theta, double gamma);

/// Quadrature budget for volume integrals of Psi over the ellipsoid.
struct QuadSpec {
    int radial_nodes = 48;
    int sphere_resolution = 0;  // 0 = SphereRule default
    double tol = 1e-8;
};

/// Lambda(theta) = integral of Psi(., theta) dP, with an error estimate
/// from one refinement step. Throws QuadratureError if the estimate
/// exceeds spec.tol.
struct LambdaValue {
    Vector l1;
    Matrix l2;
    double l3 = 0.0;
    double error_estimate = 0.0;

    Vector to_coords() const;
};
LambdaValue lambda(const ThetaParams& theta, const DensityModel& model, double gamma,
                   const QuadSpec& spec = {});

/// Linear map on the tangent space, stored as a d(k) x d(k) matrix in
/// canonical tangent coordinates.
struct LambdaPrimeMap {
    int k = 0;
    Matrix mat;

    TangentVector apply(const TangentVector& t) const;
};

/// Analytic derivative of Lambda at theta0 as boundary-sphere quadrature
/// against nu(dw) = det(G) f(G w + m) sigma_0(dw). The rule must live on
/// the sphere of radius theta0.r in dimension k (ShapeError otherwise).
LambdaPrimeMap lambda_prime_analytic(const ThetaParams& theta0, const DensityModel& model,
                                     double gamma, const SphereRule& rule);

/// Central-difference derivative of lambda along each tangent coordinate.
LambdaPrimeMap lambda_prime_fd(const ThetaParams& theta0, const DensityModel& model,
                               double gamma, double step, const QuadSpec& spec = {});

/// Boundary moments of nu and the non-singularity diagnostics of the
/// derivative map: the per-coordinate margins of the two scalar
/// conditions, the matrix M with its restriction to the zero-sum
/// hyperplane, and the residual of the elliptical decomposition
/// M = c1 I + c2 11'.
struct NonsingularityReport {
    double nu0 = 0.0;
    double gamma_rho0 = 0.0;
    Vector omega_sq;        // integrals of w_i^2
    Matrix omega_sq_pairs;  // integrals of w_i^2 w_j^2
    Matrix M;
    Vector cond_h_margins;   // |omega_sq[i] - gamma rho0|
    Matrix cond_a_margins;   // |omega_sq_pairs(i,j) - gamma rho0|, i != j
    double m_restricted_min_sv = 0.0;  // smallest singular value of M on 1-perp
    bool cond_h_ok = false;
    bool cond_a_ok = false;
    bool m_ok = false;
    double fitted_c1 = 0.0;
    double fitted_c2 = 0.0;
    double decomposition_residual = 0.0;

    bool all_ok() const { return cond_h_ok && cond_a_ok && m_ok; }
};
NonsingularityReport nonsingularity_report(const DensityModel& model,
                                           const ThetaParams& theta0, double gamma,
                                           const SphereRule& rule,
                                           double equality_tol = 1e-8);

/// Matrix inverse of the map; throws SingularDerivative (carrying the
/// condition estimate) when the condition number exceeds 1e12.
LambdaPrimeMap invert_map(const LambdaPrimeMap& map);

/// Bandwidth specification for the plug-in density estimate.
struct Bandwidth {
    static Bandwidth automatic() { return {}; }
    static Bandwidth fixed(double value);
    std::optional<double> value;  // empty = per-coordinate rule of thumb
};

/// Plug-in estimate of the derivative map: theta0 -> theta_hat from the
/// fit, the boundary sphere rescaled to r_hat, and f replaced by a Gaussian
/// product-kernel density estimate (or by density_override when given).
LambdaPrimeMap plug_in_lambda_prime(const SampleSet& samples, const McdFit& fit,
                                    const Bandwidth& bandwidth, const SphereRule& rule,
                                    const DensityModel* density_override = nullptr);

/// Sample covariance of Z_i = map^{-1} Psi(X_i, theta_hat) in tangent
/// coordinates; estimates the limiting covariance of sqrt(n)(theta_hat - theta0).
Matrix sandwich_covariance(const SampleSet& samples, const McdFit& fit,
                           const LambdaPrimeMap& map);

}  // namespace mcd
