#include "mcd/elliptical.hpp"

#include <algorithm>
#include <cmath>

#include "mcd/quadrature.hpp"

namespace mcd {

RadialDensity radial_gaussian(int k) {
    RadialDensity m;
    m.k = k;
    m.name = "gaussian";
    const double norm = std::pow(2.0 * M_PI, -0.5 * k);
    m.h = [norm](double t) { return norm * std::exp(-0.5 * t); };
    m.spherical_sampler = [k](Rng& rng) {
        Vector x(k);
        for (int i = 0; i < k; ++i) x[i] = rng.normal();
        return x;
    };
    return m;
}

RadialDensity radial_student_t(int k, double nu) {
    if (!(nu > 0.0)) throw UnknownModel("student_t: degrees of freedom must be positive");
    RadialDensity m;
    m.k = k;
    m.name = "student_t(" + std::to_string(nu) + ")";
    const double log_norm = std::lgamma(0.5 * (nu + k)) - std::lgamma(0.5 * nu) -
                            0.5 * k * std::log(nu * M_PI);
    m.h = [log_norm, nu, k](double t) {
        return std::exp(log_norm - 0.5 * (nu + k) * std::log1p(t / nu));
    };
    m.spherical_sampler = [k, nu](Rng& rng) {
        Vector x(k);
        for (int i = 0; i < k; ++i) x[i] = rng.normal();
        const double u = rng.chi_square(nu);
        return Vector(x * std::sqrt(nu / u));
    };
    return m;
}

RadialDensity radial_uniform_ball(int k, double radius) {
    if (!(radius > 0.0)) throw UnknownModel("uniform_ball: radius must be positive");
    RadialDensity m;
    m.k = k;
    m.name = "uniform_ball";
    m.support_radius = radius;
    const double value =
        std::tgamma(0.5 * k + 1.0) / (std::pow(M_PI, 0.5 * k) * std::pow(radius, k));
    const double r2 = radius * radius;
    m.h = [value, r2](double t) { return t <= r2 ? value : 0.0; };
    m.spherical_sampler = [k, radius](Rng& rng) {
        Vector x(k);
        for (int i = 0; i < k; ++i) x[i] = rng.normal();
        x.normalize();
        return Vector(radius * std::pow(rng.uniform(), 1.0 / k) * x);
    };
    return m;
}

RadialDensity make_radial(const std::string& spec, int k) {
    const auto open = spec.find('(');
    const std::string head = spec.substr(0, open);
    std::string args;
    if (open != std::string::npos) {
        const auto close = spec.rfind(')');
        if (close == std::string::npos || close < open) {
            throw UnknownModel("make_radial: malformed spec '" + spec + "'");
        }
        args = spec.substr(open + 1, close - open - 1);
    }
    if (head == "gaussian") return radial_gaussian(k);
    if (head == "student_t") {
        if (args.empty()) throw UnknownModel("student_t requires degrees of freedom");
        return radial_student_t(k, std::stod(args));
    }
    if (head == "uniform_ball") {
        return args.empty() ? radial_uniform_ball(k) : radial_uniform_ball(k, std::stod(args));
    }
    throw UnknownModel("make_radial: unknown model '" + spec + "'");
}

DensityModel to_density(const RadialDensity& model) {
    DensityModel d;
    d.k = model.k;
    d.name = model.name;
    if (std::isfinite(model.support_radius)) {
        d.support = "ball of radius " + std::to_string(model.support_radius);
    }
    auto h = model.h;
    d.pdf = [h](const Vector& x) { return h(x.squaredNorm()); };
    if (model.has_sampler()) d.sampler = model.spherical_sampler;
    return d;
}

DensityModel to_density(const RadialDensity& model, const Vector& mu, const PDSMatrix& sigma) {
    if (sigma.dim() != model.k || mu.size() != model.k) {
        throw ShapeError("to_density: dimension mismatch");
    }
    DensityModel d;
    d.k = model.k;
    d.name = model.name;
    const Matrix gamma = pds_sqrt(sigma).mat();
    const Matrix gamma_inv = gamma.inverse();
    const double det_factor = 1.0 / std::sqrt(sigma.mat().determinant());
    auto h = model.h;
    d.pdf = [h, mu, gamma_inv, det_factor](const Vector& x) {
        return det_factor * h((gamma_inv * (x - mu)).squaredNorm());
    };
    if (model.has_sampler()) {
        auto base = model.spherical_sampler;
        d.sampler = [base, mu, gamma](Rng& rng) { return Vector(mu + gamma * base(rng)); };
    }
    return d;
}

namespace {

/// 2 pi^{k/2} / Gamma(k/2), the area of the unit sphere in R^k.
double unit_sphere_area(int k) {
    return 2.0 * std::pow(M_PI, 0.5 * k) / std::tgamma(0.5 * k);
}

/// (2 pi^{k/2} / Gamma(k/2)) * int_0^r h(s^2) s^{k-1+p} ds
double radial_integral(const RadialDensity& model, double r, int p, double tol = 1e-13) {
    const double upper = std::min(r, model.support_radius);
    if (upper <= 0.0) return 0.0;
    auto h = model.h;
    const int k = model.k;
    const double value = integrate(
        [h, k, p](double s) { return h(s * s) * std::pow(s, k - 1 + p); }, 0.0, upper, tol);
    return unit_sphere_area(k) * value;
}

}  // namespace

double truncated_radial_moment(const RadialDensity& model, double r, int p) {
    if (p != 0 && p != 2 && p != 4) throw Error("truncated_radial_moment: p must be 0, 2 or 4");
    return radial_integral(model, r, p);
}

double r_gamma(const RadialDensity& model, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw BadFraction("r_gamma: gamma must lie in (0, 1)");
    auto mass = [&](double r) { return radial_integral(model, r, 0); };

    double hi = 1.0;
    int doublings = 0;
    while (mass(hi) < gamma) {
        hi *= 2.0;
        if (++doublings > 60) throw BracketError("r_gamma: mass never reaches gamma");
    }
    double lo = 0.0;
    // bisect into the Newton basin, then polish
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mass(mid) < gamma) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-9 * std::max(hi, 1.0)) break;
    }
    double r = 0.5 * (lo + hi);
    const double area = unit_sphere_area(model.k);
    for (int i = 0; i < 60; ++i) {
        const double f = mass(r) - gamma;
        if (std::abs(f) < 1e-13) break;
        const double fp = area * model.h(r * r) * std::pow(r, model.k - 1);
        if (!(fp > 0.0)) break;
        const double step = f / fp;
        r -= step;
        if (!(r > lo && r < hi)) r = 0.5 * (lo + hi);  // safeguard
        if (std::abs(step) < 1e-15 * r) break;
    }
    if (std::abs(mass(r) - gamma) > 1e-12) {
        throw BracketError("r_gamma: residual above tolerance");
    }
    return r;
}

double alpha_gamma(const RadialDensity& model, double gamma, double r) {
    const int k = model.k;
    const double a2 = radial_integral(model, r, 2) / (gamma * k);
    if (!(a2 > 0.0)) throw QuadratureError("alpha_gamma: non-positive alpha^2");
    return std::sqrt(a2);
}

ThetaParams theta0_elliptical(const Vector& mu, const PDSMatrix& sigma,
                              const RadialDensity& model, double gamma) {
    const double r = r_gamma(model, gamma);
    const double alpha = alpha_gamma(model, gamma, r);
    const Matrix g = alpha * pds_sqrt(sigma).mat();
    return ThetaParams(mu, PDSMatrix(g), r / alpha);
}

double nu_zero(const RadialDensity& model, double gamma) {
    const double r = r_gamma(model, gamma);
    const double alpha = alpha_gamma(model, gamma, r);
    return unit_sphere_area(model.k) * model.h(r * r) * std::pow(r, model.k - 1) * alpha;
}

Betas betas(const RadialDensity& model, double gamma) {
    const int k = model.k;
    const double r = r_gamma(model, gamma);
    const double alpha = alpha_gamma(model, gamma, r);
    const double rho0 = r / alpha;
    const double nu0 =
        unit_sphere_area(k) * model.h(r * r) * std::pow(r, k - 1) * alpha;

    Betas b;
    b.b1 = (rho0 * nu0 / k - gamma) / alpha;
    b.b2 = 2.0 * rho0 * rho0 * rho0 * nu0 / (alpha * k * (k + 2)) - 2.0 * gamma / alpha;
    b.b3 = rho0 * rho0 * rho0 * nu0 / (alpha * k * (k + 2)) - rho0 * nu0 / (k * alpha);
    b.b4 = rho0 * rho0 * nu0 / k - nu0;
    b.b5 = rho0 * nu0 / (k * alpha);
    b.b6 = nu0;
    return b;
}

TangentVector d_map(const TangentVector& t, const EllipticalConstants& c) {
    const int k = t.dim();
    const double tr = t.A.mat().trace();
    Vector g = c.beta1 * t.h;
    Matrix b = c.beta2 * t.A.mat() + (c.beta3 * tr + c.beta4 * t.s) * Matrix::Identity(k, k);
    const double u = c.beta5 * tr + c.beta6 * t.s;
    return TangentVector(std::move(g), SymMatrix(b), u);
}

TangentVector d_inv_map(const TangentVector& t, const EllipticalConstants& c) {
    const int k = t.dim();
    const double tr = t.A.mat().trace();
    Vector h = t.h / c.beta1;
    const double coef_tr =
        c.alpha * (c.beta3 * c.beta6 - c.beta4 * c.beta5) / (2.0 * c.gamma * c.beta2 * c.beta6);
    const double coef_t = c.alpha * c.beta4 / (2.0 * c.gamma * c.beta6);
    Matrix a = t.A.mat() / c.beta2 + (coef_tr * tr + coef_t * t.s) * Matrix::Identity(k, k);
    const double s = c.alpha * c.beta5 / (2.0 * c.gamma * c.beta6) * tr -
                     c.alpha * (c.beta2 + k * c.beta3) / (2.0 * c.gamma * c.beta6) * t.s;
    return TangentVector(std::move(h), SymMatrix(a), s);
}

namespace {

Matrix map_matrix(int k, const std::function<TangentVector(const TangentVector&)>& map) {
    const int d = tangent_dim(k);
    Matrix out(d, d);
    for (int j = 0; j < d; ++j) {
        Vector basis = Vector::Zero(d);
        basis[j] = 1.0;
        out.col(j) = tangent_to_coords(map(coords_to_tangent(basis, k)));
    }
    return out;
}

}  // namespace

Matrix d_map_matrix(const EllipticalConstants& c) {
    return map_matrix(c.k, [&](const TangentVector& t) { return d_map(t, c); });
}

Matrix d_inv_map_matrix(const EllipticalConstants& c) {
    return map_matrix(c.k, [&](const TangentVector& t) { return d_inv_map(t, c); });
}

void expansion_coefficients(EllipticalConstants& c) {
    const double k = c.k;
    const double a = c.alpha;
    const double g = c.gamma;
    const double r = c.r;
    const double r2 = r * r;

    // beta1 and beta2 are strictly negative when h is non-constant below
    // r(gamma); a vanishing coefficient means the derivative is singular
    const double scale = g / a + c.nu0;
    if (std::abs(c.beta1) < 1e-12 * scale || std::abs(c.beta2) < 1e-12 * scale) {
        throw SingularDerivative(
            "expansion_coefficients: beta1 or beta2 vanishes (constant-density boundary)",
            std::numeric_limits<double>::infinity());
    }

    c.pi = -1.0 / (a * c.beta1);
    c.kappa1 = -r2 / (k * g);
    c.kappa2 = (a * c.beta2 + 2.0 * g) / (k * g * a * c.beta2);
    c.kappa3 = -2.0 / (a * c.beta2);
    c.kappa4 = (r2 - k * a * a) / k;
    c.lambda1 = -r / (2.0 * k * g * a * a * a);
    c.lambda2 = r * r2 / (2.0 * k * g * a * a * a) - 1.0 / c.beta6;
    c.lambda3 = g / c.beta6 + r * (k * a * a - r2) / (2.0 * k * a * a * a);

    // beta-route forms from the derivative block inversion; the two routes
    // must agree to 1e-10
    const double b2 = c.beta2, b3 = c.beta3, b4 = c.beta4, b5 = c.beta5, b6 = c.beta6;
    const double kappa1_beta =
        2.0 * a / b2 + k * a * a * (b3 * b6 - b4 * b5) / (g * b2 * b6) - a * a * b4 / (g * b6);
    const double kappa2_beta = (b4 * b5 - b3 * b6) / (g * b2 * b6);
    const double kappa4_beta = a * a * b4 / b6;
    const double lambda1_beta = -b5 / (2.0 * a * g * b6);
    const double lambda2_beta = a * (b2 + k * b3 + k * b5) / (2.0 * g * b6);
    const double lambda3_beta = -a * (b2 + k * b3) / (2.0 * b6);
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-10 * std::max({std::abs(x), std::abs(y), 1.0}); };
    if (!close(c.kappa1, kappa1_beta) || !close(c.kappa2, kappa2_beta) ||
        !close(c.kappa4, kappa4_beta) || !close(c.lambda1, lambda1_beta) ||
        !close(c.lambda2, lambda2_beta) || !close(c.lambda3, lambda3_beta)) {
        throw Error("expansion_coefficients: closed-form and beta-route values disagree");
    }
}

void asymptotic_variances(EllipticalConstants& c) {
    const double k = c.k;
    const double a = c.alpha;
    const double g = c.gamma;
    const double r = c.r;
    const double r2 = r * r;
    const double denom = k * g * a - r * c.nu0;
    if (std::abs(denom) < 1e-14 * std::max(k * g * a, 1.0)) {
        throw SingularDerivative("asymptotic_variances: k gamma alpha equals r nu0 (beta1 = 0)",
                                 std::numeric_limits<double>::infinity());
    }
    c.tau = k * k * g * a * a * a * a / (denom * denom);

    c.sigma1 = c.kappa3 * c.kappa3 * c.m4 / (k * (k + 2.0));

    c.sigma2 = -2.0 / k * c.sigma1 + c.m4 / (k * k * g * g) -
               (g * r2 * r2 - 2.0 * k * g * r2 * a * a + k * k * g * a * a * a * a +
                2.0 * k * r2 * a * a - r2 * r2) /
                   (g * k * k);

    // the same quantity from the variances of the expansion summands
    // l(y) = kappa3 1 y^2 and m(y) = 1 (kappa1 + kappa2 y^2) + kappa4:
    // sigma2 = E l^2 / (k(k+2)) + E m^2 + (2/k) E l m
    const double k1 = c.kappa1, k2 = c.kappa2, k3 = c.kappa3, k4 = c.kappa4;
    const double e_l2 = k3 * k3 * c.m4;
    const double e_m2 = k1 * k1 * g + 2.0 * k1 * k2 * c.m2 + k2 * k2 * c.m4 +
                        2.0 * k4 * (k1 * g + k2 * c.m2) + k4 * k4;
    const double e_lm = k3 * (k1 * c.m2 + k2 * c.m4) + k3 * k4 * c.m2;
    const double sigma2_summand = e_l2 / (k * (k + 2.0)) + e_m2 + 2.0 / k * e_lm;
    if (std::abs(c.sigma2 - sigma2_summand) >
        1e-6 * std::max({std::abs(c.sigma2), std::abs(sigma2_summand), 1.0})) {
        throw Error("asymptotic_variances: sigma2 routes disagree");
    }

    // variance of the summand lambda1 1 ||X||^2 + lambda2 1 + lambda3,
    // which has mean zero
    const double l1 = c.lambda1, l2 = c.lambda2, l3 = c.lambda3;
    c.sigma_rho_sq = l1 * l1 * c.m4 + 2.0 * l1 * (l2 + l3) * c.m2 +
                     l2 * (l2 + 2.0 * l3) * g + l3 * l3;
}

EllipticalConstants compute_constants(const RadialDensity& model, double gamma) {
    EllipticalConstants c;
    c.k = model.k;
    c.gamma = gamma;
    c.r = r_gamma(model, gamma);
    c.alpha = alpha_gamma(model, gamma, c.r);
    c.rho0 = c.r / c.alpha;
    const Betas b = betas(model, gamma);
    c.beta1 = b.b1;
    c.beta2 = b.b2;
    c.beta3 = b.b3;
    c.beta4 = b.b4;
    c.beta5 = b.b5;
    c.beta6 = b.b6;
    c.nu0 = b.b6;
    c.m2 = truncated_radial_moment(model, c.r, 2);
    c.m4 = truncated_radial_moment(model, c.r, 4);
    expansion_coefficients(c);
    asymptotic_variances(c);
    return c;
}

GeneralCovariance general_covariance(const PDSMatrix& sigma, const EllipticalConstants& c) {
    const int k = sigma.dim();
    if (k != c.k) throw ShapeError("general_covariance: dimension mismatch");
    GeneralCovariance out;
    out.location = c.tau * sigma.mat();
    const Matrix eye = Matrix::Identity(k * k, k * k);
    out.scatter_vec = c.sigma1 * (eye + commutation_matrix(k)) * kron(sigma.mat(), sigma.mat()) +
                      c.sigma2 * vec(sigma.mat()) * vec(sigma.mat()).transpose();
    return out;
}

InfluenceValue influence(const Vector& x, const EllipticalConstants& c) {
    const int k = static_cast<int>(x.size());
    if (k != c.k) throw ShapeError("influence: dimension mismatch");
    const double norm = x.norm();
    if (std::abs(norm - c.r) < 1e-12) {
        throw BoundaryUndefined("influence: undefined on the shell ||x|| = r");
    }
    const double ind = norm <= c.r ? 1.0 : 0.0;
    InfluenceValue out;
    out.mu = c.pi * ind * x;
    out.sigma = ind * (c.kappa1 * Matrix::Identity(k, k) +
                       c.kappa2 * norm * norm * Matrix::Identity(k, k) +
                       c.kappa3 * x * x.transpose()) +
                c.kappa4 * Matrix::Identity(k, k);
    out.rho = c.lambda1 * ind * norm * norm + c.lambda2 * ind + c.lambda3;
    return out;
}

}  // namespace mcd
