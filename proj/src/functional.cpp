#include "mcd/functional.hpp"

#include <cmath>
#include <limits>

namespace mcd {

Vector PsiValue::to_coords() const {
    return tangent_to_coords(
        TangentVector(v1, SymMatrix(v2), v3));
}

Vector LambdaValue::to_coords() const {
    return tangent_to_coords(TangentVector(l1, SymMatrix(l2), l3));
}

PsiValue psi(const Vector& y, const ThetaParams& theta, double gamma) {
    const int k = theta.dim();
    if (y.size() != k) throw ShapeError("psi: dimension mismatch");
    Eigen::LDLT<Matrix> ldlt(theta.G.mat());
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
        throw DegenerateMatrix("psi: singular shape matrix");
    }
    const Vector z = ldlt.solve(y - theta.m);
    PsiValue out;
    if (z.norm() <= theta.r) {
        out.v1 = z;
        out.v2 = z * z.transpose() - Matrix::Identity(k, k);
        out.v3 = 1.0 - gamma;
    } else {
        out.v1 = Vector::Zero(k);
        out.v2 = Matrix::Zero(k, k);
        out.v3 = -gamma;
    }
    return out;
}

namespace {

std::vector<double> radial_nodes_on(double r, int n, std::vector<double>& weights) {
    std::vector<double> gx, gw;
    gauss_legendre(n, gx, gw);
    std::vector<double> nodes(n);
    weights.resize(n);
    for (int i = 0; i < n; ++i) {
        nodes[i] = 0.5 * r * (gx[i] + 1.0);
        weights[i] = 0.5 * r * gw[i];
    }
    return nodes;
}

// One pass of the volume quadrature over the ellipsoid in transformed
// coordinates z = G^{-1}(y - m):
//   L1 = int_{|z|<=r} z  detG f(Gz+m) dz,  L2 likewise with zz'-I,
//   L3 = P(E) - gamma.
LambdaValue lambda_pass(const ThetaParams& theta, const DensityModel& model, double gamma,
                        int radial_nodes, int sphere_resolution) {
    const int k = theta.dim();
    const SphereRule sphere = SphereRule::make(k, 1.0, sphere_resolution);
    std::vector<double> rw;
    const std::vector<double> rs = radial_nodes_on(theta.r, radial_nodes, rw);

    const Matrix& g = theta.G.mat();
    const double det_g = g.determinant();
    const std::size_t n_sphere = sphere.size();
    const std::size_t total = n_sphere * rs.size();

    struct Term {
        Vector l1;
        Matrix l2;
        double l3;
        Term operator+(const Term& o) const { return {l1 + o.l1, l2 + o.l2, l3 + o.l3}; }
    };

    Term sum = pairwise_reduce<Term>(0, total, [&](std::size_t idx) {
        const std::size_t si = idx % n_sphere;
        const std::size_t ri = idx / n_sphere;
        const double s = rs[ri];
        const Vector u = sphere.nodes.row(static_cast<Eigen::Index>(si)).transpose();
        const Vector z = s * u;
        const double f = model.pdf(g * z + theta.m);
        const double w = det_g * rw[ri] * std::pow(s, k - 1) *
                         sphere.weights[static_cast<Eigen::Index>(si)] * f;
        Term t;
        t.l1 = w * z;
        t.l2 = w * (z * z.transpose() - Matrix::Identity(k, k));
        t.l3 = w;
        return t;
    });

    LambdaValue out;
    out.l1 = std::move(sum.l1);
    out.l2 = symmetrize(sum.l2);
    out.l3 = sum.l3 - gamma;
    return out;
}

}  // namespace

LambdaValue lambda(const ThetaParams& theta, const DensityModel& model, double gamma,
                   const QuadSpec& spec) {
    if (model.k != theta.dim()) throw ShapeError("lambda: dimension mismatch");
    const int base_sphere = spec.sphere_resolution;
    LambdaValue coarse = lambda_pass(theta, model, gamma, spec.radial_nodes, base_sphere);
    // refinement step doubles the radial rule and the sphere resolution
    const int fine_sphere = base_sphere > 0 ? 2 * base_sphere : (theta.dim() == 2 ? 512 : 48);
    LambdaValue fine = lambda_pass(theta, model, gamma, 2 * spec.radial_nodes, fine_sphere);
    double err = (fine.l1 - coarse.l1).cwiseAbs().maxCoeff();
    err = std::max(err, (fine.l2 - coarse.l2).cwiseAbs().maxCoeff());
    err = std::max(err, std::abs(fine.l3 - coarse.l3));
    fine.error_estimate = err;
    if (err > spec.tol) {
        throw QuadratureError("lambda: error estimate " + std::to_string(err) +
                              " above tolerance");
    }
    return fine;
}

TangentVector LambdaPrimeMap::apply(const TangentVector& t) const {
    return coords_to_tangent(mat * tangent_to_coords(t), k);
}

namespace {

void check_rule(const ThetaParams& theta0, const SphereRule& rule) {
    if (rule.k != theta0.dim()) {
        throw ShapeError("sphere rule dimension does not match theta");
    }
    if (std::abs(rule.radius - theta0.r) > 1e-9 * std::max(theta0.r, 1.0)) {
        throw ShapeError("sphere rule radius does not match the coverage radius");
    }
}

/// nu-weights at the rule nodes: w_i det(G) f(G w_i + m).
Vector nu_weights(const ThetaParams& theta0, const DensityModel& model,
                  const SphereRule& rule) {
    const Matrix& g = theta0.G.mat();
    const double det_g = g.determinant();
    Vector nu(rule.weights.size());
    for (Eigen::Index i = 0; i < nu.size(); ++i) {
        const Vector w = rule.nodes.row(i).transpose();
        nu[i] = rule.weights[i] * det_g * model.pdf(g * w + theta0.m);
    }
    return nu;
}

}  // namespace

LambdaPrimeMap lambda_prime_analytic(const ThetaParams& theta0, const DensityModel& model,
                                     double gamma, const SphereRule& rule) {
    check_rule(theta0, rule);
    const int k = theta0.dim();
    const int d = tangent_dim(k);
    const double rho0 = theta0.r;
    const Matrix g_inv = theta0.G.mat().inverse();
    const Vector nu = nu_weights(theta0, model, rule);
    const std::size_t n = rule.size();

    LambdaPrimeMap out;
    out.k = k;
    out.mat.resize(d, d);

    for (int j = 0; j < d; ++j) {
        Vector basis = Vector::Zero(d);
        basis[j] = 1.0;
        const TangentVector t = coords_to_tangent(basis, k);
        const Vector gh = g_inv * t.h;
        const Matrix sym_a = g_inv * t.A.mat() + t.A.mat() * g_inv;

        struct Term {
            Vector l1;
            Matrix l2;
            double l3;
            Term operator+(const Term& o) const { return {l1 + o.l1, l2 + o.l2, l3 + o.l3}; }
        };
        Term sum = pairwise_reduce<Term>(0, n, [&](std::size_t i) {
            const Vector w = rule.nodes.row(static_cast<Eigen::Index>(i)).transpose();
            const double common = w.dot(gh) / rho0 + w.dot(sym_a * w) / (2.0 * rho0) + t.s;
            const double nw = nu[static_cast<Eigen::Index>(i)] * common;
            Term term;
            term.l1 = nw * w;
            term.l2 = nw * (w * w.transpose() - Matrix::Identity(k, k));
            term.l3 = nw;
            return term;
        });

        const Vector l1 = -gamma * gh + sum.l1;
        const Matrix l2 = symmetrize(-gamma * sym_a + sum.l2);
        out.mat.col(j) = tangent_to_coords(TangentVector(l1, SymMatrix(l2), sum.l3));
    }
    return out;
}

LambdaPrimeMap lambda_prime_fd(const ThetaParams& theta0, const DensityModel& model,
                               double gamma, double step, const QuadSpec& spec) {
    if (!(step > 0.0)) throw Error("lambda_prime_fd: step must be positive");
    const int k = theta0.dim();
    const int d = tangent_dim(k);
    LambdaPrimeMap out;
    out.k = k;
    out.mat.resize(d, d);
    for (int j = 0; j < d; ++j) {
        Vector basis = Vector::Zero(d);
        basis[j] = 1.0;
        const TangentVector t = coords_to_tangent(basis, k);
        const auto shifted = [&](double eps) {
            return ThetaParams(theta0.m + eps * t.h,
                               PDSMatrix(theta0.G.mat() + eps * t.A.mat()),
                               theta0.r + eps * t.s);
        };
        const LambdaValue plus = lambda(shifted(step), model, gamma, spec);
        const LambdaValue minus = lambda(shifted(-step), model, gamma, spec);
        out.mat.col(j) = (plus.to_coords() - minus.to_coords()) / (2.0 * step);
    }
    return out;
}

NonsingularityReport nonsingularity_report(const DensityModel& model,
                                           const ThetaParams& theta0, double gamma,
                                           const SphereRule& rule, double equality_tol) {
    check_rule(theta0, rule);
    const int k = theta0.dim();
    const double rho0 = theta0.r;
    const Vector nu = nu_weights(theta0, model, rule);
    const std::size_t n = rule.size();

    NonsingularityReport rep;
    rep.nu0 = pairwise_reduce<double>(0, n, [&](std::size_t i) {
        return nu[static_cast<Eigen::Index>(i)];
    });
    rep.gamma_rho0 = gamma * rho0;

    rep.omega_sq = Vector::Zero(k);
    rep.omega_sq_pairs = Matrix::Zero(k, k);
    for (int a = 0; a < k; ++a) {
        rep.omega_sq[a] = pairwise_reduce<double>(0, n, [&](std::size_t i) {
            const auto row = rule.nodes.row(static_cast<Eigen::Index>(i));
            return nu[static_cast<Eigen::Index>(i)] * row[a] * row[a];
        });
        for (int b = a; b < k; ++b) {
            rep.omega_sq_pairs(a, b) = pairwise_reduce<double>(0, n, [&](std::size_t i) {
                const auto row = rule.nodes.row(static_cast<Eigen::Index>(i));
                return nu[static_cast<Eigen::Index>(i)] * row[a] * row[a] * row[b] * row[b];
            });
            rep.omega_sq_pairs(b, a) = rep.omega_sq_pairs(a, b);
        }
    }

    rep.M = Matrix::Zero(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
            rep.M(a, b) = rep.omega_sq_pairs(a, b) -
                          rep.omega_sq[a] * rep.omega_sq[b] / rep.nu0 -
                          (a == b ? 2.0 * rep.gamma_rho0 : 0.0);

    rep.cond_h_margins = (rep.omega_sq.array() - rep.gamma_rho0).abs();
    rep.cond_h_ok = (rep.cond_h_margins.array() > equality_tol).all();

    rep.cond_a_margins = Matrix::Zero(k, k);
    rep.cond_a_ok = true;
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
            if (a == b) continue;
            rep.cond_a_margins(a, b) = std::abs(rep.omega_sq_pairs(a, b) - rep.gamma_rho0);
            if (rep.cond_a_margins(a, b) <= equality_tol) rep.cond_a_ok = false;
        }
    if (k == 1) rep.cond_a_ok = true;

    // property of M on the zero-sum hyperplane: Mx = 0 and 1'x = 0 imply x = 0
    if (k >= 2) {
        Matrix ones = Matrix::Ones(k, 1);
        Eigen::HouseholderQR<Matrix> qr(ones);
        const Matrix q = qr.householderQ();
        const Matrix basis = q.rightCols(k - 1);  // orthonormal basis of 1-perp
        Eigen::JacobiSVD<Matrix> svd(rep.M * basis);
        rep.m_restricted_min_sv = svd.singularValues().minCoeff();
    } else {
        rep.m_restricted_min_sv = std::numeric_limits<double>::infinity();
    }
    rep.m_ok = rep.m_restricted_min_sv > equality_tol;

    // least-squares fit of M = c1 I + c2 11' (exact for elliptical nu)
    if (k >= 2) {
        double diag_mean = rep.M.diagonal().mean();
        double off_mean = (rep.M.sum() - rep.M.trace()) / (k * (k - 1.0));
        rep.fitted_c2 = off_mean;
        rep.fitted_c1 = diag_mean - off_mean;
    } else {
        rep.fitted_c1 = rep.M(0, 0);
        rep.fitted_c2 = 0.0;
    }
    rep.decomposition_residual =
        (rep.M - rep.fitted_c1 * Matrix::Identity(k, k) -
         rep.fitted_c2 * Matrix::Ones(k, k))
            .norm();
    return rep;
}

LambdaPrimeMap invert_map(const LambdaPrimeMap& map) {
    Eigen::JacobiSVD<Matrix> svd(map.mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues().maxCoeff();
    const double smin = svd.singularValues().minCoeff();
    const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(cond < 1e12)) {
        throw SingularDerivative("invert_map: condition number " + std::to_string(cond), cond);
    }
    LambdaPrimeMap out;
    out.k = map.k;
    out.mat = svd.solve(Matrix::Identity(map.mat.rows(), map.mat.cols()));
    return out;
}

Bandwidth Bandwidth::fixed(double v) {
    if (!(v > 0.0)) throw BadBandwidth("bandwidth must be positive");
    Bandwidth b;
    b.value = v;
    return b;
}

LambdaPrimeMap plug_in_lambda_prime(const SampleSet& samples, const McdFit& fit,
                                    const Bandwidth& bandwidth, const SphereRule& rule,
                                    const DensityModel* density_override) {
    const int k = samples.k();
    const ThetaParams theta_hat = fit.theta();
    const SphereRule boundary = rule.rescaled(fit.r_hat);
    if (density_override) {
        return lambda_prime_analytic(theta_hat, *density_override, fit.gamma, boundary);
    }
    Vector bw;
    if (bandwidth.value) {
        bw = Vector::Constant(k, *bandwidth.value);
    } else {
        bw = kde_default_bandwidth(samples.X);
    }
    const DensityModel kde = kde_density(samples.X, bw);
    return lambda_prime_analytic(theta_hat, kde, fit.gamma, boundary);
}

Matrix sandwich_covariance(const SampleSet& samples, const McdFit& fit,
                           const LambdaPrimeMap& map) {
    const LambdaPrimeMap inv = invert_map(map);
    const ThetaParams theta_hat = fit.theta();
    const int n = samples.n();
    const int d = tangent_dim(samples.k());
    Matrix z(n, d);
    for (int i = 0; i < n; ++i) {
        z.row(i) = (inv.mat * psi(samples.row(i), theta_hat, fit.gamma).to_coords()).transpose();
    }
    const Vector mean = z.colwise().mean();
    Matrix centered = z.rowwise() - mean.transpose();
    return Matrix(centered.transpose() * centered / (n - 1.0));
}

}  // namespace mcd
