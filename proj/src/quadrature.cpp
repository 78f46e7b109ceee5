#include "mcd/quadrature.hpp"

#include <cmath>
#include <stack>

#include "mcd/errors.hpp"

namespace mcd {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Chebyshev initial guess, then Newton on P_n.
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

namespace {

struct Gl21 {
    std::vector<double> x, w;
    Gl21() { gauss_legendre(21, x, w); }
};

double gl21(const std::function<double(double)>& f, double a, double b) {
    static const Gl21 rule;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double terms[21];
    for (int i = 0; i < 21; ++i) terms[i] = rule.w[i] * f(mid + half * rule.x[i]);
    return half * pairwise_reduce<double>(0, 21, [&](std::size_t i) { return terms[i]; });
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    struct Segment {
        double a, b, whole;
        int depth;
    };
    std::stack<Segment> todo;
    todo.push({a, b, gl21(f, a, b), 0});
    double total = 0.0;
    double residual = 0.0;  // error carried by segments accepted at max depth
    std::size_t segments = 0;
    while (!todo.empty()) {
        const Segment seg = todo.top();
        todo.pop();
        if (++segments > 20000) {
            throw QuadratureError("integrate: subdivision limit exceeded");
        }
        const double mid = 0.5 * (seg.a + seg.b);
        const double left = gl21(f, seg.a, mid);
        const double right = gl21(f, mid, seg.b);
        const double err = std::abs(left + right - seg.whole);
        const double local_tol = tol * std::abs(seg.b - seg.a) / std::abs(b - a);
        if (err < std::max(local_tol, 1e-300) || seg.depth >= 48) {
            // at max depth the remaining error is bounded by the last
            // two-level difference; account for it instead of refining
            if (seg.depth >= 48) residual += err;
            total += left + right;
        } else {
            todo.push({seg.a, mid, left, seg.depth + 1});
            todo.push({mid, seg.b, right, seg.depth + 1});
        }
    }
    if (residual > 10.0 * tol) {
        throw QuadratureError("integrate: residual error above tolerance");
    }
    return total;
}

double sphere_area(int k, double radius) {
    return 2.0 * std::pow(M_PI, 0.5 * k) * std::pow(radius, k - 1) / std::tgamma(0.5 * k);
}

SphereRule SphereRule::make(int k, double radius, int resolution) {
    if (k < 1) throw ShapeError("SphereRule: dimension must be >= 1");
    if (!(radius > 0.0)) throw Error("SphereRule: radius must be positive");
    SphereRule rule;
    rule.k = k;
    rule.radius = radius;

    if (k == 1) {
        rule.nodes = Matrix(2, 1);
        rule.nodes << -radius, radius;
        rule.weights = Vector::Ones(2);
        return rule;
    }
    if (k == 2) {
        const int n = resolution > 0 ? resolution : 256;
        rule.nodes = Matrix(n, 2);
        rule.weights = Vector::Constant(n, 2.0 * M_PI * radius / n);
        for (int i = 0; i < n; ++i) {
            const double phi = 2.0 * M_PI * i / n;
            rule.nodes(i, 0) = radius * std::cos(phi);
            rule.nodes(i, 1) = radius * std::sin(phi);
        }
        return rule;
    }

    // Product rule: Gauss-Legendre in each of the k-2 polar angles on
    // [0, pi] (Jacobian sin^{k-1-j}), trapezoid in the azimuth.
    const int n_polar = resolution > 0 ? resolution : 32;
    const int n_phi = resolution > 0 ? 2 * resolution : 64;
    std::vector<double> gx, gw;
    gauss_legendre(n_polar, gx, gw);
    std::vector<double> theta(n_polar), theta_w(n_polar);
    for (int i = 0; i < n_polar; ++i) {
        theta[i] = 0.5 * M_PI * (gx[i] + 1.0);
        theta_w[i] = 0.5 * M_PI * gw[i];
    }

    const int n_angles = k - 2;
    std::size_t total = static_cast<std::size_t>(n_phi);
    for (int j = 0; j < n_angles; ++j) total *= static_cast<std::size_t>(n_polar);

    rule.nodes = Matrix(static_cast<Eigen::Index>(total), k);
    rule.weights = Vector(static_cast<Eigen::Index>(total));

    std::vector<int> idx(n_angles, 0);
    Eigen::Index row = 0;
    for (;;) {
        double w_polar = 1.0;
        std::vector<double> sines(n_angles), cosines(n_angles);
        for (int j = 0; j < n_angles; ++j) {
            const double t = theta[idx[j]];
            sines[j] = std::sin(t);
            cosines[j] = std::cos(t);
            w_polar *= theta_w[idx[j]] * std::pow(sines[j], k - 1 - (j + 1));
        }
        for (int p = 0; p < n_phi; ++p) {
            const double phi = 2.0 * M_PI * p / n_phi;
            double prod = 1.0;
            for (int j = 0; j < n_angles; ++j) {
                rule.nodes(row, j) = radius * prod * cosines[j];
                prod *= sines[j];
            }
            rule.nodes(row, k - 2) = radius * prod * std::cos(phi);
            rule.nodes(row, k - 1) = radius * prod * std::sin(phi);
            rule.weights[row] = std::pow(radius, k - 1) * w_polar * (2.0 * M_PI / n_phi);
            ++row;
        }
        int j = n_angles - 1;
        while (j >= 0 && ++idx[j] == n_polar) idx[j--] = 0;
        if (j < 0) break;
    }
    return rule;
}

SphereRule SphereRule::rescaled(double new_radius) const {
    if (!(new_radius > 0.0)) throw Error("SphereRule: radius must be positive");
    SphereRule out = *this;
    const double scale = new_radius / radius;
    out.radius = new_radius;
    out.nodes *= scale;
    out.weights *= std::pow(scale, k - 1);
    return out;
}

}  // namespace mcd
