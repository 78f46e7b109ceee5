#include "mcd/density.hpp"

#include <cmath>

#include "mcd/errors.hpp"

namespace mcd {

DensityModel gaussian_density(int k) {
    DensityModel m;
    m.k = k;
    m.name = "gaussian";
    const double log_norm = -0.5 * k * std::log(2.0 * M_PI);
    m.pdf = [log_norm](const Vector& x) { return std::exp(log_norm - 0.5 * x.squaredNorm()); };
    m.sampler = [k](Rng& rng) {
        Vector x(k);
        for (int i = 0; i < k; ++i) x[i] = rng.normal();
        return x;
    };
    return m;
}

DensityModel student_t_density(int k, double nu) {
    if (!(nu > 0.0)) throw UnknownModel("student_t: degrees of freedom must be positive");
    DensityModel m;
    m.k = k;
    m.name = "student_t(" + std::to_string(nu) + ")";
    const double log_norm = std::lgamma(0.5 * (nu + k)) - std::lgamma(0.5 * nu) -
                            0.5 * k * std::log(nu * M_PI);
    m.pdf = [log_norm, nu, k](const Vector& x) {
        return std::exp(log_norm - 0.5 * (nu + k) * std::log1p(x.squaredNorm() / nu));
    };
    m.sampler = [k, nu](Rng& rng) {
        Vector x(k);
        for (int i = 0; i < k; ++i) x[i] = rng.normal();
        const double u = rng.chi_square(nu);
        return Vector(x * std::sqrt(nu / u));
    };
    return m;
}

DensityModel uniform_ball_density(int k, double radius) {
    if (!(radius > 0.0)) throw UnknownModel("uniform_ball: radius must be positive");
    DensityModel m;
    m.k = k;
    m.name = "uniform_ball";
    m.support = "ball of radius " + std::to_string(radius);
    const double volume =
        std::pow(M_PI, 0.5 * k) * std::pow(radius, k) / std::tgamma(0.5 * k + 1.0);
    const double value = 1.0 / volume;
    const double r2 = radius * radius;
    m.pdf = [value, r2](const Vector& x) { return x.squaredNorm() <= r2 ? value : 0.0; };
    m.sampler = [k, radius](Rng& rng) {
        Vector x(k);
        for (int i = 0; i < k; ++i) x[i] = rng.normal();
        x.normalize();
        const double r = radius * std::pow(rng.uniform(), 1.0 / k);
        return Vector(r * x);
    };
    return m;
}

namespace {

struct Marginal {
    std::function<double(double)> pdf;
    std::function<double(Rng&)> sample;
};

Marginal make_marginal(const std::string& name) {
    if (name == "gaussian") {
        return {[](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); },
                [](Rng& rng) { return rng.normal(); }};
    }
    if (name == "laplace") {
        return {[](double x) { return 0.5 * std::exp(-std::abs(x)); },
                [](Rng& rng) {
                    const double u = rng.uniform() - 0.5;
                    return -std::copysign(std::log1p(-2.0 * std::abs(u)), u);
                }};
    }
    if (name == "uniform") {
        return {[](double x) { return std::abs(x) <= 1.0 ? 0.5 : 0.0; },
                [](Rng& rng) { return 2.0 * rng.uniform() - 1.0; }};
    }
    throw UnknownModel("product_symmetric: unknown marginal '" + name + "'");
}

}  // namespace

DensityModel product_symmetric_density(const std::vector<std::string>& marginals) {
    if (marginals.empty()) throw UnknownModel("product_symmetric: no marginals given");
    std::vector<Marginal> parts;
    parts.reserve(marginals.size());
    std::string name = "product_symmetric(";
    for (std::size_t i = 0; i < marginals.size(); ++i) {
        parts.push_back(make_marginal(marginals[i]));
        name += (i ? "," : "") + marginals[i];
    }
    name += ")";
    DensityModel m;
    m.k = static_cast<int>(marginals.size());
    m.name = name;
    m.pdf = [parts](const Vector& x) {
        double p = 1.0;
        for (std::size_t i = 0; i < parts.size(); ++i) p *= parts[i].pdf(x[i]);
        return p;
    };
    m.sampler = [parts](Rng& rng) {
        Vector x(parts.size());
        for (std::size_t i = 0; i < parts.size(); ++i) x[i] = parts[i].sample(rng);
        return x;
    };
    return m;
}

DensityModel kde_density(const Matrix& x, const Vector& bandwidth) {
    const int k = static_cast<int>(x.cols());
    if (bandwidth.size() != k) throw ShapeError("kde_density: bandwidth dimension mismatch");
    if ((bandwidth.array() <= 0.0).any()) {
        throw BadBandwidth("kde_density: bandwidths must be positive");
    }
    DensityModel m;
    m.k = k;
    m.name = "kde";
    const double norm =
        1.0 / (x.rows() * std::pow(2.0 * M_PI, 0.5 * k) * bandwidth.prod());
    m.pdf = [x, bandwidth, norm](const Vector& y) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            const double q =
                ((y - x.row(i).transpose()).array() / bandwidth.array()).square().sum();
            acc += std::exp(-0.5 * q);
        }
        return norm * acc;
    };
    return m;
}

Vector kde_default_bandwidth(const Matrix& x) {
    const int k = static_cast<int>(x.cols());
    const double n = static_cast<double>(x.rows());
    if (n < 2) throw BadBandwidth("kde_default_bandwidth: need at least two observations");
    Vector bw(k);
    for (int j = 0; j < k; ++j) {
        const double mean = x.col(j).mean();
        const double sd = std::sqrt((x.col(j).array() - mean).square().sum() / (n - 1.0));
        bw[j] = sd * std::pow(n, -1.0 / (k + 4.0));
    }
    return bw;
}

DensityModel make_density(const std::string& spec, int k) {
    const auto open = spec.find('(');
    std::string head = spec.substr(0, open);
    std::string args;
    if (open != std::string::npos) {
        const auto close = spec.rfind(')');
        if (close == std::string::npos || close < open) {
            throw UnknownModel("make_density: malformed spec '" + spec + "'");
        }
        args = spec.substr(open + 1, close - open - 1);
    }
    if (head == "gaussian") return gaussian_density(k);
    if (head == "student_t") {
        if (args.empty()) throw UnknownModel("student_t requires degrees of freedom");
        return student_t_density(k, std::stod(args));
    }
    if (head == "uniform_ball") {
        return args.empty() ? uniform_ball_density(k) : uniform_ball_density(k, std::stod(args));
    }
    if (head == "product_symmetric") {
        std::vector<std::string> names;
        std::size_t pos = 0;
        while (pos <= args.size() && !args.empty()) {
            const auto comma = args.find(',', pos);
            names.push_back(args.substr(pos, comma == std::string::npos ? comma : comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        auto model = product_symmetric_density(names);
        if (model.k != k) {
            throw ShapeError("product_symmetric: got " + std::to_string(model.k) +
                             " marginals for dimension " + std::to_string(k));
        }
        return model;
    }
    throw UnknownModel("make_density: unknown model '" + spec + "'");
}

}  // namespace mcd
