#include <doctest.h>

#include <cmath>

#include "mcd/quadrature.hpp"

using namespace mcd;

TEST_SUITE("quadrature") {

TEST_CASE("gauss-legendre and the adaptive integrator") {
    std::vector<double> x, w;
    gauss_legendre(5, x, w);
    double wsum = 0.0;
    for (double v : w) wsum += v;
    CHECK(wsum == doctest::Approx(2.0).epsilon(1e-15));

    // 5-point rule is exact through degree 9
    double moment = 0.0;
    for (int i = 0; i < 5; ++i) moment += w[i] * std::pow(x[i], 8);
    CHECK(moment == doctest::Approx(2.0 / 9.0).epsilon(1e-14));

    const double val = integrate([](double t) { return std::exp(-t * t); }, 0.0, 3.0, 1e-13);
    CHECK(val == doctest::Approx(0.5 * std::sqrt(M_PI) * std::erf(3.0)).epsilon(1e-12));

    CHECK(integrate([](double t) { return t < 0.3 ? 1.0 : 0.0; }, 0.0, 1.0, 1e-10) ==
          doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("sphere areas") {
    CHECK(sphere_area(2, 1.5) == doctest::Approx(2.0 * M_PI * 1.5).epsilon(1e-14));
    CHECK(sphere_area(3, 2.0) == doctest::Approx(4.0 * M_PI * 4.0).epsilon(1e-14));
    CHECK(sphere_area(1, 3.0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("sphere rules integrate low-degree polynomials exactly") {
    for (int k : {1, 2, 3, 4}) {
        for (double radius : {1.0, 2.125}) {
            const SphereRule rule = SphereRule::make(k, radius);
            const double area = sphere_area(k, radius);
            const double r2 = radius * radius;

            double wsum = 0.0;
            for (Eigen::Index i = 0; i < rule.weights.size(); ++i) wsum += rule.weights[i];
            CHECK(std::abs(wsum - area) < 1e-12 * area);

            for (int a = 0; a < k; ++a) {
                double m1 = 0.0, m2 = 0.0, m4 = 0.0, m3 = 0.0;
                for (Eigen::Index i = 0; i < rule.weights.size(); ++i) {
                    const double wa = rule.nodes(i, a);
                    m1 += rule.weights[i] * wa;
                    m2 += rule.weights[i] * wa * wa;
                    m3 += rule.weights[i] * wa * wa * wa;
                    m4 += rule.weights[i] * wa * wa * wa * wa;
                }
                CHECK(std::abs(m1) < 1e-12 * area);
                CHECK(std::abs(m3) < 1e-12 * area * r2);
                CHECK(std::abs(m2 - area * r2 / k) < 1e-12 * area * r2);
                const double quartic = 3.0 * area * r2 * r2 / (k * (k + 2.0));
                CHECK(std::abs(m4 - quartic) < 1e-12 * area * r2 * r2);
            }
            if (k >= 2) {
                double m22 = 0.0;
                for (Eigen::Index i = 0; i < rule.weights.size(); ++i) {
                    m22 += rule.weights[i] * rule.nodes(i, 0) * rule.nodes(i, 0) *
                           rule.nodes(i, 1) * rule.nodes(i, 1);
                }
                const double expected = area * r2 * r2 / (k * (k + 2.0));
                CHECK(std::abs(m22 - expected) < 1e-12 * area * r2 * r2);
            }
        }
    }
}

TEST_CASE("rescaling a sphere rule") {
    const SphereRule rule = SphereRule::make(3, 1.0);
    const SphereRule big = rule.rescaled(2.5);
    CHECK(big.radius == doctest::Approx(2.5));
    double wsum = 0.0;
    for (Eigen::Index i = 0; i < big.weights.size(); ++i) wsum += big.weights[i];
    CHECK(wsum == doctest::Approx(sphere_area(3, 2.5)).epsilon(1e-12));
    CHECK(big.nodes.row(0).norm() == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("pairwise reduction matches plain summation") {
    std::vector<double> values(1000);
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::sin(0.1 * i);
    double plain = 0.0;
    for (double v : values) plain += v;
    const double pairwise =
        pairwise_reduce<double>(0, values.size(), [&](std::size_t i) { return values[i]; });
    CHECK(pairwise == doctest::Approx(plain).epsilon(1e-13));
}

}  // TEST_SUITE
