#include <doctest.h>

#include <cmath>

#include "clk/domain.hpp"
#include "clk/errors.hpp"
#include "clk/mollify.hpp"

using namespace clk;

namespace {

// independent 1-d convolution oracle: trapezoid on a fine grid against the
// Gaussian density (different route from the Gauss-Hermite implementation)
double convolve_trapezoid(const Profile& p, double sigma, double t, int which) {
    const int N = 40000;
    const double L = 10.0 * sigma;
    double sum = 0.0;
    for (int i = 0; i <= N; ++i) {
        double s = -L + 2.0 * L * i / N;
        double g = std::exp(-s * s / (2.0 * sigma * sigma)) / (sigma * std::sqrt(2.0 * M_PI));
        double v = which == 0 ? p.f(t - s) : p.d1(t - s);
        double w = (i == 0 || i == N) ? 0.5 : 1.0;
        sum += w * g * v;
    }
    return sum * (2.0 * L / N);
}

}  // namespace

TEST_CASE("Gauss-Hermite rule integrates moments") {
    GaussHermite gh = gauss_hermite(32);
    double m0 = 0.0, m2 = 0.0, m4 = 0.0;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        m0 += gh.weights[i];
        m2 += gh.weights[i] * gh.nodes[i] * gh.nodes[i];
        m4 += gh.weights[i] * std::pow(gh.nodes[i], 4);
    }
    CHECK(m0 == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(m2 == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(0.75 * std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("mollified profile matches the trapezoid convolution oracle") {
    PowerProfile p(1.9);
    double sigma = 0.05;
    for (double t : {0.0, 0.01, 0.2, -0.3}) {
        MollifiedProfile1D m = mollify_profile(p, sigma, t);
        CHECK(m.f == doctest::Approx(convolve_trapezoid(p, sigma, t, 0)).epsilon(1e-8));
        CHECK(m.d1 == doctest::Approx(convolve_trapezoid(p, sigma, t, 1)).epsilon(1e-8));
    }
}

TEST_CASE("mollified second derivative at the kink stays below the nearby values") {
    // |x|^{1.9}: the second derivative blows up at 0; the mollified value at 0
    // must not exceed the a.e. values just outside the smoothing window core
    PowerProfile p(1.9);
    for (double sigma : {0.1, 0.02, 0.004}) {
        MollifiedProfile1D m = mollify_profile(p, sigma, 0.0);
        double nearby = p.d2(sigma / 5.0);
        CHECK(m.d2 > 0.0);
        CHECK(m.d2 <= nearby);
    }
}

TEST_CASE("mollification preserves a true C^{1,1} essential bound") {
    // f = t|t| has |f''| = 2 a.e.; the mollified second derivative respects it
    OddQuadraticProfile p(1.0);
    for (double t : {0.0, 0.001, 0.05, -0.2})
        CHECK(std::abs(mollify_profile(p, 0.01, t).d2) <= 2.0 + 1e-9);
}

TEST_CASE("C0 error halves (at least) when k doubles") {
    DomainSpec spec;
    spec.kind = DomainSpec::Kind::Power;
    spec.n = 1;
    spec.exponents = {1.9, 1.9};
    auto dom = make_domain(spec);
    auto r = dom->r();
    std::vector<double> errs;
    for (int k : {8, 16, 32}) {
        auto rk = mollify(r, k);
        double worst = 0.0;
        for (int i = -20; i <= 20; ++i) {
            CPoint z{{0.05 * i, 0.013 * i}};
            worst = std::max(worst, std::abs(rk->value(z) - r->value(z)));
        }
        errs.push_back(worst);
    }
    CHECK(errs[1] <= 0.5 * errs[0]);
    CHECK(errs[2] <= 0.5 * errs[1]);
}

TEST_CASE("smooth input mollifies at second order in 1/k") {
    DomainSpec spec;
    spec.kind = DomainSpec::Kind::Ball;
    spec.n = 2;
    spec.radius = 1.0;
    auto dom = make_domain(spec);
    auto r = dom->r();
    CPoint z{{0.4, 0.2}, {-0.3, 0.5}};
    double e1 = std::abs(mollify(r, 10)->value(z) - r->value(z));
    double e2 = std::abs(mollify(r, 20)->value(z) - r->value(z));
    CHECK(e2 <= 0.3 * e1);  // ~1/k^2
    CHECK(mollify(r, 10)->smoothness() == Smoothness::Smooth);
}

TEST_CASE("mollified gradient converges in C^1") {
    DomainSpec spec;
    spec.kind = DomainSpec::Kind::Power;
    spec.n = 1;
    spec.exponents = {1.5, 2.0};
    auto dom = make_domain(spec);
    auto r = dom->r();
    CPoint z{{0.3, -0.2}};
    double e1 = std::abs(mollify(r, 16)->gradient(z)[0] - r->gradient(z)[0]);
    double e2 = std::abs(mollify(r, 64)->gradient(z)[0] - r->gradient(z)[0]);
    CHECK(e2 < e1);
    CHECK(e2 < 1e-3);
}

TEST_CASE("mollify rejects non-separable C11 input") {
    auto bad = numeric_defining_function(
        1, [](const CPoint& z) { return std::abs(z.x(0)) * z.y(0) + z.y(0) - 0.5; }, 1e-5, Smoothness::C11);
    CHECK_THROWS_AS(mollify(bad, 8), UnsupportedModeError);
}
