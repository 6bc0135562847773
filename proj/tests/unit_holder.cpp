#include <doctest.h>

#include <cmath>

#include "clk/errors.hpp"
#include "clk/holder.hpp"

using namespace clk;

namespace {

PairSampler interval_sampler(std::size_t count = 100000, std::uint64_t seed = 19) {
    PairSampler s;
    s.dim = 1;
    s.lower = {0.0};
    s.upper = {1.0};
    s.count = count;
    s.seed = seed;
    return s;
}

SampledFunction lift(double (*f)(double)) {
    return [f](const std::vector<double>& x) { return CVector{Complex(f(x[0]))}; };
}

}  // namespace

TEST_CASE("sqrt calibration reaches the true seminorm") {
    // |sqrt(x) - sqrt(y)| / |x - y|^{1/2} has supremum 1 (attained as y -> 0)
    auto est = holder_seminorm(lift(+[](double x) { return std::sqrt(x); }), 0.5, interval_sampler());
    CHECK(est.seminorm >= 0.9);
    CHECK(est.seminorm <= 1.0 + 1e-9);
    CHECK(est.pair_count == 100000);
}

TEST_CASE("identity calibration reaches the true seminorm") {
    // |x - y| / |x - y|^{1/2} maximized at the full-interval pair: value 1
    auto est = holder_seminorm(lift(+[](double x) { return x; }), 0.5, interval_sampler());
    CHECK(est.seminorm >= 0.9);
    CHECK(est.seminorm <= 1.0 + 1e-9);
}

TEST_CASE("constants have zero seminorm") {
    auto est = holder_seminorm(lift(+[](double) { return 3.25; }), 0.5, interval_sampler(2000));
    CHECK(est.seminorm == 0.0);
}

TEST_CASE("estimator is monotone in the pair set") {
    auto f = lift(+[](double x) { return std::sqrt(x); });
    PairSampler small = interval_sampler(2000, 7);
    PairSampler big = interval_sampler(20000, 7);  // same stream, longer prefix
    double a = holder_seminorm(f, 0.5, small).seminorm;
    double b = holder_seminorm(f, 0.5, big).seminorm;
    CHECK(b >= a - 1e-15);
}

TEST_CASE("exponents above one use first differences") {
    // f(x) = x^{3/2}: |f|_{C^{1,1/2}} seminorm of f' = 1.5 sqrt(x) is 1.5
    auto est = holder_seminorm(lift(+[](double x) { return std::pow(x, 1.5); }), 1.5, interval_sampler(), 1e-6);
    CHECK(est.seminorm >= 0.85 * 1.5);
    CHECK(est.seminorm <= 1.5 * 1.02);
}

TEST_CASE("unsupported exponents are rejected") {
    auto f = lift(+[](double x) { return x; });
    CHECK_THROWS_AS(holder_seminorm(f, 1.0, interval_sampler(100)), UnsupportedExponentError);
    CHECK_THROWS_AS(holder_seminorm(f, 2.5, interval_sampler(100)), UnsupportedExponentError);
    CHECK_THROWS_AS(holder_seminorm(f, -0.5, interval_sampler(100)), UnsupportedExponentError);
    CHECK_THROWS_AS(gain_report(f, f, 0.5, interval_sampler(100)), UnsupportedExponentError);
    CHECK_THROWS_AS(gain_report(f, f, 1.6, interval_sampler(100)), UnsupportedExponentError);
}

TEST_CASE("empty pair budget errors") {
    PairSampler s = interval_sampler(0);
    CHECK_THROWS_AS(sample_pairs(s), DegenerateSampleError);
}

TEST_CASE("gain report ratios") {
    // u(x) = sqrt(x) is exactly the C^{1/2} primitive-type gain of phi = 1/2 x^{-1/2}...
    // use a synthetic pair instead: phi = x (C^0 norm 1), u = sqrt(x) (C^{1/2} norm 1)
    auto phi = lift(+[](double x) { return x; });
    auto u = lift(+[](double x) { return std::sqrt(x); });
    GainReport rep = gain_report(phi, u, 0.0, interval_sampler());
    CHECK(rep.data_norm == doctest::Approx(1.0).epsilon(0.05));
    CHECK(rep.solution_seminorm == doctest::Approx(1.0).epsilon(0.1));
    CHECK(rep.ratio == doctest::Approx(1.0).epsilon(0.15));

    // zero data reports ratio 0
    auto zero = lift(+[](double) { return 0.0; });
    GainReport zr = gain_report(zero, zero, 0.0, interval_sampler(1000));
    CHECK(zr.ratio == 0.0);
}

TEST_CASE("two-dimensional sampler respects membership") {
    PairSampler s;
    s.dim = 2;
    s.lower = {-1.0, -1.0};
    s.upper = {1.0, 1.0};
    s.inside = [](const std::vector<double>& p) { return p[0] * p[0] + p[1] * p[1] < 1.0; };
    s.count = 500;
    s.seed = 5;
    auto pairs = sample_pairs(s);
    CHECK(pairs.size() == 500);
    for (const auto& [x, y] : pairs) {
        CHECK(x[0] * x[0] + x[1] * x[1] < 1.0);
        CHECK(y[0] * y[0] + y[1] * y[1] < 1.0);
    }
}
