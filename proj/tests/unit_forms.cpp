#include <doctest.h>

#include <random>

#include "clk/errors.hpp"
#include "clk/form_field.hpp"
#include "clk/form_value.hpp"
#include "clk/multi_index.hpp"
#include "clk/rng.hpp"

using namespace clk;

TEST_CASE("wedge_sign matches hand-worked cases") {
    // J = (2), j = 1 -> +1, merged (1,2)
    auto r = wedge_sign(MultiIndex{2}, 1);
    CHECK(r.sign == 1);
    CHECK(r.merged == MultiIndex{1, 2});

    // repeated index annihilates
    CHECK(wedge_sign(MultiIndex{1}, 1).sign == 0);

    // J = (1,3), j = 2 -> -1, merged (1,2,3)
    r = wedge_sign(MultiIndex{1, 3}, 2);
    CHECK(r.sign == -1);
    CHECK(r.merged == MultiIndex{1, 2, 3});
}

TEST_CASE("merge_sign counts inversions") {
    CHECK(merge_sign(0b001, 0b010) == 1);   // (1)(2) already sorted
    CHECK(merge_sign(0b010, 0b001) == -1);  // (2)(1) one inversion
    CHECK(merge_sign(0b001, 0b001) == 0);   // overlap
    CHECK(merge_sign(0b101, 0b010) == -1);  // (1,3)(2): 3>2 one inversion
}

TEST_CASE("multi-index enumeration is lexicographic and complete") {
    MultiIndexSet s(4, 2);
    CHECK(s.count() == 6);
    CHECK(s.list()[0] == MultiIndex{1, 2});
    CHECK(s.list()[1] == MultiIndex{1, 3});
    CHECK(s.list()[5] == MultiIndex{3, 4});
    for (int i = 0; i < s.count(); ++i) CHECK(s.ordinal(s.list()[static_cast<std::size_t>(i)].mask()) == i);
}

namespace {

FormField polynomial_field_zbar1(int n) {
    // u(z) = zbar_1, a (0,0) field
    return scalar_field(n, [](const CPoint& z) { return std::conj(z[0]); });
}

}  // namespace

TEST_CASE("dbar_fd of zbar_1 is dzbar_1") {
    FormField u = polynomial_field_zbar1(2);
    CPoint z{{0.3, 0.1}, {-0.2, 0.4}};
    FormValue d = dbar_fd(u, z, 1e-5);
    CHECK(std::abs(d[0] - Complex(1.0)) < 1e-9);
    CHECK(std::abs(d[1]) < 1e-9);
}

TEST_CASE("dbar_fd kills holomorphic data") {
    FormField u = scalar_field(2, [](const CPoint& z) { return z[0] * z[1]; });
    CPoint z{{0.2, -0.3}, {0.5, 0.1}};
    FormValue d = dbar_fd(u, z, 1e-5);
    CHECK(d.inf_norm() < 1e-9);
}

TEST_CASE("dbar_fd of |z1|^2 gives z1 dzbar_1") {
    FormField u = scalar_field(2, [](const CPoint& z) { return Complex(abs2(z[0])); });
    CPoint z{{0.7, -0.2}, {0.1, 0.3}};
    FormValue d = dbar_fd(u, z, 1e-5);
    CHECK(std::abs(d[0] - z[0]) < 1e-9);
    CHECK(std::abs(d[1]) < 1e-12);
}

TEST_CASE("dbar of dbar vanishes on random cubic polynomials") {
    auto rng = make_rng(11, "dbar2");
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    int n = 2;
    double h = 1e-3;
    for (int trial = 0; trial < 5; ++trial) {
        // random polynomial of degree <= 3 in z, zbar coordinates
        std::vector<double> c;
        for (int i = 0; i < 16; ++i) c.push_back(U(rng));
        FormField u = scalar_field(n, [c](const CPoint& z) {
            Complex a = z[0], b = z[1], ab = std::conj(z[0]), bb = std::conj(z[1]);
            return c[0] + c[1] * a + c[2] * b + c[3] * ab + c[4] * bb + c[5] * a * ab + c[6] * b * bb +
                   c[7] * a * b + c[8] * ab * bb + c[9] * a * bb + c[10] * ab * b + c[11] * a * a * ab +
                   c[12] * bb * bb * b + c[13] * a * ab * bb + c[14] * a * a * b + c[15] * ab * ab * bb;
        });
        FormField du = dbar_fd_field(u, h);
        CPoint z{{0.2, 0.1}, {-0.3, 0.25}};
        FormValue dd = dbar_fd(du, z, h);
        CHECK(dd.inf_norm() < 10.0 * h);
    }
}

TEST_CASE("dbar_fd linearity") {
    FormField u = scalar_field(2, [](const CPoint& z) { return std::conj(z[0]) * z[1]; });
    FormField v = scalar_field(2, [](const CPoint& z) { return Complex(abs2(z[1])); });
    Complex a(0.7, -0.3), b(-1.2, 0.5);
    FormField w;
    w.n = 2;
    w.q = 0;
    w.eval = [u, v, a, b](const CPoint& z) {
        FormValue x = u.eval(z);
        x *= a;
        FormValue y = v.eval(z);
        y *= b;
        return x + y;
    };
    CPoint z{{0.1, 0.6}, {0.4, -0.2}};
    double h = 1e-4;
    FormValue lhs = dbar_fd(w, z, h);
    FormValue rhs = a * dbar_fd(u, z, h) + b * dbar_fd(v, z, h);
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
}

TEST_CASE("dbar antisymmetry through wedge bookkeeping") {
    // phi = zbar_2 dzbar_1 is not closed: dbar phi = -dzbar_1 ^ dzbar_2 (coefficient -1)
    FormField phi;
    phi.n = 2;
    phi.q = 1;
    phi.eval = [](const CPoint& z) {
        FormValue v(2, 1);
        v[0] = std::conj(z[1]);
        return v;
    };
    CPoint z{{0.25, 0.0}, {0.1, -0.3}};
    FormValue d = dbar_fd(phi, z, 1e-5);
    CHECK(std::abs(d[0] - Complex(-1.0)) < 1e-9);
}

TEST_CASE("dbar_closed_residual flags closed and non-closed data") {
    std::vector<CPoint> probes = {CPoint{{0.2, 0.1}, {-0.1, 0.2}}, CPoint{{-0.3, 0.2}, {0.2, 0.1}}};
    double h = 1e-4;
    // phi = dbar(zbar_1 z_2) = z_2 dzbar_1 is exactly closed
    FormField closed;
    closed.n = 2;
    closed.q = 1;
    closed.eval = [](const CPoint& z) {
        FormValue v(2, 1);
        v[0] = z[1];
        return v;
    };
    CHECK(dbar_closed_residual(closed, probes, h) < 10.0 * h * h);

    FormField open;
    open.n = 2;
    open.q = 1;
    open.eval = [](const CPoint& z) {
        FormValue v(2, 1);
        v[0] = std::conj(z[1]);
        return v;
    };
    CHECK(dbar_closed_residual(open, probes, h) > 0.5);

    CHECK(dbar_closed_residual(zero_field(2, 1), probes, h) == 0.0);
}

TEST_CASE("dbar_fd respects the domain predicate") {
    FormField u = polynomial_field_zbar1(1);
    u.inside = [](const CPoint& z) { return std::abs(z[0]) < 1.0; };
    CPoint z{{0.999, 0.0}};
    CHECK_THROWS_AS(dbar_fd(u, z, 1e-2), StepTooLargeError);
}
