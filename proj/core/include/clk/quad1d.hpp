#pragma once

#include <cmath>
#include <vector>

namespace clk {

struct Rule1D {
    std::vector<double> x, w;
};

/// Gauss-Legendre on [a, b]. The count is rounded up to an even number so no
/// node sits on the interval midpoint (catalog domains put coordinate
/// hyperplanes there and their integrands may be non-differentiable on them).
inline Rule1D gauss_legendre_rule(int count, double a, double b) {
    int n = count < 2 ? 2 : count + (count & 1);
    Rule1D r;
    r.x.resize(static_cast<std::size_t>(n));
    r.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.x[static_cast<std::size_t>(i)] = x;
        r.w[static_cast<std::size_t>(i)] = w;
        r.x[static_cast<std::size_t>(n - 1 - i)] = -x;
        r.w[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    for (int i = 0; i < n; ++i) {
        r.x[static_cast<std::size_t>(i)] = 0.5 * (b - a) * r.x[static_cast<std::size_t>(i)] + 0.5 * (a + b);
        r.w[static_cast<std::size_t>(i)] *= 0.5 * (b - a);
    }
    return r;
}

/// Midpoint grid on [0, 2 pi); spectrally accurate for periodic integrands and
/// keeps nodes off the axis angles.
inline Rule1D periodic_midpoint_rule(int count) {
    Rule1D r;
    r.x.resize(static_cast<std::size_t>(count));
    r.w.assign(static_cast<std::size_t>(count), 2.0 * M_PI / count);
    for (int i = 0; i < count; ++i) r.x[static_cast<std::size_t>(i)] = (i + 0.5) * 2.0 * M_PI / count;
    return r;
}

}  // namespace clk
