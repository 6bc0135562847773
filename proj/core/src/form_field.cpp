#include "clk/form_field.hpp"

#include <algorithm>

#include "clk/errors.hpp"

namespace clk {

FormField zero_field(int n, int q) {
    FormField f;
    f.n = n;
    f.q = q;
    f.eval = [n, q](const CPoint&) { return FormValue(n, q); };
    return f;
}

FormField scalar_field(int n, std::function<Complex(const CPoint&)> fn) {
    FormField f;
    f.n = n;
    f.q = 0;
    f.eval = [n, fn = std::move(fn)](const CPoint& z) { return FormValue::scalar(n, fn(z)); };
    return f;
}

FormValue dbar_fd(const FormField& u, const CPoint& z, double h) {
    if (h <= 0.0) throw std::invalid_argument("dbar_fd: step must be positive");
    int n = u.n;
    FormValue out(n, u.q + 1);
    if (u.q + 1 > n) return out;

    MultiIndexSet in_set(n, u.q), out_set(n, u.q + 1);

    // gather the 4n stencil values first so domain violations fail fast
    std::vector<FormValue> plus_x(static_cast<std::size_t>(n)), minus_x(static_cast<std::size_t>(n));
    std::vector<FormValue> plus_y(static_cast<std::size_t>(n)), minus_y(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        for (int s = 0; s < 4; ++s) {
            CPoint p = z;
            int coord = 2 * j + (s >= 2 ? 1 : 0);
            double sign = (s % 2 == 0) ? 1.0 : -1.0;
            p.set_real_coord(coord, p.real_coord(coord) + sign * h);
            if (u.inside && !u.inside(p))
                throw StepTooLargeError("dbar_fd: stencil point left the field's domain");
            FormValue v = u.eval(p);
            (s == 0 ? plus_x : s == 1 ? minus_x : s == 2 ? plus_y : minus_y)[static_cast<std::size_t>(j)] = v;
        }
    }

    for (int j = 0; j < n; ++j) {
        for (int ord = 0; ord < in_set.count(); ++ord) {
            const MultiIndex& J = in_set.list()[static_cast<std::size_t>(ord)];
            WedgeResult w = wedge_sign(J, j + 1);
            if (w.sign == 0) continue;
            Complex dx = (plus_x[static_cast<std::size_t>(j)][ord] - minus_x[static_cast<std::size_t>(j)][ord]) / (2.0 * h);
            Complex dy = (plus_y[static_cast<std::size_t>(j)][ord] - minus_y[static_cast<std::size_t>(j)][ord]) / (2.0 * h);
            Complex dzbar = 0.5 * (dx + Complex(0, 1) * dy);
            out[out_set.ordinal(w.merged.mask())] += static_cast<double>(w.sign) * dzbar;
        }
    }
    return out;
}

FormField dbar_fd_field(const FormField& u, double h) {
    FormField f;
    f.n = u.n;
    f.q = u.q + 1;
    f.smooth = u.smooth;
    f.inside = u.inside;
    f.eval = [u, h](const CPoint& z) { return dbar_fd(u, z, h); };
    return f;
}

double dbar_closed_residual(const FormField& phi, const std::vector<CPoint>& probes, double h) {
    if (phi.q < 1) throw DegreeError("dbar_closed_residual: requires q >= 1");
    double worst = 0.0;
    for (const CPoint& z : probes) worst = std::max(worst, dbar_fd(phi, z, h).inf_norm());
    return worst;
}

}  // namespace clk
