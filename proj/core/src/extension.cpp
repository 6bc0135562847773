#include "clk/extension.hpp"

#include <cmath>

#include "clk/errors.hpp"

namespace clk {

namespace {

double bump(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

/// C^inf transition: 1 for t <= 0, 0 for t >= 1.
double smooth_step_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    double a = bump(1.0 - t), b = bump(t);
    return a / (a + b);
}

double smooth_step_down_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double h = 1e-6;
    double lo = std::max(0.0, t - h), hi = std::min(1.0, t + h);
    return (smooth_step_down(hi) - smooth_step_down(lo)) / (hi - lo);
}

}  // namespace

ExtensionOperator::ExtensionOperator(DomainPtr dom, ExtensionMode mode) : dom_(std::move(dom)), mode_(mode) {
    if (mode_ == ExtensionMode::Reflection && !dom_->star_shaped())
        throw UnsupportedModeError("reflection extension requires a star-shaped domain");
}

double ExtensionOperator::cutoff(const CPoint& zeta) const {
    double rv = dom_->r()->value(zeta);
    double a = inner_level(), b = outer_level();
    return smooth_step_down((rv - a) / (b - a));
}

CVector ExtensionOperator::cutoff_dbar(const CPoint& zeta) const {
    double rv = dom_->r()->value(zeta);
    double a = inner_level(), b = outer_level();
    double dpsi = smooth_step_down_d1((rv - a) / (b - a)) / (b - a);
    CVector grad = dom_->r()->gradient(zeta);
    CVector out(grad.size());
    for (std::size_t k = 0; k < grad.size(); ++k)
        out[k] = dpsi * std::conj(grad[k]);  // dr/dzetabar_k = conj(r_zeta_k), r real
    return out;
}

FormField ExtensionOperator::extend(const FormField& phi) const {
    FormField out;
    out.n = phi.n;
    out.q = phi.q;
    out.smooth = phi.smooth;
    const Domain& dom = *dom_;
    double delta = dom.delta();
    auto r = dom.r();
    out.inside = [r, delta](const CPoint& p) { return r->value(p) < delta; };
    if (mode_ == ExtensionMode::Analytic) {
        auto self = *this;
        out.eval = [self, phi](const CPoint& p) {
            FormValue v = phi.eval(p);
            v *= self.cutoff(p);
            return v;
        };
        return out;
    }
    // reflection: zeta with |zeta| = t rho(w), t > 1 pulls back from (2 - t) rho(w) w
    auto self = *this;
    DomainPtr domp = dom_;
    out.eval = [self, domp, phi](const CPoint& p) -> FormValue {
        double rv = domp->r()->value(p);
        if (rv <= 0.0) return phi.eval(p);
        double chi = self.cutoff(p);
        if (chi == 0.0) return FormValue(phi.n, phi.q);
        RealDir w = Domain::direction_of(p);
        double rho = domp->rho(w);
        double t = std::sqrt(norm2sq(p)) / rho;
        double t_ref = 2.0 - t;
        if (t_ref <= 0.0) return FormValue(phi.n, phi.q);
        FormValue v = phi.eval(Domain::point_on_ray(w, t_ref * rho));
        v *= chi;
        return v;
    };
    return out;
}

FormField ExtensionOperator::commutator(const FormField& phi, const FormField& dbar_phi, double fd_step) const {
    FormField out;
    out.n = phi.n;
    out.q = phi.q + 1;
    const Domain& dom = *dom_;
    double delta = dom.delta();
    auto r = dom.r();
    out.inside = [r, delta](const CPoint& p) { return r->value(p) < delta; };

    if (mode_ == ExtensionMode::Analytic) {
        // [dbar, E] phi = dbar chi ^ phi exactly (Leibniz; the chi dbar phi terms cancel)
        auto self = *this;
        int n = phi.n, q = phi.q;
        out.eval = [self, phi, n, q](const CPoint& p) {
            FormValue v(n, q + 1);
            double rv = self.dom_->r()->value(p);
            if (rv <= self.inner_level() || rv >= self.outer_level()) return v;
            CVector a = self.cutoff_dbar(p);
            FormValue pv = phi.eval(p);
            MultiIndexSet in_set(n, q), out_set(n, q + 1);
            for (int k = 0; k < n; ++k) {
                if (a[static_cast<std::size_t>(k)] == Complex(0.0)) continue;
                for (int ord = 0; ord < in_set.count(); ++ord) {
                    WedgeResult wr = wedge_sign(in_set.list()[static_cast<std::size_t>(ord)], k + 1);
                    if (wr.sign == 0) continue;
                    v[out_set.ordinal(wr.merged.mask())] +=
                        static_cast<double>(wr.sign) * a[static_cast<std::size_t>(k)] * pv[ord];
                }
            }
            return v;
        };
        return out;
    }

    FormField ephi = extend(phi);
    FormField edbar = extend(dbar_phi);
    out.eval = [ephi, edbar, fd_step](const CPoint& p) {
        FormValue v = dbar_fd(ephi, p, fd_step);
        v -= edbar.eval(p);
        return v;
    };
    return out;
}

}  // namespace clk
