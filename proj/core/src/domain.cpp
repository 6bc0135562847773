#include "clk/domain.hpp"

#include <cmath>
#include <sstream>

#include "clk/errors.hpp"

namespace clk {

namespace {

// Limacon rho(theta) = 1 + b cos(theta): r(zeta) = |zeta| - 1 - b x/|zeta|,
// smooth away from the origin, strictly negative at the origin for b < 1.
class LimaconDefiningFunction : public DefiningFunction {
  public:
    explicit LimaconDefiningFunction(double b) : b_(b) {}

    int dim() const override { return 1; }
    double value(const CPoint& z) const override {
        double rho = std::abs(z[0]);
        if (rho < 1e-12) return -1.0;
        return rho - 1.0 - b_ * z.x(0) / rho;
    }
    CVector gradient(const CPoint& z) const override {
        double x = z.x(0), y = z.y(0);
        double rho = std::hypot(x, y);
        // d|z|/dx = x/rho, d(x/|z|)/dx = y^2/rho^3, d(x/|z|)/dy = -x y/rho^3
        double dx = x / rho - b_ * y * y / (rho * rho * rho);
        double dy = y / rho + b_ * x * y / (rho * rho * rho);
        return {0.5 * Complex(dx, -dy)};
    }
    CMatrix mixed_hessian(const CPoint& z) const override {
        // quarter Laplacian; Laplacian(|z|) = 1/rho, Laplacian(x/rho) = -x/rho^3
        double x = z.x(0), y = z.y(0);
        double rho = std::hypot(x, y);
        CMatrix h(1);
        h(0, 0) = 0.25 * (1.0 / rho + b_ * x / (rho * rho * rho));
        return h;
    }
    Smoothness smoothness() const override { return Smoothness::Smooth; }

  private:
    double b_;
};

double max_over_dirs(const std::function<double(const RealDir&)>& rho, int n) {
    // deterministic direction sweep; enough for a diameter estimate
    double best = 0.0;
    int d = 2 * n;
    std::uint64_t state = 88172645463325252ull;
    auto next = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return static_cast<double>(state >> 11) * (1.0 / 9007199254740992.0);
    };
    for (int it = 0; it < 4096; ++it) {
        RealDir w(static_cast<std::size_t>(d));
        double s = 0.0;
        for (auto& wi : w) {
            // Box-Muller from the xorshift stream
            double u1 = std::max(next(), 1e-12), u2 = next();
            wi = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            s += wi * wi;
        }
        s = std::sqrt(s);
        for (auto& wi : w) wi /= s;
        best = std::max(best, rho(w));
    }
    return best;
}

}  // namespace

Domain::Domain(std::string name, int n, DefiningFunctionPtr r, std::function<double(const RealDir&)> rho,
               bool star_shaped)
    : name_(std::move(name)), n_(n), r_(std::move(r)), rho_(std::move(rho)), star_shaped_(star_shaped) {
    diameter_ = 2.0 * max_over_dirs(rho_, n_);
    delta_ = 0.1 * diameter_;
}

RealDir Domain::direction_of(const CPoint& p) {
    RealDir w(static_cast<std::size_t>(2 * p.dim()));
    double s = 0.0;
    for (int i = 0; i < 2 * p.dim(); ++i) {
        w[static_cast<std::size_t>(i)] = p.real_coord(i);
        s += w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i)];
    }
    s = std::sqrt(s);
    if (s == 0.0) throw std::invalid_argument("direction_of: zero point has no direction");
    for (auto& wi : w) wi /= s;
    return w;
}

CPoint Domain::point_on_ray(const RealDir& w, double s) {
    int n = static_cast<int>(w.size()) / 2;
    CPoint p(n);
    for (int j = 0; j < n; ++j) p[j] = Complex(s * w[static_cast<std::size_t>(2 * j)], s * w[static_cast<std::size_t>(2 * j + 1)]);
    return p;
}

double Domain::rho_level(const RealDir& w, double level) const {
    if (level <= 0.0) return rho_(w);
    double lo = rho_(w);
    double hi = lo;
    double flo = r_->value(point_on_ray(w, lo)) - level;  // < 0
    double fhi = flo;
    for (int it = 0; it < 64 && fhi < 0.0; ++it) {
        hi *= 1.03;
        fhi = r_->value(point_on_ray(w, hi)) - level;
    }
    if (fhi < 0.0) throw NonStarShapedError("rho_level: level set not found along ray");
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = r_->value(point_on_ray(w, mid)) - level;
        if (fm < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

CPoint Domain::boundary_projection(const CPoint& p) const {
    RealDir w = direction_of(p);
    return point_on_ray(w, rho_(w));
}

double Domain::boundary_distance(const CPoint& z) const {
    CPoint zb = norm2sq(z) > 1e-24 ? boundary_projection(z)
                                   : point_on_ray(RealDir(static_cast<std::size_t>(2 * n_), 1.0 / std::sqrt(2.0 * n_)), rho_(RealDir(static_cast<std::size_t>(2 * n_), 1.0 / std::sqrt(2.0 * n_))));
    CVector g = r_->gradient(zb);
    double gn = 0.0;
    for (const auto& c : g) gn += abs2(c);
    gn = 2.0 * std::sqrt(gn);  // |real gradient| = 2 |Wirtinger gradient|
    if (gn < 1e-14) throw DegenerateSampleError("boundary_distance: vanishing gradient at boundary");
    return std::abs(r_->value(z)) / gn;
}

DomainPtr make_domain(const DomainSpec& spec) {
    int n = spec.n;
    if (n < 1) throw ConfigError("domain: dimension must be >= 1");
    switch (spec.kind) {
        case DomainSpec::Kind::Ball: {
            if (spec.radius <= 0.0) throw ConfigError("ball: radius must be positive");
            std::vector<ProfilePtr> ps(static_cast<std::size_t>(2 * n), std::make_shared<PowerProfile>(2.0));
            auto r = std::make_shared<SeparableDefiningFunction>(n, ps, spec.radius * spec.radius);
            double R = spec.radius;
            std::ostringstream name;
            name << "ball(n=" << n << ",R=" << R << ")";
            return std::make_shared<Domain>(name.str(), n, r, [R](const RealDir&) { return R; });
        }
        case DomainSpec::Kind::Ellipsoid: {
            if (static_cast<int>(spec.semi_axes.size()) != 2 * n)
                throw ConfigError("ellipsoid: need 2n semi-axes");
            std::vector<ProfilePtr> ps;
            for (double a : spec.semi_axes) {
                if (a <= 0.0) throw ConfigError("ellipsoid: semi-axes must be positive");
                ps.push_back(std::make_shared<PowerProfile>(2.0, 1.0 / (a * a)));
            }
            auto r = std::make_shared<SeparableDefiningFunction>(n, ps, 1.0);
            auto axes = spec.semi_axes;
            auto rho = [axes](const RealDir& w) {
                double s = 0.0;
                for (std::size_t i = 0; i < w.size(); ++i) s += (w[i] / axes[i]) * (w[i] / axes[i]);
                return 1.0 / std::sqrt(s);
            };
            return std::make_shared<Domain>("ellipsoid", n, r, rho);
        }
        case DomainSpec::Kind::Power: {
            if (static_cast<int>(spec.exponents.size()) != 2 * n)
                throw ConfigError("power domain: need 2n exponents");
            if (spec.level <= 0.0) throw ConfigError("power domain: level must be positive");
            std::vector<ProfilePtr> ps;
            for (double m : spec.exponents) {
                if (!(m > 1.0)) throw ConfigError("power domain: exponents must satisfy m > 1");
                ps.push_back(std::make_shared<PowerProfile>(m));
            }
            auto r = std::make_shared<SeparableDefiningFunction>(n, ps, spec.level);
            auto exps = spec.exponents;
            double level = spec.level;
            auto rho = [exps, level](const RealDir& w) {
                // monotone in s: solve sum |s w_i|^{m_i} = level by bisection
                double lo = 0.0, hi = 1.0;
                auto val = [&](double s) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < w.size(); ++i)
                        acc += std::pow(std::abs(s * w[i]), exps[i]);
                    return acc - level;
                };
                while (val(hi) < 0.0) hi *= 2.0;
                for (int it = 0; it < 80; ++it) {
                    double mid = 0.5 * (lo + hi);
                    (val(mid) < 0.0 ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            };
            return std::make_shared<Domain>("power", n, r, rho);
        }
        case DomainSpec::Kind::Limacon: {
            if (n != 1) throw ConfigError("limacon: only defined for n = 1");
            if (!(spec.limacon_b > 0.0 && spec.limacon_b < 1.0))
                throw ConfigError("limacon: b must lie in (0,1)");
            double b = spec.limacon_b;
            auto r = std::make_shared<LimaconDefiningFunction>(b);
            auto rho = [b](const RealDir& w) { return 1.0 + b * w[0]; };
            std::ostringstream name;
            name << "limacon(b=" << b << ")";
            return std::make_shared<Domain>(name.str(), 1, r, rho);
        }
        case DomainSpec::Kind::StarShaped: {
            if (!spec.rho) throw ConfigError("star-shaped domain: radius function required");
            auto rho = spec.rho;
            auto value = [rho](const CPoint& p) {
                double s = std::sqrt(norm2sq(p));
                if (s < 1e-12) return -1.0;
                RealDir w = Domain::direction_of(p);
                return s - rho(w);
            };
            auto r = numeric_defining_function(n, value, 1e-5, spec.star_smoothness);
            return std::make_shared<Domain>("star", n, r, rho);
        }
    }
    throw ConfigError("unknown domain kind");
}

}  // namespace clk
