#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clk/defining_function.hpp"
#include "clk/types.hpp"

namespace clk {

/// Unit direction in R^{2n}, used for star-shaped radius lookups.
using RealDir = std::vector<double>;

struct DomainSpec {
    enum class Kind { Ball, Ellipsoid, Power, Limacon, StarShaped };

    Kind kind = Kind::Ball;
    int n = 1;
    double radius = 1.0;                       // Ball
    std::vector<double> semi_axes;             // Ellipsoid, 2n entries
    std::vector<double> exponents;             // Power, 2n entries, all > 1
    double level = 1.0;                        // Power
    double limacon_b = 0.5;                    // Limacon, b in (0,1), n = 1 only
    std::function<double(const RealDir&)> rho; // StarShaped radius (bounded above/below by > 0)
    Smoothness star_smoothness = Smoothness::Smooth;
};

/// A bounded star-shaped domain D = {r < 0} about the origin, together with
/// its enclosing working neighborhood U = {r < delta}, delta = 0.1 * diameter.
class Domain {
  public:
    Domain(std::string name, int n, DefiningFunctionPtr r, std::function<double(const RealDir&)> rho,
           bool star_shaped = true);

    const std::string& name() const { return name_; }
    int dim() const { return n_; }
    const DefiningFunctionPtr& r() const { return r_; }
    bool star_shaped() const { return star_shaped_; }
    Smoothness smoothness() const { return r_->smoothness(); }

    /// Star-shaped boundary radius along a unit direction of R^{2n}.
    double rho(const RealDir& w) const { return rho_(w); }
    /// Radius along w of the level set {r = level} (level >= 0, within U).
    double rho_level(const RealDir& w, double level) const;

    double diameter() const { return diameter_; }
    /// Width of the working neighborhood U = {r < delta()}.
    double delta() const { return delta_; }

    /// Boundary point on the ray through p (p != 0), and the direction itself.
    CPoint boundary_projection(const CPoint& p) const;
    /// Approximate Euclidean distance to the boundary: |r(z)| / |grad r| at the
    /// radial boundary projection (sign-free; used for condition quotients only).
    double boundary_distance(const CPoint& z) const;

    static RealDir direction_of(const CPoint& p);
    static CPoint point_on_ray(const RealDir& w, double s);

  private:
    std::string name_;
    int n_;
    DefiningFunctionPtr r_;
    std::function<double(const RealDir&)> rho_;
    bool star_shaped_;
    double diameter_;
    double delta_;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_domain(const DomainSpec& spec);

}  // namespace clk
