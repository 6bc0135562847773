#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "clk/types.hpp"

namespace clk {

enum class Smoothness { Smooth, C11 };

/// Real scalar field r on a neighborhood of a closed domain, with D = {r < 0}.
/// gradient() is the Wirtinger gradient r_zeta = (dr/dzeta_1, ..., dr/dzeta_n);
/// mixed_hessian()(k, j) = d^2 r / (dzetabar_k dzeta_j), defined a.e. for C^{1,1}.
class DefiningFunction {
  public:
    virtual ~DefiningFunction() = default;

    virtual int dim() const = 0;
    virtual double value(const CPoint& z) const = 0;
    virtual CVector gradient(const CPoint& z) const = 0;
    virtual CMatrix mixed_hessian(const CPoint& z) const = 0;
    virtual Smoothness smoothness() const = 0;
};

using DefiningFunctionPtr = std::shared_ptr<const DefiningFunction>;

/// 1-d coordinate profile with derivatives; building block of separable r.
class Profile {
  public:
    virtual ~Profile() = default;
    virtual double f(double t) const = 0;
    virtual double d1(double t) const = 0;
    /// a.e. value; at isolated non-differentiability points any finite value may be returned.
    virtual double d2(double t) const = 0;
    virtual bool is_smooth() const = 0;
};

using ProfilePtr = std::shared_ptr<const Profile>;

/// f(t) = a |t|^m, m > 1.
class PowerProfile : public Profile {
  public:
    PowerProfile(double exponent, double scale = 1.0);
    double f(double t) const override;
    double d1(double t) const override;
    double d2(double t) const override;
    bool is_smooth() const override { return m_ == 2.0; }
    double exponent() const { return m_; }
    double scale() const { return a_; }

  private:
    double m_, a_;
};

/// f(t) = a t |t| (C^{1,1}, second derivative = 2a sign(t)).
class OddQuadraticProfile : public Profile {
  public:
    explicit OddQuadraticProfile(double scale = 1.0) : a_(scale) {}
    double f(double t) const override { return a_ * t * std::abs(t); }
    double d1(double t) const override { return 2.0 * a_ * std::abs(t); }
    double d2(double t) const override { return t >= 0 ? 2.0 * a_ : -2.0 * a_; }
    bool is_smooth() const override { return false; }

  private:
    double a_;
};

/// r(z) = sum_i profile_i(xi_i) - level, over the 2n real coordinates x_1,y_1,...,x_n,y_n.
/// Separability makes the Wirtinger gradient and the (diagonal) mixed Hessian exact.
class SeparableDefiningFunction : public DefiningFunction {
  public:
    SeparableDefiningFunction(int n, std::vector<ProfilePtr> profiles, double level);

    int dim() const override { return n_; }
    double value(const CPoint& z) const override;
    CVector gradient(const CPoint& z) const override;
    CMatrix mixed_hessian(const CPoint& z) const override;
    Smoothness smoothness() const override { return smooth_; }

    const std::vector<ProfilePtr>& profiles() const { return profiles_; }
    double level() const { return level_; }

  private:
    int n_;
    std::vector<ProfilePtr> profiles_;
    double level_;
    Smoothness smooth_;
};

/// Smooth real-valued multiplier h with explicit derivatives (for r -> h r rescalings).
class SmoothScalarField {
  public:
    virtual ~SmoothScalarField() = default;
    virtual double value(const CPoint& z) const = 0;
    virtual CVector gradient(const CPoint& z) const = 0;  // Wirtinger h_zeta
    virtual CMatrix mixed_hessian(const CPoint& z) const = 0;
};

using ScalarFieldPtr = std::shared_ptr<const SmoothScalarField>;

/// h(z) = c0 + c1 * x_j (affine in one real coordinate).
ScalarFieldPtr affine_real_field(int n, double c0, double c1, int real_coord);
/// h(z) = 1 + |z|^2.
ScalarFieldPtr one_plus_normsq_field(int n);
/// h(z) = c.
ScalarFieldPtr constant_field(int n, double c);

/// r2 = h * r1 (same zero set when h > 0).
DefiningFunctionPtr product_defining_function(DefiningFunctionPtr r, ScalarFieldPtr h);

/// Defining function from a raw value callback; gradient and mixed Hessian by
/// central differences (for rho-parametrized or otherwise implicit geometries).
DefiningFunctionPtr numeric_defining_function(int n, std::function<double(const CPoint&)> value,
                                              double fd_step, Smoothness smooth);

}  // namespace clk
