#include "clk/defining_function.hpp"

#include <cmath>
#include <stdexcept>

namespace clk {

PowerProfile::PowerProfile(double exponent, double scale) : m_(exponent), a_(scale) {
    if (exponent <= 1.0) throw std::invalid_argument("PowerProfile: exponent must be > 1");
}

double PowerProfile::f(double t) const { return a_ * std::pow(std::abs(t), m_); }

double PowerProfile::d1(double t) const {
    if (t == 0.0) return 0.0;  // one-sided value, valid since m > 1
    double s = t > 0 ? 1.0 : -1.0;
    return a_ * m_ * s * std::pow(std::abs(t), m_ - 1.0);
}

double PowerProfile::d2(double t) const {
    if (m_ == 2.0) return 2.0 * a_;
    if (t == 0.0) return 0.0;  // a.e. value; the hyperplane t = 0 has measure zero
    return a_ * m_ * (m_ - 1.0) * std::pow(std::abs(t), m_ - 2.0);
}

SeparableDefiningFunction::SeparableDefiningFunction(int n, std::vector<ProfilePtr> profiles, double level)
    : n_(n), profiles_(std::move(profiles)), level_(level) {
    if (static_cast<int>(profiles_.size()) != 2 * n)
        throw std::invalid_argument("SeparableDefiningFunction: need one profile per real coordinate");
    smooth_ = Smoothness::Smooth;
    for (const auto& p : profiles_)
        if (!p->is_smooth()) smooth_ = Smoothness::C11;
}

double SeparableDefiningFunction::value(const CPoint& z) const {
    double s = -level_;
    for (int i = 0; i < 2 * n_; ++i) s += profiles_[static_cast<std::size_t>(i)]->f(z.real_coord(i));
    return s;
}

CVector SeparableDefiningFunction::gradient(const CPoint& z) const {
    CVector g(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) {
        double fx = profiles_[static_cast<std::size_t>(2 * j)]->d1(z.x(j));
        double fy = profiles_[static_cast<std::size_t>(2 * j + 1)]->d1(z.y(j));
        g[static_cast<std::size_t>(j)] = 0.5 * Complex(fx, -fy);  // d/dzeta = (d/dx - i d/dy)/2
    }
    return g;
}

CMatrix SeparableDefiningFunction::mixed_hessian(const CPoint& z) const {
    CMatrix h(n_);
    for (int j = 0; j < n_; ++j) {
        double fxx = profiles_[static_cast<std::size_t>(2 * j)]->d2(z.x(j));
        double fyy = profiles_[static_cast<std::size_t>(2 * j + 1)]->d2(z.y(j));
        h(j, j) = 0.25 * (fxx + fyy);  // d^2/dzetabar dzeta = Laplacian/4 per coordinate
    }
    return h;
}

namespace {

class AffineRealField : public SmoothScalarField {
  public:
    AffineRealField(int n, double c0, double c1, int coord) : n_(n), c0_(c0), c1_(c1), coord_(coord) {}
    double value(const CPoint& z) const override { return c0_ + c1_ * z.real_coord(coord_); }
    CVector gradient(const CPoint&) const override {
        CVector g(static_cast<std::size_t>(n_));
        // d x_j / dzeta_j = 1/2, d y_j / dzeta_j = -i/2 ... as Wirtinger derivatives
        int j = coord_ / 2;
        g[static_cast<std::size_t>(j)] = (coord_ % 2 == 0) ? Complex(0.5 * c1_, 0.0) : Complex(0.0, -0.5 * c1_);
        return g;
    }
    CMatrix mixed_hessian(const CPoint&) const override { return CMatrix(n_); }

  private:
    int n_;
    double c0_, c1_;
    int coord_;
};

class OnePlusNormSqField : public SmoothScalarField {
  public:
    explicit OnePlusNormSqField(int n) : n_(n) {}
    double value(const CPoint& z) const override { return 1.0 + norm2sq(z); }
    CVector gradient(const CPoint& z) const override {
        CVector g(static_cast<std::size_t>(n_));
        for (int j = 0; j < n_; ++j) g[static_cast<std::size_t>(j)] = std::conj(z[j]);
        return g;
    }
    CMatrix mixed_hessian(const CPoint&) const override {
        CMatrix h(n_);
        for (int j = 0; j < n_; ++j) h(j, j) = 1.0;
        return h;
    }

  private:
    int n_;
};

class ConstantField : public SmoothScalarField {
  public:
    ConstantField(int n, double c) : n_(n), c_(c) {}
    double value(const CPoint&) const override { return c_; }
    CVector gradient(const CPoint&) const override { return CVector(static_cast<std::size_t>(n_)); }
    CMatrix mixed_hessian(const CPoint&) const override { return CMatrix(n_); }

  private:
    int n_;
    double c_;
};

class ProductDefiningFunction : public DefiningFunction {
  public:
    ProductDefiningFunction(DefiningFunctionPtr r, ScalarFieldPtr h) : r_(std::move(r)), h_(std::move(h)) {}

    int dim() const override { return r_->dim(); }
    double value(const CPoint& z) const override { return h_->value(z) * r_->value(z); }
    CVector gradient(const CPoint& z) const override {
        double hv = h_->value(z);
        double rv = r_->value(z);
        CVector g = r_->gradient(z);
        CVector hg = h_->gradient(z);
        for (std::size_t j = 0; j < g.size(); ++j) g[j] = hv * g[j] + rv * hg[j];
        return g;
    }
    CMatrix mixed_hessian(const CPoint& z) const override {
        // d_zb_k d_z_j (h r) = h_zb r_z + h r_zb_z + r_zb h_z + r h_zb_z, with
        // f_zb_k = conj(f_z_k) for real f.
        int n = r_->dim();
        double hv = h_->value(z), rv = r_->value(z);
        CVector rg = r_->gradient(z), hg = h_->gradient(z);
        CMatrix rh = r_->mixed_hessian(z), hh = h_->mixed_hessian(z);
        CMatrix out(n);
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                out(k, j) = std::conj(hg[static_cast<std::size_t>(k)]) * rg[static_cast<std::size_t>(j)] +
                            hv * rh(k, j) + std::conj(rg[static_cast<std::size_t>(k)]) * hg[static_cast<std::size_t>(j)] +
                            rv * hh(k, j);
        return out;
    }
    Smoothness smoothness() const override { return r_->smoothness(); }

  private:
    DefiningFunctionPtr r_;
    ScalarFieldPtr h_;
};

class NumericDefiningFunction : public DefiningFunction {
  public:
    NumericDefiningFunction(int n, std::function<double(const CPoint&)> value, double h, Smoothness s)
        : n_(n), value_(std::move(value)), h_(h), smooth_(s) {}

    int dim() const override { return n_; }
    double value(const CPoint& z) const override { return value_(z); }
    CVector gradient(const CPoint& z) const override {
        CVector g(static_cast<std::size_t>(n_));
        CPoint p = z;
        for (int j = 0; j < n_; ++j) {
            double dx = central(p, 2 * j);
            double dy = central(p, 2 * j + 1);
            g[static_cast<std::size_t>(j)] = 0.5 * Complex(dx, -dy);
        }
        return g;
    }
    CMatrix mixed_hessian(const CPoint& z) const override {
        // d/dzetabar_k of the finite-difference gradient entries
        CMatrix out(n_);
        for (int k = 0; k < n_; ++k) {
            for (int j = 0; j < n_; ++j) {
                Complex d = 0.0;
                for (int part = 0; part < 2; ++part) {
                    int coord = 2 * k + part;
                    CPoint pp = z, pm = z;
                    pp.set_real_coord(coord, z.real_coord(coord) + h_);
                    pm.set_real_coord(coord, z.real_coord(coord) - h_);
                    Complex dcoord = (gradient_entry(pp, j) - gradient_entry(pm, j)) / (2.0 * h_);
                    d += 0.5 * (part == 0 ? dcoord : Complex(0, 1) * dcoord);
                }
                out(k, j) = d;
            }
        }
        return out;
    }
    Smoothness smoothness() const override { return smooth_; }

  private:
    double central(CPoint p, int coord) const {
        double t = p.real_coord(coord);
        p.set_real_coord(coord, t + h_);
        double fp = value_(p);
        p.set_real_coord(coord, t - h_);
        double fm = value_(p);
        return (fp - fm) / (2.0 * h_);
    }
    Complex gradient_entry(const CPoint& z, int j) const {
        CPoint p = z;
        double dx = central(p, 2 * j);
        double dy = central(p, 2 * j + 1);
        return 0.5 * Complex(dx, -dy);
    }

    int n_;
    std::function<double(const CPoint&)> value_;
    double h_;
    Smoothness smooth_;
};

}  // namespace

ScalarFieldPtr affine_real_field(int n, double c0, double c1, int real_coord) {
    return std::make_shared<AffineRealField>(n, c0, c1, real_coord);
}
ScalarFieldPtr one_plus_normsq_field(int n) { return std::make_shared<OnePlusNormSqField>(n); }
ScalarFieldPtr constant_field(int n, double c) { return std::make_shared<ConstantField>(n, c); }

DefiningFunctionPtr product_defining_function(DefiningFunctionPtr r, ScalarFieldPtr h) {
    return std::make_shared<ProductDefiningFunction>(std::move(r), std::move(h));
}

DefiningFunctionPtr numeric_defining_function(int n, std::function<double(const CPoint&)> value,
                                              double fd_step, Smoothness smooth) {
    return std::make_shared<NumericDefiningFunction>(n, std::move(value), fd_step, smooth);
}

}  // namespace clk
