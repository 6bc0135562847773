#pragma once

#include <functional>

#include "clk/defining_function.hpp"
#include "clk/form_value.hpp"
#include "clk/types.hpp"

namespace clk {

/// A (0,q)-form with pointwise-evaluable coefficients.
struct FormField {
    int n = 0;
    int q = 0;
    std::function<FormValue(const CPoint&)> eval;
    Smoothness smooth = Smoothness::Smooth;
    /// Optional domain-of-definition predicate; empty means everywhere.
    std::function<bool(const CPoint&)> inside;

    FormValue operator()(const CPoint& z) const { return eval(z); }
};

FormField zero_field(int n, int q);
FormField scalar_field(int n, std::function<Complex(const CPoint&)> f);

/// Central-difference dbar: (0,q) -> (0,q+1) coefficients at z with step h,
/// antisymmetrized through wedge_sign. Throws StepTooLargeError when the
/// stencil leaves the field's domain.
FormValue dbar_fd(const FormField& u, const CPoint& z, double h);

/// dbar of a form field as a new field (finite differences under the hood).
FormField dbar_fd_field(const FormField& u, double h);

/// max over probes of the coefficient sup-norm of dbar_fd(phi).
double dbar_closed_residual(const FormField& phi, const std::vector<CPoint>& probes, double h);

}  // namespace clk
