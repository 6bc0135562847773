#pragma once

#include <algorithm>
#include <cmath>

#include "clk/multi_index.hpp"
#include "clk/types.hpp"

namespace clk {

/// Coefficients of a (0,q)-form at a point: one complex number per strictly
/// increasing multi-index of length q (ordering of all_multi_indices).
/// q = 0 is a single scalar.
struct FormValue {
    int n = 0;
    int q = 0;
    CVector coeffs;

    FormValue() = default;
    FormValue(int n_, int q_) : n(n_), q(q_), coeffs(binomial(n_, q_), Complex(0.0)) {}

    static FormValue scalar(int n_, Complex v) {
        FormValue f(n_, 0);
        f.coeffs[0] = v;
        return f;
    }

    int count() const { return static_cast<int>(coeffs.size()); }

    Complex& operator[](int ord) { return coeffs[static_cast<std::size_t>(ord)]; }
    const Complex& operator[](int ord) const { return coeffs[static_cast<std::size_t>(ord)]; }

    double inf_norm() const {
        double m = 0.0;
        for (const auto& c : coeffs) m = std::max(m, std::abs(c));
        return m;
    }

    FormValue& operator+=(const FormValue& o) {
        for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] += o.coeffs[i];
        return *this;
    }
    FormValue& operator-=(const FormValue& o) {
        for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] -= o.coeffs[i];
        return *this;
    }
    FormValue& operator*=(Complex s) {
        for (auto& c : coeffs) c *= s;
        return *this;
    }
};

inline FormValue operator+(FormValue a, const FormValue& b) { return a += b; }
inline FormValue operator-(FormValue a, const FormValue& b) { return a -= b; }
inline FormValue operator*(Complex s, FormValue a) { return a *= s; }

inline double max_abs_diff(const FormValue& a, const FormValue& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) m = std::max(m, std::abs(a.coeffs[i] - b.coeffs[i]));
    return m;
}

}  // namespace clk
