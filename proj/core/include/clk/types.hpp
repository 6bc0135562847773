#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace clk {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Point of C^n; coords[j] = z_{j+1} = x_{j+1} + i y_{j+1}.
struct CPoint {
    CVector coords;

    CPoint() = default;
    explicit CPoint(int n) : coords(static_cast<std::size_t>(n)) {}
    CPoint(std::initializer_list<Complex> cs) : coords(cs) {}

    int dim() const { return static_cast<int>(coords.size()); }
    Complex& operator[](int j) { return coords[static_cast<std::size_t>(j)]; }
    const Complex& operator[](int j) const { return coords[static_cast<std::size_t>(j)]; }

    double x(int j) const { return coords[static_cast<std::size_t>(j)].real(); }
    double y(int j) const { return coords[static_cast<std::size_t>(j)].imag(); }

    /// The 2n real coordinates in the order x_1, y_1, ..., x_n, y_n.
    double real_coord(int i) const {
        return (i % 2 == 0) ? x(i / 2) : y(i / 2);
    }
    void set_real_coord(int i, double v) {
        auto& c = coords[static_cast<std::size_t>(i / 2)];
        c = (i % 2 == 0) ? Complex(v, c.imag()) : Complex(c.real(), v);
    }
};

inline CPoint operator+(const CPoint& a, const CPoint& b) {
    CPoint r(a.dim());
    for (int j = 0; j < a.dim(); ++j) r[j] = a[j] + b[j];
    return r;
}
inline CPoint operator-(const CPoint& a, const CPoint& b) {
    CPoint r(a.dim());
    for (int j = 0; j < a.dim(); ++j) r[j] = a[j] - b[j];
    return r;
}
inline CPoint operator*(double s, const CPoint& a) {
    CPoint r(a.dim());
    for (int j = 0; j < a.dim(); ++j) r[j] = s * a[j];
    return r;
}

inline Complex dot(const CVector& a, const CVector& b) {
    Complex s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

inline double abs2(const Complex& c) { return c.real() * c.real() + c.imag() * c.imag(); }

inline double norm2sq(const CPoint& a) {
    double s = 0.0;
    for (const auto& c : a.coords) s += abs2(c);
    return s;
}
inline double dist(const CPoint& a, const CPoint& b) {
    double s = 0.0;
    for (int j = 0; j < a.dim(); ++j) s += abs2(a[j] - b[j]);
    return std::sqrt(s);
}

/// Dense n x n complex matrix, row-major; entry(k, j) = value at row k, column j.
struct CMatrix {
    int n = 0;
    CVector data;

    CMatrix() = default;
    explicit CMatrix(int n_) : n(n_), data(static_cast<std::size_t>(n_) * n_) {}

    Complex& operator()(int k, int j) { return data[static_cast<std::size_t>(k) * n + j]; }
    const Complex& operator()(int k, int j) const { return data[static_cast<std::size_t>(k) * n + j]; }
};

/// Lexicographic order on the real-coordinate tuple; used only to break ties deterministically.
inline bool lex_less(const CPoint& a, const CPoint& b) {
    for (int i = 0; i < 2 * a.dim(); ++i) {
        double u = a.real_coord(i), v = b.real_coord(i);
        if (u != v) return u < v;
    }
    return false;
}

}  // namespace clk
