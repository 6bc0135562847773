#pragma once

#include "clk/defining_function.hpp"

namespace clk {

/// Gauss-Hermite nodes/weights for integrals against exp(-x^2).
struct GaussHermite {
    std::vector<double> nodes, weights;
};
GaussHermite gauss_hermite(int count);

/// Gaussian convolution of width sigma = 1/k. For a separable defining function
/// this is the exact 2n-dimensional Gaussian mollification (the convolution
/// factorizes across coordinates); a smooth non-separable r is returned as is.
/// C^{1,1} non-separable inputs are not supported.
DefiningFunctionPtr mollify(const DefiningFunctionPtr& r, int k);

/// 1-d mollified profile values, exposed for tests and convergence studies.
struct MollifiedProfile1D {
    double f, d1, d2;
};
MollifiedProfile1D mollify_profile(const Profile& p, double sigma, double t, int gl_count = 48);

}  // namespace clk
