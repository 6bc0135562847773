#pragma once

#include <array>
#include <memory>
#include <vector>

#include "clk/defining_function.hpp"
#include "clk/form_value.hpp"
#include "clk/multi_index.hpp"
#include "clk/types.hpp"

namespace clk {

/// Omega0: Bochner-Martinelli weight g0 = conj(zeta) - conj(z).
/// Omega1: Cauchy-Leray weight g1 = r_zeta (holomorphic in z).
/// Omega01: transition kernel mixing both weights.
enum class KernelKind { Omega0, Omega1, Omega01 };

/// Minimum allowed |g . (zeta - z)| per weight; below it evaluation throws
/// SingularKernelError instead of returning huge coefficients.
struct SingularSetGuard {
    double min_pairing_g0 = 1e-8;
    double min_pairing_g1 = 1e-8;

    static SingularSetGuard for_scale(double scale) {
        return {1e-8 * scale * scale, 1e-8 * scale * scale};
    }
};

/// Coefficient matrix of one kernel piece of z-type (0,q): entry (J, K) multiplies
/// the monomial dzbar_J ^ dzeta_1..n ^ dzetabar_K (each block ascending).
struct KernelCoefficients {
    KernelKind kind{};
    int n = 0;
    int q = 0;
    MultiIndexSet rows;  // J, |J| = q
    MultiIndexSet cols;  // K, |K| = n-1-q (single weight) or n-2-q (Omega01)
    CVector values;      // row-major

    Complex at(std::uint32_t Jmask, std::uint32_t Kmask) const {
        return values[static_cast<std::size_t>(rows.ordinal(Jmask)) * cols.count() + cols.ordinal(Kmask)];
    }
};

/// Evaluates the three kernels at (z, zeta) from precomputed combinatorial
/// tables (built once per dimension). Thread-safe; no shared mutable state.
class KernelEvaluator {
  public:
    static constexpr int kMaxDim = 8;

    KernelEvaluator(int n, DefiningFunctionPtr r, SingularSetGuard guard = {});

    int dim() const { return n_; }
    const SingularSetGuard& guard() const { return guard_; }
    const DefiningFunctionPtr& defining_function() const { return r_; }

    static int zetabar_degree(KernelKind kind, int n, int q);
    const MultiIndexSet& row_set(int q) const;
    const MultiIndexSet& col_set(KernelKind kind, int q) const;

    /// Writes the dense row-major (J x K) coefficient block. q outside the
    /// decomposition range throws DegreeError; Omega01 requires n >= 2.
    void eval(KernelKind kind, int q, const CPoint& z, const CPoint& zeta, CVector& out) const;

    struct Tables;  // opaque combinatorial term tables, shared per dimension

  private:
    int n_;
    DefiningFunctionPtr r_;
    SingularSetGuard guard_;
    std::shared_ptr<const Tables> tables_;
};

KernelCoefficients omega0_coeffs(const CPoint& z, const CPoint& zeta, int q_out,
                                 SingularSetGuard guard = {});
KernelCoefficients omega1_coeffs(const DefiningFunctionPtr& r, const CPoint& z, const CPoint& zeta,
                                 int q_out, SingularSetGuard guard = {});
KernelCoefficients omega01_coeffs(const DefiningFunctionPtr& r, const CPoint& z, const CPoint& zeta,
                                  int q_out, SingularSetGuard guard = {});

/// Max coefficient magnitude of the two Koppelman defects at (z, zeta), degree q:
///   dbar_zeta Omega1_{0,q} + dbar_z Omega1_{0,q-1}                  (= 0)
///   dbar_zeta Omega01_{0,q} + dbar_z Omega01_{0,q-1} - Omega0_{0,q} + Omega1_{0,q}
/// dbar is applied coefficient-wise by central differences of step h with the
/// wedge bookkeeping for the new dzetabar/dzbar factor. For n = 1 the transition
/// kernel is vacuous and the check degenerates to |Omega0_{0,0} - Omega1_{0,0}|.
double koppelman_residual(const DefiningFunctionPtr& r_smooth, const CPoint& z, const CPoint& zeta,
                          int q, double h, SingularSetGuard guard = {});

}  // namespace clk
