#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clk/domain.hpp"
#include "clk/types.hpp"

namespace clk {

/// Convexity-condition quotients. All share the numerator pairing
/// p = r_zeta(zeta) . (zeta - z); they differ in the admissible pair set and the
/// right-hand side:
///   C0        zeta on bd D, z in clos D;          rhs = |zeta-z|^2
///   CPlus     zeta in U \ D, z in clos D;         rhs = |zeta-z|^2
///   B         zeta in U \ D, z in clos D;         rhs = r(zeta)-r(z)+|zeta-z|^2
///   C         zeta, z on bd D;                    rhs = |zeta-z|^2
///   CPlusPlus zeta in U \ D, z in clos D;         rhs = d(zeta)+d(z)+|Im p|+|zeta-z|^2
enum class ConditionTag { C0, CPlus, B, C, CPlusPlus };

const char* to_string(ConditionTag tag);

struct SamplerConfig {
    int boundary_samples = 400;
    int interior_samples = 400;
    int collar_samples = 400;
    int diagonal_depth = 6;      // extra near-diagonal pair scales
    std::uint64_t seed = 1;
};

struct ConditionReport {
    ConditionTag tag{};
    /// Infimum of Re(p)/rhs. The signed quotient is the headline number: it can
    /// go <= 0 (a real tangent hyperplane meeting the domain), which the modulus
    /// quotient cannot detect at n = 1 where |p| never vanishes off the diagonal.
    double infimum = 0.0;
    /// Infimum of |p|/rhs over the same pairs (the literal modulus form).
    double modulus_infimum = 0.0;
    CPoint witness_zeta, witness_z;
    std::size_t pair_count = 0;
    int diagonal_depth = 0;
};

ConditionReport estimate_condition(const Domain& dom, ConditionTag tag, const SamplerConfig& sampler);

/// Same estimate with a replacement defining function r (must vanish on bd D).
ConditionReport estimate_condition(const Domain& dom, const DefiningFunction& r, ConditionTag tag,
                                   const SamplerConfig& sampler);

/// True iff the sign of the sampled infimum (within tolerance of zero) agrees
/// between r1 and r2 for every tag in {C0, CPlus, B, C}. Throws
/// ZeroSetMismatchError when r1, r2 do not vanish on the same sampled boundary.
bool check_stability(const Domain& dom, const DefiningFunction& r1, const DefiningFunction& r2,
                     const SamplerConfig& sampler, double tolerance = 1e-6);

/// Quotient (f(y)-f(x)-grad f(x).(y-x)) / |y-x|^max(m*,2) for f = sum_j |x_j|^{m_j};
/// returns +infinity when y == x.
double power_gap(const std::vector<double>& exponents, const std::vector<double>& x,
                 const std::vector<double>& y);

struct PowerGapReport {
    double infimum;
    std::vector<double> x, y;   // attaining pair
    std::size_t pair_count;
};

/// Sampled infimum of power_gap over pairs with |x|+|y| < c0.
PowerGapReport power_gap_infimum(const std::vector<double>& exponents, double c0,
                                 std::size_t pair_count, std::uint64_t seed);

}  // namespace clk
