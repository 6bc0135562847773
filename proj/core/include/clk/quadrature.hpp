#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "clk/domain.hpp"
#include "clk/form_field.hpp"
#include "clk/form_value.hpp"
#include "clk/kernels.hpp"
#include "clk/types.hpp"

namespace clk {

/// One boundary node: position, the complex pullback densities of the monomials
/// dzeta_1..n ^ dzetabar_{all but k} (k = 1..n, parameter weight included), and
/// the scalar surface weight (Gram determinant) for area checks.
struct BoundaryNode {
    CPoint zeta;
    CVector form_density;  // size n, indexed by the missing zetabar index
    double surface_weight = 0.0;
};

struct BoundaryRule {
    int n = 0;
    int resolution = 0;  // nodes per angle
    std::vector<BoundaryNode> nodes;
    int orientation_flips = 0;  // 1 when the raw chart orientation was reversed

    double area() const;
};

enum class RegionTag { Domain, Neighborhood, Collar };  // D, U, U \ D

struct ExclusionSpec {
    CPoint center;
    double radius = 0.0;
    int angular = 8;  // polar sub-rule resolution
    int radial = 10;
};

struct VolumeNode {
    CPoint zeta;
    double weight = 0.0;
};

struct VolumeRule {
    int n = 0;
    RegionTag region = RegionTag::Domain;
    int resolution = 0;
    std::vector<VolumeNode> nodes;
    std::optional<ExclusionSpec> exclusion;  // baked into the weights when present

    double volume() const;
};

/// Product rule on S^{2n-1} composed with the star-shaped radius; the
/// (2n-1)-form pullback Jacobians come from central differences of the
/// parametrization. The orientation is fixed so that the Bochner-Martinelli
/// integral of 1 from the star center equals +1.
BoundaryRule build_boundary_rule(const Domain& dom, int resolution);

/// Radial-shell x angular tensor rule over the region; optional exclusion ball
/// around z handled by a smooth radial blend plus a polar sub-rule whose radial
/// density absorbs the |zeta - z|^{1-2n} kernel singularity.
/// radial_band restricts to {a < r < b} levels of the defining function
/// (used for integrands supported on a cutoff shell).
VolumeRule build_volume_rule(const Domain& dom, RegionTag region, int resolution,
                             std::optional<ExclusionSpec> exclusion = std::nullopt,
                             std::optional<std::pair<double, double>> radial_band = std::nullopt);

/// C^2 radial blend: 0 inside half the exclusion radius, 1 outside it.
double exclusion_blend(double distance, double radius);

struct IntegralResult {
    FormValue value;
    double error_estimate = 0.0;  // 0 when no coarse companion rule is supplied
    FormValue coarse_value;       // the companion-rule value itself (when computed)
    bool has_coarse = false;
};

/// Boundary integral of kernel ^ data against the rule. data degree must be
/// n-1 - zetabar_degree(kind, q_out). A coarse rule yields the error estimate.
IntegralResult integrate_kernel_boundary(const BoundaryRule& rule, const KernelEvaluator& kernels,
                                         KernelKind kind, int q_out, const FormField& data,
                                         const CPoint& z, const BoundaryRule* coarse = nullptr);

/// Same with precomputed data values at rule nodes (cache shared across probes).
IntegralResult integrate_kernel_boundary_cached(const BoundaryRule& rule, const KernelEvaluator& kernels,
                                                KernelKind kind, int q_out,
                                                const std::vector<FormValue>& data_at_nodes, int data_q,
                                                const CPoint& z, const BoundaryRule* coarse = nullptr,
                                                const std::vector<FormValue>* coarse_data = nullptr);

IntegralResult integrate_kernel_volume(const VolumeRule& rule, const KernelEvaluator& kernels,
                                       KernelKind kind, int q_out, const FormField& data, const CPoint& z,
                                       std::optional<ExclusionSpec> exclusion = std::nullopt,
                                       const VolumeRule* coarse = nullptr);

IntegralResult integrate_kernel_volume_cached(const VolumeRule& rule, const KernelEvaluator& kernels,
                                              KernelKind kind, int q_out,
                                              const std::vector<FormValue>& data_at_nodes, int data_q,
                                              const FormField& data, const CPoint& z,
                                              std::optional<ExclusionSpec> exclusion = std::nullopt,
                                              const VolumeRule* coarse = nullptr,
                                              const std::vector<FormValue>* coarse_data = nullptr);

std::vector<FormValue> evaluate_at_nodes(const FormField& data, const BoundaryRule& rule);
std::vector<FormValue> evaluate_at_nodes(const FormField& data, const VolumeRule& rule);

/// Binary node/weight cache: little-endian header (magic, n, resolution, region
/// tag, node count) followed by 64-bit float coordinates and weights.
void save_rule(const VolumeRule& rule, std::ostream& os);
VolumeRule load_volume_rule(std::istream& is);
void save_rule(const BoundaryRule& rule, std::ostream& os);
BoundaryRule load_boundary_rule(std::istream& is);

}  // namespace clk
