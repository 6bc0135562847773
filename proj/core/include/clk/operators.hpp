#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "clk/extension.hpp"
#include "clk/quadrature.hpp"

namespace clk {

enum class OperatorTag { T, H, H0 };

/// Rule bundle for one resolution level. Halved companions provide the crude
/// error estimates; the collar rule is restricted to the cutoff band where the
/// extension terms live.
struct OperatorRules {
    std::shared_ptr<BoundaryRule> boundary, boundary_half;
    std::shared_ptr<VolumeRule> domain_vol, domain_vol_half;
    std::shared_ptr<VolumeRule> nbhd_vol, nbhd_vol_half;
    std::shared_ptr<VolumeRule> collar_vol, collar_vol_half;
    double exclusion_radius = 0.0;
    double fd_step = 1e-3;
    int resolution = 0;         // boundary nodes per angle
    int volume_resolution = 0;  // volume nodes per angle
};

OperatorRules make_operator_rules(const Domain& dom, int boundary_resolution, int volume_resolution,
                                  double exclusion_radius, double fd_step);

inline OperatorRules make_operator_rules(const Domain& dom, int resolution, double exclusion_radius,
                                         double fd_step) {
    return make_operator_rules(dom, resolution, resolution, exclusion_radius, fd_step);
}

struct HomotopySolution {
    OperatorTag tag{};
    int q = 0;
    std::vector<CPoint> probes;
    std::vector<FormValue> values;       // degree q-1 (scalar for H0)
    std::vector<double> error_estimates; // per probe, coefficient sup-norm
    /// H0 only: max discrepancy between its boundary-integral form and its
    /// collar-commutator form (internal consistency of the two expressions),
    /// plus the rule-level error scale that bounds it.
    double h0_consistency = 0.0;
    double h0_consistency_estimate = 0.0;
    std::string notes;
};

class HomotopyContext {
  public:
    HomotopyContext(DomainPtr dom, OperatorRules rules);

    const Domain& domain() const { return *dom_; }
    const OperatorRules& rules() const { return rules_; }
    const KernelEvaluator& kernels() const { return *kernels_; }
    const ExtensionOperator& extension() const { return *ext_; }

    /// Caches data values at the nodes of every rule in the bundle.
    struct CachedData {
        FormField field;
        std::vector<FormValue> boundary, boundary_half;
        std::vector<FormValue> domain_vol, domain_vol_half;
        std::vector<FormValue> nbhd_vol, nbhd_vol_half;     // extended field E phi
        std::vector<FormValue> collar_comm, collar_comm_half;  // [dbar, E] phi
        std::vector<FormValue> collar_ext, collar_ext_half;    // E phi on the collar
    };
    CachedData cache(const FormField& phi, const FormField& dbar_phi_for_commutator) const;

    /// T_q phi(z) = -int_bd Omega01_{0,q-1} ^ phi + int_D Omega0_{0,q-1} ^ phi.
    /// coarse (optional) receives the same value on the half-resolution rules.
    FormValue apply_T_point(int q, const CachedData& phi, const CPoint& z, double* err,
                            FormValue* coarse = nullptr) const;
    /// H_q phi(z) = int_U Omega0_{0,q-1} ^ E phi + int_collar Omega01_{0,q-1} ^ [dbar,E] phi.
    FormValue apply_H_point(int q, const CachedData& phi, const CPoint& z, double* err,
                            FormValue* coarse = nullptr) const;
    /// H_0 phi(z) = int_bd Omega1_{0,0} phi - int_collar Omega1_{0,0} ^ E dbar phi;
    /// equivalently int_collar Omega1_{0,0} ^ [dbar,E] phi. Both are computed; the
    /// first is returned, their gap goes to *consistency.
    Complex apply_H0_point(const CachedData& phi, const CachedData& dbar_phi, const CPoint& z, double* err,
                           double* consistency, double* consistency_estimate = nullptr) const;

    /// Sampled verification that the Leray pairing never vanishes for zeta in the
    /// collar and z among the probes (throws ConvexityPrecheckError).
    void precheck_nonvanishing(const std::vector<CPoint>& probes) const;

  private:
    DomainPtr dom_;
    OperatorRules rules_;
    std::shared_ptr<KernelEvaluator> kernels_;
    std::shared_ptr<ExtensionOperator> ext_;
};

HomotopySolution apply_T(const HomotopyContext& ctx, int q, const FormField& phi,
                         const std::vector<CPoint>& probes);
HomotopySolution apply_H(const HomotopyContext& ctx, int q, const FormField& phi, const FormField& dbar_phi,
                         const std::vector<CPoint>& probes);
HomotopySolution apply_H0(const HomotopyContext& ctx, const FormField& phi, const FormField& dbar_phi,
                          const std::vector<CPoint>& probes);

struct ResidualReport {
    double max_residual = 0.0;
    std::vector<double> per_probe;
    double combined_error_estimate = 0.0;
    std::vector<double> per_probe_estimate;
};

/// max over probes of |phi - dbar(op_q phi) - op_{q+1}(dbar phi)| with dbar of
/// the solution taken by central differences of step rules.fd_step.
ResidualReport homotopy_residual(const HomotopyContext& ctx, OperatorTag tag, int q, const FormField& phi,
                                 const FormField& dbar_phi, const std::vector<CPoint>& probes);

}  // namespace clk
