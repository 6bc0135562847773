#pragma once

#include <memory>

#include "clk/domain.hpp"
#include "clk/form_field.hpp"

namespace clk {

enum class ExtensionMode { Analytic, Reflection };

/// Extension from clos D to the working neighborhood U with compact support:
/// analytic mode multiplies a globally defined expression by a smooth cutoff
/// chi(r) (== 1 for r <= delta/4, == 0 for r >= 3 delta/4); reflection mode
/// pulls values back from the radially reflected point for data only known on
/// clos D. The commutator [dbar, E] phi is exact in analytic mode (dbar chi ^ phi)
/// and uses central differences in reflection mode.
class ExtensionOperator {
  public:
    ExtensionOperator(DomainPtr dom, ExtensionMode mode = ExtensionMode::Analytic);

    ExtensionMode mode() const { return mode_; }
    const DomainPtr& domain() const { return dom_; }

    double cutoff(const CPoint& zeta) const;        // chi
    CVector cutoff_dbar(const CPoint& zeta) const;  // coefficients of dbar chi

    /// chi == 1 on {r <= inner_level()}, chi == 0 on {r >= outer_level()}.
    double inner_level() const { return 0.25 * dom_->delta(); }
    double outer_level() const { return 0.75 * dom_->delta(); }

    FormField extend(const FormField& phi) const;
    FormField commutator(const FormField& phi, const FormField& dbar_phi, double fd_step = 1e-4) const;

  private:
    DomainPtr dom_;
    ExtensionMode mode_;
};

}  // namespace clk
