#pragma once

#include <map>
#include <memory>
#include <string>

#include "clk/form_field.hpp"
#include "clk/types.hpp"

namespace clk {

/// Arithmetic over complex values of the variables x_j, y_j, z_j with conj(.),
/// abs2(.), re(.), im(.), the literal i, and powers with real constant exponents.
class Expr {
  public:
    static Expr parse(const std::string& text, int n);

    Complex eval(const CPoint& z) const;
    const std::string& source() const { return source_; }

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

/// (0,q)-form field with coefficient expressions keyed by multi-index, e.g.
/// {"1": "z2", "2": "0"} for q = 1 at n = 2, or {"1,2": "..."} for q = 2.
/// Missing indices are zero.
FormField expression_form_field(int n, int q, const std::map<std::string, std::string>& coefficients);

}  // namespace clk
