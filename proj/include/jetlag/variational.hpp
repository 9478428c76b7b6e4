#pragma once

#include <string>
#include <vector>

#include "jetlag/expr.hpp"
#include "jetlag/jet.hpp"
#include "jetlag/signature.hpp"

namespace jetlag {

/// Structured equation labels. The rendered forms are stable identifiers
/// used across emitters and certificates:
///   ELKth(a)              order-2k stationarity for u^a
///   ELH-u(a,[I])          augmented-system equation from varying u^a_I
///   ELH-p(a,[I],i)        augmented-system equation from varying p_a^{I,i}
///   DW-u(a,[I],i)         d u^a_I / dx^i = dH/dp
///   DW-p(a,[I])           sum_i d p_a^{I,i} / dx^i = -dH/du
///   DW-algebraic(a,[K])   0 = dH/du for top-order K
enum class LabelKind { ELKth, ELHu, ELHp, DWu, DWp, DWalg };

struct Label {
  LabelKind kind = LabelKind::ELKth;
  int alpha = 1;
  MultiIndex index;  // unused for ELKth
  int dir = 0;       // ELHp, DWu only

  std::string str() const;
  int cmp(const Label& o) const;
  friend bool operator==(const Label& a, const Label& b) {
    return a.cmp(b) == 0;
  }
  friend bool operator<(const Label& a, const Label& b) {
    return a.cmp(b) < 0;
  }
};

Label label_elkth(int alpha);
Label label_elh_u(int alpha, const MultiIndex& K);
Label label_elh_p(int alpha, const MultiIndex& I, int i);
Label label_dw_u(int alpha, const MultiIndex& I, int i);
Label label_dw_p(int alpha, const MultiIndex& I);
Label label_dw_alg(int alpha, const MultiIndex& K);

struct Equation {
  Label label;
  Expr residual;  // the equation is residual = 0
};

struct EquationSystem {
  BundleSignature sig;
  std::vector<Equation> equations;

  const Expr* find(const Label& l) const;
};

/// Stationarity of the order-k action: for each dependent variable,
/// sum over distinct canonical I of (-1)^{|I|} D_I(dL/du^a_I), built with
/// prolongation-mode total derivatives. Distinct sorted multi-indices are
/// single coordinates, so the formula carries no combinatorial weights.
EquationSystem euler_lagrange(const Expr& L, const BundleSignature& sig);

/// First-order Euler-Lagrange operator on the augmented bundle whose fiber
/// coordinates are the u^a_I with |I| <= k and the multipliers p_a^{I,i}:
/// for each field z, dL1/dz - sum_i D_i(dL1/d(dz/dx^i)) with formal-mode
/// derivatives. Labels are ELH-u / ELH-p.
EquationSystem euler_lagrange_first_order_augmented(const Expr& L1,
                                                    const BundleSignature& sig);

}  // namespace jetlag
