#pragma once

#include "aclab/energy.hpp"

namespace aclab {

// Pair-potential coupling: bonds from L_a stay atomistic, every other bond is
// replaced by the Cauchy-Born bond integral sum_T avg chi_T f(|grad y(T) r|).
// After subtracting the atomistic and continuum parts, what is left lives on
// interface elements:
//   J(y) = sum_{T in T_i} sum_rho kappa_{T,rho} w_rho f_rho(|grad y(T) rho|),
//   kappa_{T,rho} = |T|/eps^2 - sum_{x in L_a} avg_x^{x+eps rho} chi_T db,
// with grad y(T) written through the bonds e1, (1,1), e2 leaving the
// lower-left vertex of T.  These bonds all belong to B_i and share an origin,
// so the locality condition holds.
class BondSplitInterface final : public InterfaceModel {
 public:
  BondSplitInterface(const AtomisticMesh& M, std::shared_ptr<const PairPotential<2>> V, const RegionDecomposition& dec);

  const Lattice<2>& lattice() const override { return M_->lattice(); }
  const std::vector<BondRef>& bonds() const override { return bonds_; }
  double value(const Deformation<2>& y) const override;
  std::vector<Vec2> partials(const Deformation<2>& y) const override;
  std::string name() const override { return "bond-split"; }
  bool claims_locality() const override { return true; }
  bool claims_scaling() const override { return true; }
  LipschitzTable lipschitz() const override { return Mi_; }
  double aggregate_lipschitz() const override;

  double kappa(int e, int rho) const;

 private:
  struct Term {
    int element;
    int b[2];          // positions in bonds_
    int sidx[2];       // stencil positions of the two bonds
    std::vector<double> kappa;
    std::vector<Eigen::Vector2d> coef;  // grad y(T) rho = coef[0] g_b0 + coef[1] g_b1
  };
  const AtomisticMesh* M_;
  std::shared_ptr<const PairPotential<2>> V_;
  std::vector<BondRef> bonds_;
  std::vector<Term> terms_;
  LipschitzTable Mi_;
};

// J(y) = |sum_{-+} D_e1 y|^2 + |sum_{++} D_e1 y|^2 - |sum_{--} D_e1 y|^2 - |sum_{+-} D_e1 y|^2
// over the half lines x1 <= 0 / x1 > 0 of x2 = +-1/2: patch test consistent,
// scaled correctly, but nonlocal.
class LocalityCounterexample final : public InterfaceModel {
 public:
  explicit LocalityCounterexample(const Lattice<2>& L);
  const Lattice<2>& lattice() const override { return L_; }
  const std::vector<BondRef>& bonds() const override { return bonds_; }
  double value(const Deformation<2>& y) const override;
  std::vector<Vec2> partials(const Deformation<2>& y) const override;
  std::string name() const override { return "locality-counterexample"; }
  bool claims_locality() const override { return false; }
  bool claims_scaling() const override { return true; }

 private:
  Lattice<2> L_;
  std::vector<BondRef> bonds_;
  std::vector<int> group_;  // 0: -+, 1: ++, 2: --, 3: +-
};

// J(y) = beta sum_{x2 = 1/2} |D_e1 y|^2 - beta sum_{x2 = -1/2} |D_e1 y|^2: local,
// patch test consistent, but with M^i proportional to beta.
class ScalingCounterexample final : public InterfaceModel {
 public:
  ScalingCounterexample(const Lattice<2>& L, double beta);
  const Lattice<2>& lattice() const override { return L_; }
  const std::vector<BondRef>& bonds() const override { return bonds_; }
  double value(const Deformation<2>& y) const override;
  std::vector<Vec2> partials(const Deformation<2>& y) const override;
  std::string name() const override { return "scaling-counterexample"; }
  bool claims_locality() const override { return true; }
  bool claims_scaling() const override { return false; }
  double beta() const { return beta_; }

 private:
  Lattice<2> L_;
  double beta_;
  std::vector<BondRef> bonds_;
  std::vector<int> sign_;
};

}  // namespace aclab
