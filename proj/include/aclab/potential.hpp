#pragma once

#include "aclab/lattice.hpp"

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace aclab {

// Scalar profile f(rho) of a pair interaction, with derivatives up to third order.
class Radial {
 public:
  virtual ~Radial() = default;
  virtual double f(double rho) const = 0;
  virtual double d1(double rho) const = 0;
  virtual double d2(double rho) const = 0;
  virtual double d3(double rho) const = 0;
  virtual std::string describe() const = 0;
  // true when f(|g|) = a|g|^2 + b, i.e. the Hessian in g is constant
  virtual bool is_linear_spring() const { return false; }
};

// 0.5 k (rho - rest)^2
class HarmonicRadial final : public Radial {
 public:
  HarmonicRadial(double k, double rest) : k_(k), rest_(rest) {}
  double f(double r) const override { return 0.5 * k_ * (r - rest_) * (r - rest_); }
  double d1(double r) const override { return k_ * (r - rest_); }
  double d2(double) const override { return k_; }
  double d3(double) const override { return 0.0; }
  std::string describe() const override;
  bool is_linear_spring() const override { return rest_ == 0.0; }

 private:
  double k_, rest_;
};

// Morse well times a C^2 quintic switch on [rc_in, rc_out].
class MorseRadial final : public Radial {
 public:
  MorseRadial(double depth, double alpha, double r0, double rc_in, double rc_out);
  double f(double r) const override { return eval(r, 0); }
  double d1(double r) const override { return eval(r, 1); }
  double d2(double r) const override { return eval(r, 2); }
  double d3(double r) const override { return eval(r, 3); }
  std::string describe() const override;

 private:
  double eval(double r, int order) const;
  double D_, a_, r0_, c0_, c1_;
};

// Lipschitz table M_{r,s}, indexed by stencil positions.
using LipschitzTable = Eigen::MatrixXd;

// Interval of bond stretches |g_r|/|r| on which declared constants are valid.
struct StrainRange {
  double lo = 0.8;
  double hi = 1.25;
};

template <int D> class SitePotential {
 public:
  explicit SitePotential(Stencil<D> R) : R_(std::move(R)) {}
  virtual ~SitePotential() = default;

  const Stencil<D>& stencil() const { return R_; }
  virtual double energy(std::span<const Vec<D>> g) const = 0;
  virtual void gradient(std::span<const Vec<D>> g, std::span<Vec<D>> dV) const = 0;
  // d_r d_s V; default is a central difference of gradient()
  virtual Mat<D> second(std::span<const Vec<D>> g, int r, int s) const;
  virtual std::string describe() const = 0;

  const LipschitzTable& lipschitz() const { return M_; }
  const StrainRange& range() const { return range_; }

 protected:
  Stencil<D> R_;
  LipschitzTable M_;
  StrainRange range_;
};

// V(g) = sum_r w_r f_r(|g_r|)
template <int D> class PairPotential final : public SitePotential<D> {
 public:
  PairPotential(Stencil<D> R, std::vector<std::shared_ptr<const Radial>> f, std::vector<double> w,
                StrainRange range = {});

  double energy(std::span<const Vec<D>> g) const override;
  void gradient(std::span<const Vec<D>> g, std::span<Vec<D>> dV) const override;
  Mat<D> second(std::span<const Vec<D>> g, int r, int s) const override;
  std::string describe() const override;

  const Radial& radial(int r) const { return *f_[r]; }
  double weight(int r) const { return w_[r]; }
  // sup of the g-Hessian norm of f_r(|g|) over the declared range (no weight)
  double hessian_bound(int r) const { return hb_[r]; }
  // bond energy w_r f_r(|g|) and its gradient, used by bond-level couplings
  double bond_energy(int r, const Vec<D>& g) const;
  Vec<D> bond_gradient(int r, const Vec<D>& g) const;

 private:
  std::vector<std::shared_ptr<const Radial>> f_;
  std::vector<double> w_;
  std::vector<double> hb_;
};

// Embedded-atom type: V(g) = sum_r 0.5 phi(|g_r|) + G(sum_r rho(|g_r|)),
// G(s) = c (s - s0)^2, rho(t) = exp(-beta (t - 1)).  A genuine multi-body
// site energy with nonzero cross derivatives d_r d_s V.
class EmbeddingPotential final : public SitePotential<2> {
 public:
  EmbeddingPotential(Stencil<2> R, std::shared_ptr<const Radial> phi, double c, double s0, double beta,
                     StrainRange range = {});
  double energy(std::span<const Vec2> g) const override;
  void gradient(std::span<const Vec2> g, std::span<Vec2> dV) const override;
  std::string describe() const override;

 private:
  double density(std::span<const Vec2> g) const;
  std::shared_ptr<const Radial> phi_;
  double c_, s0_, beta_;
};

template <int D> double cauchy_born_W(const SitePotential<D>& V, const Mat<D>& F);
template <int D> Mat<D> cauchy_born_dW(const SitePotential<D>& V, const Mat<D>& F);
// M^a = sum_{r,s} |r||s| M_{r,s}
template <int D> double aggregate_lipschitz(const Stencil<D>& R, const LipschitzTable& M);
template <int D> double aggregate_lipschitz(const SitePotential<D>& V) {
  return aggregate_lipschitz(V.stencil(), V.lipschitz());
}

// Central-difference oracle for d_r V with step 1e-6 max(1,|g|).
template <int D> std::vector<Vec<D>> fd_gradient(const SitePotential<D>& V, std::span<const Vec<D>> g);

// Symmetric stencils used by the shipped models.
Stencil<1> stencil_1d_second_neighbour();
Stencil<2> stencil_nn();       // +-e1, +-e2
Stencil<2> stencil_nn_nnn();   // +-e1, +-e2, +-(1,1), +-(1,-1)
Stencil<2> stencil_named(const std::string& name);

}  // namespace aclab
