#pragma once

#include "aclab/mesh.hpp"
#include "aclab/potential.hpp"
#include "aclab/regions.hpp"

#include <memory>
#include <string>
#include <vector>

namespace aclab {

// <dE(y), z> = sum_x f(x) . z(x) for periodic z; f is stored like u.
template <int D> using ForceField = Field<D>;

template <int D> class Energy {
 public:
  virtual ~Energy() = default;
  virtual const Lattice<D>& lattice() const = 0;
  virtual double value(const Deformation<D>& y) const = 0;
  virtual ForceField<D> forces(const Deformation<D>& y) const = 0;
  virtual std::string name() const = 0;
};

// Adds c . D_r z(x) to a force covector.
template <int D>
inline void add_bond_force(const Lattice<D>& L, ForceField<D>& f, int x, const IVec<D>& r, const Vec<D>& c) {
  const int xr = L.index(L.site(x) + r);
  f.col(xr) += c / L.eps();
  f.col(x) -= c / L.eps();
}

template <int D> class AtomisticEnergy final : public Energy<D> {
 public:
  AtomisticEnergy(const Lattice<D>& L, std::shared_ptr<const SitePotential<D>> V);
  const Lattice<D>& lattice() const override { return L_; }
  double value(const Deformation<D>& y) const override;
  ForceField<D> forces(const Deformation<D>& y) const override;
  std::string name() const override { return "atomistic"; }
  const SitePotential<D>& potential() const { return *V_; }

  // dead load b: adds sum_x b(x).u(x)
  void set_dead_load(Field<D> b) { load_ = std::move(b); }

 private:
  Lattice<D> L_;
  std::shared_ptr<const SitePotential<D>> V_;
  Field<D> load_;
};

// eps^d sum_{x in S} V(C_x D^R y(x)) + int_{Omega_c} W(grad y), where Omega_c
// is Omega minus the cells Q_eps(x) = x + eps[-1/2,1/2]^d, x in S.  With C = I
// this is the QCE energy; general C_x gives the GCC family.
template <int D> class CutoutEnergy final : public Energy<D> {
 public:
  CutoutEnergy(const Lattice<D>& L, const P1Mesh<D>& mesh, std::shared_ptr<const SitePotential<D>> V,
               std::vector<char> in_S);
  const Lattice<D>& lattice() const override { return L_; }
  double value(const Deformation<D>& y) const override;
  ForceField<D> forces(const Deformation<D>& y) const override;
  std::string name() const override { return "cutout"; }

  // C(r, s): g~_r = sum_s C(r,s) g_s; an empty matrix means the identity
  void set_coefficients(int site, Eigen::MatrixXd C);
  const Eigen::MatrixXd& coefficients(int site) const { return C_[site]; }
  const std::vector<char>& S() const { return S_; }
  const std::vector<double>& continuum_area() const { return area_; }
  const P1Mesh<D>& mesh() const { return mesh_; }
  const SitePotential<D>& potential() const { return *V_; }

 private:
  void site_terms(const Deformation<D>& y, int x, std::vector<Vec<D>>& g, std::vector<Vec<D>>& gt) const;

  Lattice<D> L_;
  P1Mesh<D> mesh_;
  std::shared_ptr<const SitePotential<D>> V_;
  std::vector<char> S_;
  std::vector<Eigen::MatrixXd> C_;
  std::vector<double> area_;  // |T minus union of Q_eps(x)|
};

// Sites of the closed atomistic block, used as the QCE node set.
std::vector<char> qce_sites(const RegionDecomposition& dec);

// ---------------------------------------------------------------------------

struct BondRef {
  int site = 0;
  IVec2 r;
};

// Interface functional E_i(y) = eps^2 J((D_r y(x))_{b in B}).
class InterfaceModel {
 public:
  virtual ~InterfaceModel() = default;
  virtual const Lattice<2>& lattice() const = 0;
  virtual const std::vector<BondRef>& bonds() const = 0;
  // full functional, including the eps^2 factor
  virtual double value(const Deformation<2>& y) const = 0;
  // d_b J, same order as bonds()
  virtual std::vector<Vec2> partials(const Deformation<2>& y) const = 0;
  virtual std::string name() const = 0;
  virtual bool claims_locality() const = 0;
  virtual bool claims_scaling() const = 0;
  // M^i_{r,s} for the stencil used by the coupling (may be empty)
  virtual LipschitzTable lipschitz() const { return {}; }
  virtual double aggregate_lipschitz() const { return 0.0; }

  ForceField<2> forces(const Deformation<2>& y) const;
};

// E_ac = eps^2 sum_{x in L_a} V + int_{Omega_c} W + E_i
class AcEnergy final : public Energy<2> {
 public:
  AcEnergy(const AtomisticMesh& M, std::shared_ptr<const SitePotential<2>> V, const RegionDecomposition& dec,
           std::shared_ptr<const InterfaceModel> Ei);
  const Lattice<2>& lattice() const override { return M_->lattice(); }
  double value(const Deformation<2>& y) const override;
  ForceField<2> forces(const Deformation<2>& y) const override;
  std::string name() const override;

  const AtomisticMesh& mesh() const { return *M_; }
  const SitePotential<2>& potential() const { return *V_; }
  const RegionDecomposition& decomposition() const { return *dec_; }
  const InterfaceModel* interface() const { return Ei_.get(); }

 private:
  const AtomisticMesh* M_;
  std::shared_ptr<const SitePotential<2>> V_;
  const RegionDecomposition* dec_;
  std::shared_ptr<const InterfaceModel> Ei_;
};

// A bare interface functional viewed as an energy (E_a = 0).
class InterfaceEnergy final : public Energy<2> {
 public:
  explicit InterfaceEnergy(std::shared_ptr<const InterfaceModel> Ei) : Ei_(std::move(Ei)) {}
  const Lattice<2>& lattice() const override { return Ei_->lattice(); }
  double value(const Deformation<2>& y) const override { return Ei_->value(y); }
  ForceField<2> forces(const Deformation<2>& y) const override { return Ei_->forces(y); }
  std::string name() const override { return Ei_->name(); }

 private:
  std::shared_ptr<const InterfaceModel> Ei_;
};

// Energy difference, e.g. E_ac - E_a.
template <int D> class EnergyDifference final : public Energy<D> {
 public:
  EnergyDifference(std::shared_ptr<const Energy<D>> a, std::shared_ptr<const Energy<D>> b)
      : a_(std::move(a)), b_(std::move(b)) {}
  const Lattice<D>& lattice() const override { return a_->lattice(); }
  double value(const Deformation<D>& y) const override { return a_->value(y) - b_->value(y); }
  ForceField<D> forces(const Deformation<D>& y) const override { return a_->forces(y) - b_->forces(y); }
  std::string name() const override { return a_->name() + "-" + b_->name(); }

 private:
  std::shared_ptr<const Energy<D>> a_, b_;
};

// Relative mismatch between forces and central differences of the energy
// along `ndir` random periodic directions.
template <int D> double force_fd_mismatch(const Energy<D>& E, const Deformation<D>& y, int ndir, unsigned seed);

// Smallest generalized eigenvalue of d^2E(y) against the P1 gradient Gram
// matrix on periodic fields modulo constants.  The Hessian is assembled from
// central differences of the forces (step 1e-5).
struct StabilityResult {
  double c0 = 0.0;
  int iterations = 0;
  bool converged = false;
};
template <int D>
StabilityResult stability_probe(const Energy<D>& E, const P1Mesh<D>& mesh, const Deformation<D>& y, double tol = 1e-8);

// Dense pieces shared with the oracle: Hessian (fd) and Gram on the
// reduced space (site 0 pinned).
template <int D> Eigen::MatrixXd fd_hessian_reduced(const Energy<D>& E, const Deformation<D>& y);
template <int D> Eigen::MatrixXd gram_reduced(const P1Mesh<D>& mesh);

}  // namespace aclab
