#pragma once

#include "aclab/energy.hpp"
#include "aclab/regions.hpp"
#include "aclab/stress.hpp"

#include <map>
#include <string>
#include <vector>

namespace aclab {

inline Mat2 rotation_J() {
  Mat2 J;
  J << 0, -1, 1, 0;
  return J;
}

// Crouzeix-Raviart field with two components: one column per edge (midpoint value).
struct CRField {
  Field<2> v;
  static CRField zero(const AtomisticMesh& M) { return {Field<2>::Zero(2, M.num_edges())}; }
};

// grad w(T) = sum_i w(q_i) grad zeta_i, grad zeta_i = -2 grad lambda_i
std::vector<Mat2> cr_gradient(const AtomisticMesh& M, const CRField& w);
Mat2 cr_gradient(const AtomisticMesh& M, const CRField& w, int e);

// eps sum_{f in dT} |grad zeta_f(T)|
double geometric_constant(const AtomisticMesh& M, int e);

// Sum of sigma(T) (q_{f_{k+1}} - q_{f_k}) along consecutive edges sharing
// an element.  Throws std::invalid_argument naming the first bad segment.
Vec2 path_integral(const AtomisticMesh& M, const StressField& sigma, const std::vector<int>& edges);

struct Reconstruction {
  Mat2 sigma0 = Mat2::Zero();
  CRField w;
  double divergence = 0.0;     // max_x |int sigma : grad phi_x| / (eps max|sigma|)
  double loop_residual = 0.0;  // largest closure defect over non-tree arcs
  double element_residual = 0.0;  // max_T |sigma0 + grad w J - sigma| / max|sigma|
};

// Builds sigma = sigma0 + grad w J by path integrals of (sigma - sigma0) J^T
// along a breadth-first spanning tree of the midpoint graph.  Refuses
// (std::domain_error) when sigma is not discretely divergence-free.
Reconstruction reconstruct_potential(const AtomisticMesh& M, const StressField& sigma, double tol = 1e-9);

// Correctors for a patch-test consistent coupling.
class CorrectorSolver {
 public:
  explicit CorrectorSolver(const AcEnergy& E);

  // psi(F) with Sigma_ac(y_F) = dW(F) + grad psi J, normalised to 0 on Omega_a
  const CRField& psi(const Mat2& F);
  // the raw reconstruction behind psi(F), including sigma0
  Reconstruction reconstruct_at(const Mat2& F) const;

  // psi_hat(y)(q_f) = psi(F_f(y); q_f), F_f the mean gradient over the
  // non-atomistic elements of f (0 if there are none)
  CRField psi_hat(const Deformation<2>& y);

  double width() const { return width_; }
  double Ma() const { return Ma_; }
  double Mi() const { return Mi_; }
  double MT(int e) const;
  int solves() const { return solves_; }
  const AcEnergy& energy() const { return *E_; }

 private:
  StressField defect_at(const Mat2& F) const;

  const AcEnergy* E_;
  double width_, Ma_, Mi_;
  std::vector<char> noncontinuum_;
  int anchor_edge_ = -1;
  std::map<std::array<long long, 4>, std::vector<std::pair<Mat2, CRField>>> memo_;
  int solves_ = 0;
};

struct ElementBound {
  int element;
  int region;
  double R;      // |R(y;T)|
  double bound;  // eps M_T osc(grad y; omega_T)
  double osc;
};

struct StressErrorReport {
  StressField sigma_a, sigma_ac, sigma_hat, R;
  std::vector<ElementBound> rows;
  double worst_ratio = 0.0;  // max |R| / bound over elements with bound > 0
  bool all_hold = true;
  double R_atomistic_max = 0.0;  // max |R| on T_a
  double rhs(double p) const;  // eps {sum |T| (M_T osc)^p}^{1/p}, p <= 0 max
  double element_area = 0.0;
};

// Sigma_hat = Sigma_ac - grad psi_hat J, R = Sigma_hat - Sigma_a, and the
// element-wise comparison |R(y;T)| <= eps M_T osc(grad y; omega_T).
StressErrorReport modified_stress_and_error(CorrectorSolver& C, const Deformation<2>& y);

void write_cr_csv(const AtomisticMesh& M, const CRField& w, const std::string& path);

}  // namespace aclab
