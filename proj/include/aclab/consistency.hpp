#pragma once

#include "aclab/chain1d.hpp"
#include "aclab/coarse.hpp"
#include "aclab/corrector.hpp"
#include "aclab/dual_norm.hpp"
#include "aclab/interface.hpp"

#include <string>
#include <vector>

namespace aclab {

struct ConsistencyReport {
  double p = 2.0;
  bool exact = false;
  double lhs = 0.0;  // exact value, or the certified upper bound when !exact
  double lower = 0.0, upper = 0.0;
  double rhs = 0.0;  // eps {sum |T| [M_T osc]^p}^{1/p}
  bool elementwise = true;  // |R(y;T)| <= eps M_T osc on every element
  bool holds = false;       // lhs <= rhs and elementwise
  double worst_ratio = 0.0;
  std::vector<ElementBound> rows;
  std::string note;
};

// ||dE_ac(y) - dE_a(y)||_{W^{-1,p}_eps} against the first-order estimate,
// one report per p.  For p != 2 the upper bound uses R = Sigma_hat - Sigma_a
// and Sigma_ac - Sigma_a as representations.
std::vector<ConsistencyReport> model_error(CorrectorSolver& C, const Deformation<2>& y, const std::vector<double>& ps);

// plain modelling error of any pair of energies on the atomistic mesh
DualNorm model_error_plain(const AtomisticMesh& M, const Energy<2>& E, const Energy<2>& Ea, const Deformation<2>& y,
                           double p);

// ---------------------------------------------------------------------------
// 1D

struct QnlConsistency {
  double p = 2.0;
  double lhs = 0.0;
  double rhs = 0.0;        // interface term over {-K-1, K+1}
  double rhs_narrow = 0.0;  // interface term over {-K, K}
  double interface_term = 0.0, y3_term = 0.0, y2sq_term = 0.0;
  double m2p = 0.0, m2pp = 0.0;  // sup |phi2''|, sup |phi2'''| over the attained arguments
  double formula_defect = 0.0;   // max |G_a - G_qnl - R_n| for the closed-form rows
  bool holds = false;
};
QnlConsistency qnl_consistency_1d(const Chain1d& c, const Deformation<1>& y, int K, double p);

struct QceSharpness {
  double p = 2.0;
  double dual = 0.0;         // exact ||dE_qce(y_A) - dE_a(y_A)||
  double bound = 0.0;        // 2 4^{-1/p'} eps^{1/p} |phi2'(2A)|
  double test_value = 0.0;   // <dE_qce(y_A) - dE_a(y_A), u> for the explicit u
  double test_norm = 0.0;    // ||u'||_{l^p'_eps}, should be 1
  double ratio() const { return bound > 0 ? dual / bound : 0.0; }
};
QceSharpness qce_sharpness_1d(const Chain1d& c, double A, int K, double p);

// ---------------------------------------------------------------------------
// counterexamples

// y = F x + amp (cos pi x1, sin pi x1)(1 + sin pi x2): equal to y_F on the
// line x2 = -1/2 and non-affine on x2 = 1/2
Deformation<2> counterexample_deformation(const Lattice<2>& L, const Mat2& F, double amp);

// Test displacements: constant in x2; on x2 = 1/2 either piecewise affine in
// x1 between the group boundaries x1 = eps, x1 = -1 + eps (locality), or equal
// to y - Ax (scaling).
Field<2> locality_test_function(const Lattice<2>& L, const Deformation<2>& y);
Field<2> scaling_test_function(const Lattice<2>& L, const Deformation<2>& y);

struct CounterexampleBound {
  double direct = 0.0;   // <dJ(y), u> / ||grad u||_{L^2}
  double formula = 0.0;  // closed form in terms of D_e1 y - A e1 on x2 = 1/2
  double exact = 0.0;    // ||dJ(y)||_{W^{-1,2}_eps}
  double ghost = 0.0;    // max nodal |dJ(y_A)|
};
CounterexampleBound locality_lower_bound(const AtomisticMesh& M, const LocalityCounterexample& J,
                                         const Deformation<2>& y);
CounterexampleBound scaling_lower_bound(const AtomisticMesh& M, const ScalingCounterexample& J,
                                        const Deformation<2>& y);

// ---------------------------------------------------------------------------
// coarsening

struct CoarseningCheck {
  double p = 2.0;
  bool exact = false;             // p = 2: W^{-1,2}_h norms by a coarse solve
  double model_h = 0.0;           // ||dE_ac - dE_a||_{W^{-1,p}_h}
  double model_eps = 0.0;         // ||dE_ac - dE_a||_{W^{-1,p}_eps}
  double coarsening = 0.0;        // sup |<Phi, I_eps u_h> - <Phi_h, u_h>| / ||grad u_h||
  double osc_sigma = 0.0;         // eps {sum_{T_eps^c} |T| osc(dW(grad y); omega_T^c)^p}^{1/p}
  double osc_grad = 0.0;          // eps {sum_{T_eps^c} |T| osc(grad y; omega_T^c)^p}^{1/p}
  double CM = 0.0;                // coarsening / osc_sigma
  double Ma = 0.0;
  double rhs = 0.0;               // Ma CM osc_grad + model_eps
  double shape_ratio = 0.0;
  int coarse_nodes = 0;
};
CoarseningCheck coarsening_check(const CoarseMesh& C, const AcEnergy& E, const Energy<2>& Ea, const Deformation<2>& y,
                                 double p);

// smooth periodic 2D test field
// y = F x + a (sin pi x1, 0) + b (0, sin pi x2 cos pi x1)
Deformation<2> smooth_deformation(const Lattice<2>& L, const Mat2& F, double a, double b);

}  // namespace aclab
