#pragma once

#include "aclab/energy.hpp"
#include "aclab/mesh.hpp"

#include <optional>
#include <vector>

namespace aclab {

// ||Phi||_{W^{-1,p}_eps} = sup <Phi, v> / ||grad v||_{L^p'} over periodic P1 v,
// with the entrywise l^p' norm of grad v.
struct DualNorm {
  double p = 2.0;
  bool exact = false;
  double value = 0.0;  // exact value, or the lower bound
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
  double galerkin_residual = 0.0;
  std::string note;
};

// 1D: <Phi, v> = eps sum_n R_n v'_n with mean-free v', so the norm is
// min_c ||R - c||_{l^p_eps}; exact for every p (p <= 0 means infinity).
DualNorm dual_norm_1d(const Lattice<1>& L, const ForceField<1>& f, double p);
double dual_norm_1d_stress(const Lattice<1>& L, const std::vector<double>& R, double p);

// 2D, p = 2: conjugate gradients on the periodic P1 Laplacian, iterates
// projected onto mean-zero fields.  Throws if the forces do not sum to 0.
DualNorm dual_norm_p2(const P1Mesh<2>& mesh, const ForceField<2>& f, double tol = 1e-12,
                      Field<2>* maximiser = nullptr);

// 2D, p != 2: bounds.  Upper bound: ||S||_{L^p} for each supplied stress
// representation S (min taken).  Lower bound: the p = 2 maximiser and
// per-site hat functions, scored by <Phi, v> / ||grad v||_{L^p'}.
DualNorm dual_norm_bounds(const P1Mesh<2>& mesh, const ForceField<2>& f, double p,
                          const std::vector<std::vector<Mat2>>& representations);

// Same for p = 2, but also fills the bounds from the representations.
DualNorm dual_norm(const P1Mesh<2>& mesh, const ForceField<2>& f, double p,
                   const std::vector<std::vector<Mat2>>& representations = {});

// Conjugate exponent; p <= 0 stands for infinity.
double conjugate_exponent(double p);

}  // namespace aclab
