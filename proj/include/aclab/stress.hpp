#pragma once

#include "aclab/energy.hpp"
#include "aclab/regions.hpp"

#include <string>
#include <vector>

namespace aclab {

// One 2x2 matrix per element of the atomistic mesh.
using StressField = std::vector<Mat2>;

// Sigma_a(y;T) = sum_x sum_r (eps^2/|T|) [d_r V(x) (x) r] avg chi_T db
StressField sigma_atomistic(const AtomisticMesh& M, const SitePotential<2>& V, const Deformation<2>& y);

// Bond contributions of an interface functional: sum_b (eps^2/|T|) d_b J (x) r
// avg chi_T db.  With a decomposition the interface variant chi^i is used
// (edge pieces on the interface boundary count in full); without one, plain chi.
void add_interface_stress(const AtomisticMesh& M, const InterfaceModel& Ei, const Deformation<2>& y,
                          const RegionDecomposition* dec, StressField& S);

// Three-case a/c stress: L_a bond terms (plain chi) on T_a and T_i, B_i terms
// (chi^i) on T_i, dW(grad y) on T_c.  `only` restricts the assembly to the
// elements flagged there (others are left zero); empty means all.
StressField sigma_ac(const AcEnergy& E, const Deformation<2>& y, const std::vector<char>& only = {});

// Cauchy-Born stress dW(grad y(T)) on every element
StressField sigma_cauchy_born(const AtomisticMesh& M, const SitePotential<2>& V, const Deformation<2>& y);

Mat2 mean_stress(const AtomisticMesh& M, const StressField& S);

// |<dE(y), z> - int S : grad z| and the scale sum_T |T| |S(T)| |grad z(T)|
struct RepresentationCheck {
  double defect = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0 ? defect / scale : defect; }
};
RepresentationCheck check_representation(const AtomisticMesh& M, const ForceField<2>& f, const StressField& S,
                                         const Field<2>& z);

void write_stress_csv(const AtomisticMesh& M, const StressField& S, const std::string& path);

}  // namespace aclab
