#pragma once

#include "aclab/mesh.hpp"
#include "aclab/regions.hpp"

#include <array>
#include <utility>
#include <vector>

namespace aclab {

// Tensor-product lattice-vertex mesh: unit spacing on [-b, b] in each axis,
// then steps 2, 4, 8, ... outwards, closed periodically at N.  Every
// rectangle is split along its lower-left to upper-right diagonal, so on
// [-b, b]^2 the elements coincide with the atomistic triangulation.
class CoarseMesh {
 public:
  CoarseMesh(const AtomisticMesh& M, int half_width);

  const AtomisticMesh& fine() const { return *M_; }
  const std::vector<int>& axis() const { return axis_; }
  int half_width() const { return b_; }
  // nodes use compact ids 0..n-1; nsites of p1() is the node count
  const P1Mesh<2>& p1() const { return p1_; }
  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int node_site(int k) const { return nodes_[k]; }
  int node_of_site(int site) const { return node_of_[site]; }
  bool is_fine() const { return static_cast<int>(axis_.size()) == M_->lattice().side(); }

  // the cell [p, p + 1]^2 belongs to a unit rectangle
  bool unit_cell(const IVec2& p) const;
  // T_h^a u T_h^i contained in T_eps
  bool contains_interface(const RegionDecomposition& dec) const;

  // coarse gradients of a field given by its values at the nodes
  std::vector<Mat2> gradients(const Deformation<2>& y) const;
  // nodal values at the lattice sites (I_eps of the P1 interpolant of the nodes)
  Deformation<2> interpolate(const Deformation<2>& yh) const;

  struct Weight {
    int node;
    double lambda;
  };
  // I_eps weights of each lattice site
  const std::array<Weight, 3>& weights(int site) const { return w_[site]; }
  // coarse elements overlapping fine element e, with areas (physical units)
  const std::vector<std::pair<int, double>>& overlaps(int e) const { return ov_[e]; }
  double diameter(int T) const { return diam_[T]; }
  // max diam^2 / area over elements
  double shape_ratio() const;

 private:
  int rect_index(int x, int& unwrapped_x) const;

  const AtomisticMesh* M_;
  int b_;
  std::vector<int> axis_;
  P1Mesh<2> p1_;
  std::vector<int> nodes_, node_of_;
  std::vector<std::array<Weight, 3>> w_;
  std::vector<std::vector<std::pair<int, double>>> ov_;
  std::vector<double> diam_;
};

// ||grad I_eps y_h||_{L^p} and ||grad y_h||_{L^p} (entrywise l^p, p <= 0 max)
struct NormPair {
  double fine = 0.0;
  double coarse = 0.0;
};
NormPair interpolant_norms(const CoarseMesh& C, const Deformation<2>& yh, double p);

// random coarse field: uniform values in [-amp, amp] at the nodes, zero elsewhere
Deformation<2> random_coarse_field(const CoarseMesh& C, const Mat2& A, double amp, unsigned seed);

// ||grad(y - I_h y)||_{L^p} against {sum_{T in T_eps^c} |T| [h_T osc(grad y; omega_T^c)]^p}^{1/p}
struct InterpolationError {
  double lhs = 0.0;
  double rhs = 0.0;  // without C_I
  double ratio() const { return rhs > 0 ? lhs / rhs : 0.0; }
};
InterpolationError interpolation_error(const CoarseMesh& C, const RegionDecomposition& dec, const Deformation<2>& y,
                                       double p);

}  // namespace aclab
