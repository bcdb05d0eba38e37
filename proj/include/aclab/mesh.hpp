#pragma once

#include "aclab/geometry.hpp"
#include "aclab/lattice.hpp"

#include <array>
#include <string>
#include <vector>

namespace aclab {

using P0Tensor = std::vector<Mat2>;

// Periodic P1 simplex mesh whose vertices are lattice sites.  In 1D the
// elements are the intervals (x_{n-1}, x_n); in 2D either the atomistic
// triangulation or a coarse lattice-vertex triangulation.
template <int D> struct P1Mesh {
  int nsites = 0;
  double eps = 1.0;
  std::vector<std::array<int, D + 1>> vert;        // site indices
  std::vector<std::array<IVec<D>, D + 1>> coords;  // unwrapped integer coordinates
  std::vector<std::array<Vec<D>, D + 1>> grad;     // barycentric gradients
  std::vector<double> vol;

  int size() const { return static_cast<int>(vert.size()); }
  void add(const Lattice<D>& L, const std::array<IVec<D>, D + 1>& c);

  Mat<D> gradient(const Deformation<D>& y, int e) const {
    Mat<D> G = y.A;
    for (int i = 0; i <= D; ++i) G += y.u.col(vert[e][i]) * grad[e][i].transpose();
    return G;
  }
  std::vector<Mat<D>> gradients(const Deformation<D>& y) const {
    std::vector<Mat<D>> g(size());
    for (int e = 0; e < size(); ++e) g[e] = gradient(y, e);
    return g;
  }
  // nodal covector of z -> sum_T |T| S(T) : grad z(T)
  Field<D> divergence_covector(const std::vector<Mat<D>>& S) const;
  double total_volume() const;
};

P1Mesh<1> chain_mesh(const Lattice<1>& L);

// The atomistic triangulation: every cell [p, p+1]^2 is split along its
// (1,1) diagonal into lower {p, p+e1, p+e1+e2} and upper {p, p+e1+e2, p+e2}.
// Element id 2*cell+type, edge id 3*cell+kind with kinds h=[p,p+e1],
// v=[p,p+e2], d=[p,p+e1+e2]; local edge i is opposite local vertex i.
class AtomisticMesh {
 public:
  explicit AtomisticMesh(int N);

  const Lattice<2>& lattice() const { return L_; }
  int N() const { return L_.N(); }
  double eps() const { return L_.eps(); }
  int num_elements() const { return 2 * L_.size(); }
  int num_edges() const { return 3 * L_.size(); }
  double element_area() const { return 0.5 * eps() * eps(); }

  int element(const IVec2& cell, int type) const { return 2 * L_.index(cell) + type; }
  IVec2 cell_of(int e) const { return L_.site(e / 2); }
  int type_of(int e) const { return e % 2; }
  // vertices in lattice units, relative to the canonical cell corner
  Tri tri(int e) const;
  static Tri reference_tri(int type);

  const std::array<int, 3>& element_edges(int e) const { return elem_edges_[e]; }
  const std::array<int, 2>& edge_elements(int f) const { return edge_elems_[f]; }
  int local_edge(int e, int f) const;
  // midpoint of local edge i of element e, lattice units, element frame
  Vec2 midpoint_local(int e, int i) const;
  // same, relative to the cell corner; differences agree with midpoint_local
  static const Vec2& reference_midpoint(int type, int i);
  // midpoint of edge f in canonical lattice units
  Vec2 edge_midpoint(int f) const;
  std::array<IVec2, 2> edge_segment(int f) const;

  // grad lambda_i, physical units (1/eps scale)
  const std::array<Vec2, 3>& grad_lambda(int e) const { return p1_.grad[e]; }
  const P1Mesh<2>& p1() const { return p1_; }

  std::vector<Mat2> gradients(const Deformation<2>& y) const { return p1_.gradients(y); }

  // elements sharing at least a vertex with e (e included)
  const std::vector<int>& vertex_neighbours(int e) const { return vnbr_[e]; }

 private:
  Lattice<2> L_;
  P1Mesh<2> p1_;
  std::vector<std::array<int, 3>> elem_edges_;
  std::vector<std::array<int, 2>> edge_elems_;
  std::vector<std::vector<int>> vnbr_;
};

// ||grad v||_{L^p} for a P0 field with entrywise l^p matrix norm; p <= 0 means infinity.
template <int D> double lp_norm(const P1Mesh<D>& m, const std::vector<Mat<D>>& G, double p);

// Bond form eps^2 sum_j sum_x |D_{e_j} y|_p^p, p <= 0 means max.
double bond_norm_atomistic(const Lattice<2>& L, const Deformation<2>& y, double p);

// max over pairs in `set` of |G(T) - G(T')|_F / eps
double oscillation(const std::vector<Mat2>& G, const std::vector<int>& set, double eps);

void write_mesh_csv(const AtomisticMesh& M, const std::vector<int>& labels, const std::string& path);

}  // namespace aclab
