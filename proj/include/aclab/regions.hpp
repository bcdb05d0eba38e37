#pragma once

#include "aclab/mesh.hpp"

#include <optional>
#include <string>
#include <vector>

namespace aclab {

// Portion of the bond 0 -> r (lattice units) inside one element of the
// atomistic mesh: element at cell dcell of the given type.
struct BondPiece {
  IVec2 dcell;
  int type = 0;
  double interior = 0.0;  // parameter length strictly inside
  double on_edge = 0.0;   // parameter length inside an edge
  int edge_local = -1;    // which local edge, if on_edge > 0
  bool touch = false;     // closed sets meet (possibly only in a point)
};

std::vector<BondPiece> bond_pattern(const IVec2& r);

enum Region : int { ATOMISTIC = 0, INTERFACE = 1, CONTINUUM = 2 };

struct Bond {
  int site = 0;  // origin, lattice index
  int r = 0;     // stencil position
  bool operator==(const Bond& o) const { return site == o.site && r == o.r; }
};

class RegionDecomposition {
 public:
  RegionDecomposition(const AtomisticMesh& M, const Stencil<2>& R, std::vector<int> labels);

  const AtomisticMesh& mesh() const { return *M_; }
  const Stencil<2>& stencil() const { return R_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(int e) const { return labels_[e]; }
  std::vector<int> elements_with(int region) const;

  const std::vector<BondPiece>& pattern(int r) const { return patterns_[r]; }
  int piece_element(int site, const BondPiece& p) const;

  bool in_La(int site) const { return in_La_[site]; }
  const std::vector<int>& La() const { return La_; }
  const std::vector<Bond>& Bi() const { return Bi_; }
  int find_Bi(const Bond& b) const;

  // fraction of the bond lying in the closed union of elements whose label is in `mask`
  double covered(const Bond& b, unsigned mask) const;
  // parameter length of the bond lying on the boundary of Omega_i
  double on_interface_boundary(const Bond& b) const;
  bool edge_on_interface_boundary(int f) const;

  // chi_T (plain) or chi_T^i (interface) bond averages
  double chi(const Bond& b, const BondPiece& p, ChiVariant v) const;

  // the non-interaction condition: bonds of L_a stay in Omega_a u Omega_i
  bool valid() const { return !violation_; }
  const std::optional<Bond>& violation() const { return violation_; }
  void require_valid() const;
  bool atomistic_connected() const { return connected_; }

 private:
  const AtomisticMesh* M_;
  Stencil<2> R_;
  std::vector<int> labels_;
  std::vector<std::vector<BondPiece>> patterns_;
  std::vector<char> in_La_;
  std::vector<int> La_;
  std::vector<Bond> Bi_;
  std::optional<Bond> violation_;
  bool connected_ = false;
};

// Atomistic block of cells [-a, a-1]^2, interface ring of `thickness` cells,
// continuum elsewhere.
std::vector<int> block_labels(const AtomisticMesh& M, int a, int thickness);
// Every element interface (pure interface functionals, e.g. the counterexamples).
std::vector<int> uniform_labels(const AtomisticMesh& M, int region);

// Interaction neighbourhoods, stored as element sets.
class Neighbourhoods {
 public:
  Neighbourhoods(const RegionDecomposition& dec);
  std::vector<int> omega_a(int e) const;   // elements meeting {x + t1 eps r1 + t2 eps r2}
  std::vector<int> omega(int e) const;     // (omega_a u vertex patch) minus atomistic elements
  std::vector<int> omega_c(int e) const;   // continuum elements of the vertex patch

 private:
  const RegionDecomposition* dec_;
  std::vector<std::pair<IVec2, int>> pat_[2];
};

// max over interface edges of the shortest midpoint path to an atomistic
// edge, in units of eps.
double interface_width(const RegionDecomposition& dec);
// shortest-path distances (units of eps) from the atomistic edges
std::vector<double> atomistic_edge_distance(const RegionDecomposition& dec);

}  // namespace aclab
