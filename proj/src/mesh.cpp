#include "aclab/mesh.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

namespace aclab {

template <> void P1Mesh<1>::add(const Lattice<1>& L, const std::array<IVec<1>, 2>& c) {
  vert.push_back({L.index(c[0]), L.index(c[1])});
  coords.push_back(c);
  const double h = (c[1][0] - c[0][0]) * L.eps();
  grad.push_back({Vec<1>(-1.0 / h), Vec<1>(1.0 / h)});
  vol.push_back(std::abs(h));
}

template <> void P1Mesh<2>::add(const Lattice<2>& L, const std::array<IVec2, 3>& c) {
  vert.push_back({L.index(c[0]), L.index(c[1]), L.index(c[2])});
  coords.push_back(c);
  const double e = L.eps();
  const Vec2 a = c[0].cast<double>() * e, b = c[1].cast<double>() * e, d = c[2].cast<double>() * e;
  Mat2 B;
  B.col(0) = b - a;
  B.col(1) = d - a;
  const double det = B.determinant();
  if (std::abs(det) < 1e-300) throw std::invalid_argument("P1Mesh: degenerate element");
  const Mat2 Binv = B.inverse();
  // lambda_1 = row 0 of B^{-1} (x - a), lambda_2 = row 1
  const Vec2 g1 = Binv.row(0).transpose(), g2 = Binv.row(1).transpose();
  grad.push_back({-(g1 + g2), g1, g2});
  vol.push_back(0.5 * std::abs(det));
}

template <int D> Field<D> P1Mesh<D>::divergence_covector(const std::vector<Mat<D>>& S) const {
  Field<D> f = Field<D>::Zero(D, nsites);
  for (int e = 0; e < size(); ++e)
    for (int i = 0; i <= D; ++i) f.col(vert[e][i]) += vol[e] * (S[e] * grad[e][i]);
  return f;
}

template <int D> double P1Mesh<D>::total_volume() const {
  double v = 0.0;
  for (double x : vol) v += x;
  return v;
}

P1Mesh<1> chain_mesh(const Lattice<1>& L) {
  P1Mesh<1> m;
  m.nsites = L.size();
  m.eps = L.eps();
  for (int i = 0; i < L.size(); ++i) {
    const int n = L.site(i)[0];
    m.add(L, {IVec<1>(n - 1), IVec<1>(n)});
  }
  return m;
}

// ---------------------------------------------------------------------------

Tri AtomisticMesh::reference_tri(int type) {
  if (type == 0) return {IVec2(0, 0), IVec2(1, 0), IVec2(1, 1)};
  return {IVec2(0, 0), IVec2(1, 1), IVec2(0, 1)};
}

Tri AtomisticMesh::tri(int e) const {
  Tri t = reference_tri(type_of(e));
  const IVec2 p = cell_of(e);
  for (auto& v : t) v += p;
  return t;
}

AtomisticMesh::AtomisticMesh(int N) : L_(N) {
  p1_.nsites = L_.size();
  p1_.eps = L_.eps();
  const int ne = num_elements();
  elem_edges_.resize(ne);
  edge_elems_.assign(num_edges(), {-1, -1});
  for (int c = 0; c < L_.size(); ++c) {
    const IVec2 p = L_.site(c);
    for (int type = 0; type < 2; ++type) {
      const int e = 2 * c + type;
      Tri t = reference_tri(type);
      for (auto& v : t) v += p;
      p1_.add(L_, t);
      auto edge = [&](const IVec2& q, int kind) { return 3 * L_.index(q) + kind; };
      if (type == 0)
        elem_edges_[e] = {edge(p + IVec2(1, 0), 1), edge(p, 2), edge(p, 0)};
      else
        elem_edges_[e] = {edge(p + IVec2(0, 1), 0), edge(p, 1), edge(p, 2)};
      for (int f : elem_edges_[e]) {
        auto& slot = edge_elems_[f];
        (slot[0] < 0 ? slot[0] : slot[1]) = e;
      }
    }
  }
  for (auto& s : edge_elems_)
    if (s[0] < 0 || s[1] < 0) throw std::logic_error("AtomisticMesh: edge without two elements");

  std::vector<std::vector<int>> at_site(L_.size());
  for (int e = 0; e < ne; ++e)
    for (int v : p1_.vert[e]) at_site[v].push_back(e);
  vnbr_.resize(ne);
  for (int e = 0; e < ne; ++e) {
    std::set<int> s;
    for (int v : p1_.vert[e]) s.insert(at_site[v].begin(), at_site[v].end());
    vnbr_[e].assign(s.begin(), s.end());
  }
}

int AtomisticMesh::local_edge(int e, int f) const {
  for (int i = 0; i < 3; ++i)
    if (elem_edges_[e][i] == f) return i;
  return -1;
}

Vec2 AtomisticMesh::midpoint_local(int e, int i) const {
  const Tri t = tri(e);
  return 0.5 * (t[(i + 1) % 3] + t[(i + 2) % 3]).cast<double>();
}

const Vec2& AtomisticMesh::reference_midpoint(int type, int i) {
  static const auto table = [] {
    std::array<std::array<Vec2, 3>, 2> m;
    for (int t = 0; t < 2; ++t) {
      const Tri r = reference_tri(t);
      for (int j = 0; j < 3; ++j) m[t][j] = 0.5 * (r[(j + 1) % 3] + r[(j + 2) % 3]).cast<double>();
    }
    return m;
  }();
  return table[type][i];
}

std::array<IVec2, 2> AtomisticMesh::edge_segment(int f) const {
  const IVec2 p = L_.site(f / 3);
  static const IVec2 dir[3] = {IVec2(1, 0), IVec2(0, 1), IVec2(1, 1)};
  return {p, p + dir[f % 3]};
}

Vec2 AtomisticMesh::edge_midpoint(int f) const {
  const auto s = edge_segment(f);
  return 0.5 * (s[0] + s[1]).cast<double>();
}

// ---------------------------------------------------------------------------

template <int D> double lp_norm(const P1Mesh<D>& m, const std::vector<Mat<D>>& G, double p) {
  if (p <= 0) {
    double mx = 0.0;
    for (auto& g : G) mx = std::max(mx, g.cwiseAbs().maxCoeff());
    return mx;
  }
  double s = 0.0;
  for (int e = 0; e < m.size(); ++e) s += m.vol[e] * G[e].cwiseAbs().array().pow(p).sum();
  return std::pow(s, 1.0 / p);
}

double bond_norm_atomistic(const Lattice<2>& L, const Deformation<2>& y, double p) {
  double s = 0.0;
  for (int x = 0; x < L.size(); ++x)
    for (int j = 0; j < 2; ++j) {
      const Vec2 d = finite_difference(L, y, x, j == 0 ? IVec2(1, 0) : IVec2(0, 1));
      if (p <= 0)
        s = std::max(s, d.cwiseAbs().maxCoeff());
      else
        s += L.eps() * L.eps() * d.cwiseAbs().array().pow(p).sum();
    }
  return p <= 0 ? s : std::pow(s, 1.0 / p);
}

double oscillation(const std::vector<Mat2>& G, const std::vector<int>& set, double eps) {
  if (set.empty()) throw std::invalid_argument("oscillation: empty region");
  double m = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) m = std::max(m, (G[set[i]] - G[set[j]]).norm());
  return m / eps;
}

void write_mesh_csv(const AtomisticMesh& M, const std::vector<int>& labels, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "element,x0,y0,x1,y1,x2,y2,label\n";
  const char* names = "aic";
  for (int e = 0; e < M.num_elements(); ++e) {
    const Tri t = M.tri(e);
    os << e;
    for (auto& v : t) os << ',' << v[0] * M.eps() << ',' << v[1] * M.eps();
    os << ',' << (labels.empty() ? '-' : names[labels[e]]) << '\n';
  }
}

template struct P1Mesh<1>;
template struct P1Mesh<2>;
template double lp_norm<1>(const P1Mesh<1>&, const std::vector<Mat<1>>&, double);
template double lp_norm<2>(const P1Mesh<2>&, const std::vector<Mat<2>>&, double);

}  // namespace aclab
