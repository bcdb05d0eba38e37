#include "aclab/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace aclab {

namespace {

std::vector<int> graded_axis(int N, int b) {
  std::vector<int> ax;
  if (b >= N) {
    for (int x = -N + 1; x <= N; ++x) ax.push_back(x);
    return ax;
  }
  for (int x = -b; x <= b; ++x) ax.push_back(x);
  int x = b, h = 2;
  while (x + h < N) {
    x += h;
    ax.push_back(x);
    ax.push_back(-x);
    h *= 2;
  }
  ax.push_back(N);
  std::sort(ax.begin(), ax.end());
  return ax;
}

Polygon to_polygon(const std::array<Vec2, 3>& t) { return {t[0], t[1], t[2]}; }

}  // namespace

CoarseMesh::CoarseMesh(const AtomisticMesh& M, int half_width) : M_(&M), b_(std::min(half_width, M.N())) {
  if (half_width < 0) throw std::invalid_argument("CoarseMesh: negative half width");
  const Lattice<2>& L = M.lattice();
  const int N = L.N();
  axis_ = graded_axis(N, b_);
  const int n = static_cast<int>(axis_.size());

  node_of_.assign(L.size(), -1);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int s = L.index(IVec2(axis_[i], axis_[j]));
      node_of_[s] = static_cast<int>(nodes_.size());
      nodes_.push_back(s);
    }

  // rectangle (i, j) spans [axis_[i], axis_[i+1]], the last one wrapping
  auto upper = [&](int i) { return i + 1 < n ? axis_[i + 1] : axis_[0] + 2 * N; };
  p1_.eps = L.eps();
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const IVec2 p00(axis_[i], axis_[j]), p11(upper(i), upper(j));
      const IVec2 p10(p11[0], p00[1]), p01(p00[0], p11[1]);
      p1_.add(L, {p00, p10, p11});
      p1_.add(L, {p00, p11, p01});
    }
  for (auto& v : p1_.vert)
    for (auto& s : v) s = node_of_[s];
  p1_.nsites = num_nodes();
  for (int T = 0; T < p1_.size(); ++T) {
    double d = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int c = a + 1; c < 3; ++c) d = std::max(d, (p1_.coords[T][a] - p1_.coords[T][c]).cast<double>().norm());
    diam_.push_back(d * L.eps());
  }

  // interpolation weights of every site
  w_.resize(L.size());
  for (int s = 0; s < L.size(); ++s) {
    const IVec2 x = L.site(s);
    int ux, uy;
    const int i = rect_index(x[0], ux), j = rect_index(x[1], uy);
    const double sx = double(ux - axis_[i]) / (upper(i) - axis_[i]);
    const double sy = double(uy - axis_[j]) / (upper(j) - axis_[j]);
    const int base = 2 * (i + n * j);
    if (sx >= sy) {
      const auto& v = p1_.vert[base];
      w_[s] = {Weight{v[0], 1.0 - sx}, Weight{v[1], sx - sy}, Weight{v[2], sy}};
    } else {
      const auto& v = p1_.vert[base + 1];
      w_[s] = {Weight{v[0], 1.0 - sy}, Weight{v[1], sx}, Weight{v[2], sy - sx}};
    }
  }

  // fine/coarse overlaps; a fine cell lies inside exactly one rectangle
  ov_.resize(M.num_elements());
  for (int e = 0; e < M.num_elements(); ++e) {
    const IVec2 p = M.cell_of(e);
    int ux, uy;
    const int i = rect_index(p[0], ux), j = rect_index(p[1], uy);
    const IVec2 shift(ux - p[0], uy - p[1]);
    std::array<Vec2, 3> ft;
    const Tri t = M.tri(e);
    for (int k = 0; k < 3; ++k) ft[k] = (t[k] + shift).cast<double>() * L.eps();
    const double fa = M.element_area();
    for (int type = 0; type < 2; ++type) {
      const int T = 2 * (i + n * j) + type;
      std::array<Vec2, 3> ct;
      for (int k = 0; k < 3; ++k) ct[k] = p1_.coords[T][k].cast<double>() * L.eps();
      const double a = polygon_area(clip_convex(to_polygon(ft), to_polygon(ct)));
      if (a > 1e-12 * fa) ov_[e].push_back({T, a});
    }
    // renormalise so the pieces add up to |T'| exactly
    double tot = 0.0;
    for (auto& [T, a] : ov_[e]) tot += a;
    for (auto& [T, a] : ov_[e]) a *= fa / tot;
  }
}

int CoarseMesh::rect_index(int x, int& unwrapped_x) const {
  const int n = static_cast<int>(axis_.size());
  const int N = M_->N();
  if (x < axis_[0]) {
    unwrapped_x = x + 2 * N;
    return n - 1;
  }
  const int i = static_cast<int>(std::upper_bound(axis_.begin(), axis_.end(), x) - axis_.begin()) - 1;
  unwrapped_x = x;
  return i;
}

bool CoarseMesh::unit_cell(const IVec2& p) const {
  for (int k = 0; k < 2; ++k) {
    int ux;
    const int i = rect_index(p[k], ux);
    const int n = static_cast<int>(axis_.size());
    const int hi = i + 1 < n ? axis_[i + 1] : axis_[0] + 2 * M_->N();
    if (hi - axis_[i] != 1) return false;
  }
  return true;
}

bool CoarseMesh::contains_interface(const RegionDecomposition& dec) const {
  for (int e = 0; e < M_->num_elements(); ++e)
    if (dec.label(e) != CONTINUUM && !unit_cell(M_->cell_of(e))) return false;
  return true;
}

std::vector<Mat2> CoarseMesh::gradients(const Deformation<2>& y) const {
  std::vector<Mat2> G(p1_.size());
  for (int T = 0; T < p1_.size(); ++T) {
    G[T] = y.A;
    for (int k = 0; k < 3; ++k) G[T] += y.u.col(nodes_[p1_.vert[T][k]]) * p1_.grad[T][k].transpose();
  }
  return G;
}

Deformation<2> CoarseMesh::interpolate(const Deformation<2>& yh) const {
  Deformation<2> y = Deformation<2>::homogeneous(M_->lattice(), yh.A);
  for (int s = 0; s < M_->lattice().size(); ++s)
    for (auto& w : w_[s]) y.u.col(s) += w.lambda * yh.u.col(nodes_[w.node]);
  return y;
}

double CoarseMesh::shape_ratio() const {
  double r = 0.0;
  for (int T = 0; T < p1_.size(); ++T) r = std::max(r, diam_[T] * diam_[T] / p1_.vol[T]);
  return r;
}

NormPair interpolant_norms(const CoarseMesh& C, const Deformation<2>& yh, double p) {
  NormPair out;
  out.coarse = lp_norm(C.p1(), C.gradients(yh), p);
  out.fine = lp_norm(C.fine().p1(), C.fine().gradients(C.interpolate(yh)), p);
  return out;
}

Deformation<2> random_coarse_field(const CoarseMesh& C, const Mat2& A, double amp, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-amp, amp);
  Deformation<2> y = Deformation<2>::homogeneous(C.fine().lattice(), A);
  for (int k = 0; k < C.num_nodes(); ++k)
    for (int c = 0; c < 2; ++c) y.u(c, C.node_site(k)) = U(rng);
  return y;
}

InterpolationError interpolation_error(const CoarseMesh& C, const RegionDecomposition& dec, const Deformation<2>& y,
                                       double p) {
  const AtomisticMesh& M = C.fine();
  const auto Gf = M.gradients(y);
  const auto Gc = C.gradients(y);
  InterpolationError out;
  double lhs = 0.0, rhs = 0.0;
  for (int e = 0; e < M.num_elements(); ++e)
    for (auto& [T, a] : C.overlaps(e)) {
      const Mat2 d = Gf[e] - Gc[T];
      if (p <= 0)
        lhs = std::max(lhs, d.cwiseAbs().maxCoeff());
      else
        lhs += a * d.cwiseAbs().array().pow(p).sum();
    }
  Neighbourhoods nb(dec);
  for (int e : dec.elements_with(CONTINUUM)) {
    double h = 0.0;
    for (auto& [T, a] : C.overlaps(e)) h = std::max(h, C.diameter(T));
    const double v = h * oscillation(Gf, nb.omega_c(e), M.eps());
    if (p <= 0)
      rhs = std::max(rhs, v);
    else
      rhs += M.element_area() * std::pow(v, p);
  }
  out.lhs = p <= 0 ? lhs : std::pow(lhs, 1.0 / p);
  out.rhs = p <= 0 ? rhs : std::pow(rhs, 1.0 / p);
  return out;
}

}  // namespace aclab
