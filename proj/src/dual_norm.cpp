#include "aclab/dual_norm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace aclab {

double conjugate_exponent(double p) {
  if (p <= 0) return 1.0;
  if (p == 1.0) return 0.0;
  return p / (p - 1.0);
}

double dual_norm_1d_stress(const Lattice<1>& L, const std::vector<double>& R, double p) {
  const int n = static_cast<int>(R.size());
  auto norm = [&](double c) {
    double s = 0.0;
    for (double r : R) s = p <= 0 ? std::max(s, std::abs(r - c)) : s + L.eps() * std::pow(std::abs(r - c), p);
    return p <= 0 ? s : std::pow(s, 1.0 / p);
  };
  std::vector<double> v = R;
  std::sort(v.begin(), v.end());
  double c;
  if (p <= 0)
    c = 0.5 * (v.front() + v.back());
  else if (p == 1.0)
    c = v[n / 2];
  else if (p == 2.0)
    c = std::accumulate(R.begin(), R.end(), 0.0) / n;
  else {
    // convex in c
    double a = v.front(), b = v.back();
    for (int it = 0; it < 200; ++it) {
      const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
      if (norm(m1) < norm(m2))
        b = m2;
      else
        a = m1;
    }
    c = 0.5 * (a + b);
  }
  return norm(c);
}

DualNorm dual_norm_1d(const Lattice<1>& L, const ForceField<1>& f, double p) {
  const double s = f.sum(), scale = f.cwiseAbs().sum();
  if (std::abs(s) > 1e-10 * std::max(1.0, scale)) throw std::invalid_argument("dual_norm_1d: forces do not sum to zero");
  std::vector<double> G(L.size(), 0.0);
  const int N = L.N();
  auto at = [&](int n) { return L.index(IVec<1>::Constant(n)); };
  for (int m = -N + 1; m < N; ++m) G[at(m + 1)] = G[at(m)] - f(0, at(m));
  // f_m = G_m - G_{m+1} means <Phi, v> = eps sum G_n v'_n
  DualNorm d;
  d.p = p;
  d.exact = true;
  d.value = d.lower = d.upper = dual_norm_1d_stress(L, G, p);
  return d;
}

namespace {

Field<2> apply_laplacian(const P1Mesh<2>& m, const Field<2>& u) {
  Field<2> out = Field<2>::Zero(2, m.nsites);
  for (int e = 0; e < m.size(); ++e) {
    Mat2 G = Mat2::Zero();
    for (int i = 0; i < 3; ++i) G += u.col(m.vert[e][i]) * m.grad[e][i].transpose();
    for (int i = 0; i < 3; ++i) out.col(m.vert[e][i]) += m.vol[e] * (G * m.grad[e][i]);
  }
  return out;
}

void project_mean_zero(Field<2>& v) {
  const Vec2 mean = v.rowwise().mean();
  v.colwise() -= mean;
}

std::vector<Mat2> p1_gradient(const P1Mesh<2>& m, const Field<2>& u) {
  std::vector<Mat2> G(m.size(), Mat2::Zero());
  for (int e = 0; e < m.size(); ++e)
    for (int i = 0; i < 3; ++i) G[e] += u.col(m.vert[e][i]) * m.grad[e][i].transpose();
  return G;
}

void check_balanced(const ForceField<2>& f) {
  const Vec2 s = f.rowwise().sum();
  const double scale = f.cwiseAbs().sum();
  if (s.norm() > 1e-10 * std::max(1.0, scale)) throw std::invalid_argument("dual_norm: forces do not sum to zero");
}

}  // namespace

DualNorm dual_norm_p2(const P1Mesh<2>& mesh, const ForceField<2>& f_in, double tol, Field<2>* maximiser) {
  check_balanced(f_in);
  DualNorm d;
  d.p = 2.0;
  d.exact = true;
  Field<2> f = f_in;
  project_mean_zero(f);
  const double fn = f.norm();
  Field<2> u = Field<2>::Zero(2, mesh.nsites);
  if (fn == 0.0) {
    if (maximiser) *maximiser = u;
    return d;
  }
  Field<2> r = f, p = r;
  double rr = r.squaredNorm();
  int it = 0;
  const int maxit = 20 * mesh.nsites;
  for (; it < maxit && std::sqrt(rr) > tol * fn; ++it) {
    Field<2> Ap = apply_laplacian(mesh, p);
    project_mean_zero(Ap);
    const double alpha = rr / (p.cwiseProduct(Ap)).sum();
    u += alpha * p;
    r -= alpha * Ap;
    const double rr2 = r.squaredNorm();
    p = r + (rr2 / rr) * p;
    rr = rr2;
  }
  project_mean_zero(u);
  Field<2> res = f - apply_laplacian(mesh, u);
  d.iterations = it;
  d.galerkin_residual = res.norm() / fn;
  if (d.galerkin_residual > 1e-8) throw std::runtime_error("dual_norm_p2: conjugate gradients did not converge");
  d.value = d.lower = d.upper = std::sqrt(std::max(0.0, f_in.cwiseProduct(u).sum()));
  if (maximiser) *maximiser = u;
  return d;
}

DualNorm dual_norm_bounds(const P1Mesh<2>& mesh, const ForceField<2>& f, double p,
                          const std::vector<std::vector<Mat2>>& reps) {
  check_balanced(f);
  DualNorm d;
  d.p = p;
  d.exact = false;
  const double q = conjugate_exponent(p);
  d.upper = std::numeric_limits<double>::infinity();
  for (auto& S : reps) d.upper = std::min(d.upper, lp_norm<2>(mesh, S, p));

  double lo = 0.0;
  Field<2> u;
  dual_norm_p2(mesh, f, 1e-12, &u);
  const double nu = lp_norm<2>(mesh, p1_gradient(mesh, u), q);
  if (nu > 0) lo = std::abs(f.cwiseProduct(u).sum()) / nu;

  // hat functions at the sites carrying the largest forces
  std::vector<int> order(mesh.nsites);
  std::iota(order.begin(), order.end(), 0);
  const int k = std::min<int>(32, mesh.nsites);
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](int a, int b) { return f.col(a).cwiseAbs().maxCoeff() > f.col(b).cwiseAbs().maxCoeff(); });
  std::vector<std::vector<int>> star(mesh.nsites);
  for (int e = 0; e < mesh.size(); ++e)
    for (int i = 0; i < 3; ++i) star[mesh.vert[e][i]].push_back(e);
  for (int t = 0; t < k; ++t) {
    const int x = order[t];
    for (int j = 0; j < 2; ++j) {
      if (f(j, x) == 0.0) continue;
      // grad(phi_x e_j) has one nonzero row, equal to grad phi_x
      double s = 0.0;
      for (int e : star[x]) {
        Vec2 g = Vec2::Zero();
        for (int i = 0; i < 3; ++i)
          if (mesh.vert[e][i] == x) g += mesh.grad[e][i];
        if (q <= 0)
          s = std::max(s, g.cwiseAbs().maxCoeff());
        else
          s += mesh.vol[e] * g.cwiseAbs().array().pow(q).sum();
      }
      const double nrm = q <= 0 ? s : std::pow(s, 1.0 / q);
      if (nrm > 0) lo = std::max(lo, std::abs(f(j, x)) / nrm);
    }
  }
  d.lower = d.value = lo;
  d.note = "bounds only";
  return d;
}

DualNorm dual_norm(const P1Mesh<2>& mesh, const ForceField<2>& f, double p,
                   const std::vector<std::vector<Mat2>>& reps) {
  if (p == 2.0) {
    DualNorm d = dual_norm_p2(mesh, f);
    if (!reps.empty()) {
      d.upper = std::numeric_limits<double>::infinity();
      for (auto& S : reps) d.upper = std::min(d.upper, lp_norm<2>(mesh, S, 2.0));
    }
    return d;
  }
  return dual_norm_bounds(mesh, f, p, reps);
}

}  // namespace aclab
