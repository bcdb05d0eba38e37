#include "aclab/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace aclab {

namespace {
constexpr double kPi = std::numbers::pi;

StressField difference(const StressField& a, const StressField& b) {
  StressField d(a.size());
  for (std::size_t e = 0; e < a.size(); ++e) d[e] = a[e] - b[e];
  return d;
}
}  // namespace

std::vector<ConsistencyReport> model_error(CorrectorSolver& C, const Deformation<2>& y, const std::vector<double>& ps) {
  const AcEnergy& E = C.energy();
  const auto& M = E.mesh();
  // non-owning alias; E outlives Ea
  AtomisticEnergy<2> Ea(M.lattice(), std::shared_ptr<const SitePotential<2>>(std::shared_ptr<void>(), &E.potential()));
  const ForceField<2> f = E.forces(y) - Ea.forces(y);
  const StressErrorReport rep = modified_stress_and_error(C, y);
  const std::vector<StressField> reps = {rep.R, difference(rep.sigma_ac, rep.sigma_a)};
  std::vector<ConsistencyReport> out;
  for (double p : ps) {
    ConsistencyReport r;
    r.p = p;
    const DualNorm d = dual_norm(M.p1(), f, p, reps);
    r.exact = d.exact;
    r.lower = d.lower;
    r.upper = d.upper;
    r.lhs = d.exact ? d.value : d.upper;
    r.rhs = rep.rhs(p);
    r.elementwise = rep.all_hold;
    r.worst_ratio = rep.worst_ratio;
    r.rows = rep.rows;
    // small absolute allowance for roundoff at consistent states
    r.holds = r.elementwise && r.lhs <= r.rhs * (1.0 + 1e-12) + 1e-12;
    r.note = d.exact ? "exact" : "upper bound from the stress representations";
    out.push_back(std::move(r));
  }
  return out;
}

DualNorm model_error_plain(const AtomisticMesh& M, const Energy<2>& E, const Energy<2>& Ea, const Deformation<2>& y,
                           double p) {
  return dual_norm(M.p1(), E.forces(y) - Ea.forces(y), p);
}

// ---------------------------------------------------------------------------

QnlConsistency qnl_consistency_1d(const Chain1d& c, const Deformation<1>& y, int K, double p) {
  QnlConsistency q;
  q.p = p;
  ChainEnergy ea(c, ChainModel::atomistic), eq(c, ChainModel::qnl, K);
  const auto Ga = ea.stress(y), Gq = eq.stress(y);
  std::vector<double> R(Ga.size());
  for (std::size_t i = 0; i < R.size(); ++i) R[i] = Ga[i] - Gq[i];
  q.lhs = dual_norm_1d_stress(c.L, R, p);
  const auto Rf = qnl_residual_formula(c, y, K, false);
  for (std::size_t i = 0; i < R.size(); ++i) q.formula_defect = std::max(q.formula_defect, std::abs(R[i] - Rf[i]));

  const auto yp = c.yprime(y);
  const int N = c.N();
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (int n = -N + 1; n <= N; ++n) {
    for (double g : {2 * yp[c.at(n)], yp[c.at(n)] + yp[c.at(n + 1)]}) {
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
  }
  q.m2p = sup_abs_d2(*c.phi2, lo, hi);
  q.m2pp = sup_abs_d3(*c.phi2, lo, hi);

  std::vector<int> Nc, Ncp;
  for (int n = -N + 1; n <= N; ++n) {
    if (std::abs(n) > K) Nc.push_back(n);
    if (n <= -K - 1 || n >= K + 2) Ncp.push_back(n);
  }
  const auto y2 = second_difference(c, yp), y3 = third_difference(c, yp);
  const double eps = c.eps();
  const double p2 = p <= 0 ? p : 2 * p;
  q.interface_term = eps * q.m2p * lp_eps(c.L, y2, {-K - 1, K + 1}, p);
  q.y3_term = eps * eps * q.m2p * lp_eps(c.L, y3, Ncp, p);
  const double n2 = lp_eps(c.L, y2, Nc, p2);
  q.y2sq_term = eps * eps * q.m2pp * n2 * n2;
  q.rhs = q.interface_term + q.y3_term + q.y2sq_term;
  q.rhs_narrow = eps * q.m2p * lp_eps(c.L, y2, {-K, K}, p) + q.y3_term + q.y2sq_term;
  q.holds = q.lhs <= q.rhs * (1.0 + 1e-12) + 1e-14;
  return q;
}

QceSharpness qce_sharpness_1d(const Chain1d& c, double A, int K, double p) {
  QceSharpness s;
  s.p = p;
  const auto y = Deformation<1>::homogeneous(c.L, Mat<1>::Constant(A));
  ChainEnergy ea(c, ChainModel::atomistic), eq(c, ChainModel::qce, K);
  const ForceField<1> f = eq.forces(y) - ea.forces(y);
  s.dual = dual_norm_1d(c.L, f, p).value;

  const double eps = c.eps();
  const double q = conjugate_exponent(p);
  const double inv_p = p <= 0 ? 0.0 : 1.0 / p;
  const double inv_q = q <= 0 ? 0.0 : 1.0 / q;
  const double phi = Chain1d::dphi(*c.phi2, 2 * A);
  s.bound = 2.0 * std::pow(4.0, -inv_q) * std::pow(eps, inv_p) * std::abs(phi);

  // u'_n = sign(phi) (4 eps)^{-1/p'} at n = -K-1, K+2 and minus that at n = -K+1, K
  const double a = (phi >= 0 ? 1.0 : -1.0) * std::pow(4.0 * eps, -inv_q);
  std::vector<double> up(c.L.size(), 0.0);
  up[c.at(-K - 1)] += a;
  up[c.at(K + 2)] += a;
  up[c.at(-K + 1)] -= a;
  up[c.at(K)] -= a;
  s.test_norm = lp_eps(c.L, up, [&] {
    std::vector<int> all;
    for (int n = -c.N() + 1; n <= c.N(); ++n) all.push_back(n);
    return all;
  }(), q);
  // u_n = u_{n-1} + eps u'_n, u_{-N} = 0
  Field<1> u = Field<1>::Zero(1, c.L.size());
  double acc = 0.0;
  for (int n = -c.N() + 1; n <= c.N(); ++n) {
    acc += eps * up[c.at(n)];
    u(0, c.at(n)) = acc;
  }
  s.test_value = f.cwiseProduct(u).sum();
  return s;
}

// ---------------------------------------------------------------------------

Deformation<2> counterexample_deformation(const Lattice<2>& L, const Mat2& F, double amp) {
  Deformation<2> y = Deformation<2>::homogeneous(L, F);
  for (int i = 0; i < L.size(); ++i) {
    const Vec2 x = L.coord(i);
    const double w = 1.0 + std::sin(kPi * x[1]);
    y.u.col(i) = amp * w * Vec2(std::cos(kPi * x[0]), std::sin(kPi * x[0]));
  }
  return y;
}

Field<2> locality_test_function(const Lattice<2>& L, const Deformation<2>& y) {
  const int N = L.N(), h = N / 2;
  auto du = [&](int i) { return Vec2(y.u.col(L.index(IVec2(i, h)))); };
  // kinks at site 1 and site N + 1 = -N + 1
  const Vec2 U1 = du(1), U0 = du(-N + 1);
  Field<2> u(2, L.size());
  for (int s = 0; s < L.size(); ++s) {
    const int i = L.site(s)[0];
    // distance from the kink at 1, measured periodically in (1 - 2N, 1]
    const int t = i <= 1 ? 1 - i : 1 - i + 2 * N;  // 0 .. 2N-1
    const double lam = t <= N ? double(t) / N : double(2 * N - t) / N;
    u.col(s) = (1.0 - lam) * U1 + lam * U0;
  }
  return u;
}

Field<2> scaling_test_function(const Lattice<2>& L, const Deformation<2>& y) {
  const int h = L.N() / 2;
  Field<2> u(2, L.size());
  for (int s = 0; s < L.size(); ++s) u.col(s) = y.u.col(L.index(IVec2(L.site(s)[0], h)));
  return u;
}

namespace {

double direct_ratio(const AtomisticMesh& M, const ForceField<2>& f, const Field<2>& u) {
  Deformation<2> z;
  z.A = Mat2::Zero();
  z.u = u;
  const double n = lp_norm<2>(M.p1(), M.gradients(z), 2.0);
  return n > 0 ? f.cwiseProduct(u).sum() / n : 0.0;
}

double upper_line_sum(const Lattice<2>& L, const Deformation<2>& y, int from, int to, Vec2* sum) {
  const int h = L.N() / 2;
  Vec2 s = Vec2::Zero();
  double sq = 0.0;
  for (int i = from; i <= to; ++i) {
    const Vec2 d = finite_difference(L, y, L.index(IVec2(i, h)), IVec2(1, 0)) - y.A.col(0);
    s += L.eps() * d;
    sq += d.squaredNorm();
  }
  if (sum) *sum = s;
  return sq;
}

}  // namespace

CounterexampleBound locality_lower_bound(const AtomisticMesh& M, const LocalityCounterexample& J,
                                         const Deformation<2>& y) {
  const auto& L = M.lattice();
  CounterexampleBound b;
  const ForceField<2> f = J.forces(y);
  b.direct = direct_ratio(M, f, locality_test_function(L, y));
  Vec2 sm, sp;
  upper_line_sum(L, y, -L.N() + 1, 0, &sm);
  upper_line_sum(L, y, 1, L.N(), &sp);
  b.formula = std::sqrt(sm.squaredNorm() + sp.squaredNorm());
  b.exact = dual_norm_p2(M.p1(), f).value;
  b.ghost = J.forces(Deformation<2>::homogeneous(L, y.A)).cwiseAbs().maxCoeff();
  return b;
}

CounterexampleBound scaling_lower_bound(const AtomisticMesh& M, const ScalingCounterexample& J,
                                        const Deformation<2>& y) {
  const auto& L = M.lattice();
  CounterexampleBound b;
  const ForceField<2> f = J.forces(y);
  b.direct = direct_ratio(M, f, scaling_test_function(L, y));
  const double sq = upper_line_sum(L, y, -L.N() + 1, L.N(), nullptr);
  b.formula = J.beta() * L.eps() * std::sqrt(L.eps() * sq);
  b.exact = dual_norm_p2(M.p1(), f).value;
  b.ghost = J.forces(Deformation<2>::homogeneous(L, y.A)).cwiseAbs().maxCoeff();
  return b;
}

// ---------------------------------------------------------------------------

CoarseningCheck coarsening_check(const CoarseMesh& C, const AcEnergy& E, const Energy<2>& Ea, const Deformation<2>& y,
                                 double p) {
  const auto& dec = E.decomposition();
  if (!C.contains_interface(dec))
    throw std::invalid_argument("coarsening_check: the coarse mesh does not resolve the atomistic and interface regions");
  const AtomisticMesh& M = C.fine();
  const auto& P = M.p1();
  const auto& V = E.potential();
  CoarseningCheck out;
  out.p = p;
  out.exact = p == 2.0;
  out.Ma = aggregate_lipschitz(V);
  out.shape_ratio = C.shape_ratio();
  out.coarse_nodes = C.num_nodes();

  const ForceField<2> f = E.forces(y) - Ea.forces(y);
  const auto G = M.gradients(y);
  std::vector<Mat2> sig(M.num_elements(), Mat2::Zero());
  for (int e = 0; e < M.num_elements(); ++e)
    if (dec.label(e) == CONTINUUM) sig[e] = cauchy_born_dW(V, G[e]);
  const Field<2> gc = P.divergence_covector(sig);

  // coarse loads: the continuum integral against grad u_h, minus the same
  // integral against grad I_eps u_h (through the interpolation weights)
  const auto& Cp = C.p1();
  Field<2> b_int = Field<2>::Zero(2, C.num_nodes());
  for (int e = 0; e < M.num_elements(); ++e) {
    if (dec.label(e) != CONTINUUM) continue;
    for (auto& [T, a] : C.overlaps(e))
      for (int k = 0; k < 3; ++k) b_int.col(Cp.vert[T][k]) += a * (sig[e] * Cp.grad[T][k]);
  }
  auto restrict = [&](const Field<2>& g) {
    Field<2> r = Field<2>::Zero(2, C.num_nodes());
    for (int s = 0; s < M.lattice().size(); ++s)
      for (auto& w : C.weights(s))
        if (w.lambda != 0.0) r.col(w.node) += w.lambda * g.col(s);
    return r;
  };
  const Field<2> b_coarsen = b_int - restrict(gc);
  const Field<2> b_h = restrict(f) + b_coarsen;

  if (out.exact) {
    out.model_h = dual_norm_p2(Cp, b_h).value;
    out.coarsening = dual_norm_p2(Cp, b_coarsen).value;
    out.model_eps = dual_norm_p2(P, f).value;
  } else {
    out.model_h = dual_norm_bounds(Cp, b_h, p, {}).lower;
    out.coarsening = dual_norm_bounds(Cp, b_coarsen, p, {}).lower;
    out.model_eps = dual_norm_bounds(P, f, p, {}).lower;
  }

  Neighbourhoods nb(dec);
  double ss = 0.0, sg = 0.0;
  for (int e : dec.elements_with(CONTINUUM)) {
    const auto w = nb.omega_c(e);
    const double os = oscillation(sig, w, M.eps()), og = oscillation(G, w, M.eps());
    if (p <= 0) {
      ss = std::max(ss, os);
      sg = std::max(sg, og);
    } else {
      ss += M.element_area() * std::pow(os, p);
      sg += M.element_area() * std::pow(og, p);
    }
  }
  out.osc_sigma = M.eps() * (p <= 0 ? ss : std::pow(ss, 1.0 / p));
  out.osc_grad = M.eps() * (p <= 0 ? sg : std::pow(sg, 1.0 / p));
  out.CM = out.osc_sigma > 0 ? out.coarsening / out.osc_sigma : 0.0;
  out.rhs = out.Ma * out.CM * out.osc_grad + out.model_eps;
  return out;
}

Deformation<2> smooth_deformation(const Lattice<2>& L, const Mat2& F, double a, double b) {
  Deformation<2> y = Deformation<2>::homogeneous(L, F);
  for (int i = 0; i < L.size(); ++i) {
    const Vec2 x = L.coord(i);
    y.u.col(i) = Vec2(a * std::sin(kPi * x[0]), b * std::sin(kPi * x[1]) * std::cos(kPi * x[0]));
  }
  return y;
}

}  // namespace aclab
