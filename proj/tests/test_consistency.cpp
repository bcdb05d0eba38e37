#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "fixtures.hpp"

#include "aclab/consistency.hpp"
#include "aclab/patch_test.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace aclab;

namespace {

// On the (1,1)-split mesh the P1 stiffness matrix is the periodic five-point
// Laplacian, independent of eps; the p = 2 dual norm is sqrt(f' K^+ f).
double dense_dual_p2(const Lattice<2>& L, const ForceField<2>& f) {
  const int n = L.size();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    K(s, s) = 4;
    for (const IVec2& d : {IVec2(1, 0), IVec2(-1, 0), IVec2(0, 1), IVec2(0, -1)}) K(s, L.index(L.site(s) + d)) -= 1;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-10);
  double v = 0;
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd fc = f.row(c).transpose();
    v += fc.dot(svd.solve(fc));
  }
  return std::sqrt(v);
}

// 1D: <Phi, v> = eps sum_n G_n v'_n with sum_n f_n v_n; G from a running sum
std::vector<double> running_stress(const Lattice<1>& L, const ForceField<1>& f) {
  // v'_n lives on (x_{n-1}, x_n); f_m = G_m - G_{m+1}
  const int N = L.N();
  std::vector<double> G(L.size(), 0.0);
  double g = 0;
  for (int n = -N + 1; n <= N; ++n) {
    G[L.index(IVec<1>::Constant(n))] = g;
    g -= f(0, L.index(IVec<1>::Constant(n)));
  }
  return G;
}

double dual_1d_oracle(const Lattice<1>& L, const ForceField<1>& f, double p) {
  auto G = running_stress(L, f);
  const double e = L.eps();
  if (p == 2.0) {
    double m = 0;
    for (double x : G) m += x / G.size();
    double s = 0;
    for (double x : G) s += e * (x - m) * (x - m);
    return std::sqrt(s);
  }
  std::sort(G.begin(), G.end());
  if (p == 1.0) {
    const double med = G[G.size() / 2];
    double s = 0;
    for (double x : G) s += e * std::abs(x - med);
    return s;
  }
  return 0.5 * (G.back() - G.front());
}

}  // namespace

TEST_CASE("p = 2 dual norm against the dense oracle") {
  std::mt19937_64 rng(3);
  for (int N : {2, 3, 4}) {
    AtomisticMesh M(N);
    for (int k = 0; k < 5; ++k) {
      ForceField<2> f = fx::random_field<2>(M.lattice().size(), rng, 1.0);
      f.colwise() -= f.rowwise().mean();
      const auto d = dual_norm_p2(M.p1(), f);
      CHECK(d.exact);
      CHECK(d.value == doctest::Approx(dense_dual_p2(M.lattice(), f)).epsilon(1e-10));
      CHECK(d.galerkin_residual <= 1e-12);
    }
  }
  AtomisticMesh M(4);
  CHECK(dual_norm_p2(M.p1(), ForceField<2>::Zero(2, M.lattice().size())).value == 0.0);
  const Mat2 s0 = fx::random_strain(rng, 1.0);
  const auto fc = M.p1().divergence_covector(std::vector<Mat2>(M.num_elements(), s0));
  CHECK(dual_norm_p2(M.p1(), fc).value <= 1e-12);
  ForceField<2> bad = ForceField<2>::Zero(2, M.lattice().size());
  bad(0, 0) = 1.0;
  CHECK_THROWS(dual_norm_p2(M.p1(), bad));
}

TEST_CASE("dual norm bounds bracket the exact value") {
  std::mt19937_64 rng(12);
  fx::Coupled c(8);
  auto y = Deformation<2>::homogeneous(c.M.lattice(), fx::random_strain(rng, 0.05));
  y.u = fx::random_field<2>(c.M.lattice().size(), rng, 0.004);
  const ForceField<2> f = c.Eac.forces(y) - c.Ea.forces(y);
  StressField R = sigma_ac(c.Eac, y);
  const auto Sa = sigma_atomistic(c.M, *c.V, y);
  for (int e = 0; e < c.M.num_elements(); ++e) R[e] -= Sa[e];
  const auto d2 = dual_norm(c.M.p1(), f, 2.0, {R});
  CHECK(d2.lower <= d2.value * (1 + 1e-10));
  CHECK(d2.value <= d2.upper * (1 + 1e-10));
  for (double p : {1.0, 4.0, 0.0}) {
    const auto d = dual_norm(c.M.p1(), f, p, {R});
    CHECK_FALSE(d.exact);
    CHECK(d.lower > 0);
    CHECK(d.lower <= d.upper * (1 + 1e-12));
  }
}

TEST_CASE("1D dual norms are exact") {
  std::mt19937_64 rng(5);
  auto ch = fx::chain(16);
  ForceField<1> f = fx::random_field<1>(ch.L.size(), rng, 1.0);
  f.array() -= f.mean();
  for (double p : {1.0, 2.0, 0.0})
    CHECK(dual_norm_1d(ch.L, f, p).value == doctest::Approx(dual_1d_oracle(ch.L, f, p)).epsilon(1e-12));
}

TEST_CASE("2D modelling error of the bond-split coupling") {
  fx::Coupled c(8);
  CorrectorSolver C(c.Eac);
  Mat2 F;
  F << 1.01, 0.02, 0.0, 0.99;
  auto rF = model_error(C, Deformation<2>::homogeneous(c.M.lattice(), F), {2.0});
  CHECK(rF[0].lhs <= 1e-10);
  CHECK(rF[0].rhs <= 1e-10);
  auto y = smooth_deformation(c.M.lattice(), F, 0.03, 0.02);
  for (auto& r : model_error(C, y, {1.0, 2.0, 0.0})) {
    CHECK(r.elementwise);
    CHECK(r.holds);
    CHECK(r.lower <= r.upper * (1 + 1e-12));
    if (r.p == 2.0) CHECK(r.exact);
  }
}

TEST_CASE("2D QCE is inconsistent at homogeneous states") {
  fx::Coupled c(8);
  CutoutEnergy<2> qce(c.M.lattice(), c.M.p1(), c.V, qce_sites(c.dec));
  Mat2 F;
  F << 1.05, 0.0, 0.0, 1.0;
  const auto yF = Deformation<2>::homogeneous(c.M.lattice(), F);
  CHECK(model_error_plain(c.M, qce, c.Ea, yF, 2.0).value > 1e-3);
  double osc = 0;
  const auto G = c.M.gradients(yF);
  for (int e = 0; e < c.M.num_elements(); ++e) osc = std::max(osc, oscillation(G, c.M.vertex_neighbours(e), c.M.eps()));
  CHECK(osc == 0.0);
}

TEST_CASE("1D QNL consistency") {
  for (int N : {32, 64, 128}) {
    auto ch = fx::chain(N);
    auto yA = Deformation<1>::homogeneous(ch.L, Mat<1>::Constant(1.05));
    auto q0 = qnl_consistency_1d(ch, yA, N / 4, 2.0);
    CHECK(q0.lhs <= 1e-12);
    CHECK(q0.rhs <= 1e-12);
    auto y = chain_smooth_deformation(ch.L, 1.05, 0.05, 0.02);
    for (double p : {1.0, 2.0, 0.0}) {
      auto q = qnl_consistency_1d(ch, y, N / 4, p);
      CHECK(q.holds);
      CHECK(q.lhs <= q.rhs);
      CHECK(q.formula_defect <= 1e-12);
    }
  }
  // quadratic phi2 with y'' supported away from the interface: only the eps^2 y''' term remains
  Chain1d ch(64, std::make_shared<HarmonicRadial>(1.0, 1.0), std::make_shared<HarmonicRadial>(0.3, 2.0));
  auto y = Deformation<1>::homogeneous(ch.L, Mat<1>::Constant(1.02));
  const double pi = std::numbers::pi;
  for (int i = 0; i < ch.L.size(); ++i) {
    const double x = ch.L.coord(i)[0], t = (x - 0.75) / 0.2;
    if (std::abs(t) < 1) y.u(0, i) = 0.002 * std::pow(1 + std::cos(pi * t), 3);
  }
  auto q = qnl_consistency_1d(ch, y, 16, 2.0);
  CHECK(q.interface_term == 0.0);
  CHECK(q.m2pp == 0.0);
  CHECK(q.lhs <= q.y3_term * (1 + 1e-12));
}

TEST_CASE("1D QCE sharpness") {
  for (int N : {32, 128, 512}) {
    auto ch = fx::chain(N);
    const double A = 1.05;
    auto s2 = qce_sharpness_1d(ch, A, N / 4, 2.0);
    CHECK(s2.bound == doctest::Approx(std::sqrt(ch.eps()) * std::abs(Chain1d::dphi(*ch.phi2, 2 * A))).epsilon(1e-13));
    CHECK(s2.ratio() >= 0.5);
    CHECK(s2.ratio() <= 2.0);
    CHECK(std::abs(s2.test_value - s2.bound) <= 1e-10);
    CHECK(s2.test_norm == doctest::Approx(1.0).epsilon(1e-13));
    for (double p : {1.0, 0.0}) {
      auto s = qce_sharpness_1d(ch, A, N / 4, p);
      CHECK(s.dual >= s.test_value * (1 - 1e-12));
    }
    // phi2'(2) = 0: no ghost force
    CHECK(qce_sharpness_1d(ch, 1.0, N / 4, 2.0).dual <= 1e-12);
  }
}

TEST_CASE("counterexamples pass the patch test but carry O(1) modelling error") {
  Mat2 F;
  F << 1.02, 0.01, -0.02, 0.97;
  std::vector<double> scl;
  for (int N : {8, 16, 32}) {
    AtomisticMesh M(N);
    const auto& L = M.lattice();
    auto y = counterexample_deformation(L, F, 0.05);
    auto Jl = std::make_shared<LocalityCounterexample>(L);
    auto Js = std::make_shared<ScalingCounterexample>(L, N);
    for (auto J : {std::static_pointer_cast<const InterfaceModel>(Jl), std::static_pointer_cast<const InterfaceModel>(Js)}) {
      const auto yF = Deformation<2>::homogeneous(L, F);
      CHECK(std::abs(J->value(yF)) <= 1e-12);
      InterfaceEnergy E(J);
      for (auto& G : default_strain_samples<2>()) CHECK(ghost_force<2>(E, G).cwiseAbs().maxCoeff() <= 1e-12);
    }
    auto a = locality_lower_bound(M, *Jl, y);
    auto b = scaling_lower_bound(M, *Js, y);
    CHECK(a.ghost <= 1e-12);
    CHECK(b.ghost <= 1e-12);
    CHECK(a.direct >= 0.01);
    CHECK(b.direct >= 0.01);
    CHECK(a.formula <= a.direct * (1 + 1e-12));
    CHECK(b.formula <= b.direct * (1 + 1e-12));
    CHECK(a.direct <= a.exact * (1 + 1e-10));
    CHECK(b.direct <= b.exact * (1 + 1e-10));
    scl.push_back(b.direct);

    // linear in beta
    ScalingCounterexample J2(L, 2.0 * N);
    auto b2 = scaling_lower_bound(M, J2, y);
    CHECK(b2.direct == doctest::Approx(2.0 * b.direct).epsilon(1e-13));
    CHECK(b2.formula == doctest::Approx(2.0 * b.formula).epsilon(1e-13));
  }
  // the scaling lower bound does not decay under refinement
  CHECK(scl[2] >= 0.5 * scl[0]);
}

TEST_CASE("coarsening") {
  Mat2 F;
  F << 1.01, 0.02, 0.0, 0.99;
  std::vector<double> CM;
  for (int N : {8, 16, 32}) {
    fx::Coupled c(N);
    CoarseMesh C(c.M, N / 8 * 2 + 3);
    auto y = smooth_deformation(c.M.lattice(), F, 0.03, 0.02);
    auto r = coarsening_check(C, c.Eac, c.Ea, y, 2.0);
    CHECK(r.exact);
    CHECK(r.model_h <= r.rhs * (1 + 1e-12));
    CM.push_back(r.CM);
    if (N == 8) {
      CoarseMesh Cf(c.M, N);
      auto rf = coarsening_check(Cf, c.Eac, c.Ea, y, 2.0);
      CHECK(rf.coarsening <= 1e-12);
      CHECK(rf.model_h == doctest::Approx(rf.model_eps).epsilon(1e-10));
      auto r0 = coarsening_check(C, c.Eac, c.Ea, Deformation<2>::homogeneous(c.M.lattice(), F), 2.0);
      CHECK(r0.model_h <= 1e-12);
      CHECK(r0.coarsening <= 1e-12);
      CHECK_THROWS_AS(coarsening_check(CoarseMesh(c.M, 0), c.Eac, c.Ea, y, 2.0), std::invalid_argument);
      auto r1 = coarsening_check(C, c.Eac, c.Ea, y, 1.0);
      CHECK_FALSE(r1.exact);
    }
  }
  const double mean = (CM[0] + CM[1] + CM[2]) / 3;
  for (double v : CM) CHECK(std::abs(v / mean - 1) <= 0.5);
}
