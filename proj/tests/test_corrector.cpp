#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "fixtures.hpp"

#include "aclab/consistency.hpp"
#include "aclab/corrector.hpp"

#include <cmath>
#include <numbers>

using namespace aclab;

namespace {

// closed midpoint loop around lattice site v
std::vector<int> loop_around(const AtomisticMesh& M, int v) {
  const auto& P = M.p1();
  auto incident = [&](int e, int skip) {
    for (int j = 0; j < 3; ++j) {
      const int f = M.element_edges(e)[j];
      if (f == skip || P.vert[e][j] == v) continue;
      return f;
    }
    return -1;
  };
  int e0 = -1;
  for (int e = 0; e < M.num_elements() && e0 < 0; ++e)
    for (int k = 0; k < 3; ++k)
      if (P.vert[e][k] == v) e0 = e;
  const int f0 = incident(e0, -1);
  std::vector<int> path{f0};
  int e = e0, f = f0;
  for (int guard = 0; guard < 20; ++guard) {
    f = incident(e, f);
    path.push_back(f);
    if (f == f0) break;
    const auto& nb = M.edge_elements(f);
    e = nb[0] == e ? nb[1] : nb[0];
  }
  return path;
}

std::vector<int> random_path(const AtomisticMesh& M, std::mt19937_64& rng, int len) {
  std::uniform_int_distribution<int> pick(0, 1);
  std::uniform_int_distribution<int> start(0, M.num_edges() - 1);
  std::vector<int> path{start(rng)};
  for (int k = 0; k < len; ++k) {
    const int e = M.edge_elements(path.back())[pick(rng)];
    const int i = M.local_edge(e, path.back());
    path.push_back(M.element_edges(e)[(i + 1 + pick(rng)) % 3]);
  }
  return path;
}

}  // namespace

TEST_CASE("geometric constant is 2 + 2 + 2 sqrt 2 on every element") {
  for (int N : {2, 5, 16}) {
    AtomisticMesh M(N);
    for (int e = 0; e < M.num_elements(); ++e)
      CHECK(std::abs(geometric_constant(M, e) - (4.0 + 2.0 * std::sqrt(2.0))) <= 1e-12);
  }
}

TEST_CASE("path integrals of CR gradients telescope") {
  std::mt19937_64 rng(4);
  AtomisticMesh M(6);
  CRField w{fx::random_field<2>(M.num_edges(), rng, 1.0)};
  const auto G = cr_gradient(M, w);
  for (int k = 0; k < 20; ++k) {
    const auto path = random_path(M, rng, 25);
    const Vec2 s = path_integral(M, G, path);
    CHECK((s - (w.v.col(path.back()) - w.v.col(path.front()))).norm() <= 1e-12);
  }
  // constant and divergence-free fields around a vertex
  const Mat2 J = rotation_J();
  StressField sig(M.num_elements()), alpha(M.num_elements()), cst(M.num_elements(), fx::random_strain(rng, 1.0));
  for (int e = 0; e < M.num_elements(); ++e) {
    sig[e] = cst[e] + G[e] * J;
    alpha[e] = sig[e] * J.transpose();
  }
  for (int v : {0, 17, 100}) {
    const auto loop = loop_around(M, v);
    REQUIRE(loop.size() == 7);
    CHECK(path_integral(M, cst, loop).norm() <= 1e-12);
    CHECK(path_integral(M, alpha, loop).norm() <= 1e-12);
  }
  // consecutive edges that do not share an element
  const int f = 0;
  int g = -1;
  for (int h = 1; h < M.num_edges() && g < 0; ++h) {
    bool share = false;
    for (int e : M.edge_elements(f))
      for (int e2 : M.edge_elements(h)) share = share || e == e2;
    if (!share) g = h;
  }
  CHECK_THROWS_AS(path_integral(M, cst, {f, g}), std::invalid_argument);
}

TEST_CASE("divergence-free reconstruction round trip") {
  std::mt19937_64 rng(9);
  for (int N : {4, 8}) {
    AtomisticMesh M(N);
    const Mat2 J = rotation_J();
    // constant stress
    const Mat2 s0 = fx::random_strain(rng, 1.0);
    auto rc = reconstruct_potential(M, StressField(M.num_elements(), s0));
    CHECK((rc.sigma0 - s0).norm() <= 1e-12);
    const Vec2 w0 = rc.w.v.col(0);
    CHECK((rc.w.v.colwise() - w0).cwiseAbs().maxCoeff() <= 1e-12);

    for (int k = 0; k < 5; ++k) {
      CRField w{fx::random_field<2>(M.num_edges(), rng, 1.0)};
      const Mat2 a = fx::random_strain(rng, 1.0);
      const auto G = cr_gradient(M, w);
      StressField sig(M.num_elements());
      for (int e = 0; e < M.num_elements(); ++e) sig[e] = a + G[e] * J;
      auto r = reconstruct_potential(M, sig);
      CHECK(r.element_residual <= 1e-10);
      CHECK((r.sigma0 - a).norm() <= 1e-10);
      const Vec2 shift = w.v.col(0) - r.w.v.col(0);
      CHECK(((r.w.v.colwise() + shift) - w.v).cwiseAbs().maxCoeff() <= 1e-10);
    }
    // a field with nonzero divergence is refused
    StressField bad(M.num_elements(), Mat2::Zero());
    bad[3] << 1.0, 0.0, 0.0, 0.0;
    CHECK_THROWS_AS(reconstruct_potential(M, bad), std::domain_error);
  }
}

TEST_CASE("corrector psi(F)") {
  std::mt19937_64 rng(15);
  fx::Coupled c(8);
  CorrectorSolver C(c.Eac);
  const auto& M = c.M;
  const Mat2 J = rotation_J();
  for (int k = 0; k < 3; ++k) {
    const Mat2 F = fx::random_strain(rng, 0.05);
    const auto r = C.reconstruct_at(F);
    CHECK(r.element_residual <= 1e-10);
    const CRField& psi = C.psi(F);
    const auto Gp = cr_gradient(M, psi);
    const auto S = sigma_ac(c.Eac, Deformation<2>::homogeneous(M.lattice(), F));
    const Mat2 dW = cauchy_born_dW<2>(*c.V, F);
    double scale = 1 + dW.norm();
    for (int e = 0; e < M.num_elements(); ++e) {
      CHECK((S[e] - dW - Gp[e] * J).norm() <= 1e-10 * scale);
      if (c.dec.label(e) != INTERFACE) CHECK(Gp[e].norm() <= 1e-10 * scale);
      if (c.dec.label(e) == ATOMISTIC)
        for (int f : M.element_edges(e)) CHECK(psi.v.col(f).norm() <= 1e-10 * scale);
    }
  }
}

TEST_CASE("corrector is Lipschitz in F") {
  std::mt19937_64 rng(16);
  fx::Coupled c(8);
  CorrectorSolver C(c.Eac);
  const double L = c.M.eps() * (C.Ma() + C.Mi()) * C.width();
  for (int k = 0; k < 4; ++k) {
    const Mat2 F = fx::random_strain(rng, 0.05), G = fx::random_strain(rng, 0.05);
    const CRField a = C.psi(F), b = C.psi(G);
    double worst = 0;
    for (int f = 0; f < c.M.num_edges(); ++f) worst = std::max(worst, (a.v.col(f) - b.v.col(f)).norm());
    CHECK(worst <= L * (F - G).norm());
  }
}

TEST_CASE("psi_hat") {
  fx::Coupled c(8);
  CorrectorSolver C(c.Eac);
  const auto& M = c.M;
  Mat2 F;
  F << 1.02, 0.01, -0.015, 0.99;
  const auto yF = Deformation<2>::homogeneous(M.lattice(), F);
  const CRField ph = C.psi_hat(yF);
  const CRField ps = C.psi(F);
  CHECK((ph.v - ps.v).cwiseAbs().maxCoeff() <= 1e-13);

  // a perturbation far from the block leaves psi_hat = psi(F) near the interface
  auto y = yF;
  const auto& L = M.lattice();
  for (int s = 0; s < L.size(); ++s) {
    const IVec2 p = L.site(s);
    if (std::abs(p[0] - 8) <= 1 && std::abs(p[1] - 8) <= 1) y.u.col(s) << 0.01, -0.005;
  }
  const CRField ph2 = C.psi_hat(y);
  for (int e = 0; e < M.num_elements(); ++e)
    if (c.dec.label(e) != CONTINUUM)
      for (int f : M.element_edges(e)) CHECK((ph2.v.col(f) - ps.v.col(f)).norm() <= 1e-13);
}

TEST_CASE("modified stress and stress error") {
  std::mt19937_64 rng(20);
  fx::Coupled c(8);
  CorrectorSolver C(c.Eac);
  const auto& M = c.M;
  Mat2 F;
  F << 1.02, 0.03, -0.01, 0.98;
  auto repF = modified_stress_and_error(C, Deformation<2>::homogeneous(M.lattice(), F));
  double mx = 0;
  for (auto& R : repF.R) mx = std::max(mx, R.norm());
  CHECK(mx <= 1e-10);

  const double pi = std::numbers::pi;
  auto y = Deformation<2>::homogeneous(M.lattice(), F);
  for (int i = 0; i < M.lattice().size(); ++i) {
    const Vec2 x = M.lattice().coord(i);
    y.u.col(i) << 0.02 * std::sin(pi * x[0]) * std::cos(pi * x[1]), 0.015 * std::sin(pi * (x[0] + x[1]));
  }
  auto rep = modified_stress_and_error(C, y);
  CHECK(rep.R_atomistic_max <= 1e-10);
  CHECK(rep.all_hold);
  // Sigma_hat represents dE_ac
  const Field<2> z = fx::random_field<2>(M.lattice().size(), rng, 1.0);
  auto rc = check_representation(M, c.Eac.forces(y), rep.sigma_hat, z);
  CHECK(rc.relative() <= 1e-10);

  // |grad psi_hat(y;T) - grad psi(grad y(T);T)| <= 7 eps (M^a + M^i) width osc(grad y; omega_T)
  Neighbourhoods nb(c.dec);
  const auto G = M.gradients(y);
  const auto gh = cr_gradient(M, C.psi_hat(y));
  const double k7 = 7 * M.eps() * (C.Ma() + C.Mi()) * C.width();
  int checked = 0;
  for (int e = 0; e < M.num_elements(); ++e) {
    if (c.dec.label(e) == ATOMISTIC) continue;
    if (c.dec.label(e) == CONTINUUM && checked % 7 != 0) {
      ++checked;
      continue;
    }
    ++checked;
    const Mat2 gp = cr_gradient(M, C.psi(G[e]), e);
    CHECK((gh[e] - gp).norm() <= k7 * oscillation(G, nb.omega(e), M.eps()) + 1e-12);
  }
}

TEST_CASE("prefactors M_T") {
  fx::Coupled c(8);
  CorrectorSolver C(c.Eac);
  CHECK(C.width() > 0);
  for (int e = 0; e < c.M.num_elements(); ++e) {
    const double w = C.width(), a = C.Ma(), i = C.Mi();
    switch (c.dec.label(e)) {
      case ATOMISTIC: CHECK(C.MT(e) == 0.0); break;
      case INTERFACE: CHECK(C.MT(e) == doctest::Approx((i + a) * (1 + 7 * w))); break;
      default: CHECK(C.MT(e) == doctest::Approx(a + 7 * (i + a) * w));
    }
  }
}

TEST_CASE("disconnected atomistic region is rejected") {
  AtomisticMesh M(16);
  auto V = fx::morse2d();
  auto lab = block_labels(M, 2, 2);
  auto lab2 = lab;
  // a second block, shifted by 8 cells in x1
  for (int e = 0; e < M.num_elements(); ++e) {
    IVec2 p = M.cell_of(e);
    p[0] = wrap_index(p[0] - 8, M.N());
    const int src = M.element(p, M.type_of(e));
    if (lab[src] != CONTINUUM) lab2[e] = lab[src];
  }
  RegionDecomposition dec(M, V->stencil(), lab2);
  REQUIRE(dec.valid());
  CHECK_FALSE(dec.atomistic_connected());
  auto Ei = std::make_shared<BondSplitInterface>(M, V, dec);
  AcEnergy E(M, V, dec, Ei);
  CHECK_THROWS_AS(CorrectorSolver{E}, std::invalid_argument);
}

TEST_CASE("an inconsistent coupling has no corrector") {
  fx::Coupled c(8);
  // atomistic sites with a plain cutoff and no interface term
  AcEnergy E(c.M, c.V, c.dec, nullptr);
  CorrectorSolver C(E);
  Mat2 F;
  F << 1.05, 0.0, 0.0, 1.0;
  CHECK_THROWS_AS(C.psi(F), std::domain_error);
}
