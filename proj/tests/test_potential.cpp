#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "fixtures.hpp"

#include <cmath>
#include <numbers>

using namespace aclab;

namespace {

std::vector<Vec2> homogeneous_g(const Stencil<2>& R, const Mat2& F) {
  std::vector<Vec2> g;
  for (int i = 0; i < R.size(); ++i) g.push_back(F * R.vec(i));
  return g;
}

// random stencil arguments with each stretch |g_r|/|r| inside the declared range
std::vector<Vec2> random_g(const SitePotential<2>& V, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> s(V.range().lo, V.range().hi), th(-0.3, 0.3);
  std::vector<Vec2> g;
  for (int i = 0; i < V.stencil().size(); ++i) {
    const double t = th(rng);
    Mat2 Q;
    Q << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    g.push_back(s(rng) * Q * V.stencil().vec(i));
  }
  return g;
}

std::shared_ptr<const EmbeddingPotential> embedding() {
  return std::make_shared<EmbeddingPotential>(stencil_nn_nnn(), std::make_shared<MorseRadial>(1.0, 4.0, 1.0, 1.8, 2.3),
                                              0.3, 4.0, 2.0);
}

}  // namespace

TEST_CASE("harmonic nearest-neighbour springs: W(I) = 2, dW(I) = 2I") {
  auto V = fx::springs2d();
  CHECK(cauchy_born_W<2>(*V, Mat2::Identity()) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK((cauchy_born_dW<2>(*V, Mat2::Identity()) - 2.0 * Mat2::Identity()).norm() < 1e-14);
  auto g0 = homogeneous_g(V->stencil(), Mat2::Zero());
  CHECK(cauchy_born_W<2>(*V, Mat2::Zero()) == V->energy(g0));
}

TEST_CASE("W(0) = V(0, ..., 0) for the Morse pair") {
  auto V = fx::morse2d();
  auto g0 = homogeneous_g(V->stencil(), Mat2::Zero());
  CHECK(cauchy_born_W<2>(*V, Mat2::Zero()) == V->energy(g0));
}

TEST_CASE("analytic partials match central differences") {
  std::mt19937_64 rng(5);
  std::vector<std::shared_ptr<const SitePotential<2>>> pots = {fx::morse2d(), fx::springs2d(1.3), embedding()};
  for (auto& V : pots)
    for (int k = 0; k < 20; ++k) {
      auto g = random_g(*V, rng);
      std::vector<Vec2> dV(g.size());
      V->gradient(g, dV);
      auto fd = fd_gradient<2>(*V, g);
      double num = 0, den = 0;
      for (std::size_t r = 0; r < g.size(); ++r) {
        num = std::max(num, (dV[r] - fd[r]).norm());
        den = std::max(den, dV[r].norm());
      }
      CHECK(num <= 1e-6 * std::max(1.0, den));
    }
}

TEST_CASE("dW is the gradient of W") {
  std::mt19937_64 rng(9);
  std::vector<std::shared_ptr<const SitePotential<2>>> pots = {fx::morse2d(), embedding()};
  for (auto& V : pots)
    for (int k = 0; k < 10; ++k) {
      const Mat2 F = fx::random_strain(rng, 0.1);
      const Mat2 dW = cauchy_born_dW<2>(*V, F);
      Mat2 fd;
      const double h = 1e-6;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          Mat2 P = F, M = F;
          P(i, j) += h;
          M(i, j) -= h;
          fd(i, j) = (cauchy_born_W<2>(*V, P) - cauchy_born_W<2>(*V, M)) / (2 * h);
        }
      CHECK((dW - fd).norm() <= 1e-6 * std::max(1.0, dW.norm()));
    }
}

TEST_CASE("dW vanishes at a critical point of W") {
  // unit springs with rest length 1 are stress free at F = I
  auto R = stencil_nn();
  std::vector<std::shared_ptr<const Radial>> f(R.size(), std::make_shared<HarmonicRadial>(1.0, 1.0));
  PairPotential<2> V(R, f, std::vector<double>(R.size(), 0.5));
  CHECK(cauchy_born_dW<2>(V, Mat2::Identity()).norm() < 1e-15);
}

TEST_CASE("declared Lipschitz constants hold on the declared range") {
  std::mt19937_64 rng(21);
  std::vector<std::shared_ptr<const SitePotential<2>>> pots = {fx::morse2d(), embedding()};
  for (auto& V : pots) {
    const auto& M = V->lipschitz();
    const int n = V->stencil().size();
    for (int k = 0; k < 200; ++k) {
      auto g = random_g(*V, rng), h = random_g(*V, rng);
      std::vector<Vec2> dg(n), dh(n);
      V->gradient(g, dg);
      V->gradient(h, dh);
      for (int r = 0; r < n; ++r) {
        double bound = 0;
        for (int s = 0; s < n; ++s) bound += M(r, s) * (g[s] - h[s]).norm();
        CHECK((dg[r] - dh[r]).norm() <= bound * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("aggregate Lipschitz constant") {
  Stencil<2> one({IVec2(1, 0)});
  CHECK(aggregate_lipschitz<2>(one, LipschitzTable::Ones(1, 1)) == 1.0);
  auto V = fx::morse2d();
  CHECK(aggregate_lipschitz<2>(V->stencil(), 2.0 * V->lipschitz()) == doctest::Approx(2.0 * aggregate_lipschitz(*V)));

  // 1D pair model: only d_r d_r V is nonzero, |d_r d_r V| = 1/2 |phi''|
  auto c = fx::chain(8);
  auto V1 = c.site_potential();
  double m1 = 0, m2 = 0;
  const int n = 200000;
  for (int i = 0; i <= n; ++i) {
    const double t = 0.8 + (1.25 - 0.8) * i / n;
    m1 = std::max(m1, std::abs(c.phi1->d2(t)));
    m2 = std::max(m2, std::abs(c.phi2->d2(2 * t)));
  }
  const double oracle = 2 * (1 * 1 * 0.5 * m1) + 2 * (2 * 2 * 0.5 * m2);
  const double Ma = aggregate_lipschitz(*V1);
  CHECK(Ma >= oracle);
  CHECK(Ma <= 1.011 * oracle);
}

TEST_CASE("E_a(y_A) = |Omega| W(A)") {
  std::mt19937_64 rng(2);
  auto V = fx::morse2d();
  Lattice<2> L(4);
  AtomisticEnergy<2> E(L, V);
  for (int k = 0; k < 10; ++k) {
    const Mat2 A = fx::random_strain(rng, 0.1);
    CHECK(E.value(Deformation<2>::homogeneous(L, A)) ==
          doctest::Approx(L.volume() * cauchy_born_W<2>(*V, A)).epsilon(1e-13));
  }
}

TEST_CASE("Morse switch is C2 across the cutoff interval") {
  MorseRadial f(1.0, 4.0, 1.0, 1.8, 2.3);
  CHECK(f.f(2.3) == 0.0);
  CHECK(f.d1(2.3) == 0.0);
  CHECK(std::abs(f.d2(2.3)) < 1e-12);
  for (double r : {1.8, 2.3})
    for (double h : {1e-7}) {
      CHECK(std::abs(f.f(r + h) - f.f(r - h)) < 1e-6);
      CHECK(std::abs(f.d1(r + h) - f.d1(r - h)) < 1e-6);
    }
  for (double r : {0.9, 1.2, 1.9, 2.1}) {
    const double h = 1e-5;
    CHECK(f.d1(r) == doctest::Approx((f.f(r + h) - f.f(r - h)) / (2 * h)).epsilon(1e-7));
    CHECK(f.d2(r) == doctest::Approx((f.d1(r + h) - f.d1(r - h)) / (2 * h)).epsilon(1e-6));
    CHECK(f.d3(r) == doctest::Approx((f.d2(r + h) - f.d2(r - h)) / (2 * h)).epsilon(1e-5));
  }
}
