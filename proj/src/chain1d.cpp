#include "aclab/chain1d.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace aclab {

std::vector<double> Chain1d::yprime(const Deformation<1>& y) const {
  std::vector<double> yp(L.size());
  for (int n = -N() + 1; n <= N(); ++n) yp[at(n)] = finite_difference(L, y, at(n - 1), IVec<1>(IVec<1>::Constant(1)))[0];
  return yp;
}

std::shared_ptr<const PairPotential<1>> Chain1d::site_potential() const {
  Stencil<1> R = stencil_1d_second_neighbour();
  std::vector<std::shared_ptr<const Radial>> f;
  for (int r = 0; r < R.size(); ++r) f.push_back(std::abs(R[r][0]) == 1 ? phi1 : phi2);
  return std::make_shared<PairPotential<1>>(R, f, std::vector<double>(R.size(), 0.5));
}

ChainEnergy::ChainEnergy(const Chain1d& c, ChainModel kind, int K) : c_(c), kind_(kind), K_(K) {
  if (kind != ChainModel::atomistic && (K < 1 || K >= c.N()))
    throw std::invalid_argument("ChainEnergy: need 1 <= K < N");
}

std::string ChainEnergy::name() const {
  switch (kind_) {
    case ChainModel::atomistic: return "chain-atomistic";
    case ChainModel::qnl: return "chain-qnl";
    default: return "chain-qce";
  }
}

bool ChainEnergy::atomistic_site(int n) const { return kind_ == ChainModel::atomistic || std::abs(n) <= K_; }

double ChainEnergy::value(const Deformation<1>& y) const {
  const auto yp = c_.yprime(y);
  const int N = c_.N();
  const Radial &p1 = *c_.phi1, &p2 = *c_.phi2;
  auto d = [&](int n) { return yp[c_.at(n)]; };
  double E = 0.0;
  for (int n = -N + 1; n <= N; ++n) {
    if (kind_ == ChainModel::qce) {
      E += 0.5 * (Chain1d::phi(p1, d(n)) + Chain1d::phi(p1, d(n + 1)));
      if (atomistic_site(n))
        E += 0.5 * (Chain1d::phi(p2, d(n - 1) + d(n)) + Chain1d::phi(p2, d(n + 1) + d(n + 2)));
      else
        E += 0.5 * (Chain1d::phi(p2, 2 * d(n)) + Chain1d::phi(p2, 2 * d(n + 1)));
      continue;
    }
    E += Chain1d::phi(p1, d(n));
    if (atomistic_site(n))
      E += Chain1d::phi(p2, d(n) + d(n + 1));
    else
      E += 0.5 * (Chain1d::phi(p2, 2 * d(n)) + Chain1d::phi(p2, 2 * d(n + 1)));
  }
  return c_.eps() * E;
}

std::vector<double> ChainEnergy::stress(const Deformation<1>& y) const {
  const auto yp = c_.yprime(y);
  const int N = c_.N();
  const Radial &p1 = *c_.phi1, &p2 = *c_.phi2;
  std::vector<double> G(yp.size(), 0.0);
  auto d = [&](int n) { return yp[c_.at(n)]; };
  auto g = [&](int n) -> double& { return G[c_.at(n)]; };
  for (int n = -N + 1; n <= N; ++n) {
    if (kind_ == ChainModel::qce) {
      g(n) += 0.5 * Chain1d::dphi(p1, d(n));
      g(n + 1) += 0.5 * Chain1d::dphi(p1, d(n + 1));
      if (atomistic_site(n)) {
        const double a = 0.5 * Chain1d::dphi(p2, d(n - 1) + d(n));
        const double b = 0.5 * Chain1d::dphi(p2, d(n + 1) + d(n + 2));
        g(n - 1) += a;
        g(n) += a;
        g(n + 1) += b;
        g(n + 2) += b;
      } else {
        g(n) += Chain1d::dphi(p2, 2 * d(n));
        g(n + 1) += Chain1d::dphi(p2, 2 * d(n + 1));
      }
      continue;
    }
    g(n) += Chain1d::dphi(p1, d(n));
    if (atomistic_site(n)) {
      const double a = Chain1d::dphi(p2, d(n) + d(n + 1));
      g(n) += a;
      g(n + 1) += a;
    } else {
      g(n) += Chain1d::dphi(p2, 2 * d(n));
      g(n + 1) += Chain1d::dphi(p2, 2 * d(n + 1));
    }
  }
  return G;
}

ForceField<1> ChainEnergy::forces(const Deformation<1>& y) const {
  const auto G = stress(y);
  const int N = c_.N();
  ForceField<1> f(1, c_.L.size());
  for (int m = -N + 1; m <= N; ++m) f(0, c_.at(m)) = G[c_.at(m)] - G[c_.at(m + 1)];
  return f;
}

std::vector<double> chain_stress_from_forces(const Lattice<1>& L, const ForceField<1>& f) {
  const int N = L.N();
  std::vector<double> G(L.size(), 0.0);
  auto at = [&](int n) { return L.index(IVec<1>::Constant(n)); };
  for (int m = -N + 1; m < N; ++m) G[at(m + 1)] = G[at(m)] - f(0, at(m));
  return G;
}

std::vector<double> qnl_residual_formula(const Chain1d& c, const Deformation<1>& y, int K, bool narrow_rows) {
  const auto yp = c.yprime(y);
  const int N = c.N();
  const Radial& p2 = *c.phi2;
  auto d = [&](int n) { return yp[c.at(n)]; };
  auto dp = [&](double g) { return Chain1d::dphi(p2, g); };
  std::vector<double> R(yp.size(), 0.0);
  for (int n = -N + 1; n <= N; ++n) {
    double r = 0.0;
    if (n >= -K + 1 && n <= K)
      r = 0.0;
    else if (n == K + 1)
      r = narrow_rows ? dp(d(n - 1) + d(n)) - dp(2 * d(n)) : dp(d(n) + d(n + 1)) - dp(2 * d(n));
    else if (n == -K)
      r = narrow_rows ? dp(d(n) + d(n + 1)) - dp(2 * d(n)) : dp(d(n - 1) + d(n)) - dp(2 * d(n));
    else
      r = dp(d(n) + d(n + 1)) - 2 * dp(2 * d(n)) + dp(d(n - 1) + d(n));
    R[c.at(n)] = r;
  }
  return R;
}

double lp_eps(const Lattice<1>& L, const std::vector<double>& v, const std::vector<int>& set, double p) {
  double s = 0.0;
  for (int n : set) {
    const double a = std::abs(v[L.index(IVec<1>::Constant(n))]);
    if (p <= 0)
      s = std::max(s, a);
    else
      s += L.eps() * std::pow(a, p);
  }
  return p <= 0 ? s : std::pow(s, 1.0 / p);
}

std::vector<double> second_difference(const Chain1d& c, const std::vector<double>& yp) {
  std::vector<double> v(yp.size());
  for (int n = -c.N() + 1; n <= c.N(); ++n) v[c.at(n)] = (yp[c.at(n + 1)] - yp[c.at(n)]) / c.eps();
  return v;
}

std::vector<double> third_difference(const Chain1d& c, const std::vector<double>& yp) {
  std::vector<double> v(yp.size());
  const double e2 = c.eps() * c.eps();
  for (int n = -c.N() + 1; n <= c.N(); ++n)
    v[c.at(n)] = (yp[c.at(n + 1)] - 2 * yp[c.at(n)] + yp[c.at(n - 1)]) / e2;
  return v;
}

namespace {
template <class F> double sup_sampled(F&& g, double lo, double hi) {
  if (hi < lo) std::swap(lo, hi);
  const int n = 4000;
  double m = 0.0;
  for (int i = 0; i <= n; ++i) m = std::max(m, std::abs(g(lo + (hi - lo) * i / n)));
  return m;
}
}  // namespace

double sup_abs_d2(const Radial& f, double lo, double hi) {
  return sup_sampled([&](double r) { return f.d2(std::abs(r)); }, lo, hi);
}
double sup_abs_d3(const Radial& f, double lo, double hi) {
  return sup_sampled([&](double r) { return f.d3(std::abs(r)); }, lo, hi);
}

Deformation<1> chain_smooth_deformation(const Lattice<1>& L, double A, double a, double b) {
  Deformation<1> y = Deformation<1>::homogeneous(L, Mat<1>::Constant(A));
  for (int i = 0; i < L.size(); ++i) {
    const double x = L.coord(i)[0];
    y.u(0, i) = a * std::sin(std::numbers::pi * x) + b * std::cos(2 * std::numbers::pi * x);
  }
  return y;
}

}  // namespace aclab
