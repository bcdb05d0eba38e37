#include "aclab/potential.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace aclab {

std::string HarmonicRadial::describe() const {
  std::ostringstream os;
  os << "harmonic(k=" << k_ << ",rest=" << rest_ << ")";
  return os.str();
}

MorseRadial::MorseRadial(double depth, double alpha, double r0, double rc_in, double rc_out)
    : D_(depth), a_(alpha), r0_(r0), c0_(rc_in), c1_(rc_out) {
  if (!(rc_out > rc_in)) throw std::invalid_argument("MorseRadial: rc_out must exceed rc_in");
}

std::string MorseRadial::describe() const {
  std::ostringstream os;
  os << "morse(D=" << D_ << ",alpha=" << a_ << ",r0=" << r0_ << ",rc=[" << c0_ << "," << c1_ << "])";
  return os.str();
}

double MorseRadial::eval(double r, int order) const {
  // m(r) = D (e^{-2a(r-r0)} - 2 e^{-a(r-r0)})
  const double e1 = std::exp(-a_ * (r - r0_));
  const double e2 = e1 * e1;
  double m[4];
  m[0] = D_ * (e2 - 2.0 * e1);
  m[1] = D_ * (-2.0 * a_ * e2 + 2.0 * a_ * e1);
  m[2] = D_ * (4.0 * a_ * a_ * e2 - 2.0 * a_ * a_ * e1);
  m[3] = D_ * (-8.0 * a_ * a_ * a_ * e2 + 2.0 * a_ * a_ * a_ * e1);
  // s(t) = 1 - (10t^3 - 15t^4 + 6t^5), t = (r - c0)/(c1 - c0)
  double s[4] = {1.0, 0.0, 0.0, 0.0};
  if (r >= c1_) {
    s[0] = 0.0;
  } else if (r > c0_) {
    const double h = c1_ - c0_;
    const double t = (r - c0_) / h;
    s[0] = 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
    s[1] = -30.0 * t * t * (1.0 - t) * (1.0 - t) / h;
    s[2] = -60.0 * t * (1.0 - t) * (1.0 - 2.0 * t) / (h * h);
    s[3] = -60.0 * (1.0 - 6.0 * t + 6.0 * t * t) / (h * h * h);
  }
  static const int binom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  double v = 0.0;
  for (int k = 0; k <= order; ++k) v += binom[order][k] * m[k] * s[order - k];
  return v;
}

// ---------------------------------------------------------------------------

template <int D> Mat<D> SitePotential<D>::second(std::span<const Vec<D>> g, int r, int s) const {
  std::vector<Vec<D>> gp(g.begin(), g.end()), dp(g.size()), dm(g.size());
  Mat<D> H;
  for (int j = 0; j < D; ++j) {
    const double h = 1e-6 * std::max(1.0, g[s].norm());
    gp[s][j] += h;
    gradient(gp, dp);
    gp[s][j] -= 2 * h;
    gradient(gp, dm);
    gp[s][j] += h;
    H.col(j) = (dp[r] - dm[r]) / (2 * h);
  }
  return H;
}

namespace {

// Operator norm of the g-Hessian of f(|g|): in 2D the eigenvalues are f'' and f'/rho.
template <int D> double radial_hessian_norm(const Radial& f, double rho) {
  if (D == 1) return std::abs(f.d2(rho));
  return std::max(std::abs(f.d2(rho)), std::abs(f.d1(rho) / rho));
}

template <int D> double radial_hessian_bound(const Radial& f, double lo, double hi) {
  if (D == 2 && f.is_linear_spring()) return std::abs(f.d2(1.0));
  const int n = 4000;
  double m = 0.0;
  for (int i = 0; i <= n; ++i) m = std::max(m, radial_hessian_norm<D>(f, lo + (hi - lo) * i / n));
  // sampling safety margin; the probes in the tests sample the same range
  return 1.01 * m;
}

}  // namespace

template <int D>
PairPotential<D>::PairPotential(Stencil<D> R, std::vector<std::shared_ptr<const Radial>> f, std::vector<double> w,
                                StrainRange range)
    : SitePotential<D>(std::move(R)), f_(std::move(f)), w_(std::move(w)) {
  const int n = this->R_.size();
  if (static_cast<int>(f_.size()) != n || static_cast<int>(w_.size()) != n)
    throw std::invalid_argument("PairPotential: one radial profile and weight per offset required");
  this->range_ = range;
  this->M_ = LipschitzTable::Zero(n, n);
  hb_.resize(n);
  for (int r = 0; r < n; ++r) {
    const double len = this->R_.vec(r).norm();
    hb_[r] = radial_hessian_bound<D>(*f_[r], range.lo * len, range.hi * len);
    this->M_(r, r) = std::abs(w_[r]) * hb_[r];
  }
}

template <int D> double PairPotential<D>::bond_energy(int r, const Vec<D>& g) const {
  return w_[r] * f_[r]->f(g.norm());
}

template <int D> Vec<D> PairPotential<D>::bond_gradient(int r, const Vec<D>& g) const {
  const double rho = g.norm();
  if (rho == 0.0) {
    if (f_[r]->is_linear_spring()) return Vec<D>::Zero();
    throw std::domain_error("PairPotential: zero-length bond");
  }
  return (w_[r] * f_[r]->d1(rho) / rho) * g;
}

template <int D> double PairPotential<D>::energy(std::span<const Vec<D>> g) const {
  double e = 0.0;
  for (int r = 0; r < this->R_.size(); ++r) e += bond_energy(r, g[r]);
  return e;
}

template <int D> void PairPotential<D>::gradient(std::span<const Vec<D>> g, std::span<Vec<D>> dV) const {
  for (int r = 0; r < this->R_.size(); ++r) dV[r] = bond_gradient(r, g[r]);
}

template <int D> Mat<D> PairPotential<D>::second(std::span<const Vec<D>> g, int r, int s) const {
  if (r != s) return Mat<D>::Zero();
  const double rho = g[r].norm();
  const Vec<D> e = g[r] / rho;
  const Radial& f = *f_[r];
  Mat<D> H = f.d2(rho) * e * e.transpose();
  if (D > 1) H += (f.d1(rho) / rho) * (Mat<D>::Identity() - e * e.transpose());
  return w_[r] * H;
}

template <int D> std::string PairPotential<D>::describe() const {
  std::ostringstream os;
  os << "pair[";
  for (int r = 0; r < this->R_.size(); ++r) {
    if (r) os << ";";
    os << this->R_[r].transpose() << ":" << w_[r] << "*" << f_[r]->describe();
  }
  os << "]";
  return os.str();
}

// ---------------------------------------------------------------------------

EmbeddingPotential::EmbeddingPotential(Stencil<2> R, std::shared_ptr<const Radial> phi, double c, double s0,
                                       double beta, StrainRange range)
    : SitePotential<2>(std::move(R)), phi_(std::move(phi)), c_(c), s0_(s0), beta_(beta) {
  range_ = range;
  const int n = R_.size();
  M_ = LipschitzTable::Zero(n, n);
  // Bound each block d_r d_s V over the range: pair part on the diagonal plus
  //   G''(s) rho'_r rho'_s e_r e_s^T + delta_rs G'(s) Hess(rho_r).
  // |G''| = 2c, |G'| <= 2c max|s - s0|, with s ranging over sums of rho(t).
  double smin = 0.0, smax = 0.0;
  for (int r = 0; r < n; ++r) {
    const double len = R_.vec(r).norm();
    smin += std::exp(-beta_ * (range.hi * len - 1.0));
    smax += std::exp(-beta_ * (range.lo * len - 1.0));
  }
  const double dG = 2.0 * std::abs(c_) * std::max(std::abs(smin - s0_), std::abs(smax - s0_));
  const double ddG = 2.0 * std::abs(c_);
  std::vector<double> rho1(n), rhoH(n), pairH(n);
  for (int r = 0; r < n; ++r) {
    const double len = R_.vec(r).norm();
    const double lo = range.lo * len, hi = range.hi * len;
    rho1[r] = beta_ * std::exp(-beta_ * (lo - 1.0));
    // Hessian of exp(-beta(|g|-1)): eigenvalues beta^2 e and beta e/|g|
    rhoH[r] = std::max(beta_ * beta_, beta_ / lo) * std::exp(-beta_ * (lo - 1.0));
    pairH[r] = 0.5 * radial_hessian_bound<2>(*phi_, lo, hi);
  }
  for (int r = 0; r < n; ++r)
    for (int s = 0; s < n; ++s) {
      M_(r, s) = ddG * rho1[r] * rho1[s];
      if (r == s) M_(r, s) += dG * rhoH[r] + pairH[r];
    }
}

double EmbeddingPotential::density(std::span<const Vec2> g) const {
  double s = 0.0;
  for (int r = 0; r < R_.size(); ++r) s += std::exp(-beta_ * (g[r].norm() - 1.0));
  return s;
}

double EmbeddingPotential::energy(std::span<const Vec2> g) const {
  double e = 0.0;
  for (int r = 0; r < R_.size(); ++r) e += 0.5 * phi_->f(g[r].norm());
  const double s = density(g);
  return e + c_ * (s - s0_) * (s - s0_);
}

void EmbeddingPotential::gradient(std::span<const Vec2> g, std::span<Vec2> dV) const {
  const double dG = 2.0 * c_ * (density(g) - s0_);
  for (int r = 0; r < R_.size(); ++r) {
    const double t = g[r].norm();
    const double drho = -beta_ * std::exp(-beta_ * (t - 1.0));
    dV[r] = ((0.5 * phi_->d1(t) + dG * drho) / t) * g[r];
  }
}

std::string EmbeddingPotential::describe() const {
  std::ostringstream os;
  os << "embedding(phi=" << phi_->describe() << ",c=" << c_ << ",s0=" << s0_ << ",beta=" << beta_ << ")";
  return os.str();
}

// ---------------------------------------------------------------------------

template <int D> double cauchy_born_W(const SitePotential<D>& V, const Mat<D>& F) {
  const auto& R = V.stencil();
  std::vector<Vec<D>> g(R.size());
  for (int r = 0; r < R.size(); ++r) g[r] = F * R.vec(r);
  return V.energy(g);
}

template <int D> Mat<D> cauchy_born_dW(const SitePotential<D>& V, const Mat<D>& F) {
  const auto& R = V.stencil();
  std::vector<Vec<D>> g(R.size()), dV(R.size());
  for (int r = 0; r < R.size(); ++r) g[r] = F * R.vec(r);
  V.gradient(g, dV);
  Mat<D> S = Mat<D>::Zero();
  for (int r = 0; r < R.size(); ++r) S += dV[r] * R.vec(r).transpose();
  return S;
}

template <int D> double aggregate_lipschitz(const Stencil<D>& R, const LipschitzTable& M) {
  double m = 0.0;
  for (int r = 0; r < R.size(); ++r)
    for (int s = 0; s < R.size(); ++s) m += R.vec(r).norm() * R.vec(s).norm() * M(r, s);
  return m;
}

template <int D> std::vector<Vec<D>> fd_gradient(const SitePotential<D>& V, std::span<const Vec<D>> g) {
  std::vector<Vec<D>> gp(g.begin(), g.end()), out(g.size());
  for (std::size_t r = 0; r < g.size(); ++r) {
    const double h = 1e-6 * std::max(1.0, g[r].norm());
    for (int j = 0; j < D; ++j) {
      gp[r][j] += h;
      const double ep = V.energy(gp);
      gp[r][j] -= 2 * h;
      const double em = V.energy(gp);
      gp[r][j] += h;
      out[r][j] = (ep - em) / (2 * h);
    }
  }
  return out;
}

Stencil<1> stencil_1d_second_neighbour() {
  return Stencil<1>({IVec<1>(-2), IVec<1>(-1), IVec<1>(1), IVec<1>(2)});
}

Stencil<2> stencil_nn() { return Stencil<2>({IVec2(1, 0), IVec2(-1, 0), IVec2(0, 1), IVec2(0, -1)}); }

Stencil<2> stencil_nn_nnn() {
  return Stencil<2>({IVec2(1, 0), IVec2(-1, 0), IVec2(0, 1), IVec2(0, -1), IVec2(1, 1), IVec2(-1, -1),
                     IVec2(1, -1), IVec2(-1, 1)});
}

Stencil<2> stencil_named(const std::string& name) {
  if (name == "nn") return stencil_nn();
  if (name == "nn+nnn") return stencil_nn_nnn();
  if (name == "nn+2nn") {
    return Stencil<2>({IVec2(1, 0), IVec2(-1, 0), IVec2(0, 1), IVec2(0, -1), IVec2(1, 1), IVec2(-1, -1),
                       IVec2(2, 0), IVec2(-2, 0), IVec2(0, 2), IVec2(0, -2)});
  }
  throw std::invalid_argument("unknown stencil '" + name + "'");
}

template class SitePotential<1>;
template class SitePotential<2>;
template class PairPotential<1>;
template class PairPotential<2>;
template double cauchy_born_W<1>(const SitePotential<1>&, const Mat<1>&);
template double cauchy_born_W<2>(const SitePotential<2>&, const Mat<2>&);
template Mat<1> cauchy_born_dW<1>(const SitePotential<1>&, const Mat<1>&);
template Mat<2> cauchy_born_dW<2>(const SitePotential<2>&, const Mat<2>&);
template double aggregate_lipschitz<1>(const Stencil<1>&, const LipschitzTable&);
template double aggregate_lipschitz<2>(const Stencil<2>&, const LipschitzTable&);
template std::vector<Vec<1>> fd_gradient<1>(const SitePotential<1>&, std::span<const Vec<1>>);
template std::vector<Vec<2>> fd_gradient<2>(const SitePotential<2>&, std::span<const Vec<2>>);

}  // namespace aclab
