#pragma once

#include "aclab/energy.hpp"

#include <memory>
#include <vector>

namespace aclab {

// 1D chain with first and second neighbour pair interactions,
// V = 1/2 [phi1(g1) + phi1(g-1) + phi2(g2) + phi2(g-2)], phi_i even.
// Arrays indexed by n live at the lattice index of site n, so y'_n is
// stored at index(n) and refers to the interval (x_{n-1}, x_n).
struct Chain1d {
  Lattice<1> L;
  std::shared_ptr<const Radial> phi1, phi2;

  Chain1d(int N, std::shared_ptr<const Radial> p1, std::shared_ptr<const Radial> p2)
      : L(N), phi1(std::move(p1)), phi2(std::move(p2)) {}

  int N() const { return L.N(); }
  double eps() const { return L.eps(); }
  int at(int n) const { return L.index(IVec<1>::Constant(n)); }

  static double phi(const Radial& f, double g) { return f.f(std::abs(g)); }
  static double dphi(const Radial& f, double g) { return g >= 0 ? f.d1(g) : -f.d1(-g); }

  std::vector<double> yprime(const Deformation<1>& y) const;

  // same model as a generic site potential (weights 1/2 on +-1, +-2)
  std::shared_ptr<const PairPotential<1>> site_potential() const;
};

enum class ChainModel { atomistic, qnl, qce };

// E = eps sum_n (...) in the three forms; N_a = {-K..K}.
class ChainEnergy final : public Energy<1> {
 public:
  ChainEnergy(const Chain1d& c, ChainModel kind, int K = 0);
  const Lattice<1>& lattice() const override { return c_.L; }
  double value(const Deformation<1>& y) const override;
  ForceField<1> forces(const Deformation<1>& y) const override;
  std::string name() const override;

  // G_n = (1/eps) dE/dy'_n, so that <dE(y), u> = eps sum_n G_n u'_n
  std::vector<double> stress(const Deformation<1>& y) const;
  bool atomistic_site(int n) const;  // n in N_a
  int K() const { return K_; }

 private:
  Chain1d c_;
  ChainModel kind_;
  int K_;
};

// Stress coefficients of a generic 1D force covector: f_m = G_m - G_{m+1}
// determines G up to a constant; returned with G at index(-N+1) = 0.
std::vector<double> chain_stress_from_forces(const Lattice<1>& L, const ForceField<1>& f);

// R_n = G^a_n - G^qnl_n from the closed-form case list.  With narrow_rows the
// two interface rows n = K+1, n = -K use
//   phi2'(y'_{K} + y'_{K+1}) - phi2'(2y'_{K+1}),  phi2'(y'_{-K} + y'_{-K+1}) - phi2'(2y'_{-K});
// otherwise the rows obtained by differentiating the three-sum energy,
//   phi2'(y'_{K+1} + y'_{K+2}) - phi2'(2y'_{K+1}),  phi2'(y'_{-K-1} + y'_{-K}) - phi2'(2y'_{-K}).
std::vector<double> qnl_residual_formula(const Chain1d& c, const Deformation<1>& y, int K, bool narrow_rows);

// ||v||_{l^p_eps(set)} = (eps sum_{n in set} |v_n|^p)^{1/p}; p <= 0 is the max.
double lp_eps(const Lattice<1>& L, const std::vector<double>& v, const std::vector<int>& set, double p);

// y''_n = (y'_{n+1} - y'_n)/eps, y'''_n = (y'_{n+1} - 2y'_n + y'_{n-1})/eps^2
std::vector<double> second_difference(const Chain1d& c, const std::vector<double>& yp);
std::vector<double> third_difference(const Chain1d& c, const std::vector<double>& yp);

// sup |f''|, sup |f'''| over [lo, hi] (dense sampling plus end points)
double sup_abs_d2(const Radial& f, double lo, double hi);
double sup_abs_d3(const Radial& f, double lo, double hi);

// smooth periodic test deformation y(x) = A x + a sin(pi x) + b cos(2 pi x)
Deformation<1> chain_smooth_deformation(const Lattice<1>& L, double A, double a, double b);

}  // namespace aclab
