#include "aclab/interface.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace aclab {

BondSplitInterface::BondSplitInterface(const AtomisticMesh& M, std::shared_ptr<const PairPotential<2>> V,
                                       const RegionDecomposition& dec)
    : M_(&M), V_(std::move(V)) {
  const auto& R = V_->stencil();
  if (R.offsets() != dec.stencil().offsets()) throw std::invalid_argument("BondSplitInterface: stencil mismatch");
  const int ie1 = R.find(IVec2(1, 0)), ie2 = R.find(IVec2(0, 1)), id = R.find(IVec2(1, 1));
  if (ie1 < 0 || ie2 < 0 || id < 0)
    throw std::invalid_argument("BondSplitInterface: stencil must contain e1, e2 and (1,1)");
  dec.require_valid();

  for (auto& b : dec.Bi()) bonds_.push_back({b.site, R[b.r]});
  const auto& L = M.lattice();
  const int n = R.size();

  std::map<int, int> term_of;
  for (int e : dec.elements_with(INTERFACE)) {
    Term t;
    t.element = e;
    const int p = L.index(M.cell_of(e));
    if (M.type_of(e) == 0) {
      t.sidx[0] = ie1;
      t.sidx[1] = id;
    } else {
      t.sidx[0] = id;
      t.sidx[1] = ie2;
    }
    for (int k = 0; k < 2; ++k) {
      t.b[k] = dec.find_Bi({p, t.sidx[k]});
      if (t.b[k] < 0) throw std::logic_error("BondSplitInterface: element edge missing from B_i");
    }
    t.kappa.assign(n, 0.5);
    for (int r = 0; r < n; ++r) {
      const Vec2 rho = R.vec(r);
      t.coef.push_back(M.type_of(e) == 0 ? Eigen::Vector2d(rho[0] - rho[1], rho[1])
                                         : Eigen::Vector2d(rho[0], rho[1] - rho[0]));
    }
    term_of[e] = static_cast<int>(terms_.size());
    terms_.push_back(std::move(t));
  }
  for (int x : dec.La())
    for (int r = 0; r < n; ++r)
      for (auto& pc : dec.pattern(r)) {
        const int e = dec.piece_element(x, pc);
        if (dec.label(e) != INTERFACE) continue;
        terms_[term_of.at(e)].kappa[r] -= dec.chi({x, r}, pc, ChiVariant::plain);
      }

  // scaling constants: bonds of one origin interact only through the (at most
  // two) terms sitting in the cell of that origin
  Mi_ = LipschitzTable::Zero(n, n);
  const auto& Ma = V_->lipschitz();
  std::map<int, std::vector<int>> by_cell;
  for (int k = 0; k < static_cast<int>(terms_.size()); ++k) by_cell[terms_[k].element / 2].push_back(k);
  const int sidx_of[3] = {ie1, id, ie2};
  const int kind_of[3] = {0, 2, 1};
  for (auto& [cell, ks] : by_cell) {
    for (int a = 0; a < 3; ++a)
      for (int c = 0; c < 3; ++c) {
        double H = 0.0;
        for (int k : ks) {
          const Term& t = terms_[k];
          int la = -1, lc = -1;
          for (int j = 0; j < 2; ++j) {
            if (t.sidx[j] == sidx_of[a]) la = j;
            if (t.sidx[j] == sidx_of[c]) lc = j;
          }
          if (la < 0 || lc < 0) continue;
          for (int r = 0; r < n; ++r) H += std::abs(t.kappa[r] * t.coef[r][la] * t.coef[r][lc]) * Ma(r, r);
        }
        if (H == 0.0) continue;
        const bool bnd = dec.edge_on_interface_boundary(3 * cell + kind_of[a]) ||
                         dec.edge_on_interface_boundary(3 * cell + kind_of[c]);
        double& m = Mi_(sidx_of[a], sidx_of[c]);
        m = std::max(m, bnd ? 2.0 * H : H);
      }
  }
}

double BondSplitInterface::kappa(int e, int rho) const {
  for (auto& t : terms_)
    if (t.element == e) return t.kappa[rho];
  return 0.0;
}

double BondSplitInterface::aggregate_lipschitz() const { return aclab::aggregate_lipschitz(V_->stencil(), Mi_); }

double BondSplitInterface::value(const Deformation<2>& y) const {
  const auto& L = M_->lattice();
  const auto& R = V_->stencil();
  double J = 0.0;
  for (auto& t : terms_) {
    const auto& b0 = bonds_[t.b[0]];
    const auto& b1 = bonds_[t.b[1]];
    const Vec2 g0 = finite_difference(L, y, b0.site, b0.r), g1 = finite_difference(L, y, b1.site, b1.r);
    for (int r = 0; r < R.size(); ++r) {
      if (t.kappa[r] == 0.0) continue;
      J += t.kappa[r] * V_->bond_energy(r, t.coef[r][0] * g0 + t.coef[r][1] * g1);
    }
  }
  return L.eps() * L.eps() * J;
}

std::vector<Vec2> BondSplitInterface::partials(const Deformation<2>& y) const {
  const auto& L = M_->lattice();
  const auto& R = V_->stencil();
  std::vector<Vec2> P(bonds_.size(), Vec2::Zero());
  for (auto& t : terms_) {
    const auto& b0 = bonds_[t.b[0]];
    const auto& b1 = bonds_[t.b[1]];
    const Vec2 g0 = finite_difference(L, y, b0.site, b0.r), g1 = finite_difference(L, y, b1.site, b1.r);
    for (int r = 0; r < R.size(); ++r) {
      if (t.kappa[r] == 0.0) continue;
      const Vec2 d = t.kappa[r] * V_->bond_gradient(r, t.coef[r][0] * g0 + t.coef[r][1] * g1);
      P[t.b[0]] += t.coef[r][0] * d;
      P[t.b[1]] += t.coef[r][1] * d;
    }
  }
  return P;
}

// ---------------------------------------------------------------------------

LocalityCounterexample::LocalityCounterexample(const Lattice<2>& L) : L_(L) {
  if (L.N() % 2) throw std::invalid_argument("LocalityCounterexample: N must be even");
  const int h = L.N() / 2;
  for (int line : {h, -h})
    for (int i = -L.N() + 1; i <= L.N(); ++i) {
      bonds_.push_back({L.index(IVec2(i, line)), IVec2(1, 0)});
      const bool right = i > 0;
      group_.push_back(line > 0 ? (right ? 1 : 0) : (right ? 3 : 2));
    }
}

double LocalityCounterexample::value(const Deformation<2>& y) const {
  Vec2 s[4] = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  for (std::size_t i = 0; i < bonds_.size(); ++i) s[group_[i]] += finite_difference(L_, y, bonds_[i].site, bonds_[i].r);
  const double J = s[0].squaredNorm() + s[1].squaredNorm() - s[2].squaredNorm() - s[3].squaredNorm();
  return L_.eps() * L_.eps() * J;
}

std::vector<Vec2> LocalityCounterexample::partials(const Deformation<2>& y) const {
  Vec2 s[4] = {Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
  for (std::size_t i = 0; i < bonds_.size(); ++i) s[group_[i]] += finite_difference(L_, y, bonds_[i].site, bonds_[i].r);
  std::vector<Vec2> P(bonds_.size());
  for (std::size_t i = 0; i < bonds_.size(); ++i) P[i] = (group_[i] < 2 ? 2.0 : -2.0) * s[group_[i]];
  return P;
}

ScalingCounterexample::ScalingCounterexample(const Lattice<2>& L, double beta) : L_(L), beta_(beta) {
  if (L.N() % 2) throw std::invalid_argument("ScalingCounterexample: N must be even");
  const int h = L.N() / 2;
  for (int line : {h, -h})
    for (int i = -L.N() + 1; i <= L.N(); ++i) {
      bonds_.push_back({L.index(IVec2(i, line)), IVec2(1, 0)});
      sign_.push_back(line > 0 ? 1 : -1);
    }
}

double ScalingCounterexample::value(const Deformation<2>& y) const {
  double J = 0.0;
  for (std::size_t i = 0; i < bonds_.size(); ++i)
    J += sign_[i] * finite_difference(L_, y, bonds_[i].site, bonds_[i].r).squaredNorm();
  return L_.eps() * L_.eps() * beta_ * J;
}

std::vector<Vec2> ScalingCounterexample::partials(const Deformation<2>& y) const {
  std::vector<Vec2> P(bonds_.size());
  for (std::size_t i = 0; i < bonds_.size(); ++i)
    P[i] = 2.0 * beta_ * sign_[i] * finite_difference(L_, y, bonds_[i].site, bonds_[i].r);
  return P;
}

}  // namespace aclab
