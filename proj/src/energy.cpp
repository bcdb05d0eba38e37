#include "aclab/energy.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace aclab {

template <int D>
AtomisticEnergy<D>::AtomisticEnergy(const Lattice<D>& L, std::shared_ptr<const SitePotential<D>> V)
    : L_(L), V_(std::move(V)) {
  if (V_->stencil().max_norm_inf() >= 2 * L_.N()) throw std::invalid_argument("AtomisticEnergy: stencil too long");
}

template <int D> double AtomisticEnergy<D>::value(const Deformation<D>& y) const {
  const double vol = std::pow(L_.eps(), D);
  std::vector<Vec<D>> g;
  double e = 0.0;
  for (int x = 0; x < L_.size(); ++x) {
    stencil_differences(L_, y, x, V_->stencil(), g);
    e += V_->energy(g);
  }
  e *= vol;
  if (load_.cols() == L_.size()) e += (load_.array() * y.u.array()).sum();
  return e;
}

template <int D> ForceField<D> AtomisticEnergy<D>::forces(const Deformation<D>& y) const {
  const double vol = std::pow(L_.eps(), D);
  const auto& R = V_->stencil();
  ForceField<D> f = ForceField<D>::Zero(D, L_.size());
  std::vector<Vec<D>> g, dV(R.size());
  for (int x = 0; x < L_.size(); ++x) {
    stencil_differences(L_, y, x, R, g);
    V_->gradient(g, dV);
    for (int r = 0; r < R.size(); ++r) add_bond_force(L_, f, x, R[r], Vec<D>(vol * dV[r]));
  }
  if (load_.cols() == L_.size()) f += load_;
  return f;
}

// ---------------------------------------------------------------------------

namespace {

// |T cap Q(x)| summed over x in S, for an element given by unwrapped vertices.
double cut_area(const Lattice<1>& L, const std::array<IVec<1>, 2>& c, const std::vector<char>& S) {
  const int a = std::min(c[0][0], c[1][0]), b = std::max(c[0][0], c[1][0]);
  double cut = 0.0;
  for (int x = a; x <= b; ++x) {
    if (!S[L.index(IVec<1>(x))]) continue;
    const double lo = std::max<double>(a, x - 0.5), hi = std::min<double>(b, x + 0.5);
    if (hi > lo) cut += hi - lo;
  }
  return cut * L.eps();
}

double cut_area(const Lattice<2>& L, const std::array<IVec2, 3>& c, const std::vector<char>& S) {
  Polygon P;
  for (auto& v : c) P.push_back(v.cast<double>());
  const double orient = (P[1] - P[0]).x() * (P[2] - P[0]).y() - (P[1] - P[0]).y() * (P[2] - P[0]).x();
  if (orient < 0) std::swap(P[1], P[2]);
  int x0 = c[0][0], x1 = c[0][0], y0 = c[0][1], y1 = c[0][1];
  for (auto& v : c) {
    x0 = std::min(x0, v[0]);
    x1 = std::max(x1, v[0]);
    y0 = std::min(y0, v[1]);
    y1 = std::max(y1, v[1]);
  }
  double cut = 0.0;
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y <= y1; ++y) {
      if (!S[L.index(IVec2(x, y))]) continue;
      const Polygon Q = {Vec2(x - 0.5, y - 0.5), Vec2(x + 0.5, y - 0.5), Vec2(x + 0.5, y + 0.5), Vec2(x - 0.5, y + 0.5)};
      cut += polygon_area(clip_convex(P, Q));
    }
  return cut * L.eps() * L.eps();
}

}  // namespace

template <int D>
CutoutEnergy<D>::CutoutEnergy(const Lattice<D>& L, const P1Mesh<D>& mesh, std::shared_ptr<const SitePotential<D>> V,
                              std::vector<char> in_S)
    : L_(L), mesh_(mesh), V_(std::move(V)), S_(std::move(in_S)), C_(L.size()) {
  if (static_cast<int>(S_.size()) != L.size()) throw std::invalid_argument("CutoutEnergy: one flag per site");
  area_.resize(mesh_.size());
  for (int e = 0; e < mesh_.size(); ++e) {
    area_[e] = mesh_.vol[e] - cut_area(L_, mesh_.coords[e], S_);
    if (std::abs(area_[e]) < 1e-14 * mesh_.vol[e]) area_[e] = 0.0;
  }
}

template <int D> void CutoutEnergy<D>::set_coefficients(int site, Eigen::MatrixXd C) {
  const int n = V_->stencil().size();
  if (C.size() && (C.rows() != n || C.cols() != n)) throw std::invalid_argument("set_coefficients: size mismatch");
  C_[site] = std::move(C);
}

template <int D>
void CutoutEnergy<D>::site_terms(const Deformation<D>& y, int x, std::vector<Vec<D>>& g,
                                 std::vector<Vec<D>>& gt) const {
  const auto& R = V_->stencil();
  stencil_differences(L_, y, x, R, g);
  gt = g;
  const auto& C = C_[x];
  if (!C.size()) return;
  for (int r = 0; r < R.size(); ++r) {
    gt[r].setZero();
    for (int s = 0; s < R.size(); ++s) gt[r] += C(r, s) * g[s];
  }
}

template <int D> double CutoutEnergy<D>::value(const Deformation<D>& y) const {
  const double vol = std::pow(L_.eps(), D);
  std::vector<Vec<D>> g, gt;
  double ea = 0.0;
  for (int x = 0; x < L_.size(); ++x) {
    if (!S_[x]) continue;
    site_terms(y, x, g, gt);
    ea += V_->energy(gt);
  }
  double ec = 0.0;
  for (int e = 0; e < mesh_.size(); ++e)
    if (area_[e] > 0) ec += area_[e] * cauchy_born_W(*V_, mesh_.gradient(y, e));
  return vol * ea + ec;
}

template <int D> ForceField<D> CutoutEnergy<D>::forces(const Deformation<D>& y) const {
  const double vol = std::pow(L_.eps(), D);
  const auto& R = V_->stencil();
  ForceField<D> f = ForceField<D>::Zero(D, L_.size());
  std::vector<Vec<D>> g, gt, dV(R.size());
  for (int x = 0; x < L_.size(); ++x) {
    if (!S_[x]) continue;
    site_terms(y, x, g, gt);
    V_->gradient(gt, dV);
    const auto& C = C_[x];
    for (int s = 0; s < R.size(); ++s) {
      Vec<D> c = Vec<D>::Zero();
      if (C.size()) {
        for (int r = 0; r < R.size(); ++r) c += C(r, s) * dV[r];
      } else {
        c = dV[s];
      }
      add_bond_force(L_, f, x, R[s], Vec<D>(vol * c));
    }
  }
  std::vector<Mat<D>> S(mesh_.size(), Mat<D>::Zero());
  for (int e = 0; e < mesh_.size(); ++e)
    if (area_[e] > 0) S[e] = (area_[e] / mesh_.vol[e]) * cauchy_born_dW(*V_, mesh_.gradient(y, e));
  f += mesh_.divergence_covector(S);
  return f;
}

std::vector<char> qce_sites(const RegionDecomposition& dec) {
  const auto& M = dec.mesh();
  std::vector<char> S(M.lattice().size(), 0);
  for (int e : dec.elements_with(ATOMISTIC))
    for (int v : M.p1().vert[e]) S[v] = 1;
  return S;
}

// ---------------------------------------------------------------------------

ForceField<2> InterfaceModel::forces(const Deformation<2>& y) const {
  const auto& L = lattice();
  const double vol = L.eps() * L.eps();
  ForceField<2> f = ForceField<2>::Zero(2, L.size());
  const auto P = partials(y);
  const auto& B = bonds();
  for (std::size_t i = 0; i < B.size(); ++i) add_bond_force(L, f, B[i].site, B[i].r, Vec2(vol * P[i]));
  return f;
}

AcEnergy::AcEnergy(const AtomisticMesh& M, std::shared_ptr<const SitePotential<2>> V, const RegionDecomposition& dec,
                   std::shared_ptr<const InterfaceModel> Ei)
    : M_(&M), V_(std::move(V)), dec_(&dec), Ei_(std::move(Ei)) {
  dec.require_valid();
  // atomistic bonds may not run along an edge of a continuum element; the
  // stress representation would otherwise leak into the continuum region
  const auto& R = V_->stencil();
  if (R.offsets() != dec.stencil().offsets()) throw std::invalid_argument("AcEnergy: stencil mismatch");
  for (int x : dec.La())
    for (int r = 0; r < R.size(); ++r)
      if (dec.covered({x, r}, 1u << CONTINUUM) > 0) {
        std::ostringstream os;
        os << "AcEnergy: atomistic bond from (" << M.lattice().site(x).transpose() << ") along (" << R[r].transpose()
           << ") touches the continuum region";
        throw std::invalid_argument(os.str());
      }
}

std::string AcEnergy::name() const { return Ei_ ? "ac[" + Ei_->name() + "]" : "ac"; }

double AcEnergy::value(const Deformation<2>& y) const {
  const auto& L = M_->lattice();
  const double vol = L.eps() * L.eps();
  std::vector<Vec2> g;
  double ea = 0.0;
  for (int x : dec_->La()) {
    stencil_differences(L, y, x, V_->stencil(), g);
    ea += V_->energy(g);
  }
  double ec = 0.0;
  const auto& P = M_->p1();
  for (int e = 0; e < P.size(); ++e)
    if (dec_->label(e) == CONTINUUM) ec += P.vol[e] * cauchy_born_W(*V_, P.gradient(y, e));
  return vol * ea + ec + (Ei_ ? Ei_->value(y) : 0.0);
}

ForceField<2> AcEnergy::forces(const Deformation<2>& y) const {
  const auto& L = M_->lattice();
  const double vol = L.eps() * L.eps();
  const auto& R = V_->stencil();
  ForceField<2> f = ForceField<2>::Zero(2, L.size());
  std::vector<Vec2> g, dV(R.size());
  for (int x : dec_->La()) {
    stencil_differences(L, y, x, R, g);
    V_->gradient(g, dV);
    for (int r = 0; r < R.size(); ++r) add_bond_force(L, f, x, R[r], Vec2(vol * dV[r]));
  }
  const auto& P = M_->p1();
  std::vector<Mat2> S(P.size(), Mat2::Zero());
  for (int e = 0; e < P.size(); ++e)
    if (dec_->label(e) == CONTINUUM) S[e] = cauchy_born_dW(*V_, P.gradient(y, e));
  f += P.divergence_covector(S);
  if (Ei_) f += Ei_->forces(y);
  return f;
}

// ---------------------------------------------------------------------------

template <int D> double force_fd_mismatch(const Energy<D>& E, const Deformation<D>& y, int ndir, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto& L = E.lattice();
  const ForceField<D> f = E.forces(y);
  double worst = 0.0;
  for (int k = 0; k < ndir; ++k) {
    Field<D> z(D, L.size());
    // amplitude eps keeps D_r z = O(1), so h is the step in the stencil arguments
    for (int i = 0; i < z.size(); ++i) z.data()[i] = L.eps() * U(rng);
    const double h = 1e-6;
    Deformation<D> yp = y, ym = y;
    yp.u += h * z;
    ym.u -= h * z;
    const double fd = (E.value(yp) - E.value(ym)) / (2 * h);
    const double an = (f.array() * z.array()).sum();
    const double scale = std::max({std::abs(fd), std::abs(an), 1e-8});
    worst = std::max(worst, std::abs(fd - an) / scale);
  }
  return worst;
}

template <int D> Eigen::MatrixXd fd_hessian_reduced(const Energy<D>& E, const Deformation<D>& y) {
  const int n = E.lattice().size();
  const int m = D * (n - 1);
  Eigen::MatrixXd H(m, m);
  const double h = 1e-5;
  for (int j = 0; j < m; ++j) {
    Deformation<D> yp = y, ym = y;
    yp.u.data()[D + j] += h;
    ym.u.data()[D + j] -= h;
    const ForceField<D> fp = E.forces(yp), fm = E.forces(ym);
    H.col(j) = (Eigen::Map<const Eigen::VectorXd>(fp.data() + D, m) - Eigen::Map<const Eigen::VectorXd>(fm.data() + D, m)) /
               (2 * h);
  }
  return 0.5 * (H + H.transpose());
}

template <int D> Eigen::MatrixXd gram_reduced(const P1Mesh<D>& mesh) {
  const int n = mesh.nsites;
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(D * n, D * n);
  for (int e = 0; e < mesh.size(); ++e)
    for (int a = 0; a <= D; ++a)
      for (int b = 0; b <= D; ++b) {
        const double k = mesh.vol[e] * mesh.grad[e][a].dot(mesh.grad[e][b]);
        for (int c = 0; c < D; ++c) K(D * mesh.vert[e][a] + c, D * mesh.vert[e][b] + c) += k;
      }
  return K.bottomRightCorner(D * (n - 1), D * (n - 1));
}

template <int D>
StabilityResult stability_probe(const Energy<D>& E, const P1Mesh<D>& mesh, const Deformation<D>& y, double tol) {
  const Eigen::MatrixXd H = fd_hessian_reduced(E, y);
  const Eigen::MatrixXd K = gram_reduced(mesh);
  Eigen::LLT<Eigen::MatrixXd> Kc(K);
  if (Kc.info() != Eigen::Success) throw std::runtime_error("stability_probe: singular Gram matrix");
  const int m = static_cast<int>(H.rows());
  // largest |lambda| by power iteration on K^{-1} H, then shifted inverse power
  Eigen::VectorXd v = Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i) v[i] += 0.01 * std::sin(1.0 + i);
  double rho = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = Kc.solve(H * v);
    rho = w.norm() / v.norm();
    v = w / w.norm();
  }
  // bracket lambda_min by the inertia of H - s K, then polish with shifted
  // inverse power iteration from just below the bracket
  auto negatives = [&](double s) {
    Eigen::LDLT<Eigen::MatrixXd> F(H - s * K);
    return (F.vectorD().array() < 0).count();
  };
  double lo = -1.1 * rho - 1e-12, hi = 1.1 * rho + 1e-12;
  for (int it = 0; it < 60 && hi - lo > 1e-3 * tol * std::max(1.0, rho); ++it) {
    const double mid = 0.5 * (lo + hi);
    (negatives(mid) > 0 ? hi : lo) = mid;
  }
  const double shift = lo - 1e-6 * std::max(1.0, rho);
  Eigen::LDLT<Eigen::MatrixXd> A(H - shift * K);
  StabilityResult out;
  v = Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i) v[i] += 0.37 * std::cos(3.0 * i);
  double lam = 0.0;
  for (int it = 1; it <= 500; ++it) {
    Eigen::VectorXd w = A.solve(K * v);
    w /= std::sqrt(w.dot(K * w));
    const double nl = w.dot(H * w);
    v = w;
    out.iterations = it;
    if (it > 1 && std::abs(nl - lam) <= tol * std::max(1.0, std::abs(nl))) {
      lam = nl;
      out.converged = true;
      break;
    }
    lam = nl;
  }
  out.c0 = lam;
  return out;
}

template class AtomisticEnergy<1>;
template class AtomisticEnergy<2>;
template class CutoutEnergy<1>;
template class CutoutEnergy<2>;
template double force_fd_mismatch<1>(const Energy<1>&, const Deformation<1>&, int, unsigned);
template double force_fd_mismatch<2>(const Energy<2>&, const Deformation<2>&, int, unsigned);
template Eigen::MatrixXd fd_hessian_reduced<1>(const Energy<1>&, const Deformation<1>&);
template Eigen::MatrixXd fd_hessian_reduced<2>(const Energy<2>&, const Deformation<2>&);
template Eigen::MatrixXd gram_reduced<1>(const P1Mesh<1>&);
template Eigen::MatrixXd gram_reduced<2>(const P1Mesh<2>&);
template StabilityResult stability_probe<1>(const Energy<1>&, const P1Mesh<1>&, const Deformation<1>&, double);
template StabilityResult stability_probe<2>(const Energy<2>&, const P1Mesh<2>&, const Deformation<2>&, double);

}  // namespace aclab
