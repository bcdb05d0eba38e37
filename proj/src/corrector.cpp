#include "aclab/corrector.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace aclab {

Mat2 cr_gradient(const AtomisticMesh& M, const CRField& w, int e) {
  const auto& gl = M.grad_lambda(e);
  const auto& fe = M.element_edges(e);
  Mat2 G = Mat2::Zero();
  for (int i = 0; i < 3; ++i) G += -2.0 * w.v.col(fe[i]) * gl[i].transpose();
  return G;
}

std::vector<Mat2> cr_gradient(const AtomisticMesh& M, const CRField& w) {
  std::vector<Mat2> G(M.num_elements());
  for (int e = 0; e < M.num_elements(); ++e) G[e] = cr_gradient(M, w, e);
  return G;
}

double geometric_constant(const AtomisticMesh& M, int e) {
  double s = 0.0;
  for (auto& g : M.grad_lambda(e)) s += 2.0 * g.norm();
  return M.eps() * s;
}

Vec2 path_integral(const AtomisticMesh& M, const StressField& sigma, const std::vector<int>& edges) {
  Vec2 s = Vec2::Zero();
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const int f = edges[k], g = edges[k + 1];
    if (f == g) continue;
    int common = -1;
    for (int e : M.edge_elements(f))
      if (M.local_edge(e, g) >= 0) common = e;
    if (common < 0) {
      std::ostringstream os;
      os << "path_integral: segment " << k << " from edge " << f << " to edge " << g
         << " does not stay inside one element";
      throw std::invalid_argument(os.str());
    }
    const int t = M.type_of(common);
    const Vec2 d = M.eps() * (AtomisticMesh::reference_midpoint(t, M.local_edge(common, g)) -
                              AtomisticMesh::reference_midpoint(t, M.local_edge(common, f)));
    s += sigma[common] * d;
  }
  return s;
}

Reconstruction reconstruct_potential(const AtomisticMesh& M, const StressField& sigma, double tol) {
  const auto& P = M.p1();
  double smax = 0.0;
  for (auto& s : sigma) smax = std::max(smax, s.norm());
  Reconstruction out;
  out.w = CRField::zero(M);
  if (smax == 0.0) return out;

  const Field<2> div = P.divergence_covector(sigma);
  int worst = 0;
  for (int x = 0; x < div.cols(); ++x)
    if (div.col(x).norm() > div.col(worst).norm()) worst = x;
  out.divergence = div.col(worst).norm() / (M.eps() * smax);
  if (out.divergence > tol) {
    std::ostringstream os;
    os << "reconstruct_potential: stress is not divergence free; hat function at site ("
       << M.lattice().site(worst).transpose() << ") gives " << div.col(worst).norm();
    throw std::domain_error(os.str());
  }

  Mat2 s0 = Mat2::Zero();
  for (int e = 0; e < P.size(); ++e) s0 += P.vol[e] * sigma[e];
  s0 /= P.total_volume();
  out.sigma0 = s0;
  const Mat2 Jt = rotation_J().transpose();

  // spanning tree from edge 0, neighbours in element/local-edge order
  std::vector<char> seen(M.num_edges(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  while (!q.empty()) {
    const int f = q.front();
    q.pop();
    for (int e : M.edge_elements(f)) {
      const Mat2 alpha = (sigma[e] - s0) * Jt;
      const int i = M.local_edge(e, f);
      for (int j = 0; j < 3; ++j) {
        if (j == i) continue;
        const int g = M.element_edges(e)[j];
        const Vec2 d = M.eps() * (AtomisticMesh::reference_midpoint(M.type_of(e), j) -
                                  AtomisticMesh::reference_midpoint(M.type_of(e), i));
        const Vec2 val = out.w.v.col(f) + alpha * d;
        if (!seen[g]) {
          seen[g] = 1;
          out.w.v.col(g) = val;
          q.push(g);
        } else {
          out.loop_residual = std::max(out.loop_residual, (val - out.w.v.col(g)).norm());
        }
      }
    }
  }
  out.loop_residual /= smax * M.eps();
  const Mat2 J = rotation_J();
  for (int e = 0; e < P.size(); ++e)
    out.element_residual =
        std::max(out.element_residual, (s0 + cr_gradient(M, out.w, e) * J - sigma[e]).norm() / smax);
  return out;
}

// ---------------------------------------------------------------------------

CorrectorSolver::CorrectorSolver(const AcEnergy& E) : E_(&E) {
  const auto& dec = E.decomposition();
  if (dec.elements_with(ATOMISTIC).empty()) throw std::invalid_argument("CorrectorSolver: no atomistic region");
  if (!dec.atomistic_connected())
    throw std::invalid_argument("CorrectorSolver: atomistic region is not connected; psi cannot be normalised");
  width_ = interface_width(dec);
  Ma_ = aggregate_lipschitz(E.potential());
  Mi_ = E.interface() ? E.interface()->aggregate_lipschitz() : 0.0;
  const auto& M = E.mesh();
  noncontinuum_.assign(M.num_elements(), 0);
  for (int e = 0; e < M.num_elements(); ++e) noncontinuum_[e] = dec.label(e) != CONTINUUM;
  // an edge whose two elements are both atomistic
  for (int f = 0; f < M.num_edges() && anchor_edge_ < 0; ++f) {
    const auto& nb = M.edge_elements(f);
    if (dec.label(nb[0]) == ATOMISTIC && dec.label(nb[1]) == ATOMISTIC) anchor_edge_ = f;
  }
  if (anchor_edge_ < 0) anchor_edge_ = M.element_edges(dec.elements_with(ATOMISTIC)[0])[0];
}

double CorrectorSolver::MT(int e) const {
  switch (E_->decomposition().label(e)) {
    case ATOMISTIC: return 0.0;
    case INTERFACE: return (Mi_ + Ma_) * (1.0 + 7.0 * width_);
    default: return Ma_ + 7.0 * (Mi_ + Ma_) * width_;
  }
}

StressField CorrectorSolver::defect_at(const Mat2& F) const {
  const auto& M = E_->mesh();
  const auto y = Deformation<2>::homogeneous(M.lattice(), F);
  // on T_c the a/c stress is dW(F) by definition, so only T_a, T_i are assembled
  StressField S = sigma_ac(*E_, y, noncontinuum_);
  const Mat2 dW = cauchy_born_dW(E_->potential(), F);
  for (int e = 0; e < M.num_elements(); ++e) S[e] = noncontinuum_[e] ? Mat2(S[e] - dW) : Mat2::Zero();
  return S;
}

Reconstruction CorrectorSolver::reconstruct_at(const Mat2& F) const {
  try {
    return reconstruct_potential(E_->mesh(), defect_at(F));
  } catch (const std::domain_error& err) {
    const auto y = Deformation<2>::homogeneous(E_->mesh().lattice(), F);
    std::ostringstream os;
    os << "coupling is not patch test consistent: ghost force " << E_->forces(y).cwiseAbs().maxCoeff() << " ("
       << err.what() << ")";
    throw std::domain_error(os.str());
  }
}

const CRField& CorrectorSolver::psi(const Mat2& F) {
  std::array<long long, 4> key;
  for (int k = 0; k < 4; ++k) key[k] = std::llround(F.data()[k] * 1e6);
  auto& bucket = memo_[key];
  for (auto& [G, w] : bucket)
    if (G == F) return w;
  Reconstruction r = reconstruct_at(F);
  ++solves_;
  const Vec2 c = r.w.v.col(anchor_edge_);
  r.w.v.colwise() -= c;
  bucket.emplace_back(F, std::move(r.w));
  return bucket.back().second;
}

CRField CorrectorSolver::psi_hat(const Deformation<2>& y) {
  const auto& M = E_->mesh();
  const auto& dec = E_->decomposition();
  const auto G = M.gradients(y);
  CRField out = CRField::zero(M);
  for (int f = 0; f < M.num_edges(); ++f) {
    Mat2 F = Mat2::Zero();
    int n = 0;
    for (int e : M.edge_elements(f))
      if (dec.label(e) != ATOMISTIC) {
        F += G[e];
        ++n;
      }
    if (n == 0) continue;  // psi vanishes on Omega_a
    F /= n;
    out.v.col(f) = psi(F).v.col(f);
  }
  return out;
}

double StressErrorReport::rhs(double p) const {
  double s = 0.0;
  for (auto& r : rows) {
    if (p <= 0)
      s = std::max(s, r.bound);
    else
      s += element_area * std::pow(r.bound, p);
  }
  return p <= 0 ? s : std::pow(s, 1.0 / p);
}

StressErrorReport modified_stress_and_error(CorrectorSolver& C, const Deformation<2>& y) {
  const AcEnergy& E = C.energy();
  const auto& M = E.mesh();
  const auto& dec = E.decomposition();
  StressErrorReport rep;
  rep.element_area = M.element_area();
  rep.sigma_a = sigma_atomistic(M, E.potential(), y);
  rep.sigma_ac = sigma_ac(E, y);
  const CRField ph = C.psi_hat(y);
  const Mat2 J = rotation_J();
  const auto G = M.gradients(y);
  Neighbourhoods nb(dec);
  rep.sigma_hat.resize(M.num_elements());
  rep.R.resize(M.num_elements());
  double scale = 0.0;
  for (auto& s : rep.sigma_a) scale = std::max(scale, s.norm());
  for (int e = 0; e < M.num_elements(); ++e) {
    rep.sigma_hat[e] = rep.sigma_ac[e] - cr_gradient(M, ph, e) * J;
    rep.R[e] = rep.sigma_hat[e] - rep.sigma_a[e];
    ElementBound b;
    b.element = e;
    b.region = dec.label(e);
    b.R = rep.R[e].norm();
    if (b.region == ATOMISTIC) {
      b.osc = 0.0;
      b.bound = 0.0;
      rep.R_atomistic_max = std::max(rep.R_atomistic_max, b.R);
    } else {
      b.osc = oscillation(G, nb.omega(e), M.eps());
      b.bound = M.eps() * C.MT(e) * b.osc;
      if (b.bound > 0) rep.worst_ratio = std::max(rep.worst_ratio, b.R / b.bound);
      // roundoff allowance relative to the stress scale
      if (b.R > b.bound + 1e-10 * std::max(1.0, scale)) rep.all_hold = false;
    }
    rep.rows.push_back(b);
  }
  if (rep.R_atomistic_max > 1e-10 * std::max(1.0, scale)) rep.all_hold = false;
  return rep;
}

void write_cr_csv(const AtomisticMesh& M, const CRField& w, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "edge,qx,qy,w1,w2\n" << std::setprecision(17);
  for (int f = 0; f < M.num_edges(); ++f) {
    const Vec2 q = M.eps() * M.edge_midpoint(f);
    os << f << ',' << q[0] << ',' << q[1] << ',' << w.v(0, f) << ',' << w.v(1, f) << '\n';
  }
}

}  // namespace aclab
