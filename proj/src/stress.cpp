#include "aclab/stress.hpp"

#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>

namespace aclab {

StressField sigma_atomistic(const AtomisticMesh& M, const SitePotential<2>& V, const Deformation<2>& y) {
  const auto& L = M.lattice();
  const auto& R = V.stencil();
  const double c = L.eps() * L.eps() / M.element_area();
  std::vector<std::vector<BondPiece>> pat;
  for (int r = 0; r < R.size(); ++r) pat.push_back(bond_pattern(R[r]));
  StressField S(M.num_elements(), Mat2::Zero());
  std::vector<Vec2> g, dV(R.size());
  for (int x = 0; x < L.size(); ++x) {
    stencil_differences(L, y, x, R, g);
    V.gradient(g, dV);
    const IVec2 p = L.site(x);
    for (int r = 0; r < R.size(); ++r) {
      const Mat2 t = c * dV[r] * R.vec(r).transpose();
      for (auto& pc : pat[r]) {
        const double w = pc.interior + 0.5 * pc.on_edge;
        if (w > 0) S[M.element(p + pc.dcell, pc.type)] += w * t;
      }
    }
  }
  return S;
}

void add_interface_stress(const AtomisticMesh& M, const InterfaceModel& Ei, const Deformation<2>& y,
                          const RegionDecomposition* dec, StressField& S) {
  const auto& L = M.lattice();
  const double c = L.eps() * L.eps() / M.element_area();
  const auto& B = Ei.bonds();
  const auto P = Ei.partials(y);
  std::map<std::pair<int, int>, std::vector<BondPiece>> pat;
  for (std::size_t k = 0; k < B.size(); ++k) {
    const IVec2& r = B[k].r;
    auto key = std::make_pair(r[0], r[1]);
    auto it = pat.find(key);
    if (it == pat.end()) it = pat.emplace(key, bond_pattern(r)).first;
    const Mat2 t = c * P[k] * r.cast<double>().transpose();
    const IVec2 x = L.site(B[k].site);
    for (auto& pc : it->second) {
      const int e = M.element(x + pc.dcell, pc.type);
      double w = pc.interior;
      if (pc.on_edge > 0) {
        bool full = false;
        if (dec) full = dec->edge_on_interface_boundary(M.element_edges(e)[pc.edge_local]);
        w += (full ? 1.0 : 0.5) * pc.on_edge;
      }
      if (dec && dec->label(e) != INTERFACE) continue;
      if (w > 0) S[e] += w * t;
    }
  }
}

StressField sigma_ac(const AcEnergy& E, const Deformation<2>& y, const std::vector<char>& only) {
  const auto& M = E.mesh();
  const auto& dec = E.decomposition();
  const auto& V = E.potential();
  const auto& L = M.lattice();
  const auto& R = V.stencil();
  const double c = L.eps() * L.eps() / M.element_area();
  auto wanted = [&](int e) { return only.empty() || only[e]; };
  StressField S(M.num_elements(), Mat2::Zero());
  std::vector<Vec2> g, dV(R.size());
  for (int x : dec.La()) {
    stencil_differences(L, y, x, R, g);
    V.gradient(g, dV);
    for (int r = 0; r < R.size(); ++r) {
      const Mat2 t = c * dV[r] * R.vec(r).transpose();
      for (auto& pc : dec.pattern(r)) {
        const int e = dec.piece_element(x, pc);
        if (!wanted(e)) continue;
        const double w = dec.chi({x, r}, pc, ChiVariant::plain);
        if (w > 0) S[e] += w * t;
      }
    }
  }
  const auto& P = M.p1();
  for (int e = 0; e < M.num_elements(); ++e)
    if (dec.label(e) == CONTINUUM && wanted(e)) S[e] = cauchy_born_dW(V, P.gradient(y, e));
  if (E.interface()) {
    StressField Si(M.num_elements(), Mat2::Zero());
    add_interface_stress(M, *E.interface(), y, &dec, Si);
    for (int e = 0; e < M.num_elements(); ++e)
      if (wanted(e)) S[e] += Si[e];
  }
  return S;
}

StressField sigma_cauchy_born(const AtomisticMesh& M, const SitePotential<2>& V, const Deformation<2>& y) {
  StressField S(M.num_elements());
  for (int e = 0; e < M.num_elements(); ++e) S[e] = cauchy_born_dW(V, M.p1().gradient(y, e));
  return S;
}

Mat2 mean_stress(const AtomisticMesh& M, const StressField& S) {
  const auto& P = M.p1();
  Mat2 m = Mat2::Zero();
  for (int e = 0; e < P.size(); ++e) m += P.vol[e] * S[e];
  return m / P.total_volume();
}

RepresentationCheck check_representation(const AtomisticMesh& M, const ForceField<2>& f, const StressField& S,
                                         const Field<2>& z) {
  const auto& P = M.p1();
  double rhs = 0.0, scale = 0.0;
  for (int e = 0; e < P.size(); ++e) {
    Mat2 G = Mat2::Zero();
    for (int i = 0; i < 3; ++i) G += z.col(P.vert[e][i]) * P.grad[e][i].transpose();
    rhs += P.vol[e] * (S[e].cwiseProduct(G)).sum();
    scale += P.vol[e] * S[e].norm() * G.norm();
  }
  RepresentationCheck c;
  c.defect = std::abs(f.cwiseProduct(z).sum() - rhs);
  c.scale = scale;
  return c;
}

void write_stress_csv(const AtomisticMesh& M, const StressField& S, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "element,cell_x,cell_y,type,s11,s12,s21,s22\n" << std::setprecision(17);
  for (int e = 0; e < M.num_elements(); ++e) {
    const IVec2 p = M.cell_of(e);
    os << e << ',' << p[0] << ',' << p[1] << ',' << M.type_of(e) << ',' << S[e](0, 0) << ',' << S[e](0, 1) << ','
       << S[e](1, 0) << ',' << S[e](1, 1) << '\n';
  }
}

}  // namespace aclab
