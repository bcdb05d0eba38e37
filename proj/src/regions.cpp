#include "aclab/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace aclab {

std::vector<BondPiece> bond_pattern(const IVec2& r) {
  std::vector<BondPiece> out;
  const IVec2 zero(0, 0);
  for (int cx = std::min(0, r[0]) - 1; cx <= std::max(0, r[0]); ++cx)
    for (int cy = std::min(0, r[1]) - 1; cy <= std::max(0, r[1]); ++cy)
      for (int type = 0; type < 2; ++type) {
        Tri t = AtomisticMesh::reference_tri(type);
        for (auto& v : t) v += IVec2(cx, cy);
        const SegmentClip c = clip_segment(t, zero, r);
        if (!c.hit) continue;
        BondPiece p;
        p.dcell = IVec2(cx, cy);
        p.type = type;
        p.touch = true;
        if (c.positive()) {
          if (c.edge >= 0) {
            p.on_edge = c.length();
            p.edge_local = c.edge;
          } else {
            p.interior = c.length();
          }
        }
        out.push_back(p);
      }
  return out;
}

RegionDecomposition::RegionDecomposition(const AtomisticMesh& M, const Stencil<2>& R, std::vector<int> labels)
    : M_(&M), R_(R), labels_(std::move(labels)) {
  if (static_cast<int>(labels_.size()) != M.num_elements())
    throw std::invalid_argument("RegionDecomposition: one label per element required");
  if (R.max_norm_inf() >= M.N()) throw std::invalid_argument("RegionDecomposition: stencil does not fit the lattice");
  for (int r = 0; r < R.size(); ++r) patterns_.push_back(bond_pattern(R[r]));

  const auto& L = M.lattice();
  in_La_.assign(L.size(), 0);
  for (int x = 0; x < L.size(); ++x) {
    bool hit = false;
    for (int r = 0; r < R.size() && !hit; ++r)
      for (auto& p : patterns_[r])
        if (labels_[piece_element(x, p)] == ATOMISTIC) {
          hit = true;
          break;
        }
    if (hit) {
      in_La_[x] = 1;
      La_.push_back(x);
    }
  }
  for (int x : La_)
    for (int r = 0; r < R.size(); ++r)
      if (!violation_ && covered({x, r}, (1u << ATOMISTIC) | (1u << INTERFACE)) < 1.0 - 1e-12)
        violation_ = Bond{x, r};

  for (int x = 0; x < L.size(); ++x)
    for (int r = 0; r < R.size(); ++r) {
      bool near = false;
      for (auto& p : patterns_[r])
        if (p.interior + p.on_edge > 0 && labels_[piece_element(x, p)] == INTERFACE) near = true;
      if (near && covered({x, r}, 1u << INTERFACE) > 1.0 - 1e-12) Bi_.push_back({x, r});
    }

  // shared-edge connectivity of the atomistic elements
  std::vector<int> atom = elements_with(ATOMISTIC);
  if (!atom.empty()) {
    std::vector<char> seen(M.num_elements(), 0);
    std::queue<int> q;
    q.push(atom[0]);
    seen[atom[0]] = 1;
    std::size_t count = 0;
    while (!q.empty()) {
      const int e = q.front();
      q.pop();
      ++count;
      for (int f : M.element_edges(e))
        for (int e2 : M.edge_elements(f))
          if (!seen[e2] && labels_[e2] == ATOMISTIC) {
            seen[e2] = 1;
            q.push(e2);
          }
    }
    connected_ = count == atom.size();
  }
}

std::vector<int> RegionDecomposition::elements_with(int region) const {
  std::vector<int> out;
  for (int e = 0; e < static_cast<int>(labels_.size()); ++e)
    if (labels_[e] == region) out.push_back(e);
  return out;
}

int RegionDecomposition::piece_element(int site, const BondPiece& p) const {
  return M_->element(M_->lattice().site(site) + p.dcell, p.type);
}

int RegionDecomposition::find_Bi(const Bond& b) const {
  auto it = std::lower_bound(Bi_.begin(), Bi_.end(), b, [](const Bond& u, const Bond& v) {
    return u.site < v.site || (u.site == v.site && u.r < v.r);
  });
  if (it != Bi_.end() && *it == b) return static_cast<int>(it - Bi_.begin());
  return -1;
}

double RegionDecomposition::covered(const Bond& b, unsigned mask) const {
  double c = 0.0;
  for (auto& p : patterns_[b.r]) {
    const int e = piece_element(b.site, p);
    if (!(mask & (1u << labels_[e]))) continue;
    c += p.interior;
    if (p.on_edge > 0) {
      const int f = M_->element_edges(e)[p.edge_local];
      const auto& nb = M_->edge_elements(f);
      const int other = nb[0] == e ? nb[1] : nb[0];
      c += (mask & (1u << labels_[other])) ? 0.5 * p.on_edge : p.on_edge;
    }
  }
  return c;
}

bool RegionDecomposition::edge_on_interface_boundary(int f) const {
  const auto& nb = M_->edge_elements(f);
  return (labels_[nb[0]] == INTERFACE) != (labels_[nb[1]] == INTERFACE);
}

double RegionDecomposition::on_interface_boundary(const Bond& b) const {
  double c = 0.0;
  for (auto& p : patterns_[b.r]) {
    if (p.on_edge <= 0) continue;
    const int e = piece_element(b.site, p);
    if (labels_[e] != INTERFACE) continue;
    if (edge_on_interface_boundary(M_->element_edges(e)[p.edge_local])) c += p.on_edge;
  }
  return c;
}

double RegionDecomposition::chi(const Bond& b, const BondPiece& p, ChiVariant v) const {
  double w = p.interior;
  if (p.on_edge > 0) {
    bool full = false;
    if (v == ChiVariant::interface) {
      const int e = piece_element(b.site, p);
      full = edge_on_interface_boundary(M_->element_edges(e)[p.edge_local]);
    }
    w += (full ? 1.0 : 0.5) * p.on_edge;
  }
  return w;
}

void RegionDecomposition::require_valid() const {
  if (!violation_) return;
  const auto& L = M_->lattice();
  std::ostringstream os;
  os << "invalid decomposition: bond from site (" << L.site(violation_->site).transpose() << ") along ("
     << R_[violation_->r].transpose() << ") leaves the atomistic and interface regions";
  throw std::invalid_argument(os.str());
}

std::vector<int> block_labels(const AtomisticMesh& M, int a, int thickness) {
  if (2 * (a + thickness) >= 2 * M.N()) throw std::invalid_argument("block_labels: block does not fit");
  std::vector<int> lab(M.num_elements(), CONTINUUM);
  for (int e = 0; e < M.num_elements(); ++e) {
    const IVec2 p = M.cell_of(e);
    auto inside = [&](int h) { return p[0] >= -h && p[0] <= h - 1 && p[1] >= -h && p[1] <= h - 1; };
    if (inside(a))
      lab[e] = ATOMISTIC;
    else if (inside(a + thickness))
      lab[e] = INTERFACE;
  }
  return lab;
}

std::vector<int> uniform_labels(const AtomisticMesh& M, int region) {
  return std::vector<int>(M.num_elements(), region);
}

// ---------------------------------------------------------------------------

Neighbourhoods::Neighbourhoods(const RegionDecomposition& dec) : dec_(&dec) {
  const auto& R = dec.stencil();
  for (int type = 0; type < 2; ++type) {
    const Tri T = AtomisticMesh::reference_tri(type);
    std::set<std::pair<std::pair<int, int>, int>> hits;
    for (int i = 0; i < R.size(); ++i)
      for (int j = i; j < R.size(); ++j) {
        std::vector<Vec2> pts;
        for (auto& v : T)
          for (const IVec2& s : {IVec2(0, 0), R[i], R[j], IVec2(R[i] + R[j])}) pts.push_back((v + s).cast<double>());
        const Polygon Z = convex_hull(pts);
        double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
        for (auto& p : Z) {
          x0 = std::min(x0, p[0]);
          x1 = std::max(x1, p[0]);
          y0 = std::min(y0, p[1]);
          y1 = std::max(y1, p[1]);
        }
        for (int cx = static_cast<int>(std::floor(x0)) - 1; cx <= static_cast<int>(std::ceil(x1)); ++cx)
          for (int cy = static_cast<int>(std::floor(y0)) - 1; cy <= static_cast<int>(std::ceil(y1)); ++cy)
            for (int t2 = 0; t2 < 2; ++t2) {
              Polygon P;
              for (auto& v : AtomisticMesh::reference_tri(t2)) P.push_back((v + IVec2(cx, cy)).cast<double>());
              if (polygon_area(clip_convex(P, Z)) > 1e-9) hits.insert({{cx, cy}, t2});
            }
      }
    for (auto& h : hits) pat_[type].push_back({IVec2(h.first.first, h.first.second), h.second});
  }
}

std::vector<int> Neighbourhoods::omega_a(int e) const {
  const auto& M = dec_->mesh();
  std::vector<int> out;
  for (auto& [dc, t] : pat_[M.type_of(e)]) out.push_back(M.element(M.cell_of(e) + dc, t));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<int> Neighbourhoods::omega(int e) const {
  std::vector<int> s = omega_a(e);
  const auto& nb = dec_->mesh().vertex_neighbours(e);
  s.insert(s.end(), nb.begin(), nb.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  std::vector<int> out;
  for (int t : s)
    if (dec_->label(t) != ATOMISTIC) out.push_back(t);
  return out;
}

std::vector<int> Neighbourhoods::omega_c(int e) const {
  std::vector<int> out;
  for (int t : dec_->mesh().vertex_neighbours(e))
    if (dec_->label(t) == CONTINUUM) out.push_back(t);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> atomistic_edge_distance(const RegionDecomposition& dec) {
  const auto& M = dec.mesh();
  const int nf = M.num_edges();
  std::vector<double> dist(nf, std::numeric_limits<double>::infinity());
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  for (int e : dec.elements_with(ATOMISTIC))
    for (int f : M.element_edges(e))
      if (dist[f] > 0) {
        dist[f] = 0;
        pq.push({0.0, f});
      }
  if (pq.empty()) throw std::invalid_argument("interface_width: no atomistic edges");
  while (!pq.empty()) {
    auto [d, f] = pq.top();
    pq.pop();
    if (d > dist[f]) continue;
    for (int e : M.edge_elements(f)) {
      const int i = M.local_edge(e, f);
      for (int j = 0; j < 3; ++j) {
        if (j == i) continue;
        const int g = M.element_edges(e)[j];
        const double nd = d + (M.midpoint_local(e, j) - M.midpoint_local(e, i)).norm();
        if (nd < dist[g]) {
          dist[g] = nd;
          pq.push({nd, g});
        }
      }
    }
  }
  return dist;
}

double interface_width(const RegionDecomposition& dec) {
  const auto dist = atomistic_edge_distance(dec);
  const auto& M = dec.mesh();
  double w = 0.0;
  for (int e : dec.elements_with(INTERFACE))
    for (int f : M.element_edges(e)) w = std::max(w, dist[f]);
  return w;
}

}  // namespace aclab
