#include "aclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace aclab {

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.p) * b.q < static_cast<__int128>(b.p) * a.q;
}

namespace {

Rational make_rational(std::int64_t p, std::int64_t q) {
  if (q < 0) {
    p = -p;
    q = -q;
  }
  const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
  if (g > 1) {
    p /= g;
    q /= g;
  }
  return {p, q};
}

std::int64_t cross(const IVec2& u, const IVec2& v) {
  return static_cast<std::int64_t>(u[0]) * v[1] - static_cast<std::int64_t>(u[1]) * v[0];
}

}  // namespace

long long twice_area(const Tri& T) { return cross(T[1] - T[0], T[2] - T[0]); }

SegmentClip clip_segment(const Tri& T, const IVec2& a, const IVec2& r) {
  const std::int64_t orient = twice_area(T);
  if (orient == 0) throw std::invalid_argument("clip_segment: degenerate triangle");
  const std::int64_t sgn = orient > 0 ? 1 : -1;

  Rational lo{0, 1}, hi{1, 1};
  int on_edge = -1;
  for (int k = 0; k < 3; ++k) {
    // edge opposite vertex k runs from T[k+1] to T[k+2]; inside means
    // sgn * cross(e, p - T[k+1]) >= 0
    const IVec2& v = T[(k + 1) % 3];
    const IVec2 e = T[(k + 2) % 3] - v;
    const std::int64_t alpha = sgn * cross(e, a - v);
    const std::int64_t beta = sgn * cross(e, r);
    if (beta == 0) {
      if (alpha < 0) return {};
      if (alpha == 0) on_edge = k;
    } else if (beta > 0) {
      const Rational b = make_rational(-alpha, beta);
      if (lo < b) lo = b;
    } else {
      const Rational b = make_rational(alpha, -beta);
      if (b < hi) hi = b;
    }
  }
  if (hi < lo) return {};
  SegmentClip c;
  c.hit = true;
  c.t0 = lo;
  c.t1 = hi;
  c.edge = (lo < hi) ? on_edge : -1;
  return c;
}

double bond_chi_integral(const Tri& T, const IVec2& a, const IVec2& r, ChiVariant variant,
                         const std::array<bool, 3>& boundary_edge) {
  const SegmentClip c = clip_segment(T, a, r);
  if (!c.positive()) return 0.0;
  if (c.edge < 0) return c.length();
  const bool full = variant == ChiVariant::interface && boundary_edge[c.edge];
  return (full ? 1.0 : 0.5) * c.length();
}

double verify_bond_density(const Tri& T, const IVec2& r) {
  // In lattice units (eps = 1) the identity reads sum_x avg chi_T = |T|.
  int xmin = std::min({T[0][0], T[1][0], T[2][0]}), xmax = std::max({T[0][0], T[1][0], T[2][0]});
  int ymin = std::min({T[0][1], T[1][1], T[2][1]}), ymax = std::max({T[0][1], T[1][1], T[2][1]});
  xmin -= std::max(r[0], 0);
  xmax -= std::min(r[0], 0);
  ymin -= std::max(r[1], 0);
  ymax -= std::min(r[1], 0);
  // Exact accumulation: each term is rational with denominator dividing a
  // product of small integers; we sum the interval endpoints as rationals
  // in a common long double-free way by summing numerators over the lcm.
  std::int64_t lcm = 1;
  std::vector<std::pair<Rational, std::int64_t>> terms;  // (length, weight*2)
  for (int x = xmin; x <= xmax; ++x)
    for (int y = ymin; y <= ymax; ++y) {
      const SegmentClip c = clip_segment(T, IVec2(x, y), r);
      if (!c.positive()) continue;
      const std::int64_t q = c.t0.q / std::gcd(c.t0.q, c.t1.q) * c.t1.q;
      const Rational len = make_rational(c.t1.p * (q / c.t1.q) - c.t0.p * (q / c.t0.q), q);
      terms.push_back({len, c.edge < 0 ? 2 : 1});
      lcm = lcm / std::gcd(lcm, len.q) * len.q;
    }
  __int128 num = 0;
  for (auto& [len, w2] : terms) num += static_cast<__int128>(len.p) * (lcm / len.q) * w2;
  // LHS = num / (2 lcm); |T| = twice_area / 2
  const __int128 diff = num - static_cast<__int128>(std::llabs(twice_area(T))) * lcm;
  return std::abs(static_cast<double>(diff)) / (static_cast<double>(lcm) * std::llabs(twice_area(T)));
}

// ---------------------------------------------------------------------------

Polygon convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  Polygon h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && turn(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && turn(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

double polygon_area(const Polygon& P) {
  double a = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    const Vec2& p = P[i];
    const Vec2& q = P[(i + 1) % P.size()];
    a += p[0] * q[1] - p[1] * q[0];
  }
  return 0.5 * std::abs(a);
}

// Sutherland-Hodgman; clip must be convex and counter-clockwise.
Polygon clip_convex(const Polygon& subject, const Polygon& clip) {
  Polygon out = subject;
  for (std::size_t i = 0; i < clip.size() && !out.empty(); ++i) {
    const Vec2 a = clip[i], b = clip[(i + 1) % clip.size()];
    auto side = [&](const Vec2& p) { return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]); };
    Polygon in = std::move(out);
    out.clear();
    for (std::size_t j = 0; j < in.size(); ++j) {
      const Vec2 p = in[j], q = in[(j + 1) % in.size()];
      const double sp = side(p), sq = side(q);
      if (sp >= 0) out.push_back(p);
      if ((sp >= 0) != (sq >= 0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
    }
  }
  return out;
}

}  // namespace aclab
