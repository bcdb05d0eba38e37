#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace aclab {

template <int D> using Vec = Eigen::Matrix<double, D, 1>;
template <int D> using Mat = Eigen::Matrix<double, D, D>;
template <int D> using IVec = Eigen::Matrix<int, D, 1>;
template <int D> using Field = Eigen::Matrix<double, D, Eigen::Dynamic>;

using Vec2 = Vec<2>;
using Mat2 = Mat<2>;
using IVec2 = IVec<2>;

inline int wrap_index(int i, int N) {
  // representative in {-N+1, ..., N}
  const int L = 2 * N;
  int k = ((i + N - 1) % L + L) % L;
  return k - N + 1;
}

// Periodic lattice eps*{-N+1..N}^D on the reference cell (-1,1]^D.
template <int D> class Lattice {
 public:
  explicit Lattice(int N) : N_(N) {
    if (N < 1) throw std::invalid_argument("Lattice: N must be positive");
  }

  int N() const { return N_; }
  double eps() const { return 1.0 / N_; }
  int side() const { return 2 * N_; }
  int size() const {
    int s = 1;
    for (int j = 0; j < D; ++j) s *= side();
    return s;
  }
  double volume() const { return D == 1 ? 2.0 : 4.0; }

  IVec<D> wrap(IVec<D> p) const {
    for (int j = 0; j < D; ++j) p[j] = wrap_index(p[j], N_);
    return p;
  }

  int index(const IVec<D>& p) const {
    int idx = 0, stride = 1;
    for (int j = 0; j < D; ++j) {
      const int L = side();
      const int k = ((p[j] + N_ - 1) % L + L) % L;
      idx += k * stride;
      stride *= L;
    }
    return idx;
  }

  IVec<D> site(int idx) const {
    IVec<D> p;
    for (int j = 0; j < D; ++j) {
      p[j] = idx % side() - N_ + 1;
      idx /= side();
    }
    return p;
  }

  Vec<D> coord(int idx) const { return site(idx).template cast<double>() * eps(); }

 private:
  int N_;
};

// Offsets kept in lexicographic order; every (d_r V) tuple follows it.
template <int D> class Stencil {
 public:
  Stencil() = default;
  explicit Stencil(std::vector<IVec<D>> offsets) : r_(std::move(offsets)) {
    std::sort(r_.begin(), r_.end(), [](const IVec<D>& a, const IVec<D>& b) {
      for (int j = 0; j < D; ++j)
        if (a[j] != b[j]) return a[j] < b[j];
      return false;
    });
    for (std::size_t i = 0; i < r_.size(); ++i) {
      if (r_[i].isZero()) throw std::invalid_argument("Stencil: zero offset");
      if (i > 0 && r_[i] == r_[i - 1]) throw std::invalid_argument("Stencil: duplicate offset");
    }
  }

  int size() const { return static_cast<int>(r_.size()); }
  const IVec<D>& operator[](int i) const { return r_[i]; }
  const std::vector<IVec<D>>& offsets() const { return r_; }
  Vec<D> vec(int i) const { return r_[i].template cast<double>(); }

  int find(const IVec<D>& r) const {
    for (int i = 0; i < size(); ++i)
      if (r_[i] == r) return i;
    return -1;
  }
  int max_norm_inf() const {
    int m = 0;
    for (auto& r : r_) m = std::max(m, r.cwiseAbs().maxCoeff());
    return m;
  }

 private:
  std::vector<IVec<D>> r_;
};

// y = A x + u(x), u periodic; u stored column-per-site.
template <int D> struct Deformation {
  Mat<D> A = Mat<D>::Identity();
  Field<D> u;

  static Deformation homogeneous(const Lattice<D>& L, const Mat<D>& A) {
    Deformation y;
    y.A = A;
    y.u = Field<D>::Zero(D, L.size());
    return y;
  }

  Vec<D> value(const Lattice<D>& L, int idx) const { return A * L.coord(idx) + u.col(idx); }
};

template <int D, class Derived>
auto finite_difference(const Lattice<D>& L, const Eigen::MatrixBase<Derived>& v, int site,
                       const IVec<D>& r) {
  if (r.isZero()) throw std::invalid_argument("finite_difference: r = 0");
  const int j = L.index(L.site(site) + r);
  return ((v.col(j) - v.col(site)) / L.eps()).eval();
}

template <int D> Vec<D> finite_difference(const Lattice<D>& L, const Deformation<D>& y, int site,
                                          const IVec<D>& r) {
  return y.A * r.template cast<double>() + finite_difference(L, y.u, site, r);
}

template <int D> void stencil_differences(const Lattice<D>& L, const Deformation<D>& y, int site,
                                          const Stencil<D>& R, std::vector<Vec<D>>& out) {
  out.resize(R.size());
  for (int i = 0; i < R.size(); ++i) out[i] = finite_difference(L, y, site, R[i]);
}

// Raw nodal values live on the closed box {-N..N}^D ((2N+1)^D points,
// first axis fastest). Both x and x + 2e_j are then stored whenever
// x_j = -N, so A e_j = (y(x + 2e_j) - y(x))/2 can be read off directly.
template <int D> int closed_box_index(const Lattice<D>& L, const IVec<D>& p) {
  int idx = 0, stride = 1;
  for (int j = 0; j < D; ++j) {
    idx += (p[j] + L.N()) * stride;
    stride *= L.side() + 1;
  }
  return idx;
}

template <int D> Field<D> raw_values(const Lattice<D>& L, const Deformation<D>& y);

template <int D> Mat<D> macroscopic_strain(const Lattice<D>& L, const Field<D>& raw, double tol = 1e-10);

template <int D> Deformation<D> deformation_from_raw(const Lattice<D>& L, const Field<D>& raw) {
  Deformation<D> y;
  y.A = macroscopic_strain(L, raw);
  y.u.resize(D, L.size());
  for (int i = 0; i < L.size(); ++i)
    y.u.col(i) = raw.col(closed_box_index(L, L.site(i))) - y.A * L.coord(i);
  return y;
}

template <int D> Mat<D> macroscopic_strain(const Deformation<D>& y) { return y.A; }

}  // namespace aclab
