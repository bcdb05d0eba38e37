#include "aclab/lattice.hpp"

#include <cmath>

namespace aclab {

template <int D> Field<D> raw_values(const Lattice<D>& L, const Deformation<D>& y) {
  int total = 1;
  for (int j = 0; j < D; ++j) total *= L.side() + 1;
  Field<D> raw(D, total);
  for (int k = 0; k < total; ++k) {
    IVec<D> p;
    int t = k;
    for (int j = 0; j < D; ++j) {
      p[j] = t % (L.side() + 1) - L.N();
      t /= L.side() + 1;
    }
    raw.col(k) = y.A * (p.template cast<double>() * L.eps()) + y.u.col(L.index(p));
  }
  return raw;
}

template <int D> Mat<D> macroscopic_strain(const Lattice<D>& L, const Field<D>& raw, double tol) {
  int total = 1;
  for (int j = 0; j < D; ++j) total *= L.side() + 1;
  if (raw.cols() != total) throw std::invalid_argument("macroscopic_strain: raw field has wrong size");
  Mat<D> A = Mat<D>::Zero();
  for (int j = 0; j < D; ++j) {
    bool first = true;
    Vec<D> col = Vec<D>::Zero();
    for (int k = 0; k < total; ++k) {
      IVec<D> p;
      int t = k;
      for (int i = 0; i < D; ++i) {
        p[i] = t % (L.side() + 1) - L.N();
        t /= L.side() + 1;
      }
      if (p[j] != -L.N()) continue;
      IVec<D> q = p;
      q[j] += L.side();
      const Vec<D> c = 0.5 * (raw.col(closed_box_index(L, q)) - raw.col(k));
      if (first) {
        col = c;
        first = false;
      } else if ((c - col).norm() > tol * (1.0 + col.norm())) {
        throw std::invalid_argument("macroscopic_strain: inconsistent increments, not a periodic deformation");
      }
    }
    A.col(j) = col;
  }
  return A;
}

template Field<1> raw_values<1>(const Lattice<1>&, const Deformation<1>&);
template Field<2> raw_values<2>(const Lattice<2>&, const Deformation<2>&);
template Mat<1> macroscopic_strain<1>(const Lattice<1>&, const Field<1>&, double);
template Mat<2> macroscopic_strain<2>(const Lattice<2>&, const Field<2>&, double);

}  // namespace aclab
