#pragma once

#include "aclab/chain1d.hpp"
#include "aclab/interface.hpp"

#include <memory>
#include <random>

namespace fx {

using namespace aclab;

// Morse pair on the nn + nnn stencil, rest length |r|, weight 1/2 per bond
inline std::shared_ptr<const PairPotential<2>> morse2d() {
  auto R = stencil_nn_nnn();
  std::vector<std::shared_ptr<const Radial>> f;
  std::vector<double> w;
  for (int r = 0; r < R.size(); ++r) {
    f.push_back(std::make_shared<MorseRadial>(1.0, 4.0, R.vec(r).norm(), 1.8, 2.3));
    w.push_back(0.5);
  }
  return std::make_shared<PairPotential<2>>(R, f, w);
}

// sum_r 1/2 k |g_r|^2 over +-e1, +-e2 with unit weights
inline std::shared_ptr<const PairPotential<2>> springs2d(double k = 1.0) {
  auto R = stencil_nn();
  std::vector<std::shared_ptr<const Radial>> f(R.size(), std::make_shared<HarmonicRadial>(k, 0.0));
  return std::make_shared<PairPotential<2>>(R, f, std::vector<double>(R.size(), 1.0));
}

inline Chain1d chain(int N) {
  return Chain1d(N, std::make_shared<HarmonicRadial>(1.0, 1.0), std::make_shared<MorseRadial>(0.5, 3.0, 2.0, 2.6, 3.2));
}

// atomistic block + 2-cell interface ring used throughout
struct Coupled {
  AtomisticMesh M;
  std::shared_ptr<const PairPotential<2>> V;
  RegionDecomposition dec;
  std::shared_ptr<const BondSplitInterface> Ei;
  AcEnergy Eac;
  AtomisticEnergy<2> Ea;

  explicit Coupled(int N, int half = -1)
      : M(N),
        V(morse2d()),
        dec(M, V->stencil(), block_labels(M, half < 0 ? std::max(1, N / 8 * 2) : half, 2)),
        Ei(std::make_shared<BondSplitInterface>(M, V, dec)),
        Eac(M, V, dec, Ei),
        Ea(M.lattice(), V) {}
};

inline Mat2 random_strain(std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> U(-amp, amp);
  Mat2 F;
  F << 1 + U(rng), U(rng), U(rng), 1 + U(rng);
  return F;
}

template <int D> Field<D> random_field(int n, std::mt19937_64& rng, double amp) {
  std::uniform_real_distribution<double> U(-amp, amp);
  Field<D> z(D, n);
  for (int i = 0; i < z.size(); ++i) z.data()[i] = U(rng);
  return z;
}

}  // namespace fx
