#pragma once

#include <random>

#include "mdscale/linalg.hpp"
#include "mdscale/smacof.hpp"

// Seeded generators shared by the unit and acceptance suites.

namespace mdscale::testutil {

inline Matrix random_matrix(int n, int p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, p);
  for (int c = 0; c < p; ++c) {
    for (int r = 0; r < n; ++r) x(r, c) = normal(gen);
  }
  return x;
}

// Orthonormal p x p matrix from the QR of a random Gaussian matrix; the
// draws mix rotations and reflections.
inline Matrix random_orthonormal(int p, std::uint64_t seed) {
  const Matrix g = random_matrix(p, p, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  return q;
}

// A well-posed instance: dissimilarities are the distances of a random
// configuration (connected, no zero off-diagonal distances), optionally
// with non-unit weights.
inline DissimilarityData random_instance(int n, int p, std::uint64_t seed,
                                         bool unit_weights = true) {
  DissimilarityData data;
  data.delta = distance_matrix(random_matrix(n, p + 1, seed));
  if (unit_weights) {
    data.weights = Matrix::Ones(n, n) - Matrix::Identity(n, n);
  } else {
    std::mt19937_64 gen(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(0.5, 1.5);
    data.weights = Matrix::Zero(n, n);
    for (int j = 0; j < n; ++j) {
      for (int i = j + 1; i < n; ++i) {
        data.weights(i, j) = data.weights(j, i) = u(gen);
      }
    }
  }
  return data;
}

}  // namespace mdscale::testutil
