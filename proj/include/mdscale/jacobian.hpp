#pragma once

#include <functional>

#include "mdscale/linalg.hpp"

// Analytic derivatives of the Guttman transform, the principal-axes
// rotation, and their composite, materialized as dense np x np matrices in
// vec layout (configuration columns stacked: component (i, s) sits at index
// s*n + i). Block (s, t) is the n x n partial of output column s with
// respect to input column t. A central-difference Jacobian serves as the
// independent check.

namespace mdscale {

enum class JacobianKind { dGamma, dPi, dPiGamma };

struct JacobianMatrix {
  Matrix m;
  JacobianKind kind;
  int n = 0;
  int p = 0;
};

// Derivative of X -> V+ B(X) X. Requires normalized data and d_ij(X) > 0
// for every pair with w_ij * delta_ij > 0; a zero distance on such a pair
// throws, citing the pair.
JacobianMatrix d_gamma(const DissimilarityData& data, const Matrix& x);

// Derivative of pca_rotate at x. Uses the sign-fixed SVD branch that the
// implemented map follows in a neighborhood of x, so it matches finite
// differences of pca_rotate at any point with distinct singular values.
// Throws when the relative singular-value gap is below 1e-10.
JacobianMatrix d_pi(const Matrix& x);

// Chain rule: d_pi at Gamma(x) times d_gamma at x.
JacobianMatrix d_pi_gamma(const DissimilarityData& data, const Matrix& x);

enum class MapKind { Gamma, Pi, PiGamma };

// Central differences with step h (h <= 0 selects 1e-6 * max(1, |x|_inf)),
// column by column over vec(x).
JacobianMatrix fd_jacobian(MapKind map, const DissimilarityData& data,
                           const Matrix& x, double h = 0.0);

// Same differencing for an arbitrary matrix map; exact for linear maps up
// to roundoff.
Matrix fd_jacobian_of(const std::function<Matrix(const Matrix&)>& f,
                      const Matrix& x, double h = 0.0);

}  // namespace mdscale
