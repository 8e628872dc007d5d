#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

// Dense double-precision substrate for the scaling engine and its
// diagnostics: distances, the weighted Laplacian V and its pseudo-inverse,
// the configuration-dependent matrix B(X), and eigen/SVD wrappers with
// pinned ordering and sign conventions.

namespace mdscale {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Weights and dissimilarities. Both matrices are symmetric, hollow and
// non-negative; the graph induced by positive weights must be connected.
// `normalized` records whether delta has been scaled so that
// (1/2) * sum_{i<j} w_ij * delta_ij^2 == 1.
struct DissimilarityData {
  Matrix delta;
  Matrix weights;
  bool normalized = false;

  int n() const { return static_cast<int>(delta.rows()); }
};

// Throws std::invalid_argument when an invariant is violated (shape
// mismatch, asymmetry, nonzero diagonal, negative entries, n < 2, or a
// disconnected weight graph).
void validate(const DissimilarityData& data);

// Connectivity of the graph {i,j : w_ij > 0} on n vertices.
bool weight_graph_connected(const Matrix& w);

// The weighted Laplacian V (off-diagonal -w_ij, diagonal completing row
// sums to zero) and its Moore-Penrose pseudo-inverse, computed through the
// bordered identity V+ = (V + ee'/n)^{-1} - ee'/n. Both are doubly
// centered.
struct LaplacianPair {
  Matrix v;
  Matrix vplus;
};

// Euclidean distances between the rows of x; symmetric, hollow.
Matrix distance_matrix(const Matrix& x);

// Throws when the weight graph is disconnected (bordered matrix singular).
LaplacianPair build_laplacian_pair(const DissimilarityData& data);

// Laplacian-like matrix with off-diagonal entries -w_ij * delta_ij / d_ij(X)
// wherever d_ij(X) > 0 and a diagonal completing the row sums to zero.
// Pairs with zero distance contribute nothing; when such a pair also has
// w_ij * delta_ij > 0 it is counted in *dropped_pairs (local minima have
// none). Requires normalized data.
Matrix build_b(const DissimilarityData& data, const Matrix& x,
               int* dropped_pairs = nullptr);

// Same, with the distance matrix precomputed by the caller.
Matrix build_b_from_distances(const DissimilarityData& data, const Matrix& d,
                              int* dropped_pairs = nullptr);

// Eigendecomposition of a symmetric matrix, eigenvalues descending,
// eigenvectors orthonormal in the columns of `vectors`. Input must be
// symmetric within 1e-10 max-abs.
struct SymEigen {
  Vector values;
  Matrix vectors;
};
SymEigen sym_eigen(const Matrix& a);

// Thin SVD x = k * diag(lambda) * l' with n >= p, singular values
// descending. Sign convention: each column of l has its largest-magnitude
// entry positive (ties broken by lowest row index); k is flipped to match.
// Deterministic: identical input gives bit-identical output.
struct ThinSvd {
  Matrix k;       // n x p, orthonormal columns
  Vector lambda;  // p, descending, >= 0
  Matrix l;       // p x p, orthogonal
};
ThinSvd svd_thin(const Matrix& x);

// Eigenvalues of a general real square matrix. Sorted descending by real
// part when the spectrum is real (all |imag| <= 1e-8), by modulus
// otherwise. Throws on eigensolver non-convergence.
std::vector<std::complex<double>> general_real_eigenvalues(const Matrix& a);

}  // namespace mdscale
