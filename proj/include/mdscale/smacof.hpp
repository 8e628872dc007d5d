#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "mdscale/linalg.hpp"

// The stress-majorization fixed-point iteration X <- V+ B(X) X and its
// principal-axes variant that rotates every iterate, with the per-iteration
// trace needed for convergence-rate diagnostics.

namespace mdscale {

// sigma = (1/2) sum_{i<j} w_ij (delta_ij - d_ij(X))^2
// rho   = sum_{i<j} w_ij delta_ij d_ij(X)   (= tr X'B(X)X)
// eta2  = sum_{i<j} w_ij d_ij(X)^2          (= tr X'VX)
// lambda = rho / eta. With normalized data, sigma = 1 - rho + eta2/2.
struct StressDecomposition {
  double sigma = 0.0;
  double rho = 0.0;
  double eta2 = 0.0;
  double lambda = 0.0;
};

// One solver iteration. `change` is the V-metric distance
// sqrt(tr (X_k - X_{k-1})' V (X_k - X_{k-1})) between successive iterates,
// `root_factor` = change^(1/k), `ratio_factor` = change_k / change_{k-1}
// (absent at k = 1, where the previous change is undefined).
struct IterationRecord {
  int k = 0;
  double sigma = 0.0;
  double rho = 0.0;
  double eta2 = 0.0;
  double lambda = 0.0;
  double change = 0.0;
  double root_factor = 0.0;
  std::optional<double> ratio_factor;
};

enum class InitKind { Torgerson, Random, UserSupplied };

struct SolverConfig {
  int p = 2;
  double eps = 1e-15;   // stop when change < eps
  int itmax = 10000;
  bool pca = false;     // rotate every iterate to principal axes
  bool verbose = false;
  std::ostream* log = nullptr;  // verbose destination, defaults to std::cout
  InitKind init = InitKind::Torgerson;
  std::uint64_t seed = 0;                // for InitKind::Random
  std::optional<Matrix> init_config;     // for InitKind::UserSupplied
  bool keep_iterates = false;            // store every X_k in the result
};

struct SolverResult {
  Matrix x_final;
  int itel = 0;          // Guttman transforms applied, 1-based
  bool converged = false;
  StressDecomposition stress_initial;
  StressDecomposition stress_final;
  double change_final = 0.0;
  double r_final = 0.0;
  std::optional<double> q_final;
  std::vector<IterationRecord> trace;
  int dropped_zero_distance_pairs = 0;  // summed over all iterations
  bool pca_gap_warning = false;
  std::vector<Matrix> iterates;  // only when keep_iterates
};

// Scales delta so that (1/2) sum_{i<j} w_ij delta_ij^2 = 1 and sets the
// flag. Returns normalized input unchanged. Throws when the weighted sum
// of squares is zero.
DissimilarityData normalize(const DissimilarityData& data);

// Requires normalized data.
StressDecomposition stress(const DissimilarityData& data, const Matrix& x);
StressDecomposition stress_from_distances(const DissimilarityData& data,
                                          const Matrix& d);

// Guttman transform V+ B(X) X; output is column-centered.
Matrix guttman_transform(const DissimilarityData& data,
                         const LaplacianPair& lap, const Matrix& x);

// Principal-axes rotation X -> X L, L from svd_thin, followed by a column
// sign normalization on the output (largest-magnitude entry positive).
// That makes the map invariant under right-multiplication of x by any
// orthogonal matrix, and idempotent. When the relative singular-value gap
// falls below 1e-10 the rotation is no longer unique; *gap_warning is set
// and the convention's choice is used.
Matrix pca_rotate(const Matrix& x, bool* gap_warning = nullptr);

// Classical scaling start: eigendecompose -J (delta.^2) J / 2 with
// J = I - ee'/n and scale the top p eigenvectors by sqrt(eigenvalue).
// Throws when one of the top p eigenvalues is not positive, naming the
// offending (1-based) index.
Matrix torgerson_init(const DissimilarityData& data, int p);

// Seeded standard-normal entries, then column centering.
Matrix random_init(int n, int p, std::uint64_t seed);

// Iterates X_{k+1} = Gamma(X_k), or Pi(Gamma(X_k)) when config.pca, until
// change < eps or itmax is reached (flagged, not an error). Normalizes the
// data first when needed.
SolverResult run(const DissimilarityData& data, const SolverConfig& config);

// Fixed formatting shared by the verbose stream and the trace file, so the
// two are comparable byte for byte: "%.15f" fields.
std::string format_trace_fields(const IterationRecord& rec);
std::string format_verbose_line(const IterationRecord& rec);

}  // namespace mdscale
