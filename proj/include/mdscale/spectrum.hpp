#pragma once

#include <vector>

#include "mdscale/jacobian.hpp"
#include "mdscale/smacof.hpp"

// Eigen-diagnostics of the iteration maps at a converged fixed point: the
// convergence rate kappa after discounting trivial eigenvalues, empirical
// rate estimates from the iteration trace, and the spectrum of V+ B(X)
// whose leading structure certifies a full-dimensional global minimum.

namespace mdscale {

enum class StationaryClass { AttractingMinimum, SaddleOrRepulsing, Indeterminate };

const char* to_string(StationaryClass c);

struct SpectrumReport {
  std::vector<double> eigenvalues;  // descending, imaginary parts truncated
  int n_unit = 0;                   // within unit_tol of 1
  int n_zero = 0;                   // within zero_tol of 0
  double kappa = 0.0;
  double unit_tol = 1e-8;
  double zero_tol = 1e-8;
  StationaryClass classification = StationaryClass::Indeterminate;
};

// For kind dGamma: kappa is the largest eigenvalue after removing the
// p(p-1)/2 values nearest to 1 (rotational indeterminacy); fewer than
// p(p-1)/2 near-unit values is an error, the fixed-point structure is
// violated. For dPi and dPiGamma: kappa is the largest eigenvalue.
// Caller asserts that the Jacobian was computed at a converged fixed point.
SpectrumReport analyze_jacobian(const JacobianMatrix& j, int p,
                                double unit_tol = 1e-8, double zero_tol = 1e-8);

// Spectrum of V+ B(X) at a fixed point. The p columns of X are eigenvectors
// with eigenvalue 1; certified is true iff those p unit eigenvalues are the
// p largest (within 1e-8), which makes X the full-dimensional global
// minimum.
struct GlobalMinCertificate {
  std::vector<double> eigenvalues;  // descending
  bool certified = false;
};
GlobalMinCertificate vplus_b_spectrum(const DissimilarityData& data,
                                      const LaplacianPair& lap,
                                      const Matrix& x);

// Final-window estimates of the root and ratio factors. The window covers
// the last min(20, k/2) iterations; the proxies are the window minimum of
// q_k and maximum of r_k. Throws when the trace has fewer than 2 records.
struct RateEstimates {
  double r_final = 0.0;
  double q_final = 0.0;
  double q_liminf_proxy = 0.0;
  double r_limsup_proxy = 0.0;
  int window = 0;
};
RateEstimates empirical_rates(const std::vector<IterationRecord>& trace);

}  // namespace mdscale
