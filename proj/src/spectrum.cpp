#include "mdscale/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdscale {

const char* to_string(StationaryClass c) {
  switch (c) {
    case StationaryClass::AttractingMinimum:
      return "attracting-minimum";
    case StationaryClass::SaddleOrRepulsing:
      return "saddle-or-repulsing";
    case StationaryClass::Indeterminate:
      return "indeterminate";
  }
  return "indeterminate";
}

namespace {

std::vector<double> real_descending(const Matrix& a) {
  const auto ev = general_real_eigenvalues(a);
  std::vector<double> out;
  out.reserve(ev.size());
  for (const auto& z : ev) out.push_back(z.real());
  std::sort(out.begin(), out.end(), std::greater<double>());
  return out;
}

}  // namespace

SpectrumReport analyze_jacobian(const JacobianMatrix& j, int p,
                                double unit_tol, double zero_tol) {
  SpectrumReport report;
  report.unit_tol = unit_tol;
  report.zero_tol = zero_tol;
  report.eigenvalues = real_descending(j.m);
  for (double v : report.eigenvalues) {
    if (std::abs(v - 1.0) <= unit_tol) ++report.n_unit;
    if (std::abs(v) <= zero_tol) ++report.n_zero;
  }

  const int trivial_units = p * (p - 1) / 2;
  if (j.kind == JacobianKind::dGamma) {
    if (report.n_unit < trivial_units) {
      throw std::runtime_error(
          "analyze_jacobian: expected at least " +
          std::to_string(trivial_units) + " near-unit eigenvalues, found " +
          std::to_string(report.n_unit) + "; fixed-point structure violated");
    }
    // Drop the trivial rotational units: the p(p-1)/2 values nearest to 1.
    std::vector<double> rest = report.eigenvalues;
    std::sort(rest.begin(), rest.end(), [](double l, double r) {
      return std::abs(l - 1.0) < std::abs(r - 1.0);
    });
    rest.erase(rest.begin(), rest.begin() + trivial_units);
    report.kappa = rest.empty()
                       ? 0.0
                       : *std::max_element(rest.begin(), rest.end());
  } else {
    report.kappa = report.eigenvalues.empty() ? 0.0 : report.eigenvalues.front();
  }
  report.kappa = std::max(report.kappa, 0.0);

  if (report.kappa < 1.0 - unit_tol) {
    report.classification = StationaryClass::AttractingMinimum;
  } else if (report.kappa > 1.0 + unit_tol) {
    report.classification = StationaryClass::SaddleOrRepulsing;
  } else {
    report.classification = StationaryClass::Indeterminate;
  }
  return report;
}

GlobalMinCertificate vplus_b_spectrum(const DissimilarityData& data,
                                      const LaplacianPair& lap,
                                      const Matrix& x) {
  const int p = static_cast<int>(x.cols());
  GlobalMinCertificate cert;
  cert.eigenvalues = real_descending(lap.vplus * build_b(data, x));
  cert.certified = static_cast<int>(cert.eigenvalues.size()) >= p;
  for (int i = 0; i < p && cert.certified; ++i) {
    cert.certified = std::abs(cert.eigenvalues[i] - 1.0) <= 1e-8;
  }
  return cert;
}

RateEstimates empirical_rates(const std::vector<IterationRecord>& trace) {
  if (trace.size() < 2) {
    throw std::invalid_argument(
        "empirical_rates: trace needs at least 2 iterations");
  }
  RateEstimates est;
  est.r_final = trace.back().root_factor;
  est.q_final = trace.back().ratio_factor.value();
  const std::size_t w =
      std::max<std::size_t>(1, std::min<std::size_t>(20, trace.size() / 2));
  est.window = static_cast<int>(w);
  bool have_q = false;
  for (std::size_t i = trace.size() - w; i < trace.size(); ++i) {
    est.r_limsup_proxy = std::max(est.r_limsup_proxy, trace[i].root_factor);
    if (trace[i].ratio_factor) {
      const double q = *trace[i].ratio_factor;
      est.q_liminf_proxy = have_q ? std::min(est.q_liminf_proxy, q) : q;
      have_q = true;
    }
  }
  if (!have_q) est.q_liminf_proxy = est.q_final;
  return est;
}

}  // namespace mdscale
