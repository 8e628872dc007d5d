#include "mdscale/smacof.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace mdscale {

DissimilarityData normalize(const DissimilarityData& data) {
  if (data.normalized) return data;
  const int n = data.n();
  double ssq = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      ssq += data.weights(i, j) * data.delta(i, j) * data.delta(i, j);
    }
  }
  if (!(ssq > 0.0)) {
    throw std::invalid_argument(
        "normalize: sum of weighted squared dissimilarities is zero");
  }
  DissimilarityData out = data;
  out.delta /= std::sqrt(ssq / 2.0);
  out.normalized = true;
  return out;
}

StressDecomposition stress_from_distances(const DissimilarityData& data,
                                          const Matrix& d) {
  if (!data.normalized) {
    throw std::invalid_argument("stress: data must be normalized");
  }
  const int n = data.n();
  StressDecomposition s;
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      const double w = data.weights(i, j);
      const double resid = data.delta(i, j) - d(i, j);
      s.sigma += w * resid * resid;
      s.rho += w * data.delta(i, j) * d(i, j);
      s.eta2 += w * d(i, j) * d(i, j);
    }
  }
  s.sigma /= 2.0;
  s.lambda = s.eta2 > 0.0 ? s.rho / std::sqrt(s.eta2) : 0.0;
  return s;
}

StressDecomposition stress(const DissimilarityData& data, const Matrix& x) {
  return stress_from_distances(data, distance_matrix(x));
}

Matrix guttman_transform(const DissimilarityData& data,
                         const LaplacianPair& lap, const Matrix& x) {
  return lap.vplus * build_b(data, x) * x;
}

Matrix pca_rotate(const Matrix& x, bool* gap_warning) {
  const ThinSvd svd = svd_thin(x);
  const int p = static_cast<int>(x.cols());
  if (gap_warning) {
    *gap_warning = false;
    const double scale = std::max(svd.lambda(0), 1e-300);
    for (int i = 0; i + 1 < p; ++i) {
      if ((svd.lambda(i) - svd.lambda(i + 1)) / scale < 1e-10) {
        *gap_warning = true;
        break;
      }
    }
  }
  Matrix out = x * svd.l;
  for (int c = 0; c < p; ++c) {
    int arg = 0;
    double best = std::abs(out(0, c));
    for (int r = 1; r < out.rows(); ++r) {
      const double m = std::abs(out(r, c));
      if (m > best) {
        best = m;
        arg = r;
      }
    }
    if (out(arg, c) < 0.0) out.col(c) = -out.col(c);
  }
  return out;
}

Matrix torgerson_init(const DissimilarityData& data, int p) {
  const int n = data.n();
  if (p < 1 || p > n - 1) {
    throw std::invalid_argument("torgerson_init: need 1 <= p <= n-1");
  }
  const Matrix j = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
  const Matrix h = -(j * data.delta.cwiseProduct(data.delta) * j) / 2.0;
  const SymEigen es = sym_eigen((h + h.transpose()) / 2.0);
  for (int i = 0; i < p; ++i) {
    if (!(es.values(i) > 0.0)) {
      throw std::invalid_argument(
          "torgerson_init: eigenvalue " + std::to_string(i + 1) +
          " of the double-centered matrix is not positive (" +
          std::to_string(es.values(i)) + ")");
    }
  }
  Matrix x(n, p);
  for (int c = 0; c < p; ++c) {
    x.col(c) = es.vectors.col(c) * std::sqrt(es.values(c));
  }
  return x;
}

Matrix random_init(int n, int p, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix x(n, p);
  for (int c = 0; c < p; ++c) {
    for (int r = 0; r < n; ++r) x(r, c) = normal(gen);
  }
  x.rowwise() -= x.colwise().mean();
  return x;
}

std::string format_trace_fields(const IterationRecord& rec) {
  char buf[160];
  if (rec.ratio_factor) {
    std::snprintf(buf, sizeof buf, "%d,%.15f,%.15f,%.15f,%.15f", rec.k,
                  rec.sigma, rec.change, rec.root_factor, *rec.ratio_factor);
  } else {
    std::snprintf(buf, sizeof buf, "%d,%.15f,%.15f,%.15f,NA", rec.k, rec.sigma,
                  rec.change, rec.root_factor);
  }
  return buf;
}

std::string format_verbose_line(const IterationRecord& rec) {
  char buf[200];
  if (rec.ratio_factor) {
    std::snprintf(buf, sizeof buf,
                  "itel %4d loss %.15f chan %.15f rcnf %.15f qcnf %.15f",
                  rec.k, rec.sigma, rec.change, rec.root_factor,
                  *rec.ratio_factor);
  } else {
    std::snprintf(buf, sizeof buf,
                  "itel %4d loss %.15f chan %.15f rcnf %.15f qcnf NA", rec.k,
                  rec.sigma, rec.change, rec.root_factor);
  }
  return buf;
}

SolverResult run(const DissimilarityData& data0, const SolverConfig& config) {
  validate(data0);
  const DissimilarityData data = normalize(data0);
  const int n = data.n();
  if (config.p < 1 || config.p > n - 1) {
    throw std::invalid_argument("run: need 1 <= p <= n-1");
  }
  if (!(config.eps > 0.0)) throw std::invalid_argument("run: eps must be > 0");
  if (config.itmax < 1) throw std::invalid_argument("run: itmax must be >= 1");

  const LaplacianPair lap = build_laplacian_pair(data);

  Matrix xold;
  switch (config.init) {
    case InitKind::Torgerson:
      xold = torgerson_init(data, config.p);
      break;
    case InitKind::Random:
      xold = random_init(n, config.p, config.seed);
      break;
    case InitKind::UserSupplied:
      if (!config.init_config || config.init_config->rows() != n ||
          config.init_config->cols() != config.p) {
        throw std::invalid_argument(
            "run: user-supplied init must be an n x p matrix");
      }
      xold = *config.init_config;
      break;
  }

  SolverResult result;
  std::ostream& log = config.log ? *config.log : std::cout;

  Matrix dold = distance_matrix(xold);
  result.stress_initial = stress_from_distances(data, dold);
  double eold = std::numeric_limits<double>::infinity();
  int itel = 1;

  // Mirrors the reference loop: build B at the old iterate, apply the
  // transform, then measure the V-metric change between the two iterates.
  for (;;) {
    int dropped = 0;
    const Matrix b = build_b_from_distances(data, dold, &dropped);
    result.dropped_zero_distance_pairs += dropped;
    Matrix xnew = lap.vplus * b * xold;
    if (config.pca) {
      bool gap = false;
      xnew = pca_rotate(xnew, &gap);
      result.pca_gap_warning = result.pca_gap_warning || gap;
    }
    const Matrix dnew = distance_matrix(xnew);
    const StressDecomposition snew = stress_from_distances(data, dnew);
    const Matrix diff = xold - xnew;
    const double enew =
        std::sqrt((lap.v.array() * (diff * diff.transpose()).array()).sum());
    const double rnew = std::pow(enew, 1.0 / itel);

    IterationRecord rec;
    rec.k = itel;
    rec.sigma = snew.sigma;
    rec.rho = snew.rho;
    rec.eta2 = snew.eta2;
    rec.lambda = snew.lambda;
    rec.change = enew;
    rec.root_factor = rnew;
    if (std::isfinite(eold)) rec.ratio_factor = enew / eold;
    result.trace.push_back(rec);
    if (config.keep_iterates) result.iterates.push_back(xnew);
    if (config.verbose) log << format_verbose_line(rec) << '\n';

    if (enew < config.eps || itel == config.itmax) {
      result.x_final = std::move(xnew);
      result.itel = itel;
      result.converged = enew < config.eps;
      result.stress_final = snew;
      result.change_final = enew;
      result.r_final = rnew;
      result.q_final = rec.ratio_factor;
      break;
    }
    xold = std::move(xnew);
    dold = dnew;
    eold = enew;
    ++itel;
  }
  return result;
}

}  // namespace mdscale
