#include "mdscale/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdscale {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

bool weight_graph_connected(const Matrix& w) {
  const int n = static_cast<int>(w.rows());
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      if (!seen[j] && w(i, j) > 0.0) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
    }
  }
  return reached == n;
}

void validate(const DissimilarityData& data) {
  const int n = data.n();
  require(n >= 2, "dissimilarity data needs at least 2 points");
  require(data.delta.cols() == n, "delta must be square");
  require(data.weights.rows() == n && data.weights.cols() == n,
          "weights must match delta in shape");
  for (int i = 0; i < n; ++i) {
    require(data.delta(i, i) == 0.0, "delta must have a zero diagonal");
    require(data.weights(i, i) == 0.0, "weights must have a zero diagonal");
    for (int j = 0; j < n; ++j) {
      require(data.delta(i, j) >= 0.0, "delta entries must be non-negative");
      require(data.weights(i, j) >= 0.0, "weight entries must be non-negative");
      require(data.delta(i, j) == data.delta(j, i), "delta must be symmetric");
      require(data.weights(i, j) == data.weights(j, i),
              "weights must be symmetric");
    }
  }
  require(weight_graph_connected(data.weights),
          "weight graph is disconnected: the problem separates");
  if (data.normalized) {
    double ssq = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int i = j + 1; i < n; ++i) {
        ssq += data.weights(i, j) * data.delta(i, j) * data.delta(i, j);
      }
    }
    require(std::abs(ssq / 2.0 - 1.0) <= 1e-12,
            "data flagged normalized but the weighted sum of squares is off");
  }
}

Matrix distance_matrix(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  Matrix d = Matrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      double s = 0.0;
      for (int k = 0; k < x.cols(); ++k) {
        const double t = x(i, k) - x(j, k);
        s += t * t;
      }
      d(i, j) = d(j, i) = std::sqrt(s);
    }
  }
  return d;
}

LaplacianPair build_laplacian_pair(const DissimilarityData& data) {
  const int n = data.n();
  if (!weight_graph_connected(data.weights)) {
    throw std::invalid_argument(
        "build_laplacian_pair: weight graph is disconnected, V has rank "
        "deficiency beyond the ones vector");
  }
  Matrix v = -data.weights;
  v.diagonal().setZero();
  for (int i = 0; i < n; ++i) v(i, i) = -v.row(i).sum();

  // V+ = (V + ee'/n)^{-1} - ee'/n. The bordered matrix is positive
  // definite exactly when the weight graph is connected.
  const Matrix bordered = v + Matrix::Constant(n, n, 1.0 / n);
  Matrix vplus =
      bordered.partialPivLu().solve(Matrix::Identity(n, n)).eval();
  vplus.array() -= 1.0 / n;

  const double residual = (v * vplus * v - v).norm();
  if (!std::isfinite(residual) || residual > 1e-8 * std::max(1.0, v.norm())) {
    throw std::invalid_argument(
        "build_laplacian_pair: bordered matrix is numerically singular "
        "(disconnected weight graph?)");
  }
  return {std::move(v), std::move(vplus)};
}

Matrix build_b_from_distances(const DissimilarityData& data, const Matrix& d,
                              int* dropped_pairs) {
  if (!data.normalized) {
    throw std::invalid_argument("build_b: data must be normalized");
  }
  const int n = data.n();
  Matrix b = Matrix::Zero(n, n);
  int dropped = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      if (d(i, j) > 0.0) {
        b(i, j) = -data.weights(i, j) * data.delta(i, j) / d(i, j);
      } else if (data.weights(i, j) * data.delta(i, j) > 0.0 && i < j) {
        ++dropped;
      }
    }
  }
  for (int i = 0; i < n; ++i) b(i, i) = -b.row(i).sum();
  if (dropped_pairs) *dropped_pairs = dropped;
  return b;
}

Matrix build_b(const DissimilarityData& data, const Matrix& x,
               int* dropped_pairs) {
  return build_b_from_distances(data, distance_matrix(x), dropped_pairs);
}

SymEigen sym_eigen(const Matrix& a) {
  require(a.rows() == a.cols(), "sym_eigen: matrix must be square");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-10, "sym_eigen: matrix is not symmetric (max asymmetry " +
                             std::to_string(asym) + ")");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("sym_eigen: eigensolver failed to converge");
  }
  // Eigen returns ascending order; flip to descending.
  const int n = static_cast<int>(a.rows());
  SymEigen out;
  out.values = es.eigenvalues().reverse();
  out.vectors.resize(n, n);
  for (int c = 0; c < n; ++c) out.vectors.col(c) = es.eigenvectors().col(n - 1 - c);
  return out;
}

ThinSvd svd_thin(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  require(n >= p, "svd_thin: requires rows >= cols");
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out;
  out.k = svd.matrixU();
  out.lambda = svd.singularValues();
  out.l = svd.matrixV();
  // Make each column of l have its largest-magnitude entry positive; the
  // first strict maximum wins ties. k flips with l so x = k diag(lambda) l'.
  for (int c = 0; c < p; ++c) {
    int arg = 0;
    double best = std::abs(out.l(0, c));
    for (int r = 1; r < p; ++r) {
      const double m = std::abs(out.l(r, c));
      if (m > best) {
        best = m;
        arg = r;
      }
    }
    if (out.l(arg, c) < 0.0) {
      out.l.col(c) = -out.l.col(c);
      out.k.col(c) = -out.k.col(c);
    }
  }
  return out;
}

std::vector<std::complex<double>> general_real_eigenvalues(const Matrix& a) {
  require(a.rows() == a.cols(), "general_real_eigenvalues: matrix must be square");
  Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error(
        "general_real_eigenvalues: Schur iteration did not converge "
        "(matrix norm " +
        std::to_string(a.norm()) + ")");
  }
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + a.rows());
  double max_imag = 0.0;
  for (const auto& z : ev) max_imag = std::max(max_imag, std::abs(z.imag()));
  if (max_imag <= 1e-8) {
    std::sort(ev.begin(), ev.end(), [](const auto& l, const auto& r) {
      return l.real() > r.real();
    });
  } else {
    std::sort(ev.begin(), ev.end(), [](const auto& l, const auto& r) {
      const double ml = std::abs(l), mr = std::abs(r);
      if (ml != mr) return ml > mr;
      if (l.real() != r.real()) return l.real() > r.real();
      return l.imag() > r.imag();
    });
  }
  return ev;
}

}  // namespace mdscale
