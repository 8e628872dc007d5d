#include "mdscale/jacobian.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mdscale/smacof.hpp"

namespace mdscale {

namespace {

Vector config_to_vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

}  // namespace

JacobianMatrix d_gamma(const DissimilarityData& data, const Matrix& x) {
  if (!data.normalized) {
    throw std::invalid_argument("d_gamma: data must be normalized");
  }
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  const Matrix d = distance_matrix(x);
  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      if (d(i, j) == 0.0 && data.weights(i, j) * data.delta(i, j) > 0.0) {
        throw std::invalid_argument(
            "d_gamma: zero distance on active pair (" + std::to_string(i + 1) +
            "," + std::to_string(j + 1) + "), derivative undefined");
      }
    }
  }
  const LaplacianPair lap = build_laplacian_pair(data);
  const Matrix b = build_b_from_distances(data, d);

  // Block (s, t) is V+ (1{s==t} B - G_st), where G_st is Laplacian-like
  // with off-diagonal entries -w delta (x_is - x_js)(x_it - x_jt) / d^3.
  JacobianMatrix out{Matrix::Zero(n * p, n * p), JacobianKind::dGamma, n, p};
  Matrix gst(n, n);
  for (int s = 0; s < p; ++s) {
    for (int t = 0; t < p; ++t) {
      gst.setZero();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          const double wd = data.weights(i, j) * data.delta(i, j);
          if (wd == 0.0) continue;  // inactive pair, no term even if d == 0
          const double gs = x(i, s) - x(j, s);
          const double gt = x(i, t) - x(j, t);
          gst(i, j) = -wd * gs * gt / (d(i, j) * d(i, j) * d(i, j));
        }
      }
      for (int i = 0; i < n; ++i) gst(i, i) = -gst.row(i).sum();
      out.m.block(s * n, t * n, n, n) = -(lap.vplus * gst);
    }
    out.m.block(s * n, s * n, n, n) += lap.vplus * b;
  }
  return out;
}

JacobianMatrix d_pi(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  ThinSvd svd = svd_thin(x);
  const double scale = std::max(svd.lambda(0), 1e-300);
  for (int i = 0; i + 1 < p; ++i) {
    if ((svd.lambda(i) - svd.lambda(i + 1)) / scale < 1e-10) {
      throw std::invalid_argument(
          "d_pi: singular values " + std::to_string(i + 1) + " and " +
          std::to_string(i + 2) +
          " are too close, the rotation derivative is undefined");
    }
  }

  // Align the SVD factors with the branch pca_rotate actually follows: flip
  // (k, l) column pairs until the output columns x*l satisfy the output
  // sign convention. Locally the map is then z -> z * l_z on this branch.
  Matrix out0 = x * svd.l;
  for (int c = 0; c < p; ++c) {
    int arg = 0;
    double best = std::abs(out0(0, c));
    for (int r = 1; r < n; ++r) {
      const double m = std::abs(out0(r, c));
      if (m > best) {
        best = m;
        arg = r;
      }
    }
    if (out0(arg, c) < 0.0) {
      svd.l.col(c) = -svd.l.col(c);
      svd.k.col(c) = -svd.k.col(c);
    }
  }

  JacobianMatrix out{Matrix(n * p, n * p), JacobianKind::dPi, n, p};
  const Matrix kl = svd.k * svd.lambda.asDiagonal();
  Matrix m(p, p);
  for (int s = 0; s < p; ++s) {
    for (int i = 0; i < n; ++i) {
      // Direction E = e_i e_s'; E * l is the outer product of e_i with row
      // s of l, and u = k' E l.
      const Matrix el = Vector::Unit(n, i) * svd.l.row(s);
      const Matrix u = svd.k.transpose() * el;
      m.setZero();
      for (int a = 0; a < p; ++a) {
        for (int c = 0; c < p; ++c) {
          if (a == c) continue;
          m(a, c) = (svd.lambda(a) * u(a, c) + svd.lambda(c) * u(c, a)) /
                    (svd.lambda(a) * svd.lambda(a) -
                     svd.lambda(c) * svd.lambda(c));
        }
      }
      out.m.col(s * n + i) = config_to_vec(el - kl * m);
    }
  }
  return out;
}

JacobianMatrix d_pi_gamma(const DissimilarityData& data, const Matrix& x) {
  const LaplacianPair lap = build_laplacian_pair(data);
  const Matrix gx = guttman_transform(data, lap, x);
  const JacobianMatrix dp = d_pi(gx);
  const JacobianMatrix dg = d_gamma(data, x);
  return {dp.m * dg.m, JacobianKind::dPiGamma, dg.n, dg.p};
}

Matrix fd_jacobian_of(const std::function<Matrix(const Matrix&)>& f,
                      const Matrix& x, double h) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  if (h <= 0.0) h = 1e-6 * std::max(1.0, x.cwiseAbs().maxCoeff());
  Matrix jac(n * p, n * p);
  Matrix xp = x, xm = x;
  for (int t = 0; t < p; ++t) {
    for (int j = 0; j < n; ++j) {
      xp(j, t) = x(j, t) + h;
      xm(j, t) = x(j, t) - h;
      jac.col(t * n + j) = (config_to_vec(f(xp)) - config_to_vec(f(xm))) / (2.0 * h);
      xp(j, t) = x(j, t);
      xm(j, t) = x(j, t);
    }
  }
  return jac;
}

JacobianMatrix fd_jacobian(MapKind map, const DissimilarityData& data,
                           const Matrix& x, double h) {
  const int n = static_cast<int>(x.rows());
  const int p = static_cast<int>(x.cols());
  std::function<Matrix(const Matrix&)> f;
  JacobianKind kind = JacobianKind::dGamma;
  switch (map) {
    case MapKind::Gamma: {
      const LaplacianPair lap = build_laplacian_pair(data);
      f = [&data, lap](const Matrix& z) {
        return guttman_transform(data, lap, z);
      };
      kind = JacobianKind::dGamma;
      break;
    }
    case MapKind::Pi:
      f = [](const Matrix& z) { return pca_rotate(z); };
      kind = JacobianKind::dPi;
      break;
    case MapKind::PiGamma: {
      const LaplacianPair lap = build_laplacian_pair(data);
      f = [&data, lap](const Matrix& z) {
        return pca_rotate(guttman_transform(data, lap, z));
      };
      kind = JacobianKind::dPiGamma;
      break;
    }
  }
  return {fd_jacobian_of(f, x, h), kind, n, p};
}

}  // namespace mdscale
