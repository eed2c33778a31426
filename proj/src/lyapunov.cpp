#include "ptc/lyapunov.hpp"

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "ptc/errors.hpp"

namespace ptc::lyapunov {

double LyapunovSolution::envelope(double t) const {
  return envelope_coeff * std::exp(-envelope_rate * t);
}

double spectral_abscissa(const Mat& Q) {
  return Eigen::EigenSolver<Mat>(Q, false).eigenvalues().real().maxCoeff();
}

LyapunovSolution solve_lyapunov(const Mat& Q) {
  const Eigen::Index n = Q.rows();
  if (n == 0 || Q.cols() != n) throw DomainError("Lyapunov equation needs a nonempty square matrix");
  if (spectral_abscissa(Q) >= -1e-12) throw NotHurwitz("state matrix is not Hurwitz");

  // Unknowns: X(i, j) for i <= j, packed row-major over the upper triangle.
  // Equation (r, c), r <= c:  sum_k X(r, k) Q(k, c) + Q(k, r) X(k, c) = -delta_rc.
  const Eigen::Index m = n * (n + 1) / 2;
  auto index = [n](Eigen::Index i, Eigen::Index j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  };
  Mat A = Mat::Zero(m, m);
  Vec b = Vec::Zero(m);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = r; c < n; ++c) {
      const Eigen::Index row = index(r, c);
      for (Eigen::Index k = 0; k < n; ++k) {
        A(row, index(r, k)) += Q(k, c);
        A(row, index(k, c)) += Q(k, r);
      }
      b(row) = r == c ? -1.0 : 0.0;
    }
  }
  Eigen::PartialPivLU<Mat> lu(A);
  if (!(lu.rcond() >= 1e-12)) throw IllConditioned("Lyapunov linear system is ill-conditioned");
  const Vec x = lu.solve(b);

  LyapunovSolution s;
  s.Q = Q;
  s.X.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) s.X(i, j) = x(index(i, j));

  const Eigen::SelfAdjointEigenSolver<Mat> eig(s.X);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double lmin = eig.eigenvalues().minCoeff();
  s.x_norm = std::max(std::abs(lmax), std::abs(lmin));
  s.envelope_coeff = std::sqrt(2.0 * s.x_norm / std::abs(lmin));
  s.envelope_rate = 1.0 / (2.0 * s.x_norm);
  s.residual = (s.X * Q + Q.transpose() * s.X + Mat::Identity(n, n)).norm();
  return s;
}

Mat closed_loop_matrix(const Mat& P, const Mat& D) {
  const Eigen::Index n = P.rows();
  if (P.cols() != n || D.rows() != n || D.cols() != n) throw DomainError("P and D must be square and equal size");
  Mat Q = Mat::Zero(2 * n, 2 * n);
  Q.topRightCorner(n, n) = Mat::Identity(n, n);
  Q.bottomLeftCorner(n, n) = P;
  Q.bottomRightCorner(n, n) = D;
  return Q;
}

timewarp::KappaMap exponential_mu(double tau, double x_norm, double alpha) {
  return timewarp::KappaMap(timewarp::ExpInverse{alpha, x_norm}, tau);
}

EnvelopeReport envelope_check(const Mat& Q, const LyapunovSolution& solution, double horizon,
                              std::size_t grid) {
  if (grid < 2 || !(horizon > 0.0)) throw DomainError("envelope grid needs >= 2 points and horizon > 0");
  EnvelopeReport r;
  r.points = grid;
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = horizon * static_cast<double>(i) / static_cast<double>(grid - 1);
    const Mat E = (Q * t).exp();
    const double norm = Eigen::JacobiSVD<Mat>(E).singularValues()(0);
    const double ratio = norm / solution.envelope(t);
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.t_at_max = t;
    }
    if (ratio > 1.0 + 1e-8) throw BoundViolated("exponential envelope violated", t);
  }
  return r;
}

}  // namespace ptc::lyapunov
