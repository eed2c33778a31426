#pragma once

#include "ptc/timewarp.hpp"
#include "ptc/types.hpp"

namespace ptc::lyapunov {

/// X solving X Q + Q^T X = -I, with the exponential envelope it certifies:
///   ||exp(Q t)|| <= envelope_coeff * exp(-envelope_rate * t)
struct LyapunovSolution {
  Mat Q;
  Mat X;
  double x_norm = 0.0;          ///< spectral norm of X
  double envelope_coeff = 0.0;  ///< sqrt(2 ||X^-1|| ||X||)
  double envelope_rate = 0.0;   ///< 1 / (2 ||X||)
  double residual = 0.0;        ///< ||X Q + Q^T X + I||

  double envelope(double t) const;
};

/// Largest real part of the spectrum of Q.
double spectral_abscissa(const Mat& Q);

/// Solves the Lyapunov equation over the n(n+1)/2 independent entries of X.
/// NotHurwitz if some eigenvalue has real part >= -1e-12; IllConditioned if the
/// reciprocal condition estimate of the linear system falls below 1e-12.
LyapunovSolution solve_lyapunov(const Mat& Q);

/// Block state matrix [[0, I], [P, D]] of the linearized closed loop
/// qdd = P q_e + D qd.
Mat closed_loop_matrix(const Mat& P, const Mat& D);

/// mu(s) = tau (1 - exp(-alpha s / x_norm)) packaged as its inverse time warp.
/// DomainError unless tau > 0, x_norm > 0 and 0 < alpha < 0.5.
timewarp::KappaMap exponential_mu(double tau, double x_norm, double alpha = 0.45);

struct EnvelopeReport {
  double max_ratio = 0.0;
  double t_at_max = 0.0;
  std::size_t points = 0;
};

/// Checks ||exp(Q t)|| <= envelope(t) on an evenly spaced grid over [0, horizon].
/// BoundViolated (with the offending t) if a ratio exceeds 1 + 1e-8.
EnvelopeReport envelope_check(const Mat& Q, const LyapunovSolution& solution, double horizon,
                              std::size_t grid);

}  // namespace ptc::lyapunov
