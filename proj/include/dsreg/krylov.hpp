#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dsreg/error.hpp"

namespace dsreg {

struct MinresOptions {
  double rtol = 1e-11;
  int max_iter = 2000;
};

struct MinresResult {
  int iterations = 0;
  /// Preconditioned residual estimate relative to the right-hand side.
  double estimate = 0.0;
};

/// Preconditioned MINRES for a symmetric (possibly indefinite) operator A and a
/// symmetric positive-definite preconditioner M, both taking (in, out).
/// V needs copy, +=, -=, *= double; dot(a, b) is the inner product in which
/// A and M are symmetric. x must hold the zero vector on entry.
template <typename V, typename Op, typename Prec, typename Dot>
MinresResult minres(const Op& A, const Prec& M, const Dot& dot, const V& b, V& x,
                    const MinresOptions& opt = {}) {
  V r1 = b;
  V r2 = b;
  V y = b;
  M(r1, y);
  const double beta1_sq = dot(r1, y);
  if (beta1_sq < 0.0) throw ContractError("minres preconditioner is not positive definite");
  const double beta1 = std::sqrt(beta1_sq);
  if (beta1 == 0.0) return {0, 0.0};

  V v = b, w = b, w1 = b, w2 = b;
  w *= 0.0;
  w2 *= 0.0;
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  const double tiny = std::numeric_limits<double>::epsilon();

  for (int itn = 1; itn <= opt.max_iter; ++itn) {
    v = y;
    v *= 1.0 / beta;
    A(v, y);
    if (itn >= 2) {
      V t = r1;
      t *= beta / oldb;
      y -= t;
    }
    const double alfa = dot(v, y);
    {
      V t = r2;
      t *= alfa / beta;
      y -= t;
    }
    r1 = r2;
    r2 = y;
    M(r2, y);
    oldb = beta;
    const double beta_sq = dot(r2, y);
    if (beta_sq < 0.0) throw ContractError("minres preconditioner is not positive definite");
    beta = std::sqrt(beta_sq);

    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), tiny);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar *= sn;

    w1 = w2;
    w2 = w;
    w = v;
    {
      V t = w1;
      t *= oldeps;
      w -= t;
      t = w2;
      t *= delta;
      w -= t;
    }
    w *= 1.0 / gamma;
    V t = w;
    t *= phi;
    x += t;

    const double est = phibar / beta1;
    if (est < opt.rtol || beta == 0.0) return {itn, est};
  }
  throw ConvergenceError("minres stagnated after " + std::to_string(opt.max_iter) +
                             " iterations (relative residual " + std::to_string(phibar / beta1) + ")",
                         phibar / beta1, opt.max_iter);
}

}  // namespace dsreg
