#pragma once

// Maclaurin operator Phi(M) = sum_{i>=0} M^i / (i+1)! and the matrix
// exponential e^M = I + M Phi(M) built on top of it.

#include <cmath>
#include <string>

#include <Eigen/Core>

#include "flexctl/errors.hpp"

namespace flexctl {

struct SeriesOptions {
  double tol = 1e-12;  // stop once the max-norm of a term drops below this
  int max_terms = 60;

  void validate() const {
    if (!(tol > 0.0)) throw ConfigError("series tol must be > 0");
    if (max_terms < 2) throw ConfigError("series max_terms must be >= 2");
  }
};

template <typename Derived>
double max_norm(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

namespace detail {

// Argument scaling target for the series; terms then shrink by >= 2x each.
inline constexpr double kScaledNormBound = 0.5;

template <typename Derived>
void require_square_finite(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw ConfigError("phi: matrix must be square with dim >= 1");
  }
  if (!m.allFinite()) throw ConfigError("phi: matrix has non-finite entries");
}

// Plain truncated series. Counts the identity as the first term.
template <typename Plain>
Plain phi_series(const Plain& m, const SeriesOptions& opts) {
  const auto n = m.rows();
  Plain sum = Plain::Identity(n, n);
  Plain term = Plain::Identity(n, n);
  for (int terms = 1;; ++terms) {
    if (terms >= opts.max_terms) {
      throw SeriesNonConvergence("phi: series did not reach tol " + std::to_string(opts.tol) +
                                 " within " + std::to_string(opts.max_terms) + " terms");
    }
    // term_i = M^i / (i+1)!, with i = terms
    term = (term * m) / static_cast<double>(terms + 1);
    sum += term;
    if (max_norm(term) < opts.tol) return sum;
  }
}

}  // namespace detail

// Phi(M). The series is evaluated on X = M / 2^s with ||X||_max <= 1/2, and
// Phi(M) is rebuilt with Phi(2Y) = 1/2 Phi(Y) (e^Y + I), e^{2Y} = (e^Y)^2.
// Works for singular M; no inversion is involved.
template <typename Derived>
typename Derived::PlainObject phi(const Eigen::MatrixBase<Derived>& m,
                                  const SeriesOptions& opts = {}) {
  using Plain = typename Derived::PlainObject;
  detail::require_square_finite(m);
  opts.validate();

  const double norm = max_norm(m);
  int squarings = 0;
  if (norm > detail::kScaledNormBound) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / detail::kScaledNormBound)));
  }
  const Plain scaled = m / std::ldexp(1.0, squarings);
  const auto n = m.rows();
  const Plain identity = Plain::Identity(n, n);

  Plain p = detail::phi_series<Plain>(scaled, opts);
  Plain e = identity + scaled * p;
  for (int j = 0; j < squarings; ++j) {
    p = 0.5 * (p * (e + identity));
    e = e * e;
  }
  return p;
}

// e^M = I + M Phi(M).
template <typename Derived>
typename Derived::PlainObject expm_via_phi(const Eigen::MatrixBase<Derived>& m,
                                           const SeriesOptions& opts = {}) {
  using Plain = typename Derived::PlainObject;
  const Plain p = phi(m, opts);
  return Plain::Identity(m.rows(), m.cols()) + m * p;
}

}  // namespace flexctl
