#pragma once

#include <cmath>

#include <Eigen/Core>

#include "flexctl/validation.hpp"

namespace flexctl::testing {

using validation::DynMatrix;
using validation::Rng;

// (e^a - 1)/a in long double via expm1, so no cancellation for large |a|.
inline long double scalar_phi_oracle(long double a) {
  if (a == 0.0L) return 1.0L;
  return std::expm1(a) / a;
}

inline double rel_err(const DynMatrix& got, const DynMatrix& want) {
  return max_norm(got - want) / max_norm(want);
}

}  // namespace flexctl::testing
