#pragma once

// Identity suite for the Phi operator and the ZOH discretizer, checked
// against routes that do not go through phi(): Eigen's Pade
// scaling-and-squaring exponential, the augmented-matrix exponential
// exp([[A, B], [0, 0]] h), and Gauss-Legendre quadrature of e^{M tau}.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "flexctl/discretizer.hpp"
#include "flexctl/matseries.hpp"
#include "flexctl/plant.hpp"

namespace flexctl::validation {

using DynMatrix = Eigen::MatrixXd;

inline DynMatrix expm_oracle(const DynMatrix& m) { return m.exp(); }

// Integral of e^{M tau} over [0, h]: composite 5-point Gauss-Legendre.
inline DynMatrix integral_oracle(const DynMatrix& m, double h, int panels) {
  static constexpr std::array<double, 5> nodes = {
      0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640, 0.9061798459386640};
  static constexpr std::array<double, 5> weights = {
      0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
      0.2369268850561891};
  DynMatrix sum = DynMatrix::Zero(m.rows(), m.cols());
  const double w = h / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * w;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double tau = mid + 0.5 * w * nodes[q];
      sum += (0.5 * w * weights[q]) * expm_oracle(m * tau);
    }
  }
  return sum;
}

struct ZohOracle {
  Matrix3 F;
  Vector3 G;
};

inline ZohOracle zoh_oracle(const Matrix3& A, const Vector3& B, double h) {
  Eigen::Matrix4d aug = Eigen::Matrix4d::Zero();
  aug.topLeftCorner<3, 3>() = A * h;
  aug.topRightCorner<3, 1>() = B * h;
  const Eigen::Matrix4d e = DynMatrix(aug).exp();
  return {e.topLeftCorner<3, 3>(), e.topRightCorner<3, 1>()};
}

// Seeded generator with a portable uniform mapping.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
  }
  int integer(int lo, int hi) {
    return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  std::mt19937_64 engine_;
};

// Random dim x dim matrix with max-norm exactly `norm`.
inline DynMatrix random_matrix(Rng& rng, int dim, double norm) {
  DynMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  return m * (norm / max_norm(m));
}

// Random invertible matrix with 2-norm condition number below max_cond.
inline DynMatrix random_well_conditioned(Rng& rng, int dim, double max_cond = 100.0) {
  for (;;) {
    DynMatrix t = DynMatrix::Identity(dim, dim) + 0.5 * random_matrix(rng, dim, 1.0);
    Eigen::JacobiSVD<DynMatrix> svd(t);
    const auto& s = svd.singularValues();
    if (s(dim - 1) > 0.0 && s(0) / s(dim - 1) < max_cond) return t;
  }
}

struct CheckResult {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  int cases = 0;
  bool passed() const { return max_error <= tolerance; }
};

struct SuiteOptions {
  SeriesOptions series;
  std::uint64_t seed = 12345;
  int random_matrices = 200;
  double max_norm = 5.0;
  int discretization_points = 50;
};

inline std::vector<DynMatrix> suite_matrices(const SuiteOptions& o) {
  Rng rng(o.seed);
  std::vector<DynMatrix> ms;
  for (int i = 0; i < o.random_matrices; ++i) {
    ms.push_back(random_matrix(rng, rng.integer(1, 6), rng.uniform(0.01, o.max_norm)));
  }
  const Matrix3 A = continuous_matrices(MotorParams{}).A;
  for (double h : {0.05, 0.11, 0.2}) ms.push_back(DynMatrix(A * h));
  return ms;
}

inline std::vector<CheckResult> run_identity_suite(const SuiteOptions& o = {}) {
  const auto ms = suite_matrices(o);
  CheckResult commute{"commutation M*Phi(M) = Phi(M)*M", 0.0, 1e-10};
  CheckResult expm{"exponential e^M = I + M*Phi(M)", 0.0, 1e-8};
  CheckResult similar{"similarity Phi(T^-1 M T) = T^-1 Phi(M) T", 0.0, 1e-8};
  Rng rng(o.seed ^ 0x5eedULL);

  for (const auto& m : ms) {
    const DynMatrix p = phi(m, o.series);
    const double mn = max_norm(m);
    commute.max_error = std::max(commute.max_error, max_norm(m * p - p * m) / (1.0 + mn * mn));
    ++commute.cases;

    const DynMatrix oracle = expm_oracle(m);
    const DynMatrix e = DynMatrix::Identity(m.rows(), m.cols()) + m * p;
    expm.max_error = std::max(expm.max_error, max_norm(e - oracle) / max_norm(oracle));
    ++expm.cases;

    const DynMatrix t = random_well_conditioned(rng, static_cast<int>(m.rows()));
    const DynMatrix ti = t.inverse();
    const DynMatrix lhs = phi(DynMatrix(ti * m * t), o.series);
    const DynMatrix rhs = ti * p * t;
    similar.max_error = std::max(similar.max_error, max_norm(lhs - rhs) / max_norm(rhs));
    ++similar.cases;
  }

  // Integral identity over random M and h in [0.01, 0.5], plus the motor
  // matrix, whose fast electrical mode needs many more panels.
  CheckResult integral{"integral int_0^h e^{M tau} = h*Phi(M h)", 0.0, 1e-7};
  auto check_integral = [&](const DynMatrix& m, double h, int panels) {
    const DynMatrix quad = integral_oracle(m, h, panels);
    const DynMatrix series = h * phi(DynMatrix(m * h), o.series);
    integral.max_error = std::max(integral.max_error, max_norm(series - quad) / max_norm(quad));
    ++integral.cases;
  };
  Rng hr(o.seed ^ 0x1a7eULL);
  for (int i = 0; i < o.random_matrices; ++i) check_integral(ms[i], hr.uniform(0.01, 0.5), 16);
  const DynMatrix motor_a = continuous_matrices(MotorParams{}).A;
  for (double h : {0.05, 0.11, 0.2}) check_integral(motor_a, h, 4000);

  const MotorParams params;
  const auto cm = continuous_matrices(params);
  CheckResult disc{"discretize vs augmented-matrix exponential", 0.0, 1e-8};
  CheckResult semigroup{"semigroup F(h1+h2) = F(h2) F(h1)", 0.0, 1e-8};
  for (int i = 0; i < o.discretization_points; ++i) {
    const double h = 0.01 + (0.3 - 0.01) * i / std::max(1, o.discretization_points - 1);
    const DiscreteModel m = discretize(params, h, kDefaultMinPeriod, o.series);
    const ZohOracle z = zoh_oracle(cm.A, cm.B, h);
    disc.max_error = std::max({disc.max_error, max_norm(m.F - z.F) / max_norm(z.F),
                               max_norm(m.G - z.G) / max_norm(z.G)});
    ++disc.cases;

    const double h1 = 0.4 * h;
    const DiscreteModel a = discretize(params, h1, kDefaultMinPeriod, o.series);
    const DiscreteModel b = discretize(params, h - h1, kDefaultMinPeriod, o.series);
    semigroup.max_error =
        std::max(semigroup.max_error, max_norm(m.F - b.F * a.F) / max_norm(m.F));
    ++semigroup.cases;
  }

  return {commute, expm, integral, similar, disc, semigroup};
}

}  // namespace flexctl::validation
