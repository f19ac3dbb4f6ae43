#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "liftmix/error.hpp"

namespace liftmix {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kClampTol = 1e-12;
inline constexpr double kMassTol = 1e-9;

/// Probability vector. Entries in [-1e-12, 0) are clamped to zero; the total
/// mass must be within 1e-9 of one.
class Distribution {
 public:
  Distribution() = default;

  explicit Distribution(Vector weights) : w_(std::move(weights)) { validate(); }

  Distribution(std::initializer_list<double> weights)
      : w_(Eigen::Map<const Vector>(weights.begin(), static_cast<Eigen::Index>(weights.size()))) {
    validate();
  }

  static Distribution uniform(std::size_t n) {
    if (n == 0) throw Error(ErrorCode::BadSize, "uniform distribution over zero nodes");
    return Distribution(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
  }

  static Distribution point(std::size_t n, std::size_t i) {
    if (i >= n) throw Error(ErrorCode::DimensionMismatch, "point mass outside range");
    Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
    v[static_cast<Eigen::Index>(i)] = 1.0;
    return Distribution(std::move(v));
  }

  /// Normalizes nonnegative weights to unit mass.
  static Distribution normalized(Vector weights) {
    const double s = weights.sum();
    if (!(s > 0.0)) throw Error(ErrorCode::NotADistribution, "weights have no mass");
    return Distribution(weights / s);
  }

  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
  double operator[](std::size_t i) const { return w_[static_cast<Eigen::Index>(i)]; }
  const Vector& vec() const { return w_; }

  double min() const { return w_.minCoeff(); }

  std::vector<double> to_std() const { return {w_.data(), w_.data() + w_.size()}; }

 private:
  void validate() {
    if (w_.size() == 0) throw Error(ErrorCode::NotADistribution, "empty distribution");
    for (Eigen::Index i = 0; i < w_.size(); ++i) {
      if (!std::isfinite(w_[i]) || w_[i] < -kClampTol)
        throw Error(ErrorCode::NotADistribution, "negative or non-finite entry at " + std::to_string(i));
      if (w_[i] < 0.0) w_[i] = 0.0;
    }
    if (std::abs(w_.sum() - 1.0) > kMassTol)
      throw Error(ErrorCode::NotADistribution, "mass " + std::to_string(w_.sum()) + " differs from 1");
  }

  Vector w_;
};

}  // namespace liftmix
