#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhm/error.hpp"
#include "qhm/linalg.hpp"
#include "qhm/tolerances.hpp"

namespace qhm {

/// First metric axiom violated by a candidate distance matrix.
struct MetricViolation {
  ErrorCode code;
  std::vector<int> indices;  // (i,j) or (i,j,k)
  std::string message;
};

/// Checks the metric axioms in a fixed order: finiteness, zero diagonal,
/// symmetry, positivity off the diagonal, triangle inequality. Returns the
/// first violation found, scanning indices lexicographically.
inline std::optional<MetricViolation> find_metric_violation(const Matrix& dist,
                                                            double triangle_rel) {
  const Eigen::Index n = dist.rows();
  auto at = [](Eigen::Index i, Eigen::Index j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
  };
  if (dist.cols() != n) {
    return MetricViolation{ErrorCode::kDimension, {},
                           "matrix is " + std::to_string(n) + "x" +
                               std::to_string(dist.cols()) + ", expected square"};
  }
  if (n == 0) return MetricViolation{ErrorCode::kDimension, {}, "empty matrix"};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!std::isfinite(dist(i, j)))
        return MetricViolation{ErrorCode::kNonFinite, {int(i), int(j)},
                               "non-finite entry at " + at(i, j)};
  for (Eigen::Index i = 0; i < n; ++i)
    if (dist(i, i) != 0.0)
      return MetricViolation{ErrorCode::kDiagonal, {int(i), int(i)},
                             "nonzero diagonal at " + at(i, i)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (dist(i, j) != dist(j, i))
        return MetricViolation{ErrorCode::kAsymmetry, {int(i), int(j)},
                               "asymmetry at " + at(i, j)};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (!(dist(i, j) > 0.0))
        return MetricViolation{ErrorCode::kNonPositive, {int(i), int(j)},
                               "non-positive distance between distinct points at " +
                                   at(i, j)};
  const double slack = triangle_rel * dist.maxCoeff();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k)
        if (dist(i, j) > dist(i, k) + dist(k, j) + slack)
          return MetricViolation{
              ErrorCode::kTriangle, {int(i), int(j), int(k)},
              "triangle violation d" + at(i, j) + " > d" + at(i, k) + " + d" + at(k, j)};
  return std::nullopt;
}

/// A finite metric space given by its distance matrix.
///
/// Immutable once constructed; copies share the underlying storage.
class MetricSpace {
 public:
  explicit MetricSpace(Matrix dist, std::vector<std::string> labels = {},
                       double triangle_rel = Tolerances{}.triangle_rel) {
    if (auto v = find_metric_violation(dist, triangle_rel)) {
      throw Error(v->code, "core", v->message);
    }
    if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != dist.rows()) {
      throw Error(ErrorCode::kDimension, "core",
                  "got " + std::to_string(labels.size()) + " labels for " +
                      std::to_string(dist.rows()) + " points");
    }
    data_ = std::make_shared<const Data>(Data{std::move(dist), std::move(labels)});
  }

  int size() const noexcept { return static_cast<int>(data_->dist.rows()); }
  const Matrix& dist() const noexcept { return data_->dist; }
  double operator()(int i, int j) const { return data_->dist(i, j); }
  const std::vector<std::string>& labels() const noexcept { return data_->labels; }
  double diameter() const { return data_->dist.maxCoeff(); }

  /// A copy with every distance multiplied by `factor` > 0.
  MetricSpace scaled(double factor) const {
    return MetricSpace(data_->dist * factor, data_->labels);
  }

  /// The subspace on the given point indices, in the given order.
  MetricSpace subspace(const std::vector<int>& idx) const {
    const auto k = static_cast<Eigen::Index>(idx.size());
    Matrix d(k, k);
    std::vector<std::string> lab;
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index b = 0; b < k; ++b) d(a, b) = data_->dist(idx[a], idx[b]);
      if (!data_->labels.empty()) lab.push_back(data_->labels[idx[a]]);
    }
    return MetricSpace(std::move(d), std::move(lab));
  }

  friend bool operator==(const MetricSpace& a, const MetricSpace& b) {
    return a.data_ == b.data_ ||
           (a.dist().rows() == b.dist().rows() && a.dist() == b.dist());
  }

 private:
  struct Data {
    Matrix dist;
    std::vector<std::string> labels;
  };
  std::shared_ptr<const Data> data_;
};

/// Real weights on the points of a MetricSpace.
///
/// Mass constraints (mass 0, mass 1) are not part of the type; operations that
/// need them check at their boundary.
class SignedMeasure {
 public:
  SignedMeasure(MetricSpace space, Vector weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    if (weights_.size() != space_.size()) {
      throw Error(ErrorCode::kDimension, "core",
                  "measure has " + std::to_string(weights_.size()) +
                      " weights for a space of " + std::to_string(space_.size()) +
                      " points");
    }
  }

  SignedMeasure(MetricSpace space, std::initializer_list<double> weights)
      : SignedMeasure(std::move(space),
                      Eigen::Map<const Vector>(weights.begin(),
                                               static_cast<Eigen::Index>(weights.size()))) {}

  static SignedMeasure dirac(MetricSpace space, int i) {
    Vector w = Vector::Zero(space.size());
    w(i) = 1.0;
    return SignedMeasure(std::move(space), std::move(w));
  }

  static SignedMeasure uniform(MetricSpace space) {
    const int n = space.size();
    return SignedMeasure(std::move(space), Vector::Constant(n, 1.0 / n));
  }

  const MetricSpace& space() const noexcept { return space_; }
  const Vector& weights() const noexcept { return weights_; }
  double mass() const { return weights_.sum(); }

 private:
  MetricSpace space_;
  Vector weights_;
};

inline std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace qhm
