#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <regex>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "qhm/classify.hpp"
#include "qhm/error.hpp"
#include "qhm/mconstant.hpp"
#include "qhm/metric_space.hpp"

namespace qhm {

namespace detail {

inline std::vector<std::string> numbered_labels(const std::string& stem, int n) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

}  // namespace detail

/// Distinct points in R^m with the Euclidean metric.
inline MetricSpace from_euclidean(const std::vector<std::vector<double>>& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Matrix d = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = points[i];
      const auto& b = points[j];
      if (a.size() != b.size()) {
        throw Error(ErrorCode::kDimension, "spaces", "points have different dimensions");
      }
      double sq = 0.0;
      for (std::size_t c = 0; c < a.size(); ++c) sq += (a[c] - b[c]) * (a[c] - b[c]);
      if (sq == 0.0) {
        throw Error(ErrorCode::kNonPositive, "spaces",
                    "duplicate points " + std::to_string(i) + " and " + std::to_string(j));
      }
      d(i, j) = d(j, i) = std::sqrt(sq);
    }
  }
  return MetricSpace(std::move(d));
}

/// Named fixture spaces:
///   assouad5, equilateral3_6, cycle4_arclength, star_1_2,
///   twopoint(t), discrete(n,t).
inline MetricSpace make_fixture(const std::string& name) {
  if (name == "assouad5") {
    Matrix d(5, 5);
    d << 0, 2, 2, 5, 5,  //
        2, 0, 4, 3, 3,   //
        2, 4, 0, 3, 3,   //
        5, 3, 3, 0, 4,   //
        5, 3, 3, 4, 0;
    return MetricSpace(d, detail::numbered_labels("x", 5));
  }
  if (name == "cycle4_arclength") {
    // Four consecutive equally spaced points on a circle of radius 4/pi,
    // circumference 8: quarter arcs are 2, half arcs 4.
    Matrix d(4, 4);
    d << 0, 2, 4, 2,  //
        2, 0, 2, 4,   //
        4, 2, 0, 2,   //
        2, 4, 2, 0;
    return MetricSpace(d, detail::numbered_labels("y", 4));
  }
  if (name == "star_1_2") {
    Matrix d(4, 4);
    d << 0, 1, 1, 1,  //
        1, 0, 2, 2,   //
        1, 2, 0, 2,   //
        1, 2, 2, 0;
    return MetricSpace(d, {"centre", "leaf1", "leaf2", "leaf3"});
  }
  if (name == "equilateral3_6") return make_fixture("discrete(3,6)");

  static const std::regex two_point(R"(twopoint\(\s*([^)\s]+)\s*\))");
  static const std::regex discrete(R"(discrete\(\s*(\d+)\s*,\s*([^)\s]+)\s*\))");
  std::smatch m;
  try {
    if (std::regex_match(name, m, two_point)) {
      const double t = std::stod(m[1]);
      Matrix d(2, 2);
      d << 0, t, t, 0;
      return MetricSpace(d, detail::numbered_labels("x", 2));
    }
    if (std::regex_match(name, m, discrete)) {
      const int n = std::stoi(m[1]);
      const double t = std::stod(m[2]);
      if (n < 1) throw Error(ErrorCode::kBadInput, "spaces", "discrete needs n >= 1");
      Matrix d = Matrix::Constant(n, n, t);
      d.diagonal().setZero();
      return MetricSpace(d, detail::numbered_labels("x", n));
    }
  } catch (const std::logic_error&) {
    // stod/stoi failures fall through to the unknown-name error
  }
  throw Error(ErrorCode::kBadInput, "spaces", "unknown fixture '" + name + "'");
}

inline std::vector<std::string> fixture_names() {
  return {"assouad5", "equilateral3_6", "cycle4_arclength", "star_1_2"};
}

/// Random finite metric space: symmetric entries uniform in [0.05, 1], then
/// closed under shortest paths so the triangle inequality holds.
inline MetricSpace random_metric(int n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::kBadInput, "spaces", "random_metric needs n >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(0.05, 1.0);
  Matrix d = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) d(i, j) = d(j, i) = draw(rng);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) d(i, j) = std::min(d(i, j), d(i, k) + d(k, j));
  return MetricSpace(std::move(d));
}

/// n points uniform in the unit cube of R^dim, as a Euclidean metric space.
inline MetricSpace random_euclidean(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(0.0, 1.0);
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(dim)));
  for (auto& p : pts)
    for (auto& c : p) c = draw(rng);
  return from_euclidean(pts);
}

struct IntervalSpace {
  double length = 1.0;
};
struct CircleSpace {
  double circumference = 1.0;
};
struct PointCloudSpace {
  std::vector<std::vector<double>> points;
};

/// A compact space with a deterministic dense sampling rule.
///
///  - interval: both endpoints, then the base-2 van der Corput sequence.
///  - circle (arc-length metric): 4 equally spaced points, then golden-angle
///    steps from position 0.
///  - point cloud: the points in a seed-determined order.
///
/// The seed only affects point clouds. Prefixes are nested by construction.
using CompactSpaceDescriptor = std::variant<IntervalSpace, CircleSpace, PointCloudSpace>;

inline double van_der_corput(std::uint64_t i) {
  double x = 0.0;
  double f = 0.5;
  while (i) {
    if (i & 1u) x += f;
    i >>= 1;
    f *= 0.5;
  }
  return x;
}

inline CompactSpaceDescriptor parse_descriptor(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "interval") {
      const double l = j.at("length").get<double>();
      if (!(l > 0.0)) throw Error(ErrorCode::kBadInput, "spaces", "length must be positive");
      return IntervalSpace{l};
    }
    if (kind == "circle") {
      const double c = j.at("circumference").get<double>();
      if (!(c > 0.0)) {
        throw Error(ErrorCode::kBadInput, "spaces", "circumference must be positive");
      }
      return CircleSpace{c};
    }
    if (kind == "euclidean_pointcloud") {
      return PointCloudSpace{j.at("points").get<std::vector<std::vector<double>>>()};
    }
    throw Error(ErrorCode::kBadInput, "spaces", "unknown descriptor kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBadInput, "spaces", std::string("bad descriptor: ") + e.what());
  }
}

inline nlohmann::json descriptor_to_json(const CompactSpaceDescriptor& desc) {
  struct Visitor {
    nlohmann::json operator()(const IntervalSpace& s) const {
      return {{"kind", "interval"}, {"length", s.length}};
    }
    nlohmann::json operator()(const CircleSpace& s) const {
      return {{"kind", "circle"}, {"circumference", s.circumference}};
    }
    nlohmann::json operator()(const PointCloudSpace& s) const {
      return {{"kind", "euclidean_pointcloud"}, {"points", s.points}};
    }
  };
  return std::visit(Visitor{}, desc);
}

/// The first `n` points of the dense sequence, as a metric space.
inline MetricSpace sample_prefix(const CompactSpaceDescriptor& desc, int n,
                                 std::uint64_t seed = 0) {
  if (const auto* iv = std::get_if<IntervalSpace>(&desc)) {
    std::vector<std::vector<double>> pts;
    for (int i = 0; i < n; ++i) {
      const double t = i == 0 ? 0.0 : i == 1 ? 1.0 : van_der_corput(std::uint64_t(i - 1));
      pts.push_back({t * iv->length});
    }
    return from_euclidean(pts);
  }
  if (const auto* c = std::get_if<CircleSpace>(&desc)) {
    const double golden = (3.0 - std::sqrt(5.0)) / 2.0;
    std::vector<double> pos;
    for (int i = 0; i < n; ++i) {
      double frac;
      if (i < 4) {
        frac = i / 4.0;
      } else {
        const double x = (i - 3) * golden;
        frac = x - std::floor(x);
      }
      pos.push_back(frac * c->circumference);
    }
    Matrix d = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double gap = std::abs(pos[i] - pos[j]);
        d(i, j) = d(j, i) = std::min(gap, c->circumference - gap);
      }
    return MetricSpace(std::move(d));
  }
  const auto& cloud = std::get<PointCloudSpace>(desc);
  if (n > static_cast<int>(cloud.points.size())) {
    throw Error(ErrorCode::kBadInput, "spaces",
                "point cloud has only " + std::to_string(cloud.points.size()) + " points");
  }
  std::vector<std::size_t> order(cloud.points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < n; ++i) pts.push_back(cloud.points[order[static_cast<std::size_t>(i)]]);
  return from_euclidean(pts);
}

struct ApproxTrace {
  std::vector<int> sizes;
  std::vector<std::optional<double>> m_values;  // nullopt = infinite
  bool monotone_ok = true;
};

/// M(X_n) along the nested samples X_2, ..., X_max_n.
///
/// Throws if a sample is not quasihypermetric, which cannot happen for the
/// built-in descriptors. `monotone_ok` is checked with slack
/// 1e-9 * max(1, M).
inline ApproxTrace approx_m(const CompactSpaceDescriptor& desc, int max_n, std::uint64_t seed,
                            const Tolerances& tol = {}) {
  if (max_n < 2) throw Error(ErrorCode::kBadInput, "spaces", "approx_m needs max_n >= 2");
  ApproxTrace out;
  for (int n = 2; n <= max_n; ++n) {
    const MetricSpace xn = sample_prefix(desc, n, seed);
    if (!check_quasihypermetric(xn, tol)) {
      throw Error(ErrorCode::kBadInput, "spaces",
                  "sample of size " + std::to_string(n) + " is not quasihypermetric");
    }
    const auto report = compute_m(xn, tol);
    out.sizes.push_back(n);
    out.m_values.push_back(report.m_value);
  }
  for (std::size_t i = 1; i < out.m_values.size(); ++i) {
    const auto& prev = out.m_values[i - 1];
    const auto& cur = out.m_values[i];
    if (!prev) {
      if (cur) out.monotone_ok = false;
    } else if (cur && *cur < *prev - 1e-9 * std::max(1.0, *prev)) {
      out.monotone_ok = false;
    }
  }
  return out;
}

}  // namespace qhm
