#pragma once

#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "qhm/error.hpp"

namespace qhm {

/// Every numerical threshold used by the library, in one record.
///
/// Most values are relative; the effective absolute threshold is obtained by
/// multiplying with the scale noted next to each field (n = point count,
/// diam = largest distance). The record is echoed verbatim into reports so
/// a result can be reproduced exactly.
struct Tolerances {
  double triangle_rel = 1e-9;  // x diam, slack allowed in the triangle inequality
  double pos_tol = 1e-9;       // x n*diam, largest eigenvalue of PDP still "<= 0"
  double neg_tol = 1e-9;       // x n*diam, half-width of the zero eigenvalue band
  double rank_tol = 1e-10;     // x largest |eigenvalue|, numerical rank cut-off
  double mass_tol = 1e-8;      // x n, |sum(w)| * diam below this means M infinite
  double res_tol = 1e-7;       // x n, max |Dw - 1| accepted for Dw = 1
  double inv_tol = 1e-7;       // x diam * max(1, |mu|_1), spread of d_mu
  double fw_tol = 1e-10;       // x diam, Frank-Wolfe duality gap
  double fw_max_iter = 1e5;
  double emb_tol = 1e-8;       // x diam, isometry defect of an embedding
  double sph_tol = 1e-7;       // relative circumsphere residual
  double mn_tol = 1e-12;       // relative optimality gap for the min-norm point
  double hyper_budget = 1e8;   // max (2B+1)^n vectors for hypermetric search

  template <class F>
  void for_each(F&& f) {
    f("triangle_rel", triangle_rel);
    f("pos_tol", pos_tol);
    f("neg_tol", neg_tol);
    f("rank_tol", rank_tol);
    f("mass_tol", mass_tol);
    f("res_tol", res_tol);
    f("inv_tol", inv_tol);
    f("fw_tol", fw_tol);
    f("fw_max_iter", fw_max_iter);
    f("emb_tol", emb_tol);
    f("sph_tol", sph_tol);
    f("mn_tol", mn_tol);
    f("hyper_budget", hyper_budget);
  }

  template <class F>
  void for_each(F&& f) const {
    const_cast<Tolerances*>(this)->for_each(
        [&](const char* key, double& v) { f(key, static_cast<const double&>(v)); });
  }

  std::map<std::string, double> to_map() const {
    std::map<std::string, double> out;
    for_each([&](const char* key, const double& v) { out[key] = v; });
    return out;
  }

  /// Sets one field by name. Throws on unknown keys or non-positive values.
  void set(std::string_view key, double value) {
    bool found = false;
    for_each([&](const char* k, double& v) {
      if (key == k) {
        v = value;
        found = true;
      }
    });
    if (!found) {
      throw Error(ErrorCode::kBadInput, "tolerances",
                  "unknown tolerance key '" + std::string(key) + "'");
    }
    if (!(value > 0.0)) {
      throw Error(ErrorCode::kBadInput, "tolerances",
                  "tolerance '" + std::string(key) + "' must be positive");
    }
  }

  /// Applies QHM_TOL_<KEY> environment overrides (key upper-cased).
  void apply_environment() {
    for_each([&](const char* key, double& v) {
      std::string name = "QHM_TOL_";
      for (const char* c = key; *c; ++c) {
        name += static_cast<char>(std::toupper(static_cast<unsigned char>(*c)));
      }
      if (const char* env = std::getenv(name.c_str())) {
        char* end = nullptr;
        const double parsed = std::strtod(env, &end);
        if (end == env || *end != '\0' || !(parsed > 0.0)) {
          throw Error(ErrorCode::kBadInput, "tolerances",
                      "bad value for " + name + ": '" + env + "'");
        }
        v = parsed;
      }
    });
  }

  friend bool operator==(const Tolerances&, const Tolerances&) = default;
};

}  // namespace qhm
