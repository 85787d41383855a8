#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"
#include "qhm/classify.hpp"
#include "qhm/embed.hpp"
#include "qhm/io.hpp"
#include "qhm/mconstant.hpp"
#include "qhm/metric_space.hpp"
#include "qhm/spaces.hpp"
#include "qhm/tolerances.hpp"

namespace qhm {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

/// FNV-1a 64 over n followed by the row-major IEEE-754 bytes of the matrix.
inline std::string input_digest(const MetricSpace& space) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&](const void* p, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  const std::int64_t n = space.size();
  feed(&n, sizeof n);
  for (int i = 0; i < space.size(); ++i)
    for (int j = 0; j < space.size(); ++j) {
      const double v = space(i, j);
      feed(&v, sizeof v);
    }
  std::ostringstream ss;
  ss << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

inline json vector_json(const Vector& v) { return to_std(v); }

/// Finite values as numbers; infinity as the string "inf".
inline json m_json(const std::optional<double>& m) {
  if (m) return *m;
  return "inf";
}

inline json verdict_json(const Verdict& v) {
  json j{{"holds", v.holds}};
  if (!v.holds) j["witness"] = v.witness;
  return j;
}

inline json tolerances_json(const Tolerances& tol) { return tol.to_map(); }

inline Tolerances tolerances_from_json(const json& j) {
  Tolerances tol;
  for (const auto& [key, value] : j.items()) tol.set(key, value.get<double>());
  return tol;
}

inline json classification_json(const Classification& c) {
  json j;
  j["quasihypermetric"] = verdict_json(c.quasihypermetric);
  j["strictly_quasihypermetric"] = verdict_json(c.strictly_quasihypermetric);
  if (c.hypermetric) {
    const auto& v = c.hypermetric->verdict;
    json h{{"holds", v.holds}, {"bound", c.hypermetric->bound}};
    if (!v.holds) {
      std::vector<long> b;
      for (double x : v.witness) b.push_back(std::lround(x));
      h["witness"] = b;
    }
    j["hypermetric_up_to_bound"] = h;
  } else {
    j["hypermetric_up_to_bound"] = nullptr;
  }
  j["hypermetric_note"] = c.hypermetric_note;
  j["matrix_rank"] = c.matrix_rank;
  j["nullspace_basis"] = c.nullspace_basis;
  return j;
}

inline json m_report_json(const MReport& r) {
  json j;
  j["m_value"] = m_json(r.m_value);
  j["maximal_measure"] = r.maximal_measure ? vector_json(*r.maximal_measure) : json(nullptr);
  j["m_plus"] = r.m_plus ? json(*r.m_plus) : json(nullptr);
  j["m_plus_converged"] = r.m_plus_converged;
  j["unique_maximal"] = r.unique_maximal;
  j["invariant_value"] = r.invariant_value ? json(*r.invariant_value) : json(nullptr);
  j["solution_mass"] = std::isnan(r.solution_mass) ? json(nullptr) : json(r.solution_mass);
  j["residual"] = r.residual;
  j["method_tags"] = r.method_tags;
  return j;
}

/// {"dim", "points", "sphere": {"centre", "radius", "residual"}, "hull_distance"}
inline json embedding_json(const SEmbedding& e) {
  json j;
  j["dim"] = e.dim;
  j["points"] = matrix_to_json(e.points);
  if (e.sphere) {
    j["sphere"] = {{"centre", vector_json(e.sphere->centre)},
                   {"radius", e.sphere->radius},
                   {"residual", e.sphere->residual}};
  } else {
    j["sphere"] = nullptr;
  }
  j["hull_distance"] = e.hull ? json(e.hull->distance) : json(nullptr);
  return j;
}

inline json trace_json(const ApproxTrace& t) {
  json values = json::array();
  for (const auto& v : t.m_values) values.push_back(m_json(v));
  return {{"sizes", t.sizes}, {"m_values", values}, {"monotone_ok", t.monotone_ok}};
}

inline json error_json(const Error& e) {
  return {{"module", e.module()}, {"code", e.exit_code()}, {"message", e.what()}};
}

/// The full report: classification, M/M+ and the geometric cross-checks.
///
/// Library errors inside a stage are recorded under "errors" rather than
/// aborting the document, except for invalid input.
inline json build_report(const MetricSpace& space, int hyper_bound, const Tolerances& tol) {
  json doc;
  doc["tool"] = "qhm";
  doc["version"] = kVersion;
  doc["input_digest"] = input_digest(space);
  doc["input"] = space_to_json(space);
  doc["n"] = space.size();
  doc["diameter"] = space.diameter();
  doc["hyper_bound"] = hyper_bound;
  doc["tolerances"] = tolerances_json(tol);
  doc["errors"] = json::array();

  doc["classification"] = classification_json(classify(space, hyper_bound, tol));

  std::optional<MReport> m;
  try {
    m = compute_m_report(space, tol);
    doc["m_report"] = m_report_json(*m);
  } catch (const Error& e) {
    doc["m_report"] = nullptr;
    doc["errors"].push_back(error_json(e));
  }

  std::optional<SEmbedding> emb;
  try {
    emb = sphere_diagnostics(space, tol);
    doc["embedding"] = embedding_json(*emb);
  } catch (const Error& e) {
    doc["embedding"] = nullptr;
    doc["errors"].push_back(error_json(e));
  }

  json checks;
  if (m && m->m_value && emb && emb->sphere) {
    const double two_r2 = 2.0 * emb->sphere->radius * emb->sphere->radius;
    checks["m_vs_2r2"] = {
        {"m", *m->m_value}, {"two_r2", two_r2}, {"discrepancy", std::abs(*m->m_value - two_r2)}};
    if (m->m_plus && emb->hull) {
      checks["mplus_vs_geometric"] = {
          {"m_plus", *m->m_plus},
          {"two_r2_minus_s2", emb->hull->m_plus_geometric},
          {"discrepancy", std::abs(*m->m_plus - emb->hull->m_plus_geometric)}};
    }
  }
  doc["cross_checks"] = checks.is_null() ? json::object() : checks;
  return doc;
}

/// Human-readable summary derived from a report document.
inline std::string report_table(const json& doc) {
  std::ostringstream out;
  auto yes_no = [](const json& v) {
    if (v.is_null()) return std::string("skipped");
    return std::string(v.at("holds").get<bool>() ? "yes" : "no");
  };
  const auto& c = doc.at("classification");
  out << "points                     " << doc.at("n") << "\n";
  out << "quasihypermetric           " << yes_no(c.at("quasihypermetric")) << "\n";
  out << "strictly quasihypermetric  " << yes_no(c.at("strictly_quasihypermetric")) << "\n";
  out << "hypermetric (bounded)      " << yes_no(c.at("hypermetric_up_to_bound")) << "\n";
  out << "rank of D                  " << c.at("matrix_rank") << "\n";
  if (!doc.at("m_report").is_null()) {
    const auto& m = doc.at("m_report");
    out << "M(X)                       " << m.at("m_value").dump() << "\n";
    out << "M+(X)                      " << m.at("m_plus").dump() << "\n";
    out << "unique maximal measure     " << (m.at("unique_maximal").get<bool>() ? "yes" : "no")
        << "\n";
  }
  if (!doc.at("embedding").is_null()) {
    const auto& e = doc.at("embedding");
    out << "embedding dimension        " << e.at("dim") << "\n";
    out << "circumradius               "
        << (e.at("sphere").is_null() ? std::string("none") : e["sphere"]["radius"].dump())
        << "\n";
  }
  return out.str();
}

}  // namespace qhm
