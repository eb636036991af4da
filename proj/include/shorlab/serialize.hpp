#pragma once

#include <cstdio>
#include <string>

#include <json.hpp>

#include "shorlab/qstate.hpp"
#include "shorlab/strategies.hpp"

/*
 * Machine-readable output. ordered_json keeps field order exactly as
 * declared, so identical inputs serialize to identical bytes. All numeric
 * text is full precision, locale-free.
 */
namespace shorlab::serialize {

using json = nlohmann::ordered_json;

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline json to_json(const numtheory::PeriodCandidate& c) {
  return json{{"r", c.r}, {"source", numtheory::to_string(c.source)}, {"sample", c.sample}};
}

inline json to_json(const strategies::Sample& s) {
  return json{{"register", s.register_name}, {"bits", s.bits}, {"value", s.value}};
}

inline json to_json(const strategies::RunRecord& record) {
  json candidates = json::array();
  for (const auto& c : record.period_candidates) candidates.push_back(to_json(c));
  json samples = json::array();
  for (const auto& s : record.samples) samples.push_back(to_json(s));
  json out{
      {"strategy", strategies::to_string(record.strategy)},
      {"seed", record.seed},
      {"samples", std::move(samples)},
      {"period_candidates", std::move(candidates)},
  };
  if (record.factors) {
    out["factors"] = json::array({record.factors->first, record.factors->second});
  } else {
    out["factors"] = nullptr;
  }
  out["failure"] = record.failure ? json(strategies::to_string(*record.failure)) : json(nullptr);
  return out;
}

inline json to_json(const strategies::EnsembleReport& report) {
  return json{
      {"shots", report.shots},
      {"bit_means", report.bit_means},
      {"variable_bits", report.variable_bits},
      {"variable_mask", report.variable_mask},
      {"r_estimate", report.r_estimate},
      {"verified", report.verified},
      {"seed", report.seed},
  };
}

inline json to_json(const qstate::DenseState& dense) {
  json entries = json::array();
  for (const auto& e : dense.entries) {
    entries.push_back(json{{"x", e.x},
                           {"f", e.f},
                           {"re", e.amplitude.real()},
                           {"im", e.amplitude.imag()}});
  }
  return json{
      {"stage", dense.stage == qstate::Stage::post_modexp ? "post_modexp" : "post_qft"},
      {"points", dense.M},
      {"entries", std::move(entries)},
  };
}

// One RunRecord per line, for batch outputs.
inline std::string to_json_lines(const std::vector<strategies::RunRecord>& records) {
  std::string out;
  for (const auto& record : records) {
    out += to_json(record).dump();
    out += '\n';
  }
  return out;
}

// p,mass rows; support_only limits rows to outcomes above the mass threshold.
inline std::string distribution_csv(const qstate::Distribution& distribution, bool support_only) {
  std::string out = "p,mass\n";
  if (support_only) {
    for (u64 p : distribution.support()) {
      out += std::to_string(p);
      out += ',';
      out += fmt_double(distribution.mass(p));
      out += '\n';
    }
  } else {
    for (u64 p = 0; p < distribution.points(); ++p) {
      out += std::to_string(p);
      out += ',';
      out += fmt_double(distribution.mass(p));
      out += '\n';
    }
  }
  return out;
}

}  // namespace shorlab::serialize
