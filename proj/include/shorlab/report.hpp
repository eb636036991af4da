#pragma once

#include <string>

#include "shorlab/audit.hpp"
#include "shorlab/driver.hpp"
#include "shorlab/serialize.hpp"
#include "shorlab/version.hpp"

/*
 * Report envelope shared by every command: one in-memory JSON record holds
 * the version, the full configuration, the seed, and the payload. The text
 * summary is rendered from that record and from nothing else, so the two
 * output forms cannot drift apart.
 */
namespace shorlab::report {

using serialize::json;

inline json envelope(const std::string& command, json config, u64 seed) {
  return json{
      {"version", kVersion},
      {"command", command},
      {"config", std::move(config)},
      {"seed", seed},
  };
}

inline json factor_payload(const driver::FactorReport& result) {
  json records = json::array();
  for (const auto& record : result.records) records.push_back(serialize::to_json(record));
  json out{
      {"factors", result.factors
                      ? json(json::array({result.factors->first, result.factors->second}))
                      : json(nullptr)},
      {"immediate_factor", result.immediate_factor},
      {"base_used", result.base_used},
      {"runs_used", result.runs_used},
      {"records", std::move(records)},
  };
  if (result.ensemble) out["ensemble"] = serialize::to_json(*result.ensemble);
  return out;
}

inline json audit_payload(const std::vector<audit::ClaimReport>& reports) {
  json out = json::array();
  for (const auto& report : reports) out.push_back(audit::to_json(report));
  return json{{"reports", std::move(out)}};
}

// CSV files carry the same envelope as comment lines ahead of the header row.
inline std::string csv_preamble(const json& report) {
  std::string out;
  out += "# version=" + report.at("version").get<std::string>() + "\n";
  out += "# command=" + report.at("command").get<std::string>() + "\n";
  out += "# config=" + report.at("config").dump() + "\n";
  out += "# seed=" + std::to_string(report.at("seed").get<u64>()) + "\n";
  return out;
}

inline std::string render_text(const json& report) {
  const std::string command = report.at("command").get<std::string>();
  std::string out;
  out += "shorlab " + command + " (v" + report.at("version").get<std::string>() + ")\n";
  out += "seed: " + std::to_string(report.at("seed").get<u64>()) + "\n";

  if (command == "factor") {
    const auto& result = report.at("result");
    out += "runs used: " + std::to_string(result.at("runs_used").get<u64>()) + "\n";
    if (!result.at("factors").is_null()) {
      const u64 p = result.at("factors")[0].get<u64>();
      const u64 q = result.at("factors")[1].get<u64>();
      out += "factors: " + std::to_string(p) + " x " + std::to_string(q) + "\n";
      if (result.at("immediate_factor").get<bool>()) {
        out += "found by gcd with base " + std::to_string(result.at("base_used").get<u64>()) +
               " (no quantum run needed)\n";
      } else {
        out += "base: " + std::to_string(result.at("base_used").get<u64>()) + "\n";
      }
    } else {
      out += "factors: none found\n";
      if (!result.at("records").empty()) {
        const auto& last = result.at("records").back();
        if (!last.at("failure").is_null()) {
          out += "last failure: " + last.at("failure").get<std::string>() + "\n";
        }
      }
    }
    return out;
  }

  if (command == "state-dump") {
    const auto& state = report.at("state");
    out += "stage: " + state.at("stage").get<std::string>() + "\n";
    out += "entries: " + std::to_string(state.at("entries").size()) + "\n";
    return out;
  }

  if (command == "distribution") {
    const auto& summary = report.at("summary");
    out += "points: " + std::to_string(summary.at("points").get<u64>()) + "\n";
    out += "support size: " + std::to_string(summary.at("support_size").get<u64>()) + "\n";
    out += "mass total: " + serialize::fmt_double(summary.at("mass_total").get<double>()) + "\n";
    return out;
  }

  if (command == "audit") {
    for (const auto& claim : report.at("result").at("reports")) {
      out += claim.at("claim_id").get<std::string>() + ": " +
             claim.at("verdict").get<std::string>() + "  [" +
             claim.at("paper_locus").get<std::string>() + "]\n";
    }
    return out;
  }

  return out;
}

}  // namespace shorlab::report
