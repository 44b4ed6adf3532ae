#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "elan/error.hpp"
#include "elan/profile/interpreter.hpp"

namespace elan::profile {

/// Fraction of runs in which each vertex executed at least once.
struct ProfileData {
  std::uint32_t run_count = 0;
  std::vector<std::uint32_t> visit_counts;  // indexed by vertex id
  std::vector<double> fractions;            // visit_counts[v] / run_count
  std::uint32_t runtime_errors = 0;
  std::uint32_t step_limit_hits = 0;
  std::vector<std::string> diagnostics;  // one per faulting run

  // "file:line" -> fraction of runs that executed some vertex starting there.
  std::map<std::string, double> line_fractions;

  double fraction(VertexId v) const { return fractions.at(v); }
};

inline ProfileData profile(const microc::Program& p, const sdg::Sdg& g,
                           const std::vector<RunInput>& inputs,
                           std::uint64_t step_limit = kDefaultStepLimit, unsigned jobs = 1) {
  if (inputs.empty()) throw AnalysisError("profile needs at least one input");

  std::vector<ExecutionTrace> traces(inputs.size());
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(inputs.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < inputs.size(); ++i) traces[i] = interpret(p, g, inputs[i], step_limit);
  } else {
    std::vector<std::thread> workers;
    for (unsigned k = 0; k < jobs; ++k) {
      workers.emplace_back([&, k] {
        for (std::size_t i = k; i < inputs.size(); i += jobs) {
          traces[i] = interpret(p, g, inputs[i], step_limit);
        }
      });
    }
    for (auto& w : workers) w.join();
  }

  ProfileData d;
  d.run_count = static_cast<std::uint32_t>(inputs.size());
  d.visit_counts.assign(g.size(), 0);
  std::map<std::string, std::uint32_t> line_counts;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    std::set<std::string> lines;
    for (VertexId v : t.visited) {
      ++d.visit_counts[v];
      const auto& span = g.vertex(v).span;
      lines.insert(span.file + ":" + std::to_string(span.line_start));
    }
    for (const auto& l : lines) ++line_counts[l];
    if (t.outcome == RunOutcome::RuntimeError) {
      ++d.runtime_errors;
      d.diagnostics.push_back("run '" + inputs[i].name + "': " + t.error);
    } else if (t.outcome == RunOutcome::StepLimit) {
      ++d.step_limit_hits;
      d.diagnostics.push_back("run '" + inputs[i].name + "': step limit reached");
    }
  }
  d.fractions.resize(g.size());
  for (VertexId v = 0; v < g.size(); ++v) {
    d.fractions[v] = static_cast<double>(d.visit_counts[v]) / d.run_count;
  }
  for (const auto& [line, n] : line_counts) {
    d.line_fractions[line] = static_cast<double>(n) / d.run_count;
  }
  return d;
}

// ---- file formats ---------------------------------------------------------

/// Inputs file: JSON array of {"name": string, "values": [int, ...]}.
inline std::vector<RunInput> parse_inputs(const nlohmann::json& j) {
  if (!j.is_array()) throw AnalysisError("inputs: expected a JSON array");
  std::vector<RunInput> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& item = j[i];
    if (!item.is_object() || !item.contains("values") || !item["values"].is_array()) {
      throw AnalysisError("inputs[" + std::to_string(i) + "]: expected {name, values:[...]}");
    }
    RunInput in;
    in.name = item.value("name", "run" + std::to_string(i));
    for (const auto& v : item["values"]) {
      if (!v.is_number_integer()) {
        throw AnalysisError("inputs[" + std::to_string(i) + "]: values must be integers");
      }
      in.values.push_back(v.get<std::int64_t>());
    }
    out.push_back(std::move(in));
  }
  return out;
}

inline std::vector<RunInput> read_inputs(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw AnalysisError(std::string("inputs: ") + e.what());
  }
  return parse_inputs(j);
}

inline nlohmann::ordered_json to_json(const ProfileData& d) {
  nlohmann::ordered_json j;
  j["run_count"] = d.run_count;
  auto& fr = j["fractions"] = nlohmann::ordered_json::object();
  for (VertexId v = 0; v < d.fractions.size(); ++v) fr[std::to_string(v)] = d.fractions[v];
  j["line_fractions"] = d.line_fractions;
  j["runtime_errors"] = d.runtime_errors;
  j["step_limit_hits"] = d.step_limit_hits;
  return j;
}

}  // namespace elan::profile
