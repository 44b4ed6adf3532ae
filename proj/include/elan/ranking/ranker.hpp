#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "elan/error.hpp"
#include "elan/likelihood/engine.hpp"
#include "elan/ranking/warnings.hpp"
#include "elan/sdg/slicing.hpp"

namespace elan::ranking {

struct RankedWarning {
  WarningRecord warning;
  std::optional<sdg::VertexId> vertex_id;
  std::optional<double> likelihood;  // present iff vertex_id is
  int rank = 0;                      // 1-based
};

enum class TieBreak { Location, Severity };

inline TieBreak parse_tiebreak(const std::string& name) {
  if (name == "location" || name == "none") return TieBreak::Location;
  if (name == "severity") return TieBreak::Severity;
  throw std::invalid_argument("unknown tiebreak '" + name + "' (expected location or severity)");
}

struct RankOptions {
  likelihood::BranchModel model;
  std::optional<sdg::VertexId> start;
  unsigned jobs = 1;
  TieBreak tiebreak = TieBreak::Location;
};

/// Maps each warning to the innermost covering vertex and orders by
/// likelihood (descending). Equal likelihoods fall back to severity when
/// requested, then to (file, line, message). Unmapped warnings follow in
/// input order.
inline std::vector<RankedWarning> rank(const sdg::Sdg& g, const std::vector<WarningRecord>& warnings,
                                       const RankOptions& opt = {}) {
  likelihood::LikelihoodEngine engine(g);
  const sdg::VertexId start = opt.start.value_or(engine.default_start());
  sdg::check_vertex(g, start);

  std::vector<RankedWarning> out(warnings.size());
  std::vector<sdg::VertexId> targets;
  for (std::size_t i = 0; i < warnings.size(); ++i) {
    out[i].warning = warnings[i];
    try {
      out[i].vertex_id = sdg::vertex_at(g, warnings[i].file, warnings[i].line);
      targets.push_back(*out[i].vertex_id);
    } catch (const NotFound&) {
    }
  }
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  const auto results = engine.batch(targets, start, opt.model, opt.jobs);
  std::map<sdg::VertexId, double> by_vertex;
  for (const auto& r : results) by_vertex[r.vertex] = r.likelihood;
  for (auto& rw : out) {
    if (rw.vertex_id) rw.likelihood = by_vertex.at(*rw.vertex_id);
  }

  auto mapped_end = std::stable_partition(out.begin(), out.end(),
                                          [](const RankedWarning& r) { return r.vertex_id.has_value(); });
  std::stable_sort(out.begin(), mapped_end, [&](const RankedWarning& a, const RankedWarning& b) {
    if (*a.likelihood != *b.likelihood) return *a.likelihood > *b.likelihood;
    if (opt.tiebreak == TieBreak::Severity && a.warning.severity != b.warning.severity) {
      // Records without a severity go after those with one.
      if (!a.warning.severity) return false;
      if (!b.warning.severity) return true;
      return *a.warning.severity < *b.warning.severity;
    }
    const auto& x = a.warning;
    const auto& y = b.warning;
    return std::tie(x.file, x.line, x.message) < std::tie(y.file, y.line, y.message);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i + 1);
  return out;
}

inline std::string format_likelihood(const std::optional<double>& p) {
  if (!p) return "unmapped";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *p);
  return buf;
}

namespace detail {
inline std::string tsv_field(const std::string& s) {
  std::string out;
  for (char c : s) out += (c == '\t' || c == '\n' || c == '\r') ? ' ' : c;
  return out;
}
}  // namespace detail

inline void write_tsv(std::ostream& os, const std::vector<RankedWarning>& ranked) {
  os << "rank\tlikelihood\tfile\tline\tmessage\n";
  for (const auto& r : ranked) {
    os << r.rank << '\t' << format_likelihood(r.likelihood) << '\t'
       << detail::tsv_field(r.warning.file) << '\t' << r.warning.line << '\t'
       << detail::tsv_field(r.warning.message) << '\n';
  }
}

inline nlohmann::ordered_json to_json(const std::vector<RankedWarning>& ranked) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : ranked) {
    nlohmann::ordered_json j;
    j["rank"] = r.rank;
    // Rounded like the TSV column so both outputs agree.
    j["likelihood"] = r.likelihood ? nlohmann::ordered_json(std::stod(format_likelihood(r.likelihood)))
                                   : nlohmann::ordered_json("unmapped");
    j["file"] = r.warning.file;
    j["line"] = r.warning.line;
    j["message"] = r.warning.message;
    if (r.warning.severity) j["severity"] = *r.warning.severity;
    j["vertex"] = r.vertex_id ? nlohmann::ordered_json(*r.vertex_id) : nlohmann::ordered_json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

}  // namespace elan::ranking
