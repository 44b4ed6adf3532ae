#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "elan/error.hpp"
#include "elan/likelihood/engine.hpp"
#include "elan/profile/profiler.hpp"
#include "elan/sdg/sdg.hpp"

namespace elan::eval {

using sdg::VertexId;

inline constexpr std::array<double, 7> kBlocks{0.01, 0.02, 0.05, 0.10, 0.20, 0.40, 0.80};

/// One program location with its predicted likelihood and measured fraction.
struct Observation {
  VertexId vertex = 0;
  double predicted = 0.0;
  double measured = 0.0;
};

/// Both orders sort by (value descending, vertex id ascending).
struct RankingPair {
  std::vector<VertexId> predicted;
  std::vector<VertexId> measured;

  std::size_t size() const noexcept { return predicted.size(); }
};

namespace detail {
inline std::vector<VertexId> order_by(std::vector<Observation> obs, double Observation::*key) {
  std::sort(obs.begin(), obs.end(), [&](const Observation& a, const Observation& b) {
    if (a.*key != b.*key) return a.*key > b.*key;
    return a.vertex < b.vertex;
  });
  std::vector<VertexId> out;
  out.reserve(obs.size());
  for (const auto& o : obs) out.push_back(o.vertex);
  return out;
}
}  // namespace detail

inline RankingPair make_ranking_pair(const std::vector<Observation>& obs) {
  return {detail::order_by(obs, &Observation::predicted), detail::order_by(obs, &Observation::measured)};
}

/// Size of the top block for fraction f of n locations, never below 1.
inline std::size_t block_size(double f, std::size_t n) {
  if (!(f > 0.0 && f <= 1.0)) throw std::invalid_argument("block fraction must be in (0, 1]");
  if (n == 0) throw AnalysisError("empty ranking");
  // The epsilon keeps e.g. 0.1 * 30 from rounding up to 4.
  auto m = static_cast<std::size_t>(std::ceil(f * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(m, 1, n);
}

struct WallScore {
  double fraction = 0.0;
  std::size_t m = 0;
  std::size_t k = 0;
  double score = 0.0;
  double random_baseline = 0.0;  // m / N
};

/// Wall's unweighted matching: overlap of the two top-m sets, divided by m.
inline WallScore wall_score(const RankingPair& pair, double f) {
  const std::size_t n = pair.size();
  if (pair.measured.size() != n) throw std::invalid_argument("rankings differ in length");
  WallScore w;
  w.fraction = f;
  w.m = block_size(f, n);
  std::vector<VertexId> a(pair.predicted.begin(), pair.predicted.begin() + w.m);
  std::vector<VertexId> b(pair.measured.begin(), pair.measured.begin() + w.m);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::vector<VertexId> both;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
  w.k = both.size();
  w.score = static_cast<double>(w.k) / static_cast<double>(w.m);
  w.random_baseline = static_cast<double>(w.m) / static_cast<double>(n);
  return w;
}

struct CorrelationReport {
  std::size_t n = 0;
  std::size_t plateau = 0;  // locations measured at exactly 1.0
  std::vector<WallScore> blocks;
};

inline CorrelationReport correlation_report(const RankingPair& pair, std::size_t plateau = 0) {
  CorrelationReport r;
  r.n = pair.size();
  r.plateau = plateau;
  for (double f : kBlocks) r.blocks.push_back(wall_score(pair, f));
  return r;
}

struct ShuffleBaseline {
  std::uint32_t trials = 0;
  std::vector<double> mean;       // per block
  std::vector<double> std_error;  // of the mean
};

/// Monte-Carlo check of the random baseline: scores of uniformly shuffled
/// predictions against a fixed measured order of n locations.
inline ShuffleBaseline shuffle_baseline(std::size_t n, std::uint32_t trials, std::uint64_t seed) {
  if (n == 0) throw AnalysisError("empty ranking");
  ShuffleBaseline sb;
  sb.trials = trials;
  sb.mean.assign(kBlocks.size(), 0.0);
  sb.std_error.assign(kBlocks.size(), 0.0);
  if (trials == 0) return sb;
  std::mt19937_64 rng(seed);
  RankingPair pair;
  pair.measured.resize(n);
  std::iota(pair.measured.begin(), pair.measured.end(), VertexId{0});
  pair.predicted = pair.measured;
  std::vector<double> sum(kBlocks.size(), 0.0), sum_sq(kBlocks.size(), 0.0);
  for (std::uint32_t t = 0; t < trials; ++t) {
    std::shuffle(pair.predicted.begin(), pair.predicted.end(), rng);
    for (std::size_t b = 0; b < kBlocks.size(); ++b) {
      const double s = wall_score(pair, kBlocks[b]).score;
      sum[b] += s;
      sum_sq[b] += s * s;
    }
  }
  for (std::size_t b = 0; b < kBlocks.size(); ++b) {
    const double mean = sum[b] / trials;
    const double var = trials > 1 ? std::max(0.0, (sum_sq[b] - trials * mean * mean) / (trials - 1)) : 0.0;
    sb.mean[b] = mean;
    sb.std_error[b] = std::sqrt(var / trials);
  }
  return sb;
}

struct AccuracyRow {
  std::string interval;            // "=1", ">0.99", ..., "<0.05"
  std::size_t predicted = 0;       // locations whose prediction falls in the interval
  std::size_t correct = 0;         // of those, measured at the boundary value
  std::optional<double> percent;   // empty when no prediction falls in the interval
};

struct AccuracyTable {
  std::vector<AccuracyRow> always;  // measured 1.0
  std::vector<AccuracyRow> never;   // measured 0.0
};

inline AccuracyTable threshold_accuracy(const std::vector<Observation>& obs) {
  auto row = [&](std::string label, auto in_interval, double boundary) {
    AccuracyRow r;
    r.interval = std::move(label);
    for (const auto& o : obs) {
      if (!in_interval(o.predicted)) continue;
      ++r.predicted;
      if (o.measured == boundary) ++r.correct;
    }
    if (r.predicted) r.percent = 100.0 * static_cast<double>(r.correct) / static_cast<double>(r.predicted);
    return r;
  };
  AccuracyTable t;
  t.always.push_back(row("=1", [](double p) { return p == 1.0; }, 1.0));
  for (double x : {0.99, 0.98, 0.95}) {
    char label[16];
    std::snprintf(label, sizeof label, ">%.2f", x);
    t.always.push_back(row(label, [x](double p) { return p > x; }, 1.0));
  }
  t.never.push_back(row("=0", [](double p) { return p == 0.0; }, 0.0));
  for (double x : {0.01, 0.02, 0.05}) {
    char label[16];
    std::snprintf(label, sizeof label, "<%.2f", x);
    t.never.push_back(row(label, [x](double p) { return p < x; }, 0.0));
  }
  return t;
}

struct BlockMean {
  double fraction = 0.0;
  std::size_t m = 0;
  double mean_measured = 0.0;
};

/// Mean measured fraction over the top-m locations of the predicted order.
inline std::vector<BlockMean> block_likelihood_table(const std::vector<Observation>& obs) {
  if (obs.empty()) throw AnalysisError("empty ranking");
  const auto order = detail::order_by(obs, &Observation::predicted);
  std::vector<double> measured_of;
  for (const auto& o : obs) {
    if (o.vertex >= measured_of.size()) measured_of.resize(o.vertex + 1, 0.0);
    measured_of[o.vertex] = o.measured;
  }
  std::vector<BlockMean> out;
  for (double f : kBlocks) {
    BlockMean b;
    b.fraction = f;
    b.m = block_size(f, order.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < b.m; ++i) sum += measured_of[order[i]];
    b.mean_measured = sum / static_cast<double>(b.m);
    out.push_back(b);
  }
  return out;
}

// ---- whole-program evaluation ---------------------------------------------

enum class VertexSet { ControlPoints, All };

inline VertexSet parse_vertex_set(const std::string& name) {
  if (name == "control") return VertexSet::ControlPoints;
  if (name == "all") return VertexSet::All;
  throw std::invalid_argument("unknown vertex set '" + name + "' (expected control or all)");
}

struct ModelEvaluation {
  likelihood::ModelKind model = likelihood::ModelKind::Simple;
  std::vector<Observation> observations;
  CorrelationReport correlation;
  std::vector<BlockMean> blocks;
  AccuracyTable accuracy;
};

inline std::vector<VertexId> select_vertices(const sdg::Sdg& g, VertexSet set) {
  if (set == VertexSet::ControlPoints) return g.control_points();
  std::vector<VertexId> all(g.size());
  std::iota(all.begin(), all.end(), VertexId{0});
  return all;
}

inline ModelEvaluation evaluate(const sdg::Sdg& g, const profile::ProfileData& prof,
                                const std::vector<VertexId>& vertices,
                                const likelihood::BranchModel& model,
                                std::optional<VertexId> start = std::nullopt, unsigned jobs = 1) {
  if (vertices.empty()) throw AnalysisError("empty ranking");
  likelihood::LikelihoodEngine engine(g);
  const auto results = engine.batch(vertices, start.value_or(engine.default_start()), model, jobs);
  ModelEvaluation ev;
  ev.model = model.kind;
  std::size_t plateau = 0;
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const double measured = prof.fraction(vertices[i]);
    if (measured == 1.0) ++plateau;
    ev.observations.push_back({vertices[i], results[i].likelihood, measured});
  }
  ev.correlation = correlation_report(make_ranking_pair(ev.observations), plateau);
  ev.blocks = block_likelihood_table(ev.observations);
  ev.accuracy = threshold_accuracy(ev.observations);
  return ev;
}

// ---- reports ----------------------------------------------------------------

namespace detail {

inline std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string percent_cell(const std::optional<double>& p) {
  return p ? fixed(*p, 1) : std::string("n/a");
}

inline std::string block_label(double f) { return fixed(f * 100.0, 0) + "%"; }

// Joins per-model cells as "x - y".
template <typename F>
std::string cells(const std::vector<ModelEvaluation>& evs, F&& cell) {
  std::string out;
  for (std::size_t i = 0; i < evs.size(); ++i) {
    if (i) out += " - ";
    out += cell(evs[i]);
  }
  return out;
}

inline nlohmann::ordered_json row_json(const AccuracyRow& r) {
  nlohmann::ordered_json j;
  j["interval"] = r.interval;
  j["predicted"] = r.predicted;
  j["correct"] = r.correct;
  j["percent"] = r.percent ? nlohmann::ordered_json(*r.percent) : nlohmann::ordered_json("n/a");
  return j;
}

}  // namespace detail

struct EvalReport {
  std::string program;
  std::uint32_t run_count = 0;
  std::vector<ModelEvaluation> models;  // one or two
  std::optional<ShuffleBaseline> shuffle;
};

inline std::string to_markdown(const EvalReport& r) {
  using detail::cells;
  using detail::fixed;
  std::string out;
  std::string models;
  for (std::size_t i = 0; i < r.models.size(); ++i) {
    if (i) models += " - ";
    models += likelihood::to_string(r.models[i].model);
  }
  const auto& first = r.models.front();
  out += "# Evaluation: " + r.program + "\n\n";
  out += "- runs: " + std::to_string(r.run_count) + "\n";
  out += "- locations: " + std::to_string(first.correlation.n) + "\n";
  out += "- measured always-executed plateau: " + std::to_string(first.correlation.plateau) + "\n";
  out += "- models: " + models + "\n\n";

  out += "## Correlation (Wall's unweighted matching)\n\n";
  out += "| block | m | score (" + models + ") | random m/N |";
  if (r.shuffle) out += " shuffled mean |";
  out += "\n|---|---|---|---|";
  if (r.shuffle) out += "---|";
  out += "\n";
  for (std::size_t b = 0; b < kBlocks.size(); ++b) {
    const auto& w = first.correlation.blocks[b];
    out += "| " + detail::block_label(w.fraction) + " | " + std::to_string(w.m) + " | " +
           cells(r.models, [&](const ModelEvaluation& e) { return fixed(e.correlation.blocks[b].score, 3); }) +
           " | " + fixed(w.random_baseline, 3) + " |";
    if (r.shuffle) out += " " + fixed(r.shuffle->mean[b], 3) + " |";
    out += "\n";
  }

  out += "\n## Average measured likelihood per predicted block\n\n";
  out += "| block | m | mean (" + models + ") |\n|---|---|---|\n";
  for (std::size_t b = 0; b < kBlocks.size(); ++b) {
    const auto& bm = first.blocks[b];
    out += "| " + detail::block_label(bm.fraction) + " | " + std::to_string(bm.m) + " | " +
           cells(r.models, [&](const ModelEvaluation& e) { return fixed(e.blocks[b].mean_measured, 3); }) +
           " |\n";
  }

  auto accuracy = [&](const char* title, auto member) {
    out += std::string("\n## ") + title + "\n\n| predicted | count (" + models + ") | % correct (" +
           models + ") |\n|---|---|---|\n";
    const auto& rows = first.accuracy.*member;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out += "| " + rows[i].interval + " | " +
             cells(r.models, [&](const ModelEvaluation& e) { return std::to_string((e.accuracy.*member)[i].predicted); }) +
             " | " +
             cells(r.models, [&](const ModelEvaluation& e) { return detail::percent_cell((e.accuracy.*member)[i].percent); }) +
             " |\n";
    }
  };
  accuracy("Accuracy of always-executed predictions", &AccuracyTable::always);
  accuracy("Accuracy of never-executed predictions", &AccuracyTable::never);
  return out;
}

inline nlohmann::ordered_json to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["program"] = r.program;
  j["run_count"] = r.run_count;
  auto& ms = j["models"] = nlohmann::ordered_json::array();
  for (const auto& e : r.models) {
    nlohmann::ordered_json m;
    m["model"] = likelihood::to_string(e.model);
    m["locations"] = e.correlation.n;
    m["plateau"] = e.correlation.plateau;
    auto& corr = m["correlation"] = nlohmann::ordered_json::array();
    for (const auto& w : e.correlation.blocks) {
      corr.push_back({{"block", w.fraction}, {"m", w.m}, {"k", w.k}, {"score", w.score},
                      {"random_baseline", w.random_baseline}});
    }
    auto& bl = m["block_likelihood"] = nlohmann::ordered_json::array();
    for (const auto& b : e.blocks) {
      bl.push_back({{"block", b.fraction}, {"m", b.m}, {"mean_measured", b.mean_measured}});
    }
    auto& always = m["accuracy_always"] = nlohmann::ordered_json::array();
    for (const auto& row : e.accuracy.always) always.push_back(detail::row_json(row));
    auto& never = m["accuracy_never"] = nlohmann::ordered_json::array();
    for (const auto& row : e.accuracy.never) never.push_back(detail::row_json(row));
    ms.push_back(std::move(m));
  }
  if (r.shuffle) {
    nlohmann::ordered_json s;
    s["trials"] = r.shuffle->trials;
    s["mean"] = r.shuffle->mean;
    s["std_error"] = r.shuffle->std_error;
    j["shuffle_baseline"] = std::move(s);
  }
  return j;
}

}  // namespace elan::eval
