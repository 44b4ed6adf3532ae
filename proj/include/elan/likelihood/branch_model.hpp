#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "elan/error.hpp"
#include "elan/sdg/sdg.hpp"

namespace elan::likelihood {

enum class ModelKind { Simple, Heuristic };

inline const char* to_string(ModelKind m) noexcept {
  return m == ModelKind::Simple ? "simple" : "heuristic";
}

inline ModelKind parse_model(const std::string& name) {
  if (name == "simple") return ModelKind::Simple;
  if (name == "heuristic") return ModelKind::Heuristic;
  throw std::invalid_argument("unknown model '" + name + "' (expected simple or heuristic)");
}

// Probability that a condition matching the heuristic evaluates to true.
struct HeuristicTable {
  double loop_branch = 0.88;
  double pointer = 0.40;
  double value_check = 0.16;
  double loop_exit = 0.20;
  double return_branch = 0.28;

  auto operator<=>(const HeuristicTable&) const = default;
};

struct BranchModel {
  ModelKind kind = ModelKind::Simple;
  HeuristicTable table;

  static BranchModel simple() { return {ModelKind::Simple, {}}; }
  static BranchModel heuristic() { return {ModelKind::Heuristic, {}}; }
  static BranchModel of(ModelKind k) { return {k, {}}; }

  auto operator<=>(const BranchModel&) const = default;
};

/// Dempster-Shafer rule on the binary frame {taken, not taken} with no mass
/// on ignorance: two independent estimates p and q of the same event become
/// pq / (pq + (1-p)(1-q)).
inline double dempster_shafer_combine(double p, double q) {
  const double agree = p * q;
  const double norm = agree + (1.0 - p) * (1.0 - q);
  if (norm == 0.0) throw std::domain_error("total conflict");
  return agree / norm;
}

enum class Heuristic { LoopBranch, Pointer, ValueCheck, LoopExit, Return };

inline const char* to_string(Heuristic h) noexcept {
  switch (h) {
    case Heuristic::LoopBranch: return "loop_branch";
    case Heuristic::Pointer: return "pointer";
    case Heuristic::ValueCheck: return "value_check";
    case Heuristic::LoopExit: return "loop_exit";
    case Heuristic::Return: return "return";
  }
  return "?";
}

struct HeuristicVote {
  Heuristic heuristic;
  double p_true;  // probability that the leaf's True edge is taken
};

/// Heuristics that apply to an if-leaf, each oriented to the leaf's True
/// edge. Comparison-based votes are flipped for complemented comparisons and
/// for negated leaves; LoopExit and Return already follow the CFG edges.
inline std::vector<HeuristicVote> applicable_heuristics(const sdg::Vertex& w,
                                                        const HeuristicTable& t) {
  std::vector<HeuristicVote> votes;
  if (w.control != sdg::ControlKind::IfLeaf) return votes;
  const auto& f = w.flags;
  auto orient = [&](double p) {
    if (!f.comparison_canonical) p = 1.0 - p;
    if (f.negated) p = 1.0 - p;
    return p;
  };
  if (f.compares_pointer) votes.push_back({Heuristic::Pointer, orient(t.pointer)});
  if (f.compares_int_nonpositive) votes.push_back({Heuristic::ValueCheck, orient(t.value_check)});
  if (f.is_loop_exit_guard) {
    votes.push_back(
        {Heuristic::LoopExit, f.loop_exit_on_true ? t.loop_exit : 1.0 - t.loop_exit});
  }
  if (f.guards_return_on_true != f.guards_return_on_false) {
    votes.push_back({Heuristic::Return,
                     f.guards_return_on_true ? t.return_branch : 1.0 - t.return_branch});
  }
  return votes;
}

/// Weight of one outgoing edge label of a control point.
///  - if-leaf: probability of that outcome (0.5 each without heuristics);
///  - switch: 1/arity per case arm;
///  - loop condition: multiplier on the body (True) group, 1 on the exit group.
inline double branch_probability(const sdg::Vertex& w, const sdg::EdgeLabel& label,
                                 const BranchModel& model) {
  using sdg::ControlKind;
  using sdg::EdgeLabel;
  if (!w.is_control()) {
    throw AnalysisError("branch_probability: vertex " + std::to_string(w.id) +
                        " is not a control point");
  }
  switch (w.control) {
    case ControlKind::SwitchHead:
      if (label.kind != EdgeLabel::Kind::Case) break;
      return 1.0 / static_cast<double>(label.arity);
    case ControlKind::LoopCond:
      if (label.kind == EdgeLabel::Kind::True) {
        return model.kind == ModelKind::Heuristic ? model.table.loop_branch : 1.0;
      }
      if (label.kind == EdgeLabel::Kind::False) return 1.0;
      break;
    case ControlKind::IfLeaf: {
      if (label.kind != EdgeLabel::Kind::True && label.kind != EdgeLabel::Kind::False) break;
      double p_true = 0.5;
      if (model.kind == ModelKind::Heuristic) {
        const auto votes = applicable_heuristics(w, model.table);
        if (!votes.empty()) {
          p_true = votes.front().p_true;
          for (std::size_t i = 1; i < votes.size(); ++i) {
            p_true = dempster_shafer_combine(p_true, votes[i].p_true);
          }
        }
      }
      return label.kind == EdgeLabel::Kind::True ? p_true : 1.0 - p_true;
    }
    case ControlKind::None:
      break;
  }
  throw AnalysisError("branch_probability: label '" + sdg::to_string(label) +
                      "' does not belong to vertex " + std::to_string(w.id));
}

}  // namespace elan::likelihood
