#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "elan/microc/ast.hpp"

namespace elan::sdg {

using microc::SourceSpan;
using VertexId = std::uint32_t;

enum class VertexKind { Entry, ControlPoint, Statement, CallSite };
enum class ControlKind { None, IfLeaf, LoopCond, SwitchHead };

inline const char* to_string(VertexKind k) noexcept {
  switch (k) {
    case VertexKind::Entry: return "entry";
    case VertexKind::ControlPoint: return "control";
    case VertexKind::Statement: return "statement";
    case VertexKind::CallSite: return "call";
  }
  return "?";
}

inline const char* to_string(ControlKind k) noexcept {
  switch (k) {
    case ControlKind::None: return "none";
    case ControlKind::IfLeaf: return "if_leaf";
    case ControlKind::LoopCond: return "loop_cond";
    case ControlKind::SwitchHead: return "switch_head";
  }
  return "?";
}

// Applicability conditions for the static branch heuristics. All of them are
// recomputed from the AST and CFG by the builder.
struct VertexFlags {
  bool is_loop_exit_guard = false;  // exactly one branch goes straight to a loop-exiting break
  bool loop_exit_on_true = false;   // which branch, when is_loop_exit_guard
  bool guards_return_on_true = false;
  bool guards_return_on_false = false;
  bool compares_pointer = false;          // ==/!= against NULL or between pointers
  bool compares_int_nonpositive = false;  // <, <=, >, >= of an integer against 0

  // The comparison reads the way the heuristic table is phrased (`p == NULL`,
  // `n < 0`, `n <= 0`); otherwise it is the complement (`p != NULL`, `n > 0`).
  bool comparison_canonical = true;
  bool negated = false;  // leaf sits under an odd number of `!`

  bool operator==(const VertexFlags&) const = default;
};

struct Vertex {
  VertexId id = 0;
  VertexKind kind = VertexKind::Statement;
  ControlKind control = ControlKind::None;
  std::string function;
  std::string callee;  // CallSite only
  std::string text;    // short source rendering for dumps
  SourceSpan span;
  VertexFlags flags;
  microc::NodeId ast_node = 0;
  std::uint32_t arity = 0;  // SwitchHead: number of case arms including default

  bool is_control() const noexcept { return kind == VertexKind::ControlPoint; }
};

struct EdgeLabel {
  enum class Kind { Always, True, False, Case };

  Kind kind = Kind::Always;
  std::uint32_t index = 0;  // Case only
  std::uint32_t arity = 0;  // Case only

  static EdgeLabel always() { return {}; }
  static EdgeLabel on(bool outcome) { return {outcome ? Kind::True : Kind::False, 0, 0}; }
  static EdgeLabel case_arm(std::uint32_t index, std::uint32_t arity) {
    return {Kind::Case, index, arity};
  }

  auto operator<=>(const EdgeLabel&) const = default;
};

inline std::string to_string(const EdgeLabel& l) {
  switch (l.kind) {
    case EdgeLabel::Kind::Always: return "always";
    case EdgeLabel::Kind::True: return "true";
    case EdgeLabel::Kind::False: return "false";
    case EdgeLabel::Kind::Case:
      return "case " + std::to_string(l.index) + "/" + std::to_string(l.arity);
  }
  return "?";
}

struct CdEdge {
  VertexId from = 0;
  VertexId to = 0;
  EdgeLabel label;

  bool operator==(const CdEdge&) const = default;
};

struct CallEdge {
  VertexId from = 0;  // CallSite
  VertexId to = 0;    // callee Entry

  bool operator==(const CallEdge&) const = default;
};

// A labelled successor or predecessor reference. Call edges appear with the
// Always label.
struct Adjacent {
  VertexId vertex = 0;
  EdgeLabel label;
  bool via_call = false;
};

/// Control-only system dependence graph. Immutable once built.
class Sdg {
 public:
  std::vector<Vertex> vertices;
  std::vector<CdEdge> cd_edges;
  std::vector<CallEdge> call_edges;
  std::optional<VertexId> entry;  // program start, Entry of the entry function
  std::vector<std::string> files;
  std::vector<std::string> diagnostics;  // e.g. unresolved calls

  std::size_t size() const noexcept { return vertices.size(); }
  const Vertex& vertex(VertexId v) const { return vertices.at(v); }

  const std::vector<Adjacent>& successors(VertexId v) const { return succ_.at(v); }
  const std::vector<Adjacent>& predecessors(VertexId v) const { return pred_.at(v); }

  std::optional<VertexId> function_entry(std::string_view name) const {
    auto it = entries_.find(std::string(name));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  // Entry vertex of the function that contains v.
  VertexId entry_of(VertexId v) const { return entries_.at(vertices.at(v).function); }

  // Vertex created for an AST node (statement, condition leaf, call
  // expression, switch, or function definition).
  std::optional<VertexId> vertex_for_node(microc::NodeId node) const {
    auto it = by_node_.find(node);
    if (it == by_node_.end()) return std::nullopt;
    return it->second;
  }

  std::vector<VertexId> control_points() const {
    std::vector<VertexId> out;
    for (const auto& v : vertices) {
      if (v.is_control()) out.push_back(v.id);
    }
    return out;
  }

  // Rebuilds adjacency and lookup tables from the public lists.
  void index() {
    succ_.assign(vertices.size(), {});
    pred_.assign(vertices.size(), {});
    entries_.clear();
    by_node_.clear();
    for (const auto& v : vertices) {
      if (v.kind == VertexKind::Entry) entries_.emplace(v.function, v.id);
      by_node_.emplace(v.ast_node, v.id);
    }
    for (const auto& e : cd_edges) {
      succ_[e.from].push_back({e.to, e.label, false});
      pred_[e.to].push_back({e.from, e.label, false});
    }
    for (const auto& e : call_edges) {
      succ_[e.from].push_back({e.to, EdgeLabel::always(), true});
      pred_[e.to].push_back({e.from, EdgeLabel::always(), true});
    }
  }

 private:
  std::vector<std::vector<Adjacent>> succ_;
  std::vector<std::vector<Adjacent>> pred_;
  std::map<std::string, VertexId, std::less<>> entries_;
  std::unordered_map<microc::NodeId, VertexId> by_node_;
};

}  // namespace elan::sdg
