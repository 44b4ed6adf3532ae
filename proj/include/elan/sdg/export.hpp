#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "elan/sdg/sdg.hpp"

namespace elan::sdg {

inline nlohmann::ordered_json flags_json(const VertexFlags& f) {
  nlohmann::ordered_json j;
  j["is_loop_exit_guard"] = f.is_loop_exit_guard;
  j["loop_exit_on_true"] = f.loop_exit_on_true;
  j["guards_return_on_true"] = f.guards_return_on_true;
  j["guards_return_on_false"] = f.guards_return_on_false;
  j["compares_pointer"] = f.compares_pointer;
  j["compares_int_nonpositive"] = f.compares_int_nonpositive;
  j["comparison_canonical"] = f.comparison_canonical;
  j["negated"] = f.negated;
  return j;
}

inline nlohmann::ordered_json to_json(const Sdg& g) {
  nlohmann::ordered_json out;
  auto& vs = out["vertices"] = nlohmann::ordered_json::array();
  for (const auto& v : g.vertices) {
    nlohmann::ordered_json j;
    j["id"] = v.id;
    j["kind"] = to_string(v.kind);
    if (v.is_control()) j["control"] = to_string(v.control);
    j["function"] = v.function;
    j["file"] = v.span.file;
    j["line_start"] = v.span.line_start;
    j["col_start"] = v.span.col_start;
    j["line_end"] = v.span.line_end;
    j["col_end"] = v.span.col_end;
    j["text"] = v.text;
    if (v.kind == VertexKind::CallSite) j["callee"] = v.callee;
    if (v.control == ControlKind::SwitchHead) j["arity"] = v.arity;
    j["flags"] = flags_json(v.flags);
    vs.push_back(std::move(j));
  }
  auto& cds = out["cd_edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.cd_edges) {
    cds.push_back({{"from", e.from}, {"to", e.to}, {"label", to_string(e.label)}});
  }
  auto& calls = out["call_edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.call_edges) calls.push_back({{"from", e.from}, {"to", e.to}});
  out["entry"] = g.entry ? nlohmann::ordered_json(*g.entry) : nlohmann::ordered_json(nullptr);
  return out;
}

namespace detail {
inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}
}  // namespace detail

inline void write_dot(std::ostream& os, const Sdg& g) {
  os << "digraph sdg {\n  node [fontname=\"monospace\"];\n";
  std::string current;
  bool open = false;
  for (const auto& v : g.vertices) {
    if (v.function != current) {
      if (open) os << "  }\n";
      current = v.function;
      os << "  subgraph \"cluster_" << detail::dot_escape(current) << "\" {\n    label=\""
         << detail::dot_escape(current) << "\";\n";
      open = true;
    }
    const char* shape = v.kind == VertexKind::Entry         ? "doubleoctagon"
                        : v.kind == VertexKind::ControlPoint ? "diamond"
                        : v.kind == VertexKind::CallSite     ? "box"
                                                             : "ellipse";
    os << "    v" << v.id << " [shape=" << shape << ", label=\"" << v.id << ": "
       << detail::dot_escape(v.text) << "\\nline " << v.span.line_start << "\"];\n";
  }
  if (open) os << "  }\n";
  for (const auto& e : g.cd_edges) {
    os << "  v" << e.from << " -> v" << e.to;
    if (e.label.kind != EdgeLabel::Kind::Always) os << " [label=\"" << to_string(e.label) << "\"]";
    os << ";\n";
  }
  for (const auto& e : g.call_edges) {
    os << "  v" << e.from << " -> v" << e.to << " [style=dashed];\n";
  }
  os << "}\n";
}

}  // namespace elan::sdg
