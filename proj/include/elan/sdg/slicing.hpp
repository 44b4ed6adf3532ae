#pragma once

#include <algorithm>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "elan/error.hpp"
#include "elan/sdg/sdg.hpp"

namespace elan::sdg {

/// Vertex set reached backwards from `root` (a slice) or between a source and
/// a target (a chop), with the edges that stay inside the set.
struct Slice {
  VertexId root = 0;
  std::vector<VertexId> members;  // ascending
  std::vector<CdEdge> cd_edges;
  std::vector<CallEdge> call_edges;

  bool empty() const noexcept { return members.empty(); }
  bool contains(VertexId v) const {
    return std::binary_search(members.begin(), members.end(), v);
  }
};

using Membership = std::vector<char>;

/// Vertices reachable from `from` over cd and call edges. When `within` is
/// given, the walk never leaves it.
inline Membership forward_reach(const Sdg& g, VertexId from, const Membership* within = nullptr) {
  Membership seen(g.size(), 0);
  if (within && !(*within)[from]) return seen;
  std::vector<VertexId> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    for (const auto& adj : g.successors(u)) {
      if (seen[adj.vertex] || (within && !(*within)[adj.vertex])) continue;
      seen[adj.vertex] = 1;
      stack.push_back(adj.vertex);
    }
  }
  return seen;
}

/// Vertices from which `to` is reachable; see forward_reach for `within`.
inline Membership backward_reach(const Sdg& g, VertexId to, const Membership* within = nullptr) {
  Membership seen(g.size(), 0);
  if (within && !(*within)[to]) return seen;
  std::vector<VertexId> stack{to};
  seen[to] = 1;
  while (!stack.empty()) {
    const VertexId u = stack.back();
    stack.pop_back();
    for (const auto& adj : g.predecessors(u)) {
      if (seen[adj.vertex] || (within && !(*within)[adj.vertex])) continue;
      seen[adj.vertex] = 1;
      stack.push_back(adj.vertex);
    }
  }
  return seen;
}

inline Slice make_slice(const Sdg& g, VertexId root, const Membership& in) {
  Slice s;
  s.root = root;
  for (VertexId v = 0; v < in.size(); ++v) {
    if (in[v]) s.members.push_back(v);
  }
  for (const auto& e : g.cd_edges) {
    if (in[e.from] && in[e.to]) s.cd_edges.push_back(e);
  }
  for (const auto& e : g.call_edges) {
    if (in[e.from] && in[e.to]) s.call_edges.push_back(e);
  }
  return s;
}

inline void check_vertex(const Sdg& g, VertexId v) {
  if (v >= g.size()) throw AnalysisError("vertex " + std::to_string(v) + " is not in the graph");
}

/// Everything that decides whether execution reaches `v`.
inline Slice control_slice(const Sdg& g, VertexId v) {
  check_vertex(g, v);
  return make_slice(g, v, backward_reach(g, v));
}

/// Vertices on some path from `source` to `target`. Empty when `target` is
/// not reachable from `source`.
inline Membership chop_membership(const Sdg& g, VertexId source, VertexId target) {
  const Membership fwd = forward_reach(g, source);
  return backward_reach(g, target, &fwd);
}

inline Slice chop(const Sdg& g, VertexId source, VertexId target) {
  check_vertex(g, source);
  check_vertex(g, target);
  return make_slice(g, target, chop_membership(g, source, target));
}

namespace detail {

inline bool same_file(const std::string& known, const std::string& asked) {
  if (known == asked) return true;
  const std::filesystem::path a(known);
  const std::filesystem::path b(asked);
  if (a.lexically_normal() == b.lexically_normal()) return true;
  // Accept a relative path that names a suffix of the known one, and vice versa.
  auto suffix = [](const std::filesystem::path& longer, const std::filesystem::path& shorter) {
    auto l = std::vector<std::filesystem::path>(longer.begin(), longer.end());
    auto s = std::vector<std::filesystem::path>(shorter.begin(), shorter.end());
    if (s.empty() || s.size() > l.size()) return false;
    return std::equal(s.rbegin(), s.rend(), l.rbegin());
  };
  const auto an = a.lexically_normal();
  const auto bn = b.lexically_normal();
  return suffix(an, bn) || suffix(bn, an);
}

}  // namespace detail

inline bool knows_file(const Sdg& g, const std::string& file) {
  return std::any_of(g.files.begin(), g.files.end(),
                     [&](const std::string& f) { return detail::same_file(f, file); });
}

/// Vertex for a reported source line: the smallest covering span wins, then
/// the lowest vertex id.
inline VertexId vertex_at(const Sdg& g, const std::string& file, int line) {
  const auto where = file + ":" + std::to_string(line);
  if (!knows_file(g, file)) throw NotFound("no vertex covers " + where + " (unknown file)");
  std::optional<VertexId> best;
  auto extent = [](const SourceSpan& s) {
    return std::pair{s.line_end - s.line_start, s.col_end - s.col_start};
  };
  for (const auto& v : g.vertices) {
    if (!v.span.covers_line(line) || !detail::same_file(v.span.file, file)) continue;
    if (!best || extent(v.span) < extent(g.vertices[*best].span)) best = v.id;
  }
  if (!best) throw NotFound("no vertex covers " + where);
  return *best;
}

}  // namespace elan::sdg
