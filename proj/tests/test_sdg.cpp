#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include "elan/microc/conditions.hpp"
#include "elan/sdg/builder.hpp"
#include "elan/sdg/export.hpp"
#include "elan/sdg/slicing.hpp"
#include "support/corpus.hpp"
#include "support/graph.hpp"
#include "support/program_gen.hpp"

using namespace elan;
using namespace elan::sdg;
using support::deps;
using support::vid;

namespace {

using Deps = std::set<std::pair<VertexId, EdgeLabel>>;

const EdgeLabel kAlways = EdgeLabel::always();
const EdgeLabel kTrue = EdgeLabel::on(true);
const EdgeLabel kFalse = EdgeLabel::on(false);

std::vector<support::Loaded> sample_programs() {
  std::vector<support::Loaded> out;
  for (const auto& name : support::corpus_names()) out.push_back(support::load_corpus(name));
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    support::GenOptions opt;
    opt.seed = seed;
    opt.functions = 3;
    opt.statements = 6;
    out.push_back(support::from_source(support::generate_program(opt), "gen.mc"));
  }
  return out;
}

std::vector<VertexId> members(const Membership& m) {
  std::vector<VertexId> out;
  for (VertexId v = 0; v < m.size(); ++v) {
    if (m[v]) out.push_back(v);
  }
  return out;
}

}  // namespace

TEST(Build, IfElseDependences) {
  const auto l = support::from_source("int main(){ if (c > 0) { s1 = 1; } else { s2 = 2; } s3 = 3; }");
  const auto& g = l.graph;
  const VertexId entry = vid(g, "entry main");
  const VertexId c = vid(g, "c > 0");
  EXPECT_EQ(deps(g, vid(g, "s1 = 1")), (Deps{{c, kTrue}}));
  EXPECT_EQ(deps(g, vid(g, "s2 = 2")), (Deps{{c, kFalse}}));
  EXPECT_EQ(deps(g, vid(g, "s3 = 3")), (Deps{{entry, kAlways}}));
  EXPECT_EQ(deps(g, c), (Deps{{entry, kAlways}}));
  EXPECT_EQ(g.entry, entry);
}

TEST(Build, StraightLineCode) {
  const auto l = support::from_source("int main(){ s1 = 1; }");
  const auto& g = l.graph;
  EXPECT_EQ(deps(g, vid(g, "s1 = 1")), (Deps{{vid(g, "entry main"), kAlways}}));
  EXPECT_TRUE(g.control_points().empty());
}

TEST(Build, ShortCircuitOr) {
  const auto l = support::from_source("int main(){ if (a > 0 || b > 0) { t = 1; } else { e = 2; } }");
  const auto& g = l.graph;
  const VertexId a = vid(g, "a > 0");
  const VertexId b = vid(g, "b > 0");
  EXPECT_EQ(deps(g, b), (Deps{{a, kFalse}}));
  EXPECT_EQ(deps(g, vid(g, "t = 1")), (Deps{{a, kTrue}, {b, kTrue}}));
  EXPECT_EQ(deps(g, vid(g, "e = 2")), (Deps{{b, kFalse}}));
}

TEST(Build, NegatedLeafLabelsFollowEffectiveValue) {
  // !(a > 0) is true when a > 0 evaluates false, so `t` hangs off the leaf's
  // True edge and the leaf is flagged negated.
  const auto l = support::from_source("int main(){ if (!(a > 0)) { t = 1; } }");
  const auto& g = l.graph;
  const VertexId a = vid(g, "!(a > 0)");
  EXPECT_TRUE(g.vertex(a).flags.negated);
  EXPECT_EQ(deps(g, vid(g, "t = 1")), (Deps{{a, kTrue}}));
}

TEST(Build, LoopBodyAndBreak) {
  const auto l = support::from_source(
      "int main(){ i = 0; while (i < 3) { if (i == 1) { break; } i = i + 1; } done = 1; }");
  const auto& g = l.graph;
  const VertexId loop = vid(g, "i < 3");
  const VertexId guard = vid(g, "i == 1");
  EXPECT_EQ(g.vertex(loop).control, ControlKind::LoopCond);
  EXPECT_EQ(g.vertex(guard).control, ControlKind::IfLeaf);
  EXPECT_EQ(deps(g, guard), (Deps{{loop, kTrue}}));
  EXPECT_EQ(deps(g, vid(g, "break")), (Deps{{guard, kTrue}}));
  EXPECT_EQ(deps(g, vid(g, "i = i + 1")), (Deps{{guard, kFalse}}));
  // The loop condition is re-evaluated only after a non-breaking iteration.
  EXPECT_EQ(deps(g, loop), (Deps{{vid(g, "entry main"), kAlways}, {guard, kFalse}}));
  EXPECT_EQ(deps(g, vid(g, "done = 1")), (Deps{{vid(g, "entry main"), kAlways}}));
  EXPECT_TRUE(g.vertex(guard).flags.is_loop_exit_guard);
  EXPECT_TRUE(g.vertex(guard).flags.loop_exit_on_true);
}

TEST(Build, ForLoopSelfDependence) {
  const auto l = support::from_source("int main(){ for (int i = 0; i < 3; i = i + 1) { x = i; } }");
  const auto& g = l.graph;
  const VertexId loop = vid(g, "i < 3");
  EXPECT_EQ(deps(g, loop), (Deps{{vid(g, "entry main"), kAlways}, {loop, kTrue}}));
  EXPECT_EQ(deps(g, vid(g, "x = i")), (Deps{{loop, kTrue}}));
  EXPECT_EQ(deps(g, vid(g, "i = i + 1")), (Deps{{loop, kTrue}}));
  EXPECT_EQ(deps(g, vid(g, "i = 0")), (Deps{{vid(g, "entry main"), kAlways}}));
}

TEST(Build, SwitchArmsIncludeImplicitDefault) {
  const auto l = support::from_source(
      "int main(){ switch (x) { case 1: a = 1; break; case 2: b = 2; case 3: c = 3; } d = 4; }");
  const auto& g = l.graph;
  const VertexId head = vid(g, "switch (x)");
  EXPECT_EQ(g.vertex(head).control, ControlKind::SwitchHead);
  EXPECT_EQ(g.vertex(head).arity, 4u);
  EXPECT_EQ(deps(g, vid(g, "a = 1")), (Deps{{head, EdgeLabel::case_arm(0, 4)}}));
  EXPECT_EQ(deps(g, vid(g, "b = 2")), (Deps{{head, EdgeLabel::case_arm(1, 4)}}));
  EXPECT_EQ(deps(g, vid(g, "c = 3")), (Deps{{head, EdgeLabel::case_arm(2, 4)}}));
  EXPECT_EQ(deps(g, vid(g, "d = 4")), (Deps{{vid(g, "entry main"), kAlways}}));
}

TEST(Build, CallsBecomeCallSitesWithEdges) {
  const auto l = support::from_source(
      "int f(int a){ return a; }\nint main(){ if (c > 0) { x = f(g(1)); } f(2); }");
  const auto& g = l.graph;
  std::vector<VertexId> sites;
  for (const auto& v : g.vertices) {
    if (v.kind == VertexKind::CallSite) sites.push_back(v.id);
  }
  ASSERT_EQ(sites.size(), 3u);  // g(1), f(g(1)), f(2)
  EXPECT_EQ(g.call_edges.size(), 2u);
  for (const auto& e : g.call_edges) EXPECT_EQ(e.to, vid(g, "entry f"));
  ASSERT_EQ(g.diagnostics.size(), 1u);
  EXPECT_NE(g.diagnostics[0].find("call to undefined function 'g'"), std::string::npos);
  // Arguments are evaluated before the call, and the assignment follows it.
  const VertexId inner = vid(g, "g(1)");
  const VertexId outer = vid(g, "f(g(1))");
  EXPECT_LT(inner, outer);
  EXPECT_LT(outer, vid(g, "x = f(g(1))"));
  EXPECT_EQ(deps(g, inner), (Deps{{vid(g, "c > 0"), kTrue}}));
}

TEST(Build, DeadCodeHasNoDependences) {
  const auto l = support::from_source("int main(){ return 0; x = 1; }");
  const auto& g = l.graph;
  EXPECT_TRUE(deps(g, vid(g, "x = 1")).empty());
}

TEST(Build, HeuristicFlags) {
  const auto l = support::from_source(
      "int f(int* p, int* r, int n){\n"
      "  if (p == NULL) { return 0; }\n"
      "  if (n <= 0) { n = 1; }\n"
      "  if (n > 0) { n = 2; }\n"
      "  if (p != r) { n = 3; }\n"
      "  if (p != q) { n = 5; }\n"
      "  if (n == 0) { n = 4; }\n"
      "  return n;\n}\n");
  const auto& g = l.graph;
  const auto& ptr = g.vertex(vid(g, "p == NULL")).flags;
  EXPECT_TRUE(ptr.compares_pointer);
  EXPECT_TRUE(ptr.comparison_canonical);
  EXPECT_TRUE(ptr.guards_return_on_true);
  EXPECT_FALSE(ptr.guards_return_on_false);
  const auto& le = g.vertex(vid(g, "n <= 0")).flags;
  EXPECT_TRUE(le.compares_int_nonpositive);
  EXPECT_TRUE(le.comparison_canonical);
  EXPECT_FALSE(le.compares_pointer);
  const auto& gt = g.vertex(vid(g, "n > 0")).flags;
  EXPECT_TRUE(gt.compares_int_nonpositive);
  EXPECT_FALSE(gt.comparison_canonical);
  EXPECT_TRUE(g.vertex(vid(g, "p != r")).flags.compares_pointer);
  EXPECT_FALSE(g.vertex(vid(g, "p != r")).flags.comparison_canonical);
  // q is undeclared and therefore an integer.
  EXPECT_FALSE(g.vertex(vid(g, "p != q")).flags.compares_pointer);
  const auto& eq = g.vertex(vid(g, "n == 0")).flags;
  EXPECT_FALSE(eq.compares_int_nonpositive);
  EXPECT_FALSE(eq.compares_pointer);
}

TEST(Build, IsDeterministic) {
  const std::string src = support::read_text(support::corpus_path("ledger"));
  const auto a = support::from_source(src, "ledger.mc");
  const auto b = support::from_source(src, "ledger.mc");
  EXPECT_EQ(to_json(a.graph).dump(), to_json(b.graph).dump());
}

TEST(Invariants, EdgesStayInsideFunctions) {
  for (const auto& l : sample_programs()) {
    const auto& g = l.graph;
    for (const auto& e : g.cd_edges) EXPECT_EQ(g.vertex(e.from).function, g.vertex(e.to).function);
    std::map<std::string, int> entries;
    for (const auto& v : g.vertices) entries[v.function] += v.kind == VertexKind::Entry;
    for (const auto& [fn, n] : entries) EXPECT_EQ(n, 1) << fn;
  }
}

TEST(Invariants, EveryLiveVertexHasADependence) {
  for (const auto& l : sample_programs()) {
    const auto& g = l.graph;
    for (const auto& v : g.vertices) {
      if (v.kind == VertexKind::Entry) {
        for (const auto& e : g.cd_edges) EXPECT_NE(e.to, v.id);
        continue;
      }
      bool has_in = false;
      for (const auto& e : g.cd_edges) has_in = has_in || e.to == v.id;
      if (has_in) continue;
      // Only dead code lacks a dependence; it is isolated and unreachable.
      EXPECT_TRUE(g.successors(v.id).empty()) << v.text;
      EXPECT_TRUE(g.predecessors(v.id).empty()) << v.text;
      EXPECT_FALSE(forward_reach(g, *g.entry)[v.id]) << v.text;
    }
  }
}

TEST(Invariants, CyclesPassThroughLoopConditions) {
  for (const auto& l : sample_programs()) {
    const auto& g = l.graph;
    // Drop loop conditions; what remains of each function must be acyclic.
    std::vector<int> state(g.size(), 0);
    std::function<bool(VertexId)> acyclic = [&](VertexId u) {
      state[u] = 1;
      for (const auto& adj : g.successors(u)) {
        if (adj.via_call || g.vertex(adj.vertex).control == ControlKind::LoopCond) continue;
        if (state[adj.vertex] == 1) return false;
        if (state[adj.vertex] == 0 && !acyclic(adj.vertex)) return false;
      }
      state[u] = 2;
      return true;
    };
    for (const auto& v : g.vertices) {
      if (v.control == ControlKind::LoopCond) continue;
      if (state[v.id] == 0) EXPECT_TRUE(acyclic(v.id));
    }
  }
}

TEST(Invariants, LeavesAndControlPointsCorrespond) {
  for (const auto& l : sample_programs()) {
    const auto& g = l.graph;
    std::set<VertexId> from_leaves;
    std::size_t leaves = 0;
    std::size_t switches = 0;
    std::function<void(const microc::Block&)> walk = [&](const microc::Block& b) {
      for (const auto& s : b) {
        if (s.kind == microc::Stmt::Kind::If || s.kind == microc::Stmt::Kind::While ||
            s.kind == microc::Stmt::Kind::For) {
          const auto want = s.kind == microc::Stmt::Kind::If ? ControlKind::IfLeaf : ControlKind::LoopCond;
          for (const auto& leaf : microc::decompose_condition(s.cond)) {
            ++leaves;
            const auto v = g.vertex_for_node(leaf.node->id);
            ASSERT_TRUE(v.has_value());
            EXPECT_EQ(g.vertex(*v).control, want);
            EXPECT_EQ(g.vertex(*v).flags.negated, leaf.negated);
            from_leaves.insert(*v);
          }
        }
        if (s.kind == microc::Stmt::Kind::Switch) ++switches;
        walk(s.init);
        walk(s.body);
        walk(s.step);
        walk(s.else_body);
        for (const auto& c : s.cases) walk(c.body);
        walk(s.default_body);
      }
    };
    for (const auto& fn : l.program.functions) walk(fn.body);
    std::size_t leaf_vertices = 0;
    for (const auto& v : g.vertices) {
      if (v.control == ControlKind::IfLeaf || v.control == ControlKind::LoopCond) ++leaf_vertices;
    }
    EXPECT_EQ(from_leaves.size(), leaves);
    EXPECT_EQ(leaf_vertices, leaves);
    EXPECT_EQ(g.control_points().size(), leaves + switches);
  }
}

TEST(Invariants, OneCallEdgePerResolvedCallSite) {
  for (const auto& l : sample_programs()) {
    const auto& g = l.graph;
    for (const auto& v : g.vertices) {
      if (v.kind != VertexKind::CallSite) continue;
      std::size_t n = 0;
      for (const auto& e : g.call_edges) n += e.from == v.id;
      EXPECT_EQ(n, g.function_entry(v.callee) ? 1u : 0u);
    }
  }
}

TEST(Slicing, Examples) {
  const auto l = support::from_source(
      "int f(){ y = 1; }\nint main(){ if (c > 0) { s1 = 1; f(); } else { s2 = 2; } s3 = 3; }");
  const auto& g = l.graph;
  const VertexId entry = vid(g, "entry main");
  EXPECT_EQ(control_slice(g, entry).members, (std::vector<VertexId>{entry}));
  const VertexId s1 = vid(g, "s1 = 1");
  const VertexId c = vid(g, "c > 0");
  auto expect = std::vector<VertexId>{s1, c, entry};
  std::sort(expect.begin(), expect.end());
  EXPECT_EQ(control_slice(g, s1).members, expect);
  const auto in_f = control_slice(g, vid(g, "y = 1"));
  for (VertexId v : {vid(g, "f()"), c, entry, vid(g, "entry f")}) EXPECT_TRUE(in_f.contains(v));
  EXPECT_FALSE(in_f.contains(s1));
  EXPECT_EQ(in_f.call_edges.size(), 1u);
}

TEST(Slicing, ChopFromEntryIsTheLiveSlice) {
  for (const auto& l : sample_programs()) {
    const auto& g = l.graph;
    if (!g.entry) continue;
    const auto live = forward_reach(g, *g.entry);
    for (VertexId v = 0; v < g.size(); ++v) {
      const auto sl = control_slice(g, v);
      const auto ch = chop(g, *g.entry, v);
      // The chop is the part of the slice the entry can reach; callers
      // that are never called themselves drop out.
      std::vector<VertexId> expect;
      if (live[v]) {
        for (VertexId u : sl.members) {
          if (live[u]) expect.push_back(u);
        }
      }
      EXPECT_EQ(ch.members, expect);
    }
  }
}

TEST(Slicing, ChopEdgeCases) {
  const auto l = support::from_source("int f(){ a = 1; }\nint g(){ b = 2; }\nint main(){ f(); g(); }");
  const auto& g = l.graph;
  const VertexId a = vid(g, "a = 1");
  EXPECT_EQ(chop(g, a, a).members, (std::vector<VertexId>{a}));
  EXPECT_TRUE(chop(g, vid(g, "entry f"), vid(g, "b = 2")).empty());
  const auto c = chop(g, vid(g, "entry f"), a);
  EXPECT_EQ(c.members, (std::vector<VertexId>{vid(g, "entry f"), a}));
  EXPECT_THROW(chop(g, 0, 999), AnalysisError);
}

TEST(Slicing, MonotoneUnderBackwardClosure) {
  for (const auto& l : sample_programs()) {
    const auto& g = l.graph;
    for (VertexId v = 0; v < g.size(); ++v) {
      Membership united(g.size(), 0);
      united[v] = 1;
      for (const auto& adj : g.predecessors(v)) {
        for (VertexId w : control_slice(g, adj.vertex).members) united[w] = 1;
      }
      for (VertexId w : control_slice(g, v).members) EXPECT_TRUE(united[w]);
    }
  }
}

TEST(VertexAt, Lookup) {
  const auto l = support::from_source(
      "int main() {\n"
      "  s1 = 1;\n"
      "  if (a > 0 || b > 0) {\n"
      "    t = 1;\n"
      "  }\n"
      "}\n",
      "dir/prog.mc");
  const auto& g = l.graph;
  EXPECT_EQ(vertex_at(g, "dir/prog.mc", 2), vid(g, "s1 = 1"));
  EXPECT_EQ(vertex_at(g, "dir/prog.mc", 3), vid(g, "a > 0"));
  EXPECT_EQ(vertex_at(g, "prog.mc", 4), vid(g, "t = 1"));
  EXPECT_EQ(vertex_at(g, "./dir/prog.mc", 4), vid(g, "t = 1"));
  // Line 1 is covered only by the function itself.
  EXPECT_EQ(vertex_at(g, "dir/prog.mc", 1), vid(g, "entry main"));
  try {
    vertex_at(g, "dir/prog.mc", 9999);
    FAIL();
  } catch (const NotFound& e) {
    EXPECT_NE(std::string(e.what()).find("dir/prog.mc:9999"), std::string::npos);
  }
  EXPECT_THROW(vertex_at(g, "other.mc", 2), NotFound);
}

TEST(Export, JsonAndDot) {
  const auto l = support::from_source("int main(){ if (p == NULL) { x = f(1); } }");
  const auto j = to_json(l.graph);
  ASSERT_TRUE(j.contains("vertices"));
  ASSERT_TRUE(j.contains("cd_edges"));
  ASSERT_TRUE(j.contains("call_edges"));
  const auto& v0 = j["vertices"][0];
  for (const char* key : {"id", "kind", "function", "file", "line_start", "col_start", "line_end", "col_end", "flags"}) {
    EXPECT_TRUE(v0.contains(key)) << key;
  }
  EXPECT_EQ(j["entry"], 0);
  std::ostringstream dot;
  write_dot(dot, l.graph);
  EXPECT_EQ(dot.str().rfind("digraph sdg {", 0), 0u);
  EXPECT_NE(dot.str().find("label=\"true\""), std::string::npos);
}
