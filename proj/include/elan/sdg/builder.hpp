#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "elan/microc/ast.hpp"
#include "elan/microc/conditions.hpp"
#include "elan/microc/printer.hpp"
#include "elan/sdg/sdg.hpp"

namespace elan::sdg {

namespace detail {

using microc::CondExpr;
using microc::Expr;
using microc::FunctionDef;
using microc::Stmt;

// Per-function CFG. Node 0 is the function start (its Entry vertex), node 1
// the virtual exit. Every other node owns exactly one SDG vertex.
class CfgBuilder {
 public:
  static constexpr int kStart = 0;
  static constexpr int kExit = 1;

  CfgBuilder(Sdg& g, const FunctionDef& fn) : g_(g), fn_(fn) {
    for (const auto& p : fn.params) types_[p.name] = p.type;
    collect_decls(fn.body);
  }

  void build() {
    nodes_.push_back(Node{});  // start
    nodes_.push_back(Node{});  // exit
    nodes_[kStart].vertex = add_vertex(VertexKind::Entry, ControlKind::None, fn_.id, fn_.span,
                                       "entry " + fn_.name);
    Frontier exits = build_block(fn_.body, {{kStart, EdgeLabel::always()}});
    connect(exits, kExit);
    compute_flags();
    compute_control_dependence();
  }

 private:
  struct Dangling {
    int from;
    EdgeLabel label;
  };
  using Frontier = std::vector<Dangling>;

  struct Node {
    VertexId vertex = 0;
    Stmt::Kind owner = Stmt::Kind::ExprStmt;
    bool leaf = false;
    bool break_exits_loop = false;
    const CondExpr* cond_leaf = nullptr;
    std::vector<std::pair<int, EdgeLabel>> succ;
  };

  struct Breakable {
    bool is_loop;
    Frontier breaks;
  };

  // ---- construction -----------------------------------------------------

  void collect_decls(const microc::Block& b) {
    for (const auto& s : b) {
      if (s.kind == Stmt::Kind::Assign && s.decl) types_[s.target] = *s.decl;
      collect_decls(s.init);
      collect_decls(s.body);
      collect_decls(s.else_body);
      collect_decls(s.default_body);
      for (const auto& c : s.cases) collect_decls(c.body);
    }
  }

  VertexId add_vertex(VertexKind kind, ControlKind control, microc::NodeId node,
                      const SourceSpan& span, std::string text) {
    Vertex v;
    v.id = static_cast<VertexId>(g_.vertices.size());
    v.kind = kind;
    v.control = control;
    v.function = fn_.name;
    v.ast_node = node;
    v.span = span;
    v.text = std::move(text);
    g_.vertices.push_back(std::move(v));
    return g_.vertices.back().id;
  }

  int add_node(VertexKind kind, ControlKind control, microc::NodeId ast, const SourceSpan& span,
               std::string text, Stmt::Kind owner, Frontier& in) {
    Node n;
    n.vertex = add_vertex(kind, control, ast, span, std::move(text));
    n.owner = owner;
    nodes_.push_back(std::move(n));
    const int idx = static_cast<int>(nodes_.size()) - 1;
    connect(in, idx);
    in = {{idx, EdgeLabel::always()}};
    return idx;
  }

  void connect(const Frontier& from, int to) {
    for (const auto& d : from) nodes_[d.from].succ.emplace_back(to, d.label);
  }

  void emit_calls(const Expr& e, Stmt::Kind owner, Frontier& in) {
    for (const auto& op : e.operands) emit_calls(op, owner, in);
    if (e.kind == Expr::Kind::Call) {
      const int idx = add_node(VertexKind::CallSite, ControlKind::None, e.id, e.span,
                               microc::to_source(e), owner, in);
      g_.vertices[nodes_[idx].vertex].callee = e.name;
    }
  }

  Frontier build_block(const microc::Block& b, Frontier in) {
    for (const auto& s : b) in = build_stmt(s, std::move(in));
    return in;
  }

  Frontier build_stmt(const Stmt& s, Frontier in) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
      case Stmt::Kind::ExprStmt: {
        emit_calls(s.expr, s.kind, in);
        add_node(VertexKind::Statement, ControlKind::None, s.id, s.span, statement_text(s), s.kind,
                 in);
        return in;
      }
      case Stmt::Kind::Call: {
        // The call itself is the statement's vertex.
        for (const auto& op : s.expr.operands) emit_calls(op, s.kind, in);
        const int idx = add_node(VertexKind::CallSite, ControlKind::None, s.expr.id, s.expr.span,
                                 microc::to_source(s.expr), s.kind, in);
        g_.vertices[nodes_[idx].vertex].callee = s.expr.name;
        return in;
      }
      case Stmt::Kind::Return: {
        if (s.has_value) emit_calls(s.expr, s.kind, in);
        add_node(VertexKind::Statement, ControlKind::None, s.id, s.span, statement_text(s), s.kind,
                 in);
        connect(in, kExit);
        return {};
      }
      case Stmt::Kind::Break: {
        const int idx = add_node(VertexKind::Statement, ControlKind::None, s.id, s.span, "break",
                                 s.kind, in);
        nodes_[idx].break_exits_loop = breakables_.back().is_loop;
        breakables_.back().breaks.insert(breakables_.back().breaks.end(), in.begin(), in.end());
        return {};
      }
      case Stmt::Kind::If: {
        const CondExpr nnf = microc::negation_normal_form(s.cond);
        auto [t, f] = build_cond(nnf, std::move(in), ControlKind::IfLeaf, s.kind);
        Frontier out = build_block(s.body, std::move(t));
        Frontier other = s.has_else ? build_block(s.else_body, std::move(f)) : std::move(f);
        out.insert(out.end(), other.begin(), other.end());
        return out;
      }
      case Stmt::Kind::While:
      case Stmt::Kind::For: {
        if (s.kind == Stmt::Kind::For) in = build_block(s.init, std::move(in));
        const int head = static_cast<int>(nodes_.size());
        const CondExpr nnf = microc::negation_normal_form(s.cond);
        auto [t, f] = build_cond(nnf, std::move(in), ControlKind::LoopCond, s.kind);
        breakables_.push_back({true, {}});
        Frontier body = build_block(s.body, std::move(t));
        if (s.kind == Stmt::Kind::For) body = build_block(s.step, std::move(body));
        connect(body, head);
        Frontier out = std::move(f);
        out.insert(out.end(), breakables_.back().breaks.begin(), breakables_.back().breaks.end());
        breakables_.pop_back();
        return out;
      }
      case Stmt::Kind::Switch: {
        emit_calls(s.expr, s.kind, in);
        const auto arity = static_cast<std::uint32_t>(s.cases.size() + 1);
        const int head = add_node(VertexKind::ControlPoint, ControlKind::SwitchHead, s.id,
                                  s.header_span, "switch (" + microc::to_source(s.expr) + ")",
                                  s.kind, in);
        g_.vertices[nodes_[head].vertex].arity = arity;
        breakables_.push_back({false, {}});
        Frontier out;
        for (std::uint32_t i = 0; i < arity; ++i) {
          Frontier arm{{head, EdgeLabel::case_arm(i, arity)}};
          if (i < s.cases.size()) {
            arm = build_block(s.cases[i].body, std::move(arm));
          } else if (s.has_default) {
            arm = build_block(s.default_body, std::move(arm));
          }
          out.insert(out.end(), arm.begin(), arm.end());
        }
        out.insert(out.end(), breakables_.back().breaks.begin(), breakables_.back().breaks.end());
        breakables_.pop_back();
        return out;
      }
    }
    return in;
  }

  static std::string statement_text(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Return:
        return s.has_value ? "return " + microc::to_source(s.expr) : "return";
      case Stmt::Kind::Assign:
        return s.target + " = " + microc::to_source(s.expr);
      default:
        return microc::to_source(s.expr);
    }
  }

  // Short-circuit decomposition: returns the (true, false) exits.
  std::pair<Frontier, Frontier> build_cond(const CondExpr& c, Frontier in, ControlKind kind,
                                           Stmt::Kind owner) {
    switch (c.kind) {
      case CondExpr::Kind::Leaf: {
        emit_calls(c.cmp.lhs, owner, in);
        emit_calls(c.cmp.rhs, owner, in);
        std::string text = microc::to_source(c);
        const int idx = add_node(VertexKind::ControlPoint, kind, c.id, c.span, std::move(text),
                                 owner, in);
        nodes_[idx].leaf = true;
        nodes_[idx].cond_leaf = &leaf_storage_.emplace_back(c);
        return {{{idx, EdgeLabel::on(true)}}, {{idx, EdgeLabel::on(false)}}};
      }
      case CondExpr::Kind::And: {
        auto [lt, lf] = build_cond(c.children[0], std::move(in), kind, owner);
        auto [rt, rf] = build_cond(c.children[1], std::move(lt), kind, owner);
        lf.insert(lf.end(), rf.begin(), rf.end());
        return {std::move(rt), std::move(lf)};
      }
      case CondExpr::Kind::Or: {
        auto [lt, lf] = build_cond(c.children[0], std::move(in), kind, owner);
        auto [rt, rf] = build_cond(c.children[1], std::move(lf), kind, owner);
        lt.insert(lt.end(), rt.begin(), rt.end());
        return {std::move(lt), std::move(rf)};
      }
      case CondExpr::Kind::Not:
        break;  // removed by negation_normal_form
    }
    return {};
  }

  // ---- heuristic applicability -----------------------------------------

  bool is_pointer(const Expr& e) const {
    if (e.kind == Expr::Kind::Null) return true;
    if (e.kind != Expr::Kind::Var) return false;
    auto it = types_.find(e.name);
    return it != types_.end() && it->second == microc::ScalarType::Pointer;
  }

  static bool is_zero(const Expr& e) { return e.kind == Expr::Kind::IntLit && e.value == 0; }

  void compute_flags() {
    for (const auto& n : nodes_) {
      if (!n.leaf) continue;
      Vertex& v = g_.vertices[n.vertex];
      const CondExpr& leaf = *n.cond_leaf;
      const auto& cmp = leaf.cmp;
      v.flags.negated = leaf.negated;

      const bool eq = cmp.op == microc::CmpOp::Eq || cmp.op == microc::CmpOp::Ne;
      const bool lp = is_pointer(cmp.lhs);
      const bool rp = is_pointer(cmp.rhs);
      if (eq && (lp || rp) && (lp || is_zero(cmp.lhs)) && (rp || is_zero(cmp.rhs))) {
        v.flags.compares_pointer = true;
        v.flags.comparison_canonical = cmp.op == microc::CmpOp::Eq;
      } else if (!eq) {
        const bool zero_right = is_zero(cmp.rhs) && !lp;
        const bool zero_left = is_zero(cmp.lhs) && !rp;
        if (zero_right || zero_left) {
          v.flags.compares_int_nonpositive = true;
          const bool less = cmp.op == microc::CmpOp::Lt || cmp.op == microc::CmpOp::Le;
          // `n < 0`, `n <= 0`, `0 > n`, `0 >= n` read as canonical.
          v.flags.comparison_canonical = zero_right ? less : !less;
        }
      }

      if (v.control != ControlKind::IfLeaf) continue;
      bool ret[2] = {false, false};
      bool brk[2] = {false, false};
      for (const auto& [to, label] : n.succ) {
        const int side = label.kind == EdgeLabel::Kind::True ? 1 : 0;
        const Node& target = nodes_[to];
        if (to == kExit) continue;
        if (target.owner == Stmt::Kind::Return && !target.leaf) ret[side] = true;
        if (target.owner == Stmt::Kind::Break && target.break_exits_loop) brk[side] = true;
      }
      v.flags.guards_return_on_true = ret[1];
      v.flags.guards_return_on_false = ret[0];
      if (brk[0] != brk[1]) {
        v.flags.is_loop_exit_guard = true;
        v.flags.loop_exit_on_true = brk[1];
      }
    }
  }

  // ---- control dependence ----------------------------------------------

  void compute_control_dependence() {
    const int n = static_cast<int>(nodes_.size());

    std::vector<char> reachable(n, 0);
    {
      std::vector<int> stack{kStart};
      reachable[kStart] = 1;
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (const auto& [to, label] : nodes_[u].succ) {
          if (!reachable[to]) {
            reachable[to] = 1;
            stack.push_back(to);
          }
        }
      }
    }
    reachable[kExit] = 1;

    // Forward successors on the reachable subgraph plus the augmenting
    // edges (start -> exit, and any node that cannot reach the exit).
    std::vector<std::vector<int>> succ(n);
    for (int u = 0; u < n; ++u) {
      if (!reachable[u]) continue;
      for (const auto& [to, label] : nodes_[u].succ) succ[u].push_back(to);
    }
    succ[kStart].push_back(kExit);

    auto reaches_exit = [&] {
      std::vector<std::vector<int>> pred(n);
      for (int u = 0; u < n; ++u) {
        for (int v : succ[u]) pred[v].push_back(u);
      }
      std::vector<char> seen(n, 0);
      std::vector<int> stack{kExit};
      seen[kExit] = 1;
      while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int p : pred[u]) {
          if (!seen[p]) {
            seen[p] = 1;
            stack.push_back(p);
          }
        }
      }
      return seen;
    };
    for (;;) {
      const auto seen = reaches_exit();
      int stuck = -1;
      for (int u = 0; u < n && stuck < 0; ++u) {
        if (reachable[u] && !seen[u]) stuck = u;
      }
      if (stuck < 0) break;
      succ[stuck].push_back(kExit);
    }

    // Postdominators: dominators of the reversed graph rooted at the exit.
    std::vector<int> order;  // postorder of the reverse graph
    {
      std::vector<std::vector<int>> pred(n);
      for (int u = 0; u < n; ++u) {
        for (int v : succ[u]) pred[v].push_back(u);
      }
      std::vector<char> seen(n, 0);
      std::vector<std::pair<int, std::size_t>> stack{{kExit, 0}};
      seen[kExit] = 1;
      while (!stack.empty()) {
        auto& [u, i] = stack.back();
        if (i < pred[u].size()) {
          const int p = pred[u][i++];
          if (!seen[p]) {
            seen[p] = 1;
            stack.emplace_back(p, 0);
          }
        } else {
          order.push_back(u);
          stack.pop_back();
        }
      }
    }
    std::vector<int> rank(n, -1);
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);

    std::vector<int> ipdom(n, -1);
    ipdom[kExit] = kExit;
    auto intersect = [&](int a, int b) {
      while (a != b) {
        while (rank[a] < rank[b]) a = ipdom[a];
        while (rank[b] < rank[a]) b = ipdom[b];
      }
      return a;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int u = *it;
        if (u == kExit) continue;
        int best = -1;
        for (int s : succ[u]) {
          if (ipdom[s] < 0) continue;
          best = best < 0 ? s : intersect(best, s);
        }
        if (best != ipdom[u]) {
          ipdom[u] = best;
          changed = true;
        }
      }
    }

    // Walk each CFG edge a -> b up the postdominator tree from b until
    // reaching ipdom(a); every node on the way depends on a via that edge.
    std::set<std::tuple<VertexId, VertexId, EdgeLabel>> seen_edges;
    for (int a = 0; a < n; ++a) {
      if (!reachable[a] || a == kExit) continue;
      for (const auto& [b, label] : nodes_[a].succ) {
        for (int runner = b; runner != ipdom[a] && runner != kExit; runner = ipdom[runner]) {
          const CdEdge e{nodes_[a].vertex, nodes_[runner].vertex, label};
          if (seen_edges.emplace(e.from, e.to, e.label).second) g_.cd_edges.push_back(e);
        }
      }
    }
  }

  Sdg& g_;
  const FunctionDef& fn_;
  std::map<std::string, microc::ScalarType, std::less<>> types_;
  std::vector<Node> nodes_;
  std::vector<Breakable> breakables_;
  std::deque<CondExpr> leaf_storage_;
};

}  // namespace detail

/// Builds the control-only SDG: one CFG per function, control dependences
/// from postdominators, and call edges from call sites to callee entries.
/// Vertex ids follow function order and then source order.
inline Sdg build_sdg(const microc::Program& p) {
  Sdg g;
  g.files.push_back(p.file);
  for (const auto& fn : p.functions) {
    if (std::find(g.files.begin(), g.files.end(), fn.span.file) == g.files.end()) {
      g.files.push_back(fn.span.file);
    }
    detail::CfgBuilder builder(g, fn);
    builder.build();
  }

  std::map<std::string, VertexId, std::less<>> entries;
  for (const auto& v : g.vertices) {
    if (v.kind == VertexKind::Entry) entries.emplace(v.function, v.id);
  }
  for (const auto& v : g.vertices) {
    if (v.kind != VertexKind::CallSite) continue;
    if (auto it = entries.find(v.callee); it != entries.end()) {
      g.call_edges.push_back({v.id, it->second});
    } else {
      g.diagnostics.push_back(v.span.file + ":" + std::to_string(v.span.line_start) + ":" +
                              std::to_string(v.span.col_start) +
                              ": warning: call to undefined function '" + v.callee + "'");
    }
  }
  if (auto it = entries.find(p.entry_name); it != entries.end()) g.entry = it->second;

  std::sort(g.cd_edges.begin(), g.cd_edges.end(), [](const CdEdge& a, const CdEdge& b) {
    return std::tie(a.from, a.to, a.label) < std::tie(b.from, b.to, b.label);
  });
  g.index();
  return g;
}

}  // namespace elan::sdg
