#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "elan/error.hpp"
#include "elan/microc/ast.hpp"
#include "elan/microc/conditions.hpp"
#include "elan/sdg/sdg.hpp"

namespace elan::profile {

using sdg::VertexId;

inline constexpr std::uint64_t kDefaultStepLimit = 1'000'000;
inline constexpr int kMaxCallDepth = 2'000;

/// Values handed out by successive input() calls. Once exhausted, input()
/// yields 0.
struct RunInput {
  std::string name;
  std::vector<std::int64_t> values;
};

enum class RunOutcome { Completed, StepLimit, RuntimeError };

inline const char* to_string(RunOutcome o) noexcept {
  switch (o) {
    case RunOutcome::Completed: return "completed";
    case RunOutcome::StepLimit: return "step-limit";
    case RunOutcome::RuntimeError: return "runtime-error";
  }
  return "?";
}

struct ExecutionTrace {
  std::vector<VertexId> visited;  // ascending, no duplicates
  std::uint64_t steps = 0;        // executed statements and condition evaluations
  RunOutcome outcome = RunOutcome::Completed;
  std::string error;

  bool visited_vertex(VertexId v) const {
    return std::binary_search(visited.begin(), visited.end(), v);
  }
};

namespace detail {

struct StepLimitHit {};
struct RuntimeFault {
  std::string message;
};

class Interpreter {
 public:
  Interpreter(const microc::Program& p, const sdg::Sdg& g, const RunInput& in,
              std::uint64_t step_limit)
      : prog_(p), g_(g), input_(in), limit_(step_limit), seen_(g.size(), 0) {}

  ExecutionTrace run() {
    ExecutionTrace t;
    const microc::FunctionDef* entry = prog_.entry();
    if (!entry) throw AnalysisError("program has no entry function '" + prog_.entry_name + "'");
    try {
      call(*entry, {});
    } catch (const StepLimitHit&) {
      t.outcome = RunOutcome::StepLimit;
    } catch (const RuntimeFault& f) {
      t.outcome = RunOutcome::RuntimeError;
      t.error = f.message;
    }
    t.steps = steps_;
    for (VertexId v = 0; v < seen_.size(); ++v) {
      if (seen_[v]) t.visited.push_back(v);
    }
    return t;
  }

 private:
  using Value = std::int64_t;
  using Frame = std::map<std::string, Value, std::less<>>;
  enum class Flow { Normal, Break, Return };

  void mark(microc::NodeId node) {
    if (auto v = g_.vertex_for_node(node)) seen_[*v] = 1;
  }

  void step() {
    if (steps_ >= limit_) throw StepLimitHit{};
    ++steps_;
  }

  static Value wrap(std::uint64_t u) { return static_cast<Value>(u); }

  Value call(const microc::FunctionDef& fn, const std::vector<Value>& args) {
    if (depth_ >= kMaxCallDepth) throw RuntimeFault{"call depth exceeded in '" + fn.name + "'"};
    if (args.size() != fn.params.size()) {
      throw RuntimeFault{"'" + fn.name + "' expects " + std::to_string(fn.params.size()) +
                         " arguments, got " + std::to_string(args.size())};
    }
    ++depth_;
    mark(fn.id);
    Frame frame;
    for (std::size_t i = 0; i < args.size(); ++i) frame[fn.params[i].name] = args[i];
    return_value_ = 0;
    exec_block(fn.body, frame);
    --depth_;
    const Value rv = return_value_;
    return_value_ = 0;
    return rv;
  }

  Value eval(const microc::Expr& e, Frame& f) {
    using K = microc::Expr::Kind;
    switch (e.kind) {
      case K::IntLit: return e.value;
      case K::Null: return 0;
      case K::Var: {
        auto it = f.find(e.name);
        return it == f.end() ? 0 : it->second;
      }
      case K::Input:
        return next_input_ < input_.values.size() ? input_.values[next_input_++] : 0;
      case K::Neg: return wrap(0u - static_cast<std::uint64_t>(eval(e.operands[0], f)));
      case K::Binary: {
        const Value a = eval(e.operands[0], f);
        const Value b = eval(e.operands[1], f);
        const auto ua = static_cast<std::uint64_t>(a);
        const auto ub = static_cast<std::uint64_t>(b);
        switch (e.op) {
          case '+': return wrap(ua + ub);
          case '-': return wrap(ua - ub);
          case '*': return wrap(ua * ub);
          case '/':
          case '%':
            if (b == 0) {
              throw RuntimeFault{"division by zero at " + e.span.file + ":" +
                                 std::to_string(e.span.line_start)};
            }
            if (a == std::numeric_limits<Value>::min() && b == -1) {
              return e.op == '/' ? a : 0;
            }
            return e.op == '/' ? a / b : a % b;
          default: break;
        }
        throw RuntimeFault{std::string("unknown operator ") + e.op};
      }
      case K::Call: {
        std::vector<Value> args;
        args.reserve(e.operands.size());
        for (const auto& a : e.operands) args.push_back(eval(a, f));
        mark(e.id);
        if (const auto* callee = prog_.find(e.name)) return call(*callee, args);
        return 0;  // unresolved: no body to run
      }
    }
    return 0;
  }

  bool compare(const microc::Comparison& c, Frame& f) {
    const Value a = eval(c.lhs, f);
    const Value b = eval(c.rhs, f);
    switch (c.op) {
      case microc::CmpOp::Lt: return a < b;
      case microc::CmpOp::Le: return a <= b;
      case microc::CmpOp::Gt: return a > b;
      case microc::CmpOp::Ge: return a >= b;
      case microc::CmpOp::Eq: return a == b;
      case microc::CmpOp::Ne: return a != b;
    }
    return false;
  }

  // Evaluates a condition in negation normal form with short-circuiting,
  // matching the control-point decomposition of the SDG.
  bool eval_cond(const microc::CondExpr& c, Frame& f) {
    using K = microc::CondExpr::Kind;
    switch (c.kind) {
      case K::Leaf: {
        const bool v = compare(c.cmp, f);
        step();
        mark(c.id);
        return v != c.negated;
      }
      case K::And: return eval_cond(c.children[0], f) && eval_cond(c.children[1], f);
      case K::Or: return eval_cond(c.children[0], f) || eval_cond(c.children[1], f);
      case K::Not: return !eval_cond(c.children[0], f);
    }
    return false;
  }

  const microc::CondExpr& nnf(const microc::CondExpr& c) {
    auto it = nnf_cache_.find(&c);
    if (it == nnf_cache_.end()) {
      it = nnf_cache_.emplace(&c, microc::negation_normal_form(c)).first;
    }
    return it->second;
  }

  Flow exec_block(const microc::Block& b, Frame& f) {
    for (const auto& s : b) {
      const Flow fl = exec(s, f);
      if (fl != Flow::Normal) return fl;
    }
    return Flow::Normal;
  }

  Flow exec(const microc::Stmt& s, Frame& f) {
    using K = microc::Stmt::Kind;
    switch (s.kind) {
      case K::Assign: {
        const Value v = eval(s.expr, f);
        step();
        mark(s.id);
        f[s.target] = v;
        return Flow::Normal;
      }
      case K::ExprStmt:
        eval(s.expr, f);
        step();
        mark(s.id);
        return Flow::Normal;
      case K::Call:
        step();
        eval(s.expr, f);
        return Flow::Normal;
      case K::Break:
        step();
        mark(s.id);
        return Flow::Break;
      case K::Return: {
        const Value v = s.has_value ? eval(s.expr, f) : 0;
        step();
        mark(s.id);
        return_value_ = v;
        return Flow::Return;
      }
      case K::If:
        if (eval_cond(nnf(s.cond), f)) return exec_block(s.body, f);
        return s.has_else ? exec_block(s.else_body, f) : Flow::Normal;
      case K::While:
      case K::For: {
        if (s.kind == K::For && exec_block(s.init, f) != Flow::Normal) return Flow::Normal;
        const auto& cond = nnf(s.cond);
        while (eval_cond(cond, f)) {
          const Flow fl = exec_block(s.body, f);
          if (fl == Flow::Break) break;
          if (fl == Flow::Return) return fl;
          exec_block(s.step, f);
        }
        return Flow::Normal;
      }
      case K::Switch: {
        const Value v = eval(s.expr, f);
        step();
        mark(s.id);
        const microc::Block* arm = s.has_default ? &s.default_body : nullptr;
        for (const auto& c : s.cases) {
          if (c.label == v) {
            arm = &c.body;
            break;
          }
        }
        if (!arm) return Flow::Normal;
        const Flow fl = exec_block(*arm, f);
        return fl == Flow::Break ? Flow::Normal : fl;
      }
    }
    return Flow::Normal;
  }

  const microc::Program& prog_;
  const sdg::Sdg& g_;
  const RunInput& input_;
  std::uint64_t limit_;
  std::vector<char> seen_;
  std::uint64_t steps_ = 0;
  std::size_t next_input_ = 0;
  int depth_ = 0;
  Value return_value_ = 0;
  std::unordered_map<const microc::CondExpr*, microc::CondExpr> nnf_cache_;
};

}  // namespace detail

/// Runs the entry function once. Visited vertices are recorded through the
/// SDG's AST-node mapping, so `g` must be built from `p`.
inline ExecutionTrace interpret(const microc::Program& p, const sdg::Sdg& g, const RunInput& in,
                                std::uint64_t step_limit = kDefaultStepLimit) {
  detail::Interpreter interp(p, g, in, step_limit);
  return interp.run();
}

}  // namespace elan::profile
