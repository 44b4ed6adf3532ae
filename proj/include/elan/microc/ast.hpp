#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elan::microc {

// 1-based, inclusive on both ends.
struct SourceSpan {
  std::string file;
  int line_start = 0;
  int col_start = 0;
  int line_end = 0;
  int col_end = 0;

  bool covers_line(int line) const noexcept {
    return line_start <= line && line <= line_end;
  }

  bool operator==(const SourceSpan&) const = default;
};

// Dense per-program numbering of AST nodes, assigned in parse order.
using NodeId = std::uint32_t;

enum class ScalarType { Int, Pointer, Void };

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne };

inline const char* to_string(CmpOp op) noexcept {
  switch (op) {
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
    case CmpOp::Eq: return "==";
    case CmpOp::Ne: return "!=";
  }
  return "?";
}

struct Expr {
  enum class Kind { IntLit, Null, Var, Neg, Binary, Call, Input };

  Kind kind = Kind::IntLit;
  std::int64_t value = 0;      // IntLit
  std::string name;            // Var, Call
  char op = 0;                 // Binary: one of + - * / %
  std::vector<Expr> operands;  // Neg: 1, Binary: 2, Call: arguments
  NodeId id = 0;
  SourceSpan span;

  bool is_call() const noexcept { return kind == Kind::Call; }
};

struct Comparison {
  Expr lhs;
  CmpOp op = CmpOp::Ne;
  Expr rhs;
};

// Condition tree. Leaves are simple comparisons; a bare expression `x` is
// stored as `x != 0`. After negation push-down (see conditions.hpp) Not nodes
// disappear and leaves carry `negated` instead.
struct CondExpr {
  enum class Kind { And, Or, Not, Leaf };

  Kind kind = Kind::Leaf;
  std::vector<CondExpr> children;  // And/Or: 2, Not: 1
  Comparison cmp;                  // Leaf
  bool negated = false;            // Leaf, only set in negation normal form
  NodeId id = 0;
  SourceSpan span;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct SwitchCase {
  std::int64_t label = 0;
  Block body;
  SourceSpan span;
};

struct Stmt {
  enum class Kind { Assign, If, While, For, Switch, Break, Return, Call, ExprStmt };

  Kind kind = Kind::ExprStmt;
  NodeId id = 0;
  SourceSpan span;

  // Assign. `decl` is set for declarations (`int x = e;`, `int *p;`).
  std::string target;
  std::optional<ScalarType> decl;

  // Assign value, Return value (if has_value), Switch subject, Call, ExprStmt.
  Expr expr;
  bool has_value = false;

  // If / While / For.
  CondExpr cond;
  Block body;
  Block else_body;
  bool has_else = false;

  // For: at most one simple statement each.
  Block init;
  Block step;

  // Switch.
  std::vector<SwitchCase> cases;
  Block default_body;
  bool has_default = false;
  SourceSpan header_span;  // `switch (e)` for Switch, `for (...)` for For
};

struct Param {
  std::string name;
  ScalarType type = ScalarType::Int;
};

struct FunctionDef {
  std::string name;
  ScalarType return_type = ScalarType::Int;
  std::vector<Param> params;
  Block body;
  NodeId id = 0;
  SourceSpan span;
};

struct Program {
  std::string file;
  std::vector<FunctionDef> functions;
  std::string entry_name = "main";
  NodeId node_count = 0;

  const FunctionDef* find(std::string_view name) const noexcept {
    for (const auto& fn : functions) {
      if (fn.name == name) return &fn;
    }
    return nullptr;
  }

  const FunctionDef* entry() const noexcept { return find(entry_name); }
};

}  // namespace elan::microc
