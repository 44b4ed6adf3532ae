#pragma once

#include <sstream>
#include <string>

#include "elan/microc/ast.hpp"

namespace elan::microc {

namespace detail {

inline int precedence(const Expr& e) {
  if (e.kind != Expr::Kind::Binary) return 3;
  return (e.op == '+' || e.op == '-') ? 1 : 2;
}

inline void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::IntLit: os << e.value; return;
    case Expr::Kind::Null: os << "NULL"; return;
    case Expr::Kind::Var: os << e.name; return;
    case Expr::Kind::Input: os << "input()"; return;
    case Expr::Kind::Neg: {
      const Expr& inner = e.operands.front();
      os << '-';
      const bool paren = inner.kind == Expr::Kind::Binary || inner.kind == Expr::Kind::Neg;
      if (paren) os << '(';
      print_expr(os, inner);
      if (paren) os << ')';
      return;
    }
    case Expr::Kind::Binary: {
      const int p = precedence(e);
      const Expr& lhs = e.operands[0];
      const Expr& rhs = e.operands[1];
      const bool lparen = precedence(lhs) < p;
      const bool rparen = precedence(rhs) <= p;  // left associative
      if (lparen) os << '(';
      print_expr(os, lhs);
      if (lparen) os << ')';
      os << ' ' << e.op << ' ';
      if (rparen) os << '(';
      print_expr(os, rhs);
      if (rparen) os << ')';
      return;
    }
    case Expr::Kind::Call: {
      os << e.name << '(';
      for (std::size_t i = 0; i < e.operands.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, e.operands[i]);
      }
      os << ')';
      return;
    }
  }
}

inline void print_cond(std::ostream& os, const CondExpr& c) {
  switch (c.kind) {
    case CondExpr::Kind::Leaf:
      if (c.negated) os << "!(";
      print_expr(os, c.cmp.lhs);
      os << ' ' << to_string(c.cmp.op) << ' ';
      print_expr(os, c.cmp.rhs);
      if (c.negated) os << ')';
      return;
    case CondExpr::Kind::Not:
      os << "!(";
      print_cond(os, c.children.front());
      os << ')';
      return;
    case CondExpr::Kind::And:
    case CondExpr::Kind::Or:
      // Fully parenthesized so the tree shape survives a re-parse.
      os << '(';
      print_cond(os, c.children[0]);
      os << (c.kind == CondExpr::Kind::And ? ") && (" : ") || (");
      print_cond(os, c.children[1]);
      os << ')';
      return;
  }
}

inline const char* type_name(ScalarType t) {
  switch (t) {
    case ScalarType::Int: return "int";
    case ScalarType::Pointer: return "int *";
    case ScalarType::Void: return "void";
  }
  return "int";
}

inline void print_simple(std::ostream& os, const Stmt& s) {
  if (s.kind == Stmt::Kind::Assign) {
    if (s.decl) os << type_name(*s.decl) << ' ';
    os << s.target << " = ";
  }
  print_expr(os, s.expr);
}

inline void print_block(std::ostream& os, const Block& b, int indent);

inline void print_stmt(std::ostream& os, const Stmt& s, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (s.kind) {
    case Stmt::Kind::Assign:
    case Stmt::Kind::Call:
    case Stmt::Kind::ExprStmt:
      os << pad;
      print_simple(os, s);
      os << ";\n";
      return;
    case Stmt::Kind::Break:
      os << pad << "break;\n";
      return;
    case Stmt::Kind::Return:
      os << pad << "return";
      if (s.has_value) {
        os << ' ';
        print_expr(os, s.expr);
      }
      os << ";\n";
      return;
    case Stmt::Kind::If:
      os << pad << "if (";
      print_cond(os, s.cond);
      os << ") {\n";
      print_block(os, s.body, indent + 1);
      os << pad << '}';
      if (s.has_else) {
        os << " else {\n";
        print_block(os, s.else_body, indent + 1);
        os << pad << '}';
      }
      os << '\n';
      return;
    case Stmt::Kind::While:
      os << pad << "while (";
      print_cond(os, s.cond);
      os << ") {\n";
      print_block(os, s.body, indent + 1);
      os << pad << "}\n";
      return;
    case Stmt::Kind::For:
      os << pad << "for (";
      if (!s.init.empty()) print_simple(os, s.init.front());
      os << "; ";
      print_cond(os, s.cond);
      os << "; ";
      if (!s.step.empty()) print_simple(os, s.step.front());
      os << ") {\n";
      print_block(os, s.body, indent + 1);
      os << pad << "}\n";
      return;
    case Stmt::Kind::Switch:
      os << pad << "switch (";
      print_expr(os, s.expr);
      os << ") {\n";
      for (const auto& c : s.cases) {
        os << pad << "  case " << c.label << ": {\n";
        print_block(os, c.body, indent + 2);
        os << pad << "  }\n";
      }
      if (s.has_default) {
        os << pad << "  default: {\n";
        print_block(os, s.default_body, indent + 2);
        os << pad << "  }\n";
      }
      os << pad << "}\n";
      return;
  }
}

inline void print_block(std::ostream& os, const Block& b, int indent) {
  for (const auto& s : b) print_stmt(os, s, indent);
}

}  // namespace detail

inline std::string to_source(const Expr& e) {
  std::ostringstream os;
  detail::print_expr(os, e);
  return os.str();
}

inline std::string to_source(const CondExpr& c) {
  std::ostringstream os;
  detail::print_cond(os, c);
  return os.str();
}

inline std::string to_source(const Program& p) {
  std::ostringstream os;
  for (std::size_t i = 0; i < p.functions.size(); ++i) {
    const auto& fn = p.functions[i];
    if (i) os << '\n';
    os << detail::type_name(fn.return_type) << ' ' << fn.name << '(';
    for (std::size_t k = 0; k < fn.params.size(); ++k) {
      if (k) os << ", ";
      os << detail::type_name(fn.params[k].type) << ' ' << fn.params[k].name;
    }
    os << ") {\n";
    detail::print_block(os, fn.body, 1);
    os << "}\n";
  }
  return os.str();
}

/// Span-free structural dump, used to compare ASTs for equality.
inline std::string structure_of(const Program& p);

namespace detail {

inline void dump_expr(std::ostream& os, const Expr& e) {
  os << '(' << static_cast<int>(e.kind) << ' ' << e.value << ' ' << e.name << ' '
     << (e.op ? e.op : '_');
  for (const auto& o : e.operands) {
    os << ' ';
    dump_expr(os, o);
  }
  os << ')';
}

inline void dump_cond(std::ostream& os, const CondExpr& c) {
  os << "(c" << static_cast<int>(c.kind) << (c.negated ? "!" : "");
  if (c.kind == CondExpr::Kind::Leaf) {
    os << ' ';
    dump_expr(os, c.cmp.lhs);
    os << ' ' << to_string(c.cmp.op) << ' ';
    dump_expr(os, c.cmp.rhs);
  }
  for (const auto& ch : c.children) {
    os << ' ';
    dump_cond(os, ch);
  }
  os << ')';
}

inline void dump_block(std::ostream& os, const Block& b);

inline void dump_stmt(std::ostream& os, const Stmt& s) {
  os << "(s" << static_cast<int>(s.kind) << ' ' << s.target << ' '
     << (s.decl ? static_cast<int>(*s.decl) : -1) << ' ' << s.has_value;
  if (s.has_value) {
    os << ' ';
    dump_expr(os, s.expr);
  }
  if (s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::While || s.kind == Stmt::Kind::For) {
    os << ' ';
    dump_cond(os, s.cond);
  }
  os << " init";
  dump_block(os, s.init);
  os << " step";
  dump_block(os, s.step);
  os << " body";
  dump_block(os, s.body);
  os << " else" << s.has_else;
  dump_block(os, s.else_body);
  for (const auto& c : s.cases) {
    os << " case " << c.label;
    dump_block(os, c.body);
  }
  os << " default" << s.has_default;
  dump_block(os, s.default_body);
  os << ')';
}

inline void dump_block(std::ostream& os, const Block& b) {
  os << '[';
  for (const auto& s : b) dump_stmt(os, s);
  os << ']';
}

}  // namespace detail

inline std::string structure_of(const Program& p) {
  std::ostringstream os;
  for (const auto& fn : p.functions) {
    os << "(fn " << fn.name << ' ' << static_cast<int>(fn.return_type);
    for (const auto& prm : fn.params) os << ' ' << prm.name << ':' << static_cast<int>(prm.type);
    os << ' ';
    detail::dump_block(os, fn.body);
    os << ")\n";
  }
  return os.str();
}

}  // namespace elan::microc
