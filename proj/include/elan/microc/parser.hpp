#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "elan/error.hpp"
#include "elan/microc/ast.hpp"
#include "elan/microc/lexer.hpp"

namespace elan::microc {

namespace detail {

class Parser {
 public:
  Parser(std::string_view source, std::string file, NodeId first_id = 0)
      : file_(std::move(file)), toks_(tokenize(source, file_)), next_id_(first_id) {}

  Program parse_program() {
    Program prog;
    prog.file = file_;
    std::set<std::string, std::less<>> names;
    while (!at(Tok::End)) {
      FunctionDef fn = parse_function();
      if (!names.insert(fn.name).second) {
        throw ParseError(file_, fn.span.line_start, fn.span.col_start,
                         "duplicate function '" + fn.name + "'");
      }
      prog.functions.push_back(std::move(fn));
    }
    prog.node_count = next_id_;
    return prog;
  }

 private:
  // ---- token helpers ----------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t k = pos_ + ahead;
    return k < toks_.size() ? toks_[k] : toks_.back();
  }
  bool at(Tok k) const { return peek().kind == k; }

  const Token& take() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    last_ = &t;
    return t;
  }

  bool accept(Tok k) {
    if (!at(k)) return false;
    take();
    return true;
  }

  const Token& expect(Tok k, std::string_view what) {
    if (!at(k)) fail(std::string("expected ") + std::string(what));
    return take();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(file_, t.line, t.col, msg + ", found " + found);
  }

  SourceSpan span_from(const Token& first) const {
    SourceSpan s;
    s.file = file_;
    s.line_start = first.line;
    s.col_start = first.col;
    s.line_end = last_ ? last_->end_line : first.end_line;
    s.col_end = last_ ? last_->end_col : first.end_col;
    return s;
  }

  NodeId fresh() { return next_id_++; }

  // ---- declarations -----------------------------------------------------

  bool at_type() const { return at(Tok::KwInt) || at(Tok::KwVoid); }

  ScalarType parse_type() {
    ScalarType t = at(Tok::KwVoid) ? ScalarType::Void : ScalarType::Int;
    take();
    while (accept(Tok::Star)) t = ScalarType::Pointer;
    return t;
  }

  FunctionDef parse_function() {
    if (!at_type()) fail("expected function definition");
    const Token& first = peek();
    FunctionDef fn;
    fn.id = fresh();
    fn.return_type = parse_type();
    fn.name = expect(Tok::Ident, "function name").text;
    expect(Tok::LParen, "'('");
    if (at(Tok::KwVoid) && peek(1).kind == Tok::RParen) take();
    std::set<std::string, std::less<>> seen;
    if (!at(Tok::RParen)) {
      do {
        if (!at_type()) fail("expected parameter type");
        Param p;
        p.type = parse_type();
        const Token& name = expect(Tok::Ident, "parameter name");
        p.name = name.text;
        if (p.type == ScalarType::Void) {
          throw ParseError(file_, name.line, name.col, "parameter '" + p.name + "' has void type");
        }
        if (!seen.insert(p.name).second) {
          throw ParseError(file_, name.line, name.col, "duplicate parameter '" + p.name + "'");
        }
        fn.params.push_back(std::move(p));
      } while (accept(Tok::Comma));
    }
    expect(Tok::RParen, "')'");
    fn.body = parse_block();
    fn.span = span_from(first);
    return fn;
  }

  Block parse_block() {
    expect(Tok::LBrace, "'{'");
    Block b;
    while (!at(Tok::RBrace)) {
      if (at(Tok::End)) fail("expected '}'");
      b.push_back(parse_stmt());
    }
    take();
    return b;
  }

  // ---- statements -------------------------------------------------------

  Stmt parse_stmt() {
    const Token& first = peek();
    switch (first.kind) {
      case Tok::KwIf: return parse_if();
      case Tok::KwWhile: return parse_while();
      case Tok::KwFor: return parse_for();
      case Tok::KwSwitch: return parse_switch();
      case Tok::KwBreak: {
        if (breakable_depth_ == 0) {
          throw ParseError(file_, first.line, first.col, "break outside loop/switch");
        }
        Stmt s;
        s.kind = Stmt::Kind::Break;
        s.id = fresh();
        take();
        expect(Tok::Semi, "';'");
        s.span = span_from(first);
        return s;
      }
      case Tok::KwReturn: {
        Stmt s;
        s.kind = Stmt::Kind::Return;
        s.id = fresh();
        take();
        if (!at(Tok::Semi)) {
          s.expr = parse_expr();
          s.has_value = true;
        }
        expect(Tok::Semi, "';'");
        s.span = span_from(first);
        return s;
      }
      default: {
        Stmt s = parse_simple();
        expect(Tok::Semi, "';'");
        s.span = span_from(first);
        return s;
      }
    }
  }

  // Declaration, assignment or expression statement, without the ';'.
  Stmt parse_simple() {
    const Token& first = peek();
    Stmt s;
    if (at_type()) {
      s.kind = Stmt::Kind::Assign;
      s.id = fresh();
      s.decl = parse_type();
      const Token& name = expect(Tok::Ident, "variable name");
      if (*s.decl == ScalarType::Void) {
        throw ParseError(file_, name.line, name.col, "variable '" + name.text + "' has void type");
      }
      s.target = name.text;
      if (accept(Tok::Assign)) {
        s.expr = parse_expr();
      } else {
        s.expr.kind = *s.decl == ScalarType::Pointer ? Expr::Kind::Null : Expr::Kind::IntLit;
        s.expr.id = fresh();
        s.expr.span = span_from(name);
      }
      s.has_value = true;
    } else if (at(Tok::Ident) && peek(1).kind == Tok::Assign) {
      s.kind = Stmt::Kind::Assign;
      s.id = fresh();
      s.target = take().text;
      take();
      s.expr = parse_expr();
      s.has_value = true;
    } else {
      s.id = fresh();
      s.expr = parse_expr();
      s.has_value = true;
      s.kind = s.expr.is_call() ? Stmt::Kind::Call : Stmt::Kind::ExprStmt;
    }
    s.span = span_from(first);
    return s;
  }

  Stmt parse_if() {
    const Token& first = take();
    Stmt s;
    s.kind = Stmt::Kind::If;
    s.id = fresh();
    expect(Tok::LParen, "'('");
    s.cond = parse_cond();
    expect(Tok::RParen, "')'");
    s.body = parse_block();
    if (accept(Tok::KwElse)) {
      s.has_else = true;
      if (at(Tok::KwIf)) {
        s.else_body.push_back(parse_if());
      } else {
        s.else_body = parse_block();
      }
    }
    s.span = span_from(first);
    return s;
  }

  Stmt parse_while() {
    const Token& first = take();
    Stmt s;
    s.kind = Stmt::Kind::While;
    s.id = fresh();
    expect(Tok::LParen, "'('");
    s.cond = parse_cond();
    expect(Tok::RParen, "')'");
    ++breakable_depth_;
    s.body = parse_block();
    --breakable_depth_;
    s.span = span_from(first);
    return s;
  }

  Stmt parse_for() {
    const Token& first = take();
    Stmt s;
    s.kind = Stmt::Kind::For;
    s.id = fresh();
    expect(Tok::LParen, "'('");
    if (!at(Tok::Semi)) {
      const Token& init_first = peek();
      s.init.push_back(parse_simple());
      s.init.back().span = span_from(init_first);
    }
    expect(Tok::Semi, "';'");
    if (!at(Tok::Semi)) {
      s.cond = parse_cond();
    } else {
      // `for (;;)` loops on a synthesized always-true leaf.
      const Token& semi = peek();
      s.cond = constant_true_leaf(semi);
    }
    expect(Tok::Semi, "';'");
    if (!at(Tok::RParen)) {
      const Token& step_first = peek();
      s.step.push_back(parse_simple());
      s.step.back().span = span_from(step_first);
    }
    expect(Tok::RParen, "')'");
    s.header_span = span_from(first);
    ++breakable_depth_;
    s.body = parse_block();
    --breakable_depth_;
    s.span = span_from(first);
    return s;
  }

  Stmt parse_switch() {
    const Token& first = take();
    Stmt s;
    s.kind = Stmt::Kind::Switch;
    s.id = fresh();
    expect(Tok::LParen, "'('");
    s.expr = parse_expr();
    expect(Tok::RParen, "')'");
    s.header_span = span_from(first);
    expect(Tok::LBrace, "'{'");
    ++breakable_depth_;
    std::set<std::int64_t> labels;
    while (at(Tok::KwCase)) {
      const Token& case_tok = take();
      SwitchCase c;
      const bool neg = accept(Tok::Minus);
      const Token& lit = expect(Tok::Int, "case label");
      c.label = neg ? -lit.value : lit.value;
      if (!labels.insert(c.label).second) {
        throw ParseError(file_, lit.line, lit.col,
                         "duplicate case label " + std::to_string(c.label));
      }
      expect(Tok::Colon, "':'");
      c.body = parse_case_body();
      c.span = span_from(case_tok);
      s.cases.push_back(std::move(c));
    }
    if (accept(Tok::KwDefault)) {
      expect(Tok::Colon, "':'");
      s.has_default = true;
      s.default_body = parse_case_body();
    }
    --breakable_depth_;
    expect(Tok::RBrace, "'}'");
    s.span = span_from(first);
    return s;
  }

  Block parse_case_body() {
    if (at(Tok::LBrace)) return parse_block();
    Block b;
    while (!at(Tok::KwCase) && !at(Tok::KwDefault) && !at(Tok::RBrace)) {
      if (at(Tok::End)) fail("expected '}'");
      b.push_back(parse_stmt());
    }
    return b;
  }

  // ---- conditions -------------------------------------------------------

  CondExpr constant_true_leaf(const Token& at_tok) {
    CondExpr leaf;
    leaf.kind = CondExpr::Kind::Leaf;
    leaf.id = fresh();
    leaf.span = SourceSpan{file_, at_tok.line, at_tok.col, at_tok.line, at_tok.col};
    leaf.cmp.lhs.kind = Expr::Kind::IntLit;
    leaf.cmp.lhs.value = 1;
    leaf.cmp.lhs.id = fresh();
    leaf.cmp.lhs.span = leaf.span;
    leaf.cmp.op = CmpOp::Ne;
    leaf.cmp.rhs.kind = Expr::Kind::IntLit;
    leaf.cmp.rhs.id = fresh();
    leaf.cmp.rhs.span = leaf.span;
    return leaf;
  }

  CondExpr parse_cond() { return parse_or(); }

  CondExpr parse_or() {
    const Token& first = peek();
    CondExpr lhs = parse_and();
    while (at(Tok::OrOr)) {
      take();
      CondExpr node;
      node.kind = CondExpr::Kind::Or;
      node.id = fresh();
      node.children.push_back(std::move(lhs));
      node.children.push_back(parse_and());
      node.span = span_from(first);
      lhs = std::move(node);
    }
    return lhs;
  }

  CondExpr parse_and() {
    const Token& first = peek();
    CondExpr lhs = parse_not();
    while (at(Tok::AndAnd)) {
      take();
      CondExpr node;
      node.kind = CondExpr::Kind::And;
      node.id = fresh();
      node.children.push_back(std::move(lhs));
      node.children.push_back(parse_not());
      node.span = span_from(first);
      lhs = std::move(node);
    }
    return lhs;
  }

  CondExpr parse_not() {
    const Token& first = peek();
    if (accept(Tok::Bang)) {
      CondExpr node;
      node.kind = CondExpr::Kind::Not;
      node.id = fresh();
      node.children.push_back(parse_not());
      node.span = span_from(first);
      return node;
    }
    if (at(Tok::LParen)) {
      // `(` opens either a nested condition or an arithmetic group such as
      // `(a + b) > 3`; try the condition first and rewind if it does not fit.
      const std::size_t save_pos = pos_;
      const Token* save_last = last_;
      const NodeId save_id = next_id_;
      try {
        take();
        CondExpr inner = parse_cond();
        expect(Tok::RParen, "')'");
        if (!continues_expression()) return inner;
      } catch (const ParseError&) {
      }
      pos_ = save_pos;
      last_ = save_last;
      next_id_ = save_id;
    }
    return parse_leaf();
  }

  bool continues_expression() const {
    switch (peek().kind) {
      case Tok::Plus: case Tok::Minus: case Tok::Star: case Tok::Slash: case Tok::Percent:
      case Tok::Lt: case Tok::Le: case Tok::Gt: case Tok::Ge: case Tok::EqEq: case Tok::NotEq:
        return true;
      default:
        return false;
    }
  }

  CondExpr parse_leaf() {
    const Token& first = peek();
    CondExpr leaf;
    leaf.kind = CondExpr::Kind::Leaf;
    leaf.id = fresh();
    leaf.cmp.lhs = parse_expr();
    std::optional<CmpOp> op;
    switch (peek().kind) {
      case Tok::Lt: op = CmpOp::Lt; break;
      case Tok::Le: op = CmpOp::Le; break;
      case Tok::Gt: op = CmpOp::Gt; break;
      case Tok::Ge: op = CmpOp::Ge; break;
      case Tok::EqEq: op = CmpOp::Eq; break;
      case Tok::NotEq: op = CmpOp::Ne; break;
      default: break;
    }
    if (op) {
      take();
      leaf.cmp.op = *op;
      leaf.cmp.rhs = parse_expr();
    } else {
      // Truthiness: `x` means `x != 0`.
      leaf.cmp.op = CmpOp::Ne;
      leaf.cmp.rhs.kind = Expr::Kind::IntLit;
      leaf.cmp.rhs.id = fresh();
      leaf.cmp.rhs.span = leaf.cmp.lhs.span;
    }
    leaf.span = span_from(first);
    return leaf;
  }

  // ---- expressions ------------------------------------------------------

  Expr parse_expr() { return parse_additive(); }

  Expr binary(char op, Expr lhs, Expr rhs, const Token& first) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.op = op;
    e.id = fresh();
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    e.span = span_from(first);
    return e;
  }

  Expr parse_additive() {
    const Token& first = peek();
    Expr lhs = parse_multiplicative();
    while (at(Tok::Plus) || at(Tok::Minus)) {
      const char op = take().text[0];
      Expr rhs = parse_multiplicative();
      lhs = binary(op, std::move(lhs), std::move(rhs), first);
    }
    return lhs;
  }

  Expr parse_multiplicative() {
    const Token& first = peek();
    Expr lhs = parse_unary();
    while (at(Tok::Star) || at(Tok::Slash) || at(Tok::Percent)) {
      const char op = take().text[0];
      Expr rhs = parse_unary();
      lhs = binary(op, std::move(lhs), std::move(rhs), first);
    }
    return lhs;
  }

  Expr parse_unary() {
    const Token& first = peek();
    if (accept(Tok::Minus)) {
      Expr e;
      e.kind = Expr::Kind::Neg;
      e.id = fresh();
      e.operands.push_back(parse_unary());
      e.span = span_from(first);
      return e;
    }
    return parse_primary();
  }

  Expr parse_primary() {
    const Token& first = peek();
    Expr e;
    switch (first.kind) {
      case Tok::Int:
        e.kind = Expr::Kind::IntLit;
        e.value = take().value;
        e.id = fresh();
        break;
      case Tok::KwNull:
        take();
        e.kind = Expr::Kind::Null;
        e.id = fresh();
        break;
      case Tok::KwInput:
        take();
        expect(Tok::LParen, "'('");
        expect(Tok::RParen, "')'");
        e.kind = Expr::Kind::Input;
        e.id = fresh();
        break;
      case Tok::Ident:
        e.name = take().text;
        e.id = fresh();
        if (accept(Tok::LParen)) {
          e.kind = Expr::Kind::Call;
          if (!at(Tok::RParen)) {
            do {
              e.operands.push_back(parse_expr());
            } while (accept(Tok::Comma));
          }
          expect(Tok::RParen, "')'");
        } else {
          e.kind = Expr::Kind::Var;
        }
        break;
      case Tok::LParen: {
        take();
        Expr inner = parse_expr();
        expect(Tok::RParen, "')'");
        return inner;
      }
      default:
        fail("expected expression");
    }
    e.span = span_from(first);
    return e;
  }

  std::string file_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Token* last_ = nullptr;
  NodeId next_id_ = 0;
  int breakable_depth_ = 0;
};

}  // namespace detail

/// Parses MicroC source text. Node ids are assigned in source order, so the
/// same text always yields the same AST.
inline Program parse_program(std::string_view source_text, const std::string& file) {
  detail::Parser parser(source_text, file);
  return parser.parse_program();
}

struct SourceFile {
  std::string path;
  std::string text;
};

/// Parses several files into one program. Node ids continue across files and
/// function names must be unique over all of them.
inline Program parse_programs(const std::vector<SourceFile>& sources) {
  if (sources.empty()) throw std::invalid_argument("no source files");
  Program out;
  out.file = sources.front().path;
  std::set<std::string, std::less<>> names;
  for (const auto& src : sources) {
    detail::Parser parser(src.text, src.path, out.node_count);
    Program part = parser.parse_program();
    for (auto& fn : part.functions) {
      if (!names.insert(fn.name).second) {
        throw ParseError(src.path, fn.span.line_start, fn.span.col_start,
                         "duplicate function '" + fn.name + "'");
      }
      out.functions.push_back(std::move(fn));
    }
    out.node_count = part.node_count;
  }
  return out;
}

}  // namespace elan::microc
