#include <gtest/gtest.h>

#include <functional>

#include "elan/error.hpp"
#include "elan/microc/conditions.hpp"
#include "elan/microc/lexer.hpp"
#include "elan/microc/parser.hpp"
#include "elan/microc/printer.hpp"
#include "support/corpus.hpp"
#include "support/program_gen.hpp"

using namespace elan;
using namespace elan::microc;

namespace {

Program parse(const std::string& src) { return parse_program(src, "t.mc"); }

std::string parse_error(const std::string& src) {
  try {
    parse(src);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

void for_each_stmt(const Block& b, const std::function<void(const Stmt&)>& f) {
  for (const auto& s : b) {
    f(s);
    for_each_stmt(s.body, f);
    for_each_stmt(s.else_body, f);
    for_each_stmt(s.init, f);
    for_each_stmt(s.step, f);
    for (const auto& c : s.cases) for_each_stmt(c.body, f);
    for_each_stmt(s.default_body, f);
  }
}

bool has_cond(const Stmt& s) {
  return s.kind == Stmt::Kind::If || s.kind == Stmt::Kind::While || s.kind == Stmt::Kind::For;
}

int count_leaves(const CondExpr& c) {
  if (c.kind == CondExpr::Kind::Leaf) return 1;
  int n = 0;
  for (const auto& ch : c.children) n += count_leaves(ch);
  return n;
}

}  // namespace

TEST(Parser, MinimalProgram) {
  const auto p = parse("int main(){ return 0; }");
  ASSERT_EQ(p.functions.size(), 1u);
  EXPECT_EQ(p.functions[0].name, "main");
  ASSERT_EQ(p.functions[0].body.size(), 1u);
  const auto& ret = p.functions[0].body[0];
  EXPECT_EQ(ret.kind, Stmt::Kind::Return);
  ASSERT_TRUE(ret.has_value);
  EXPECT_EQ(ret.expr.kind, Expr::Kind::IntLit);
  EXPECT_EQ(ret.expr.value, 0);
  EXPECT_NE(p.entry(), nullptr);
}

TEST(Parser, OrConditionHasTwoLeaves) {
  const auto p = parse("int main(){ if (x > 1 || y < 3) { z = 1; } }");
  const auto& s = p.functions[0].body[0];
  ASSERT_EQ(s.kind, Stmt::Kind::If);
  EXPECT_EQ(s.cond.kind, CondExpr::Kind::Or);
  EXPECT_EQ(decompose_condition(s.cond).size(), 2u);
}

TEST(Parser, BreakOutsideLoopIsRejected) {
  EXPECT_NE(parse_error("int main(){ break; }").find("break outside loop/switch"), std::string::npos);
  EXPECT_NO_THROW(parse("int main(){ while (1) { break; } }"));
  EXPECT_NO_THROW(parse("int main(){ switch (1) { case 1: break; } }"));
}

TEST(Parser, DuplicatesAreRejected) {
  EXPECT_NE(parse_error("int f(){ return 0; } int f(){ return 1; }").find("duplicate function 'f'"),
            std::string::npos);
  EXPECT_NE(parse_error("int f(int a, int a){ return 0; }").find("duplicate parameter 'a'"),
            std::string::npos);
  EXPECT_NE(parse_error("int main(){ switch (x) { case 1: x = 1; case 1: x = 2; } }")
                .find("duplicate case label 1"),
            std::string::npos);
}

TEST(Parser, ErrorsCarryLocation) {
  try {
    parse("int main() {\n  x = ;\n}\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.file(), "t.mc");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 7);
    EXPECT_EQ(std::string(e.what()).rfind("t.mc:2:7: error: ", 0), 0u);
  }
  EXPECT_THROW(parse("int main() { x = 1 @ 2; }"), ParseError);
  EXPECT_THROW(parse("int main() { x = 99999999999999999999; }"), ParseError);
  EXPECT_THROW(parse("int main() { if (x > 1 { } }"), ParseError);
  EXPECT_THROW(parse("void x;"), ParseError);
}

TEST(Parser, DeclarationsAndExpressions) {
  const auto p = parse(
      "int* f(int* q, int n) { int* r; int k; r = q; k = -n * (n + 2) / 3 % 5 - input(); return r; }\n"
      "void g() { f(NULL, 1); }\n");
  ASSERT_EQ(p.functions.size(), 2u);
  const auto& f = p.functions[0];
  EXPECT_EQ(f.return_type, ScalarType::Pointer);
  ASSERT_EQ(f.params.size(), 2u);
  EXPECT_EQ(f.params[0].type, ScalarType::Pointer);
  EXPECT_EQ(f.body[0].expr.kind, Expr::Kind::Null);   // implicit initializer
  EXPECT_EQ(f.body[1].expr.kind, Expr::Kind::IntLit);
  EXPECT_EQ(to_source(f.body[3].expr), "-n * (n + 2) / 3 % 5 - input()");
  EXPECT_EQ(p.functions[1].body[0].kind, Stmt::Kind::Call);
}

TEST(Parser, TruthinessBecomesNotEqualZero) {
  const auto p = parse("int main(){ if (x) { y = 1; } }");
  const auto& c = p.functions[0].body[0].cond;
  ASSERT_EQ(c.kind, CondExpr::Kind::Leaf);
  EXPECT_EQ(c.cmp.op, CmpOp::Ne);
  EXPECT_EQ(to_source(c), "x != 0");
}

TEST(Parser, ParenthesizedArithmeticInsideCondition) {
  const auto p = parse("int main(){ if ((a + 1) * 2 > b && (c < d)) { y = 1; } }");
  const auto leaves = decompose_condition(p.functions[0].body[0].cond);
  ASSERT_EQ(leaves.size(), 2u);
  EXPECT_EQ(to_source(*leaves[0].node), "(a + 1) * 2 > b");
  EXPECT_EQ(to_source(*leaves[1].node), "c < d");
}

TEST(Parser, EmptyForConditionIsAlwaysTrue) {
  const auto p = parse("int main(){ for (;;) { break; } }");
  const auto& s = p.functions[0].body[0];
  ASSERT_EQ(s.kind, Stmt::Kind::For);
  ASSERT_EQ(s.cond.kind, CondExpr::Kind::Leaf);
  EXPECT_EQ(to_source(s.cond), "1 != 0");
}

TEST(Parser, MultipleFilesShareOneProgram) {
  const auto p = parse_programs({{"a.mc", "int main(){ f(); return 0; }"}, {"b.mc", "void f(){ x = 1; }"}});
  ASSERT_EQ(p.functions.size(), 2u);
  EXPECT_EQ(p.functions[0].span.file, "a.mc");
  EXPECT_EQ(p.functions[1].span.file, "b.mc");
  EXPECT_LT(p.functions[0].id, p.functions[1].id);
  EXPECT_THROW(parse_programs({{"a.mc", "void f(){ }"}, {"b.mc", "void f(){ }"}}), ParseError);
}

TEST(Conditions, SingleLeafIsIdentity) {
  const auto p = parse("int main(){ if (x == 0) { y = 1; } }");
  const auto leaves = decompose_condition(p.functions[0].body[0].cond);
  ASSERT_EQ(leaves.size(), 1u);
  EXPECT_FALSE(leaves[0].negated);
  EXPECT_EQ(to_source(*leaves[0].node), "x == 0");
}

TEST(Conditions, NotIsPushedToLeaves) {
  const auto p = parse("int main(){ if (!(p == NULL) && (n <= 0)) { y = 1; } }");
  const auto leaves = decompose_condition(p.functions[0].body[0].cond);
  ASSERT_EQ(leaves.size(), 2u);
  EXPECT_EQ(to_source(*leaves[0].node), "p == NULL");
  EXPECT_TRUE(leaves[0].negated);
  EXPECT_EQ(to_source(*leaves[1].node), "n <= 0");
  EXPECT_FALSE(leaves[1].negated);
}

TEST(Conditions, DeMorganOnNegatedConjunction) {
  const auto p = parse("int main(){ if (!(a < 1 && !(b > 2))) { y = 1; } }");
  const auto& c = p.functions[0].body[0].cond;
  const auto nnf = negation_normal_form(c);
  EXPECT_EQ(nnf.kind, CondExpr::Kind::Or);
  const auto leaves = decompose_condition(c);
  ASSERT_EQ(leaves.size(), 2u);
  EXPECT_TRUE(leaves[0].negated);
  EXPECT_FALSE(leaves[1].negated);
  EXPECT_TRUE(nnf.children[0].negated);
  EXPECT_FALSE(nnf.children[1].negated);
}

TEST(Conditions, LeafCountIsPreservedOnCorpus) {
  for (const auto& name : support::corpus_names()) {
    const auto p = parse_program(support::read_text(support::corpus_path(name)), name);
    for (const auto& fn : p.functions) {
      for_each_stmt(fn.body, [&](const Stmt& s) {
        if (has_cond(s)) EXPECT_EQ(decompose_condition(s.cond).size(), static_cast<std::size_t>(count_leaves(s.cond)));
      });
    }
  }
}

TEST(Spans, EveryStatementAndLeafHasTheInputFile) {
  for (const auto& name : support::corpus_names()) {
    const std::string path = support::corpus_path(name);
    const auto p = parse_program(support::read_text(path), path);
    for (const auto& fn : p.functions) {
      EXPECT_EQ(fn.span.file, path);
      for_each_stmt(fn.body, [&](const Stmt& s) {
        EXPECT_EQ(s.span.file, path);
        EXPECT_GE(s.span.line_start, 1);
        EXPECT_LE(s.span.line_start, s.span.line_end);
        if (s.span.line_start == s.span.line_end) EXPECT_LE(s.span.col_start, s.span.col_end);
        if (has_cond(s)) {
          for (const auto& leaf : decompose_condition(s.cond)) EXPECT_EQ(leaf.node->span.file, path);
        }
      });
    }
  }
}

TEST(Spans, PointAtSourceText) {
  const auto p = parse("int main() {\n  int a = 1;\n  if (a > 1 ||\n      a < 0) {\n    a = 2;\n  }\n}\n");
  const auto& body = p.functions[0].body;
  EXPECT_EQ(body[0].span.line_start, 2);
  EXPECT_EQ(body[0].span.col_start, 3);
  EXPECT_EQ(body[1].span.line_start, 3);
  EXPECT_EQ(body[1].span.line_end, 6);
  const auto leaves = decompose_condition(body[1].cond);
  EXPECT_EQ(leaves[0].node->span.line_start, 3);
  EXPECT_EQ(leaves[0].node->span.col_start, 7);
  EXPECT_EQ(leaves[1].node->span.line_start, 4);
  EXPECT_EQ(leaves[1].node->span.col_start, 7);
  EXPECT_EQ(body[1].body[0].span.line_start, 5);
}

TEST(RoundTrip, CorpusProgramsReparseToSameStructure) {
  for (const auto& name : support::corpus_names()) {
    const auto p = parse_program(support::read_text(support::corpus_path(name)), name);
    const auto printed = to_source(p);
    const auto q = parse_program(printed, name);
    EXPECT_EQ(structure_of(p), structure_of(q)) << name;
    EXPECT_EQ(to_source(q), printed) << name;
  }
}

TEST(RoundTrip, GeneratedProgramsReparseToSameStructure) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    support::GenOptions opt;
    opt.seed = seed;
    opt.functions = 3;
    opt.statements = 6;
    const auto src = support::generate_program(opt);
    const auto p = parse_program(src, "gen.mc");
    const auto q = parse_program(to_source(p), "gen.mc");
    ASSERT_EQ(structure_of(p), structure_of(q)) << "seed " << seed << "\n" << src;
  }
}

TEST(Parser, IsDeterministic) {
  const std::string src = support::read_text(support::corpus_path("ledger"));
  const auto a = parse_program(src, "ledger.mc");
  const auto b = parse_program(src, "ledger.mc");
  EXPECT_EQ(structure_of(a), structure_of(b));
  EXPECT_EQ(a.node_count, b.node_count);
}

TEST(Lexer, CommentsAndTokens) {
  const auto toks = tokenize("int x = 1; // trailing\n// whole line\nx = x + 2;", "t.mc");
  std::size_t idents = 0;
  for (const auto& t : toks) idents += t.kind == Tok::Ident;
  EXPECT_EQ(idents, 3u);
  EXPECT_EQ(toks.back().kind, Tok::End);
}
