#pragma once

#include <vector>

#include "elan/microc/ast.hpp"

namespace elan::microc {

/// One simple condition of a compound condition, as evaluated at run time.
struct ConditionLeaf {
  const CondExpr* node = nullptr;  // the Leaf node in the original tree
  bool negated = false;
};

/// Pushes every Not down to the leaves (De Morgan), producing a tree of
/// And/Or/Leaf where each leaf carries its own negation flag. Leaf order and
/// short-circuit evaluation order are unchanged.
inline CondExpr negation_normal_form(const CondExpr& c, bool negate = false) {
  switch (c.kind) {
    case CondExpr::Kind::Leaf: {
      CondExpr leaf = c;
      leaf.negated = c.negated != negate;
      return leaf;
    }
    case CondExpr::Kind::Not:
      return negation_normal_form(c.children.front(), !negate);
    case CondExpr::Kind::And:
    case CondExpr::Kind::Or: {
      CondExpr node;
      node.id = c.id;
      node.span = c.span;
      const bool is_and = c.kind == CondExpr::Kind::And;
      node.kind = (is_and != negate) ? CondExpr::Kind::And : CondExpr::Kind::Or;
      node.children.push_back(negation_normal_form(c.children[0], negate));
      node.children.push_back(negation_normal_form(c.children[1], negate));
      return node;
    }
  }
  return c;
}

namespace detail {
inline void collect_leaves(const CondExpr& c, bool negate, std::vector<ConditionLeaf>& out) {
  switch (c.kind) {
    case CondExpr::Kind::Leaf:
      out.push_back({&c, c.negated != negate});
      return;
    case CondExpr::Kind::Not:
      collect_leaves(c.children.front(), !negate, out);
      return;
    case CondExpr::Kind::And:
    case CondExpr::Kind::Or:
      for (const auto& child : c.children) collect_leaves(child, negate, out);
      return;
  }
}
}  // namespace detail

/// Leaves in left-to-right evaluation order, negations pushed down.
/// The returned pointers refer into `c`.
inline std::vector<ConditionLeaf> decompose_condition(const CondExpr& c) {
  std::vector<ConditionLeaf> out;
  detail::collect_leaves(c, false, out);
  return out;
}

}  // namespace elan::microc
