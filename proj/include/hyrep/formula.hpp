#ifndef HYREP_FORMULA_HPP
#define HYREP_FORMULA_HPP

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hyrep/errors.hpp"

namespace hyrep {

enum class Quantifier { Exists, Forall };

inline const char* quantifier_keyword(Quantifier q) {
  return q == Quantifier::Exists ? "exists" : "forall";
}

// Quantifier-free body over trace-indexed atoms. The core operators are
// {true, atom, !, |, U, X}; the rest desugar onto them before evaluation.
enum class NodeKind {
  True,
  Atom,
  Not,
  Or,
  And,
  Implies,
  Iff,
  Next,
  Until,
  Eventually,
  Globally,
};

struct LtlNode;
using LtlBody = std::shared_ptr<const LtlNode>;

struct LtlNode {
  NodeKind kind;
  std::string prop;  // Atom only
  std::string var;   // Atom only
  LtlBody lhs;       // unary operand / left operand
  LtlBody rhs;       // right operand
};

inline LtlBody mk_true() {
  return std::make_shared<LtlNode>(LtlNode{NodeKind::True, "", "", nullptr, nullptr});
}
inline LtlBody mk_atom(std::string prop, std::string var) {
  return std::make_shared<LtlNode>(
      LtlNode{NodeKind::Atom, std::move(prop), std::move(var), nullptr, nullptr});
}
inline LtlBody mk_unary(NodeKind k, LtlBody a) {
  return std::make_shared<LtlNode>(LtlNode{k, "", "", std::move(a), nullptr});
}
inline LtlBody mk_binary(NodeKind k, LtlBody a, LtlBody b) {
  return std::make_shared<LtlNode>(LtlNode{k, "", "", std::move(a), std::move(b)});
}
inline LtlBody mk_not(LtlBody a) { return mk_unary(NodeKind::Not, std::move(a)); }
inline LtlBody mk_or(LtlBody a, LtlBody b) { return mk_binary(NodeKind::Or, std::move(a), std::move(b)); }
inline LtlBody mk_and(LtlBody a, LtlBody b) { return mk_binary(NodeKind::And, std::move(a), std::move(b)); }
inline LtlBody mk_implies(LtlBody a, LtlBody b) { return mk_binary(NodeKind::Implies, std::move(a), std::move(b)); }
inline LtlBody mk_iff(LtlBody a, LtlBody b) { return mk_binary(NodeKind::Iff, std::move(a), std::move(b)); }
inline LtlBody mk_next(LtlBody a) { return mk_unary(NodeKind::Next, std::move(a)); }
inline LtlBody mk_until(LtlBody a, LtlBody b) { return mk_binary(NodeKind::Until, std::move(a), std::move(b)); }
inline LtlBody mk_eventually(LtlBody a) { return mk_unary(NodeKind::Eventually, std::move(a)); }
inline LtlBody mk_globally(LtlBody a) { return mk_unary(NodeKind::Globally, std::move(a)); }
// "false" has no node of its own; it is !true.
inline LtlBody mk_false() { return mk_not(mk_true()); }

inline LtlBody mk_next_n(LtlBody a, size_t n) {
  for (size_t i = 0; i < n; ++i) a = mk_next(std::move(a));
  return a;
}

inline LtlBody mk_and_all(std::vector<LtlBody> parts) {
  if (parts.empty()) return mk_true();
  LtlBody acc = parts.back();
  for (size_t i = parts.size() - 1; i-- > 0;) acc = mk_and(parts[i], acc);
  return acc;
}

inline LtlBody mk_or_all(std::vector<LtlBody> parts) {
  if (parts.empty()) return mk_false();
  LtlBody acc = parts.back();
  for (size_t i = parts.size() - 1; i-- > 0;) acc = mk_or(parts[i], acc);
  return acc;
}

/// Rewrites derived operators onto the core set. Total; core nodes are kept.
inline LtlBody desugar(const LtlBody& b) {
  switch (b->kind) {
    case NodeKind::True:
    case NodeKind::Atom:
      return b;
    case NodeKind::Not:
      return mk_not(desugar(b->lhs));
    case NodeKind::Or:
      return mk_or(desugar(b->lhs), desugar(b->rhs));
    case NodeKind::Next:
      return mk_next(desugar(b->lhs));
    case NodeKind::Until:
      return mk_until(desugar(b->lhs), desugar(b->rhs));
    case NodeKind::And:
      // a & b == !(!a | !b)
      return mk_not(mk_or(mk_not(desugar(b->lhs)), mk_not(desugar(b->rhs))));
    case NodeKind::Implies:
      return mk_or(mk_not(desugar(b->lhs)), desugar(b->rhs));
    case NodeKind::Iff: {
      LtlBody l = desugar(b->lhs);
      LtlBody r = desugar(b->rhs);
      // (l & r) | (!l & !r)
      LtlBody both = mk_not(mk_or(mk_not(l), mk_not(r)));
      LtlBody neither = mk_not(mk_or(l, r));
      return mk_or(both, neither);
    }
    case NodeKind::Eventually:
      return mk_until(mk_true(), desugar(b->lhs));
    case NodeKind::Globally:
      // G a == !F !a
      return mk_not(mk_until(mk_true(), mk_not(desugar(b->lhs))));
  }
  throw Error(ErrorCode::BadInput, "unknown node kind");
}

namespace detail {

// Negation pushed inward as far as the core operators allow. Until gets the
// release-shaped expansion  !(x U y) == (!y U !(x|y)) | !(true U y).
inline LtlBody negate_core(const LtlBody& b) {
  switch (b->kind) {
    case NodeKind::True:
      return mk_not(b);
    case NodeKind::Atom:
      return mk_not(b);
    case NodeKind::Not:
      return b->lhs;  // !!a == a
    case NodeKind::Or:
      return mk_not(b);
    case NodeKind::Next:
      return mk_next(negate_core(b->lhs));
    case NodeKind::Until: {
      const LtlBody& x = b->lhs;
      const LtlBody& y = b->rhs;
      LtlBody hold = mk_until(negate_core(y), mk_not(mk_or(x, y)));
      LtlBody never = mk_not(mk_until(mk_true(), y));
      return mk_or(hold, never);
    }
    default:
      throw Error(ErrorCode::BadInput, "negate_core expects a desugared body");
  }
}

}  // namespace detail

inline LtlBody negate_body(const LtlBody& b) { return detail::negate_core(desugar(b)); }

inline bool structurally_equal(const LtlBody& a, const LtlBody& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case NodeKind::True:
      return true;
    case NodeKind::Atom:
      return a->prop == b->prop && a->var == b->var;
    default:
      if ((a->lhs == nullptr) != (b->lhs == nullptr)) return false;
      if ((a->rhs == nullptr) != (b->rhs == nullptr)) return false;
      if (a->lhs && !structurally_equal(a->lhs, b->lhs)) return false;
      if (a->rhs && !structurally_equal(a->rhs, b->rhs)) return false;
      return true;
  }
}

inline void collect_body_vars(const LtlBody& b, std::set<std::string>& out) {
  if (b->kind == NodeKind::Atom) out.insert(b->var);
  if (b->lhs) collect_body_vars(b->lhs, out);
  if (b->rhs) collect_body_vars(b->rhs, out);
}

inline void collect_body_props(const LtlBody& b, std::set<std::string>& out) {
  if (b->kind == NodeKind::Atom) out.insert(b->prop);
  if (b->lhs) collect_body_props(b->lhs, out);
  if (b->rhs) collect_body_props(b->rhs, out);
}

// Printing. Precedence: ! > X,F,G > U > & > | > -> > <->, U/->/<-> right
// associative. "false" prints for !true.
namespace detail {

inline int precedence(NodeKind k) {
  switch (k) {
    case NodeKind::True:
    case NodeKind::Atom:
      return 8;
    case NodeKind::Not:
      return 7;
    case NodeKind::Next:
    case NodeKind::Eventually:
    case NodeKind::Globally:
      return 6;
    case NodeKind::Until:
      return 5;
    case NodeKind::And:
      return 4;
    case NodeKind::Or:
      return 3;
    case NodeKind::Implies:
      return 2;
    case NodeKind::Iff:
      return 1;
  }
  return 0;
}

inline void print_body(const LtlBody& b, int parent_prec, std::string& out) {
  int prec = precedence(b->kind);
  switch (b->kind) {
    case NodeKind::True:
      out += "true";
      return;
    case NodeKind::Atom:
      out += b->prop;
      out += '[';
      out += b->var;
      out += ']';
      return;
    case NodeKind::Not:
      if (b->lhs->kind == NodeKind::True) {
        out += "false";
        return;
      }
      out += '!';
      print_body(b->lhs, prec, out);
      return;
    case NodeKind::Next:
    case NodeKind::Eventually:
    case NodeKind::Globally: {
      out += b->kind == NodeKind::Next ? 'X' : (b->kind == NodeKind::Eventually ? 'F' : 'G');
      out += ' ';
      print_body(b->lhs, prec, out);
      return;
    }
    default:
      break;
  }
  const char* op = nullptr;
  switch (b->kind) {
    case NodeKind::Until: op = " U "; break;
    case NodeKind::And: op = " & "; break;
    case NodeKind::Or: op = " | "; break;
    case NodeKind::Implies: op = " -> "; break;
    case NodeKind::Iff: op = " <-> "; break;
    default: break;
  }
  bool parens = prec < parent_prec;
  if (parens) out += '(';
  // Right-associative chains print without parens on the right operand; the
  // left operand needs strictly higher precedence.
  print_body(b->lhs, prec + 1, out);
  out += op;
  print_body(b->rhs, prec, out);
  if (parens) out += ')';
}

}  // namespace detail

inline std::string to_string(const LtlBody& b) {
  std::string out;
  detail::print_body(b, 0, out);
  return out;
}

struct HyperFormula {
  std::vector<std::pair<Quantifier, std::string>> prefix;
  LtlBody body;
};

/// Checks closedness: nonempty prefix, pairwise distinct variables, and every
/// body variable bound by the prefix.
inline void validate_formula(const HyperFormula& f) {
  if (f.prefix.empty())
    throw Error(ErrorCode::BadInput, "sentence requires a nonempty quantifier prefix");
  std::set<std::string> bound;
  for (const auto& [q, v] : f.prefix) {
    (void)q;
    if (!bound.insert(v).second)
      throw Error(ErrorCode::DuplicateVariable, "trace variable '" + v + "' quantified twice");
  }
  std::set<std::string> used;
  collect_body_vars(f.body, used);
  for (const auto& v : used) {
    if (!bound.count(v))
      throw Error(ErrorCode::UnboundVariable, "trace variable '" + v + "' is not quantified");
  }
}

inline std::string to_string(const HyperFormula& f) {
  std::string out;
  for (const auto& [q, v] : f.prefix) {
    out += quantifier_keyword(q);
    out += ' ';
    out += v;
    out += ". ";
  }
  out += to_string(f.body);
  return out;
}

inline std::string prefix_string(const HyperFormula& f) {
  std::string s;
  for (const auto& [q, v] : f.prefix) {
    (void)v;
    s += q == Quantifier::Exists ? 'E' : 'A';
  }
  return s;
}

// Quantifier-prefix fragments, most specific tag first. EA_k / AE_k carry the
// alternation count; by convention EA_k(0) is E* and AE_k(0) is A*.
enum class FragmentTag {
  EStar,
  AStar,
  ELe1AStar,   // E A+  (at most one leading exists)
  AEStar,      // A E+  (exactly one leading forall)
  EStarAStar,  // E+ A+
  AStarEStar,  // A+ E+
  EA_k,        // leading E, k >= 2 alternations
  AE_k,        // leading A, k >= 2 alternations
  General,
};

struct FragmentClass {
  FragmentTag tag = FragmentTag::General;
  int alternations = 0;
  Quantifier leading = Quantifier::Exists;

  bool exists_only() const { return tag == FragmentTag::EStar; }
  bool forall_only() const { return tag == FragmentTag::AStar; }
  bool single_trace_fragment() const {
    return tag == FragmentTag::AStar || tag == FragmentTag::ELe1AStar;
  }
};

inline FragmentClass classify_fragment(const HyperFormula& f) {
  validate_formula(f);
  FragmentClass fc;
  fc.leading = f.prefix.front().first;
  int alternations = 0;
  for (size_t i = 1; i < f.prefix.size(); ++i)
    if (f.prefix[i].first != f.prefix[i - 1].first) ++alternations;
  fc.alternations = alternations;

  size_t lead_run = 1;
  while (lead_run < f.prefix.size() && f.prefix[lead_run].first == fc.leading) ++lead_run;

  if (alternations == 0) {
    fc.tag = fc.leading == Quantifier::Exists ? FragmentTag::EStar : FragmentTag::AStar;
  } else if (alternations == 1) {
    if (fc.leading == Quantifier::Exists)
      fc.tag = lead_run == 1 ? FragmentTag::ELe1AStar : FragmentTag::EStarAStar;
    else
      fc.tag = lead_run == 1 ? FragmentTag::AEStar : FragmentTag::AStarEStar;
  } else {
    fc.tag = fc.leading == Quantifier::Exists ? FragmentTag::EA_k : FragmentTag::AE_k;
  }
  return fc;
}

inline const char* fragment_tag_name(FragmentTag t) {
  switch (t) {
    case FragmentTag::EStar: return "EStar";
    case FragmentTag::AStar: return "AStar";
    case FragmentTag::ELe1AStar: return "ELe1AStar";
    case FragmentTag::AEStar: return "AEStar";
    case FragmentTag::EStarAStar: return "EStarAStar";
    case FragmentTag::AStarEStar: return "AStarEStar";
    case FragmentTag::EA_k: return "EA_k";
    case FragmentTag::AE_k: return "AE_k";
    case FragmentTag::General: return "General";
  }
  return "?";
}

/// Display notation; alternation-free prints EStar/AStar, everything else the
/// generic EA_k(k)/AE_k(k) form.
inline std::string fragment_notation(const FragmentClass& fc) {
  if (fc.alternations == 0)
    return fc.leading == Quantifier::Exists ? "EStar" : "AStar";
  std::string s = fc.leading == Quantifier::Exists ? "EA_k(" : "AE_k(";
  s += std::to_string(fc.alternations);
  s += ')';
  return s;
}

}  // namespace hyrep

#endif
