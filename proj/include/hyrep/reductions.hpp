#ifndef HYREP_REDUCTIONS_HPP
#define HYREP_REDUCTIONS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hyrep/errors.hpp"
#include "hyrep/formula.hpp"
#include "hyrep/kripke.hpp"

namespace hyrep {

// ---------------------------------------------------------------------------
// instances

struct HornLit {
  enum class Kind { Top, Bot, Var } kind = Kind::Top;
  int var = -1;  // 1-based when kind == Var

  static HornLit top() { return {Kind::Top, -1}; }
  static HornLit bot() { return {Kind::Bot, -1}; }
  static HornLit v(int i) { return {Kind::Var, i}; }
  bool operator==(const HornLit&) const = default;
};

/// Clause of two negative and one positive literal: (!neg1 | !neg2 | pos).
struct HornClause {
  HornLit neg1, neg2, pos;
};

struct HornInstance {
  int nvars = 0;
  std::vector<HornClause> clauses;
};

/// Exactly three signed literals per clause, variables 1-based.
struct CnfInstance {
  int nvars = 0;
  std::vector<std::array<int, 3>> clauses;
};

struct QbfBlock {
  bool exists = true;
  std::vector<int> vars;
};

/// Prenex QBF with alternating blocks over a CNF matrix.
struct QbfInstance {
  int nvars = 0;
  std::vector<QbfBlock> blocks;
  std::vector<std::vector<int>> clauses;
};

// ---------------------------------------------------------------------------
// brute-force oracles (intentionally naive; these are the test ground truth)

inline bool solve_horn_brute(const HornInstance& h) {
  if (h.nvars > 20) throw Error(ErrorCode::TooLarge, "brute Horn solver capped at 20 variables");
  auto lit_true = [](const HornLit& l, uint32_t m) {
    switch (l.kind) {
      case HornLit::Kind::Top: return true;
      case HornLit::Kind::Bot: return false;
      default: return (m >> (l.var - 1) & 1u) != 0;
    }
  };
  for (uint32_t m = 0; m < (1u << h.nvars); ++m) {
    bool ok = true;
    for (const auto& c : h.clauses) {
      if (!(!lit_true(c.neg1, m) || !lit_true(c.neg2, m) || lit_true(c.pos, m))) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return h.clauses.empty();
}

inline bool solve_3sat_brute(const CnfInstance& c) {
  if (c.nvars > 20) throw Error(ErrorCode::TooLarge, "brute 3SAT solver capped at 20 variables");
  for (uint32_t m = 0; m < (1u << c.nvars); ++m) {
    bool ok = true;
    for (const auto& cl : c.clauses) {
      bool sat = false;
      for (int lit : cl) {
        int v = lit > 0 ? lit : -lit;
        bool val = (m >> (v - 1) & 1u) != 0;
        if (lit > 0 ? val : !val) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  }
  return c.clauses.empty();
}

inline bool solve_qbf_brute(const QbfInstance& q) {
  if (q.nvars > 12) throw Error(ErrorCode::TooLarge, "brute QBF solver capped at 12 variables");
  std::vector<std::pair<bool, int>> order;  // (exists, var)
  for (const auto& b : q.blocks)
    for (int v : b.vars) order.emplace_back(b.exists, v);
  std::vector<bool> val(static_cast<size_t>(q.nvars) + 1, false);
  auto matrix = [&]() {
    for (const auto& cl : q.clauses) {
      bool sat = false;
      for (int lit : cl) {
        int v = lit > 0 ? lit : -lit;
        if (lit > 0 ? val[static_cast<size_t>(v)] : !val[static_cast<size_t>(v)]) {
          sat = true;
          break;
        }
      }
      if (!sat) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, size_t i) -> bool {
    if (i == order.size()) return matrix();
    auto [exists, v] = order[i];
    for (bool b : {false, true}) {
      val[static_cast<size_t>(v)] = b;
      bool r = self(self, i + 1);
      if (exists && r) return true;
      if (!exists && !r) return false;
    }
    return !exists;
  };
  return rec(rec, 0);
}

// ---------------------------------------------------------------------------
// shared construction helpers

struct Reduction {
  KripkeStructure structure;
  HyperFormula formula;
  std::map<std::string, long> stats;
};

namespace redet {

inline int bit_width(size_t upper) {  // smallest w with 2^w > upper values? no: 2^w >= count
  int w = 0;
  while ((size_t{1} << w) < upper) ++w;
  return w;
}

inline bool bit(size_t value, int d) { return (value >> d & 1u) != 0; }

/// The counter-increment pattern shared by the clause preservation
/// constraints:  (a & !b) U (!a & b & X((a <-> b) U h_x))  [+ optional
/// wraparound disjunct  (a & !b) U h_x ].  Evaluated at the first bit
/// position; bits are little-endian and h marks the position after them.
inline LtlBody counter_increment(const std::string& cprop, const std::string& hprop,
                                 const std::string& x, const std::string& y, bool wraparound) {
  LtlBody a = mk_atom(cprop, x);
  LtlBody b = mk_atom(cprop, y);
  LtlBody h = mk_atom(hprop, x);
  LtlBody flip = mk_and(mk_not(a), mk_and(b, mk_next(mk_until(mk_iff(a, b), h))));
  LtlBody incr = mk_until(mk_and(a, mk_not(b)), flip);
  if (!wraparound) return incr;
  LtlBody wrap = mk_until(mk_and(a, mk_not(b)), h);
  return mk_or(incr, wrap);
}

}  // namespace redet

// ---------------------------------------------------------------------------
// Horn -> (tree, AE* formula)
//
// One branch per clause. Branch positions 1..V carry the binary codes of the
// two negative literals (props neg1/neg2) and the positive literal (prop
// pos), little-endian; code 0 is reserved for the true-constant and the
// all-ones code for the false-constant. Branches with equal positive literal
// form a group numbered by c-bits, closed into a cycle by the e flag, so the
// formula can walk entire groups with one existential witness. u1/u2 flag
// negative literals whose positive-literal group is empty. h marks the end of
// the encoding region.
//
// The formula asserts, for every kept branch: its group neighbours are kept,
// one of its negative literals is either flagged underivable or matched by a
// kept branch's positive literal, and some kept branch carries the
// false-constant code. A nonempty substructure closed under these rules
// exists iff the false constant cannot be derived, i.e. iff the instance is
// satisfiable; the theorem-level round-trip tests are the authority for this
// encoding.

inline Reduction reduce_horn(const HornInstance& h) {
  if (h.nvars > 4096)
    throw Error(ErrorCode::TooManyVariables, "horn reduction capped at 4096 variables");
  Reduction r;
  // tautologies (positive constant head, or a negated false constant) drop out
  std::vector<HornClause> clauses;
  for (const auto& c : h.clauses) {
    if (c.pos.kind == HornLit::Kind::Top) continue;
    if (c.neg1.kind == HornLit::Kind::Bot || c.neg2.kind == HornLit::Kind::Bot) continue;
    clauses.push_back(c);
  }
  bool has_bot_clause = false;
  for (const auto& c : clauses)
    if (c.pos.kind == HornLit::Kind::Bot) has_bot_clause = true;

  const int V = std::max(redet::bit_width(static_cast<size_t>(h.nvars) + 2), 1);
  const size_t bot_code = (size_t{1} << V) - 1;
  auto code_of = [&](const HornLit& l) -> size_t {
    switch (l.kind) {
      case HornLit::Kind::Top: return 0;
      case HornLit::Kind::Bot: return bot_code;
      default: return static_cast<size_t>(l.var);
    }
  };

  // group clauses by positive-literal code
  std::vector<size_t> idx(clauses.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return code_of(clauses[a].pos) < code_of(clauses[b].pos);
  });
  std::vector<bool> group_end(clauses.size(), false);
  std::vector<size_t> gidx(clauses.size(), 0);
  size_t max_group = 1;
  for (size_t i = 0; i < idx.size();) {
    size_t j = i;
    while (j < idx.size() && code_of(clauses[idx[j]].pos) == code_of(clauses[idx[i]].pos)) ++j;
    for (size_t l = i; l < j; ++l) gidx[idx[l]] = l - i;
    if (j > i) group_end[idx[j - 1]] = true;
    max_group = std::max(max_group, j - i);
    i = j;
  }
  const int W = redet::bit_width(max_group);
  const int HP = std::max(V, W) + 1;  // position of h

  // which variables have an empty positive-literal group
  std::vector<bool> has_group(static_cast<size_t>(h.nvars) + 1, false);
  for (const auto& c : clauses)
    if (c.pos.kind == HornLit::Kind::Var) has_group[static_cast<size_t>(c.pos.var)] = true;
  auto underivable_flag = [&](const HornLit& l) {
    return l.kind == HornLit::Kind::Var && !has_group[static_cast<size_t>(l.var)];
  };

  KripkeStructure& k = r.structure;
  k.add_state("init");
  k.set_init("init");
  for (size_t bi = 0; bi < idx.size(); ++bi) {
    const HornClause& c = clauses[idx[bi]];
    std::string prev = "init";
    for (int p = 1; p <= HP + 1; ++p) {
      Letter lab;
      if (p <= V) {
        if (redet::bit(code_of(c.neg1), p - 1)) lab.insert("neg1");
        if (redet::bit(code_of(c.neg2), p - 1)) lab.insert("neg2");
        if (redet::bit(code_of(c.pos), p - 1)) lab.insert("pos");
      }
      if (p <= W && redet::bit(gidx[idx[bi]], p - 1)) lab.insert("c");
      if (p == 1) {
        if (group_end[idx[bi]]) lab.insert("e");
        if (underivable_flag(c.neg1)) lab.insert("u1");
        if (underivable_flag(c.neg2)) lab.insert("u2");
      }
      if (p == HP) lab.insert("h");
      std::string id = "b" + std::to_string(bi) + "_d" + std::to_string(p);
      k.add_state(id, std::move(lab));
      k.add_transition(prev, id);
      prev = id;
    }
    k.add_transition(prev, prev);  // terminal self-loop
  }
  if (clauses.empty()) {
    k.add_state("b0_d1");
    k.add_transition("init", "b0_d1");
    k.add_transition("b0_d1", "b0_d1");
  }

  HyperFormula& f = r.formula;
  f.prefix = {{Quantifier::Forall, "p1"},
              {Quantifier::Exists, "p2"},
              {Quantifier::Exists, "p3"},
              {Quantifier::Exists, "p4"}};
  if (!has_bot_clause || clauses.empty()) {
    // no false-constant head anywhere: satisfiable outright
    f.body = mk_true();
    r.stats = {{"clauses", static_cast<long>(clauses.size())},
               {"variables", h.nvars},
               {"code_bits", V},
               {"trivial", 1}};
    return r;
  }

  LtlBody samepos = mk_globally(mk_iff(mk_atom("pos", "p1"), mk_atom("pos", "p2")));
  LtlBody incr = redet::counter_increment("c", "h", "p1", "p2", false);
  LtlBody group_cycle = mk_or(
      mk_and(mk_not(mk_next(mk_atom("e", "p1"))), mk_next(incr)),
      mk_and(mk_next(mk_atom("e", "p1")), mk_globally(mk_not(mk_atom("c", "p2")))));
  LtlBody conj_group = mk_and(samepos, group_cycle);

  LtlBody body_wit = mk_or_all({
      mk_next(mk_atom("u1", "p1")),
      mk_next(mk_atom("u2", "p1")),
      mk_globally(mk_iff(mk_atom("pos", "p3"), mk_atom("neg1", "p1"))),
      mk_globally(mk_iff(mk_atom("pos", "p3"), mk_atom("neg2", "p1"))),
  });

  std::vector<LtlBody> anchor_bits;
  for (int d = 1; d <= V; ++d) anchor_bits.push_back(mk_next_n(mk_atom("pos", "p4"), static_cast<size_t>(d)));
  LtlBody anchor = mk_and_all(std::move(anchor_bits));

  f.body = mk_and(conj_group, mk_and(body_wit, anchor));
  r.stats = {{"clauses", static_cast<long>(clauses.size())},
             {"variables", h.nvars},
             {"code_bits", V},
             {"group_bits", W},
             {"branch_length", HP + 1}};
  return r;
}

// ---------------------------------------------------------------------------
// 3SAT -> (tree, forall forall exists formula)
//
// One branch per clause: c-bits numbering the clause (count padded to a power
// of two so the increment closes into a full cycle), terminated by h, then one
// sub-branch per literal with pos/neg at the depth equal to the variable
// index. Kept literal sub-branches spell a consistent assignment; counter
// closure keeps every clause; totality keeps at least one literal per clause.

inline Reduction reduce_3sat(const CnfInstance& cnf) {
  for (const auto& cl : cnf.clauses)
    for (int lit : cl)
      if (lit == 0 || std::abs(lit) > cnf.nvars)
        throw Error(ErrorCode::BadInput, "literal out of range");
  Reduction r;
  KripkeStructure& k = r.structure;
  k.add_state("init");
  k.set_init("init");

  const size_t m0 = cnf.clauses.size();
  const int n = cnf.nvars;
  const int W = m0 <= 1 ? 0 : redet::bit_width(m0);
  const size_t M = size_t{1} << W;

  for (size_t i = 0; i < M && m0 > 0; ++i) {
    const auto& cl = cnf.clauses[std::min(i, m0 - 1)];  // padding repeats the last clause
    std::string prev = "init";
    for (int d = 1; d <= W; ++d) {
      Letter lab;
      if (redet::bit(i, d - 1)) lab.insert("c");
      std::string id = "c" + std::to_string(i) + "_k" + std::to_string(d);
      k.add_state(id, std::move(lab));
      k.add_transition(prev, id);
      prev = id;
    }
    std::string hub = "c" + std::to_string(i) + "_h";
    k.add_state(hub, Letter{"h"});
    k.add_transition(prev, hub);
    for (int l = 0; l < 3; ++l) {
      int lit = cl[static_cast<size_t>(l)];
      int v = std::abs(lit);
      std::string p = hub;
      for (int j = 1; j <= n; ++j) {
        Letter lab;
        if (j == v) lab.insert(lit > 0 ? "pos" : "neg");
        std::string id = "c" + std::to_string(i) + "_l" + std::to_string(l) + "_d" + std::to_string(j);
        k.add_state(id, std::move(lab));
        k.add_transition(p, id);
        p = id;
      }
      k.add_transition(p, p);
    }
  }
  if (m0 == 0) {
    k.add_state("c0_h", Letter{"h"});
    k.add_transition("init", "c0_h");
    k.add_transition("c0_h", "c0_h");
  }

  // phi_map: consistency between kept literal branches plus counter-successor
  // closure preserving every clause.
  HyperFormula& f = r.formula;
  f.prefix = {{Quantifier::Forall, "p1"},
              {Quantifier::Forall, "p2"},
              {Quantifier::Exists, "p3"}};
  if (m0 == 0) {
    f.body = mk_true();
  } else {
    LtlBody consistency =
        mk_globally(mk_or(mk_not(mk_atom("pos", "p1")), mk_not(mk_atom("neg", "p2"))));
    LtlBody counter = mk_next(redet::counter_increment("c", "h", "p2", "p3", true));
    f.body = mk_and(consistency, counter);
  }
  r.stats = {{"clauses", static_cast<long>(m0)},
             {"clauses_padded", static_cast<long>(m0 == 0 ? 0 : M)},
             {"variables", n},
             {"counter_bits", W}};
  return r;
}

// ---------------------------------------------------------------------------
// QBF -> (acyclic structure, formula with one trace quantifier per remaining
// block)
//
// A diamond chain assigns every variable (position 2j carries q^j with p or
// pb); one path per clause mirrors the literal polarities at the same
// positions. The outermost existential block is resolved by the repair (its
// diamonds may be pruned); all later blocks and all clauses are preserved via
// counter constraints: clause indices use c-bits after the q-section, and the
// non-outermost variable valuations themselves form the counter for the
// diamond part.

inline Reduction reduce_qbf(const QbfInstance& q) {
  if (q.blocks.empty() || !q.blocks.front().exists)
    throw Error(ErrorCode::UnsupportedShape, "reduction expects a leading existential block");
  for (size_t b = 1; b < q.blocks.size(); ++b) {
    if (q.blocks[b].exists == q.blocks[b - 1].exists)
      throw Error(ErrorCode::UnsupportedShape, "blocks must alternate");
    if (q.blocks[b].vars.empty() || q.blocks[b - 1].vars.empty())
      throw Error(ErrorCode::UnsupportedShape, "blocks must be nonempty");
  }
  {
    std::vector<bool> seen(static_cast<size_t>(q.nvars) + 1, false);
    size_t count = 0;
    for (const auto& b : q.blocks)
      for (int v : b.vars) {
        if (v < 1 || v > q.nvars || seen[static_cast<size_t>(v)])
          throw Error(ErrorCode::BadInput, "blocks must partition the variables");
        seen[static_cast<size_t>(v)] = true;
        ++count;
      }
    if (count != static_cast<size_t>(q.nvars))
      throw Error(ErrorCode::BadInput, "blocks must partition the variables");
  }

  Reduction r;
  const size_t B = q.blocks.size();
  const int n = q.nvars;

  // chain position (1-based) per variable: block order, variables in block order
  std::vector<int> chain_pos(static_cast<size_t>(n) + 1, 0);
  std::vector<int> var_block(static_cast<size_t>(n) + 1, 0);
  {
    int j = 1;
    for (size_t b = 0; b < B; ++b)
      for (int v : q.blocks[b].vars) {
        chain_pos[static_cast<size_t>(v)] = j++;
        var_block[static_cast<size_t>(v)] = static_cast<int>(b) + 1;
      }
  }
  std::vector<int> block_of_chain(static_cast<size_t>(n) + 1, 0);
  for (int v = 1; v <= n; ++v) block_of_chain[static_cast<size_t>(chain_pos[v])] = var_block[v];

  KripkeStructure& k = r.structure;
  k.add_state("init");
  k.set_init("init");
  // diamond chain
  k.add_state("dh0");
  k.add_transition("init", "dh0");
  for (int j = 1; j <= n; ++j) {
    std::string q_prop = "q" + std::to_string(j);
    k.add_state("d" + std::to_string(j) + "t", Letter{q_prop, "p"});
    k.add_state("d" + std::to_string(j) + "f", Letter{q_prop, "pb"});
    k.add_state("dh" + std::to_string(j));
    k.add_transition("dh" + std::to_string(j - 1), "d" + std::to_string(j) + "t");
    k.add_transition("dh" + std::to_string(j - 1), "d" + std::to_string(j) + "f");
    k.add_transition("d" + std::to_string(j) + "t", "dh" + std::to_string(j));
    k.add_transition("d" + std::to_string(j) + "f", "dh" + std::to_string(j));
  }
  k.add_transition("dh" + std::to_string(n), "dh" + std::to_string(n));

  const size_t m0 = q.clauses.size();
  const int Wc = m0 <= 1 ? 0 : redet::bit_width(m0);
  const size_t M = m0 == 0 ? 0 : size_t{1} << Wc;
  for (size_t i = 0; i < M; ++i) {
    const auto& cl = q.clauses[std::min(i, m0 - 1)];
    std::string head = "k" + std::to_string(i) + "h";
    k.add_state(head, Letter{"c"});
    k.add_transition("init", head);
    std::string prev = head;
    for (int j = 1; j <= n; ++j) {
      Letter lab{"q" + std::to_string(j)};
      for (int lit : cl) {
        if (chain_pos[static_cast<size_t>(std::abs(lit))] == j)
          lab.insert(lit > 0 ? "p" : "pb");
      }
      std::string id = "k" + std::to_string(i) + "q" + std::to_string(j);
      k.add_state(id, std::move(lab));
      k.add_transition(prev, id);
      prev = id;
      if (j < n) {
        std::string sep = "k" + std::to_string(i) + "s" + std::to_string(j);
        k.add_state(sep);
        k.add_transition(prev, sep);
        prev = sep;
      }
    }
    for (int d = 1; d <= Wc; ++d) {
      Letter lab;
      if (redet::bit(i, d - 1)) lab.insert("c");
      std::string id = "k" + std::to_string(i) + "b" + std::to_string(d);
      k.add_state(id, std::move(lab));
      k.add_transition(prev, id);
      prev = id;
    }
    std::string hn = "k" + std::to_string(i) + "e";
    k.add_state(hn, Letter{"h"});
    k.add_transition(prev, hn);
    std::string z = "k" + std::to_string(i) + "z";
    k.add_state(z);
    k.add_transition(hn, z);
    k.add_transition(z, z);
  }

  // formula
  const size_t B_blocks = q.blocks.size();
  const std::string gu = B_blocks >= 2 ? "g2" : "gr";  // first universal variable
  auto diam = [&](const std::string& x) { return mk_not(mk_next(mk_atom("c", x))); };
  auto clausep = [&](const std::string& x) { return mk_next(mk_atom("c", x)); };
  auto val_true = [&](const std::string& x, int j) {
    return mk_next_n(mk_atom("p", x), 2 * static_cast<size_t>(j));
  };
  auto val_false = [&](const std::string& x, int j) {
    return mk_next_n(mk_atom("pb", x), 2 * static_cast<size_t>(j));
  };
  auto val_eq = [&](const std::string& x, const std::string& y, int j) {
    return mk_next_n(mk_iff(mk_atom("p", x), mk_atom("p", y)), 2 * static_cast<size_t>(j));
  };

  // valuation successor over the non-outermost chain positions (little-endian)
  std::vector<int> counter_positions;
  for (int j = 1; j <= n; ++j)
    if (block_of_chain[static_cast<size_t>(j)] != 1) counter_positions.push_back(j);
  LtlBody vsucc;
  if (counter_positions.empty()) {
    vsucc = mk_true();
  } else {
    std::vector<LtlBody> cases;
    for (size_t i = 0; i < counter_positions.size(); ++i) {
      std::vector<LtlBody> parts;
      for (size_t l = 0; l < i; ++l) {
        parts.push_back(val_true(gu, counter_positions[l]));
        parts.push_back(val_false("w", counter_positions[l]));
      }
      parts.push_back(val_false(gu, counter_positions[i]));
      parts.push_back(val_true("w", counter_positions[i]));
      for (size_t l = i + 1; l < counter_positions.size(); ++l)
        parts.push_back(val_eq(gu, "w", counter_positions[l]));
      cases.push_back(mk_and_all(std::move(parts)));
    }
    std::vector<LtlBody> wrap;
    for (int j : counter_positions) {
      wrap.push_back(val_true(gu, j));
      wrap.push_back(val_false("w", j));
    }
    cases.push_back(mk_and_all(std::move(wrap)));
    vsucc = mk_or_all(std::move(cases));
  }
  LtlBody csucc =
      mk_next_n(redet::counter_increment("c", "h", gu, "w", true), 2 * static_cast<size_t>(n) + 1);

  LtlBody pres =
      m0 == 0
          ? mk_and(mk_implies(diam(gu), mk_and(diam("w"), vsucc)), mk_true())
          : mk_and(mk_implies(diam(gu), mk_and(diam("w"), vsucc)),
                   mk_implies(clausep(gu), mk_and(clausep("w"), csucc)));

  auto agree_below = [&](const std::string& x, const std::string& y, int below_block) {
    std::vector<LtlBody> parts;
    for (int j = 1; j <= n; ++j)
      if (block_of_chain[static_cast<size_t>(j)] < below_block) parts.push_back(val_eq(x, y, j));
    return mk_and_all(std::move(parts));
  };
  auto match = [&](const std::string& a, const std::string& c) {
    return mk_eventually(mk_or(mk_and(mk_atom("p", a), mk_atom("p", c)),
                               mk_and(mk_atom("pb", a), mk_atom("pb", c))));
  };

  HyperFormula& f = r.formula;
  std::vector<std::string> game_vars;  // one per block 2..B
  for (size_t b = 2; b <= B; ++b) game_vars.push_back("g" + std::to_string(b));
  std::string reader = B >= 2 ? game_vars.back() : "gr";

  // prefix
  if (B == 1) {
    f.prefix.emplace_back(Quantifier::Forall, "gr");
    f.prefix.emplace_back(Quantifier::Forall, "pc");
    f.prefix.emplace_back(Quantifier::Exists, "w");
    f.prefix.emplace_back(Quantifier::Exists, "ac");
    f.prefix.emplace_back(Quantifier::Exists, "ad");
  } else {
    bool witnesses_placed = false;
    for (size_t b = 2; b <= B; ++b) {
      Quantifier qb = q.blocks[b - 1].exists ? Quantifier::Exists : Quantifier::Forall;
      f.prefix.emplace_back(qb, game_vars[b - 2]);
      if (qb == Quantifier::Exists && !witnesses_placed) {
        f.prefix.emplace_back(Quantifier::Exists, "w");
        f.prefix.emplace_back(Quantifier::Exists, "ac");
        f.prefix.emplace_back(Quantifier::Exists, "ad");
        witnesses_placed = true;
      }
      if (b == B && qb == Quantifier::Forall) f.prefix.emplace_back(Quantifier::Forall, "pc");
    }
    if (q.blocks.back().exists) f.prefix.emplace_back(Quantifier::Forall, "pc");
    if (!witnesses_placed) {
      f.prefix.emplace_back(Quantifier::Exists, "w");
      f.prefix.emplace_back(Quantifier::Exists, "ac");
      f.prefix.emplace_back(Quantifier::Exists, "ad");
    }
  }

  // game nest, innermost first
  LtlBody core = m0 == 0 ? mk_true() : mk_implies(clausep("pc"), match(reader, "pc"));
  LtlBody nest = core;
  for (size_t b = B; b >= 2; --b) {
    const std::string& gv = game_vars[b - 2];
    LtlBody cond = b == 2 ? diam(gv)
                          : mk_and(diam(gv), agree_below(game_vars[b - 3], gv, static_cast<int>(b)));
    if (q.blocks[b - 1].exists)
      nest = mk_and(cond, nest);
    else
      nest = mk_implies(cond, nest);
  }
  if (B == 1) nest = mk_implies(diam("gr"), core);

  LtlBody anchors = m0 == 0 ? diam("ad") : mk_and(clausep("ac"), diam("ad"));
  f.body = mk_and(pres, mk_and(anchors, nest));

  r.stats = {{"variables", n},
             {"blocks", static_cast<long>(B)},
             {"clauses", static_cast<long>(m0)},
             {"clauses_padded", static_cast<long>(M)},
             {"counter_bits", Wc}};
  return r;
}

// ---------------------------------------------------------------------------
// graph reachability -> repair instances (both quantifier variants)

struct ReachReduction {
  KripkeStructure structure;
  HyperFormula existential;
  HyperFormula universal;
};

inline ReachReduction reduce_reachability(const std::vector<std::pair<std::string, std::string>>& edges,
                                          const std::string& s, const std::string& t) {
  ReachReduction r;
  KripkeStructure g;
  auto ensure = [&](const std::string& id) {
    if (!g.has_state(id)) {
      Letter lab;
      if (id == s) lab.insert("s");
      if (id == t) lab.insert("t");
      g.add_state(id, std::move(lab));
    }
  };
  ensure(s);
  ensure(t);
  for (const auto& [a, b] : edges) {
    ensure(a);
    ensure(b);
    g.add_transition(a, b);
  }
  g.set_init(s);
  r.structure = add_terminal_loops(g);
  validate(r.structure);
  if (classify_frame(r.structure) == FrameShape::General)
    throw Error(ErrorCode::NotAcyclic, "reachability reduction expects an acyclic digraph");

  LtlBody body = mk_eventually(mk_and(mk_atom("s", "p"), mk_eventually(mk_atom("t", "p"))));
  r.existential.prefix = {{Quantifier::Exists, "p"}};
  r.existential.body = body;
  r.universal.prefix = {{Quantifier::Forall, "p"}};
  r.universal.body = body;
  return r;
}

// ---------------------------------------------------------------------------
// readers

/// DIMACS CNF; clauses are normalized to exactly three literals (duplication
/// below, standard aux-variable splitting above).
inline CnfInstance parse_dimacs(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  CnfInstance c;
  int declared_vars = 0;
  std::vector<std::vector<int>> raw;
  std::vector<int> cur;
  bool header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      int m;
      if (!(ls >> p >> fmt >> declared_vars >> m) || fmt != "cnf")
        throw Error(ErrorCode::BadInput, "bad DIMACS header");
      header = true;
      continue;
    }
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (!cur.empty()) raw.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(lit);
      }
    }
  }
  if (!cur.empty()) raw.push_back(cur);
  if (!header) throw Error(ErrorCode::BadInput, "missing DIMACS header");
  c.nvars = declared_vars;
  for (auto cl : raw) {
    for (int lit : cl)
      if (std::abs(lit) > c.nvars) throw Error(ErrorCode::BadInput, "literal exceeds declared variables");
    while (cl.size() > 3) {
      // (l1 | l2 | rest) with fresh x: (l1 | l2 | x) & (!x | rest...)
      int aux = ++c.nvars;
      c.clauses.push_back({cl[0], cl[1], aux});
      std::vector<int> next{-aux};
      next.insert(next.end(), cl.begin() + 2, cl.end());
      cl = std::move(next);
    }
    while (cl.size() < 3) cl.push_back(cl.back());
    c.clauses.push_back({cl[0], cl[1], cl[2]});
  }
  return c;
}

/// QDIMACS; free variables join an outermost existential block, consecutive
/// same-polarity blocks merge.
inline QbfInstance parse_qdimacs(const std::string& text) {
  std::istringstream in(text);
  QbfInstance q;
  std::vector<std::vector<int>> raw;
  std::vector<int> cur;
  bool header = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == 'c' || line[0] == '%') continue;
    std::istringstream ls(line);
    if (line[0] == 'p') {
      std::string p, fmt;
      int m;
      if (!(ls >> p >> fmt >> q.nvars >> m) || fmt != "cnf")
        throw Error(ErrorCode::BadInput, "bad QDIMACS header");
      header = true;
      continue;
    }
    if (line[0] == 'e' || line[0] == 'a') {
      char kind;
      ls >> kind;
      QbfBlock b;
      b.exists = kind == 'e';
      int v;
      while (ls >> v && v != 0) b.vars.push_back(v);
      if (!q.blocks.empty() && q.blocks.back().exists == b.exists) {
        auto& last = q.blocks.back().vars;
        last.insert(last.end(), b.vars.begin(), b.vars.end());
      } else {
        q.blocks.push_back(std::move(b));
      }
      continue;
    }
    int lit;
    while (ls >> lit) {
      if (lit == 0) {
        if (!cur.empty()) raw.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(lit);
      }
    }
  }
  if (!cur.empty()) raw.push_back(cur);
  if (!header) throw Error(ErrorCode::BadInput, "missing QDIMACS header");
  std::vector<bool> bound(static_cast<size_t>(q.nvars) + 1, false);
  for (const auto& b : q.blocks)
    for (int v : b.vars) bound[static_cast<size_t>(v)] = true;
  std::vector<int> free_vars;
  for (int v = 1; v <= q.nvars; ++v)
    if (!bound[static_cast<size_t>(v)]) free_vars.push_back(v);
  if (!free_vars.empty()) {
    if (!q.blocks.empty() && q.blocks.front().exists) {
      auto& first = q.blocks.front().vars;
      first.insert(first.begin(), free_vars.begin(), free_vars.end());
    } else {
      q.blocks.insert(q.blocks.begin(), QbfBlock{true, free_vars});
    }
  }
  q.clauses = std::move(raw);
  return q;
}

/// One clause per line, `-a -b c` style: '-' marks a negative literal, at
/// most one positive literal per clause. Missing pieces fall back to the
/// constants; three-or-more negatives split with auxiliary variables.
inline HornInstance parse_horn(const std::string& text) {
  HornInstance h;
  std::map<std::string, int> vars;
  auto var_id = [&](const std::string& name) {
    auto it = vars.find(name);
    if (it != vars.end()) return it->second;
    int id = ++h.nvars;
    vars.emplace(name, id);
    return id;
  };
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<int> negs;
    int pos = 0;
    bool has_pos = false;
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == '-') {
        negs.push_back(var_id(tok.substr(1)));
      } else {
        if (has_pos) throw Error(ErrorCode::BadInput, "clause has two positive literals: not Horn");
        pos = var_id(tok);
        has_pos = true;
      }
    }
    if (negs.empty() && !has_pos) continue;  // blank line
    while (negs.size() > 2) {
      int aux = ++h.nvars;
      h.clauses.push_back({HornLit::v(negs[0]), HornLit::v(negs[1]), HornLit::v(aux)});
      std::vector<int> rest{aux};
      rest.insert(rest.end(), negs.begin() + 2, negs.end());
      negs = std::move(rest);
    }
    HornClause c;
    c.neg1 = negs.empty() ? HornLit::top() : HornLit::v(negs[0]);
    c.neg2 = negs.size() < 2 ? (negs.empty() ? HornLit::top() : HornLit::v(negs[0]))
                             : HornLit::v(negs[1]);
    c.pos = has_pos ? HornLit::v(pos) : HornLit::bot();
    h.clauses.push_back(c);
  }
  return h;
}

}  // namespace hyrep

#endif
