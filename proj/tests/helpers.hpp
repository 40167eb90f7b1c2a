#ifndef HYREP_TEST_HELPERS_HPP
#define HYREP_TEST_HELPERS_HPP

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "hyrep/formula.hpp"
#include "hyrep/kripke.hpp"
#include "hyrep/reductions.hpp"
#include "hyrep/semantics.hpp"
#include "hyrep/trace.hpp"

namespace testutil {

using namespace hyrep;

// ---------------------------------------------------------------------------
// fixtures

/// The four-state acyclic example: init{a} -> s1{a} -> {s2{b}, s3{b}},
/// init -> s3, self-loops on s2 and s3.
inline KripkeStructure fig1() {
  KripkeStructure k;
  k.add_state("s0", {"a"});
  k.add_state("s1", {"a"});
  k.add_state("s2", {"b"});
  k.add_state("s3", {"b"});
  k.set_init("s0");
  k.add_transition("s0", "s1");
  k.add_transition("s0", "s3");
  k.add_transition("s1", "s2");
  k.add_transition("s1", "s3");
  k.add_transition("s2", "s2");
  k.add_transition("s3", "s3");
  return k;
}

/// Tree with the same label language as fig1.
inline KripkeStructure fig1_tree() {
  KripkeStructure k;
  k.add_state("t0", {"a"});
  k.add_state("t1", {"a"});
  k.add_state("t2", {"b"});
  k.add_state("t3", {"b"});
  k.set_init("t0");
  k.add_transition("t0", "t1");
  k.add_transition("t0", "t3");
  k.add_transition("t1", "t2");
  k.add_transition("t2", "t2");
  k.add_transition("t3", "t3");
  return k;
}

inline KripkeStructure two_cycle() {
  KripkeStructure k;
  k.add_state("c0", {"a"});
  k.add_state("c1", {});
  k.set_init("c0");
  k.add_transition("c0", "c1");
  k.add_transition("c1", "c0");
  return k;
}

/// The four-branch Horn-figure tree: one simple path per clause, terminal
/// self-loops, distinct labels per branch.
inline KripkeStructure horn_figure_tree() {
  KripkeStructure k;
  k.add_state("root", {});
  k.set_init("root");
  const std::vector<std::vector<Letter>> branches = {
      {{"neg1", "pos"}, {"neg2"}, {"pos"}, {}},
      {{"neg1", "neg2", "c"}, {"neg1"}, {"neg2", "pos"}, {}},
      {{}, {"neg1", "neg2", "h"}, {"pos"}, {}},
      {{"neg1", "neg2"}, {"h"}, {}, {}},
  };
  for (size_t b = 0; b < branches.size(); ++b) {
    std::string prev = "root";
    for (size_t d = 0; d < branches[b].size(); ++d) {
      std::string id = "n" + std::to_string(b) + "_" + std::to_string(d);
      k.add_state(id, branches[b][d]);
      k.add_transition(prev, id);
      prev = id;
    }
    k.add_transition(prev, prev);
  }
  return k;
}

// ---------------------------------------------------------------------------
// random structures

inline KripkeStructure random_tree(std::mt19937& rng, int max_states = 8,
                                   int max_transitions = 10) {
  for (;;) {
    std::uniform_int_distribution<int> nd(1, max_states);
    int n = nd(rng);
    std::vector<int> parent(static_cast<size_t>(n), -1);
    for (int i = 1; i < n; ++i)
      parent[static_cast<size_t>(i)] = std::uniform_int_distribution<int>(0, i - 1)(rng);
    std::vector<bool> leaf(static_cast<size_t>(n), true);
    for (int i = 1; i < n; ++i) leaf[static_cast<size_t>(parent[static_cast<size_t>(i)])] = false;
    size_t transitions = static_cast<size_t>(n - 1);
    for (bool l : leaf)
      if (l) ++transitions;
    if (transitions > static_cast<size_t>(max_transitions)) continue;
    KripkeStructure k;
    for (int i = 0; i < n; ++i) {
      Letter lab;
      if (std::uniform_int_distribution<int>(0, 1)(rng)) lab.insert("a");
      if (std::uniform_int_distribution<int>(0, 1)(rng)) lab.insert("b");
      k.add_state("s" + std::to_string(i), std::move(lab));
    }
    k.set_init("s0");
    for (int i = 1; i < n; ++i)
      k.add_transition("s" + std::to_string(parent[static_cast<size_t>(i)]),
                       "s" + std::to_string(i));
    for (int i = 0; i < n; ++i)
      if (leaf[static_cast<size_t>(i)])
        k.add_transition("s" + std::to_string(i), "s" + std::to_string(i));
    return k;
  }
}

inline KripkeStructure random_acyclic(std::mt19937& rng, int max_states = 7) {
  std::uniform_int_distribution<int> nd(1, max_states);
  int n = nd(rng);
  KripkeStructure k;
  for (int i = 0; i < n; ++i) {
    Letter lab;
    if (std::uniform_int_distribution<int>(0, 1)(rng)) lab.insert("a");
    if (std::uniform_int_distribution<int>(0, 1)(rng)) lab.insert("b");
    k.add_state("s" + std::to_string(i), std::move(lab));
  }
  k.set_init("s0");
  std::vector<bool> has_out(static_cast<size_t>(n), false);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
        k.add_transition("s" + std::to_string(i), "s" + std::to_string(j));
        has_out[static_cast<size_t>(i)] = true;
      }
  for (int i = 0; i < n; ++i)
    if (!has_out[static_cast<size_t>(i)])
      k.add_transition("s" + std::to_string(i), "s" + std::to_string(i));
  return k;
}

inline KripkeStructure random_general(std::mt19937& rng, int max_states = 4) {
  for (;;) {
    std::uniform_int_distribution<int> nd(2, max_states);
    int n = nd(rng);
    KripkeStructure k;
    for (int i = 0; i < n; ++i) {
      Letter lab;
      if (std::uniform_int_distribution<int>(0, 1)(rng)) lab.insert("a");
      k.add_state("s" + std::to_string(i), std::move(lab));
    }
    k.set_init("s0");
    std::vector<bool> has_out(static_cast<size_t>(n), false);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (std::uniform_int_distribution<int>(0, 2)(rng) == 0) {
          k.add_transition("s" + std::to_string(i), "s" + std::to_string(j));
          has_out[static_cast<size_t>(i)] = true;
        }
    for (int i = 0; i < n; ++i)
      if (!has_out[static_cast<size_t>(i)])
        k.add_transition("s" + std::to_string(i), "s" + std::to_string(i));
    if (classify_frame(k) == FrameShape::General) return k;
  }
}

// ---------------------------------------------------------------------------
// random formulas

inline LtlBody random_body(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 10);
  auto var = [&]() { return vars[std::uniform_int_distribution<size_t>(0, vars.size() - 1)(rng)]; };
  auto prop = [&]() { return std::uniform_int_distribution<int>(0, 1)(rng) ? "a" : "b"; };
  switch (pick(rng)) {
    case 0: return mk_true();
    case 1:
    case 2: return mk_atom(prop(), var());
    case 3: return mk_not(random_body(rng, vars, depth - 1));
    case 4: return mk_or(random_body(rng, vars, depth - 1), random_body(rng, vars, depth - 1));
    case 5: return mk_and(random_body(rng, vars, depth - 1), random_body(rng, vars, depth - 1));
    case 6: return mk_implies(random_body(rng, vars, depth - 1), random_body(rng, vars, depth - 1));
    case 7: return mk_next(random_body(rng, vars, depth - 1));
    case 8: return mk_until(random_body(rng, vars, depth - 1), random_body(rng, vars, depth - 1));
    case 9: return mk_eventually(random_body(rng, vars, depth - 1));
    default: return mk_globally(random_body(rng, vars, depth - 1));
  }
}

/// Formula with the given quantifier pattern, e.g. "AE" or "EEA"; body depth
/// defaults to 3 temporal/boolean levels over props a,b.
inline HyperFormula random_formula(std::mt19937& rng, const std::string& pattern, int depth = 3) {
  HyperFormula f;
  std::vector<std::string> vars;
  for (size_t i = 0; i < pattern.size(); ++i) {
    std::string v = "q" + std::to_string(i);
    f.prefix.emplace_back(pattern[i] == 'E' ? Quantifier::Exists : Quantifier::Forall, v);
    vars.push_back(v);
  }
  f.body = random_body(rng, vars, depth);
  return f;
}

inline std::string random_pattern(std::mt19937& rng, int max_quants = 3) {
  int n = std::uniform_int_distribution<int>(1, max_quants)(rng);
  std::string p;
  for (int i = 0; i < n; ++i)
    p += std::uniform_int_distribution<int>(0, 1)(rng) ? 'E' : 'A';
  return p;
}

inline UltimatelyPeriodicTrace random_trace(std::mt19937& rng, int max_stem = 3,
                                            int max_loop = 2) {
  auto letter = [&]() {
    Letter l;
    if (std::uniform_int_distribution<int>(0, 1)(rng)) l.insert("a");
    if (std::uniform_int_distribution<int>(0, 1)(rng)) l.insert("b");
    return l;
  };
  UltimatelyPeriodicTrace t;
  int s = std::uniform_int_distribution<int>(0, max_stem)(rng);
  int l = std::uniform_int_distribution<int>(1, max_loop)(rng);
  for (int i = 0; i < s; ++i) t.stem.push_back(letter());
  for (int i = 0; i < l; ++i) t.loop.push_back(letter());
  return canonical(std::move(t));
}

// ---------------------------------------------------------------------------
// naive reference evaluator: expands every assigned trace to an explicit
// finite word and scans. Subformula values under the infinite semantics are
// periodic beyond the joint stabilization point, so every temporal scan from
// position p is decided within [p, max(p, stabilization) + period); the
// expansion is sized so all scans stay inside the materialized words.

inline int temporal_depth(const LtlBody& b) {
  int sub = 0;
  if (b->lhs) sub = std::max(sub, temporal_depth(b->lhs));
  if (b->rhs) sub = std::max(sub, temporal_depth(b->rhs));
  switch (b->kind) {
    case NodeKind::Next:
    case NodeKind::Until:
    case NodeKind::Eventually:
    case NodeKind::Globally:
      return sub + 1;
    default:
      return sub;
  }
}

inline bool naive_eval(const std::map<std::string, std::vector<Letter>>& words,
                       const LtlBody& b, size_t pos, size_t stab, size_t period) {
  size_t scan_end = std::max(pos, stab) + period;
  switch (b->kind) {
    case NodeKind::True:
      return true;
    case NodeKind::Atom: {
      const auto& w = words.at(b->var);
      if (pos >= w.size()) throw std::runtime_error("reference window too small");
      return w[pos].count(b->prop) != 0;
    }
    case NodeKind::Not:
      return !naive_eval(words, b->lhs, pos, stab, period);
    case NodeKind::Or:
      return naive_eval(words, b->lhs, pos, stab, period) ||
             naive_eval(words, b->rhs, pos, stab, period);
    case NodeKind::And:
      return naive_eval(words, b->lhs, pos, stab, period) &&
             naive_eval(words, b->rhs, pos, stab, period);
    case NodeKind::Implies:
      return !naive_eval(words, b->lhs, pos, stab, period) ||
             naive_eval(words, b->rhs, pos, stab, period);
    case NodeKind::Iff:
      return naive_eval(words, b->lhs, pos, stab, period) ==
             naive_eval(words, b->rhs, pos, stab, period);
    case NodeKind::Next:
      return naive_eval(words, b->lhs, pos + 1, stab, period);
    case NodeKind::Until:
      for (size_t j = pos; j < scan_end; ++j) {
        if (naive_eval(words, b->rhs, j, stab, period)) return true;
        if (!naive_eval(words, b->lhs, j, stab, period)) return false;
      }
      return false;
    case NodeKind::Eventually:
      for (size_t j = pos; j < scan_end; ++j)
        if (naive_eval(words, b->lhs, j, stab, period)) return true;
      return false;
    case NodeKind::Globally:
      for (size_t j = pos; j < scan_end; ++j)
        if (!naive_eval(words, b->lhs, j, stab, period)) return false;
      return true;
  }
  return false;
}

/// Reference truth value of `body` under `assignment`, by explicit unrolling.
inline bool naive_body(const TraceAssignment& assignment, const LtlBody& body, size_t pos) {
  EvalHorizon h = horizon_of(assignment);
  size_t window =
      pos + static_cast<size_t>(temporal_depth(body) + 2) * (h.stabilization + h.period + 1) + 2;
  std::map<std::string, std::vector<Letter>> words;
  for (const auto& [v, t] : assignment.map) {
    std::vector<Letter> w;
    for (size_t i = 0; i < window; ++i) w.push_back(t.letter(i));
    words[v] = std::move(w);
  }
  return naive_eval(words, body, pos, h.stabilization, h.period);
}

/// Reference evaluation of a full sentence over a trace set.
inline bool naive_sentence(const std::vector<UltimatelyPeriodicTrace>& T, const HyperFormula& f) {
  std::vector<size_t> pick(f.prefix.size(), 0);
  auto rec = [&](auto&& self, size_t slot) -> bool {
    if (slot == f.prefix.size()) {
      TraceAssignment a;
      for (size_t i = 0; i < f.prefix.size(); ++i) a.map[f.prefix[i].second] = T[pick[i]];
      return naive_body(a, f.body, 0);
    }
    bool exists = f.prefix[slot].first == Quantifier::Exists;
    for (size_t i = 0; i < T.size(); ++i) {
      pick[slot] = i;
      bool r = self(self, slot + 1);
      if (exists && r) return true;
      if (!exists && !r) return false;
    }
    return !exists;
  };
  return rec(rec, 0);
}

// ---------------------------------------------------------------------------
// instance space enumeration for the theorem round-trips. Horn and 3SAT
// spaces are reduced by variable-renaming symmetry: both the brute solvers
// and the reductions commute with renamings (the reduction output is
// isomorphic up to relabeling), so one representative per orbit decides the
// whole orbit. Verified by renaming spot checks in the acceptance suite.

inline std::vector<std::vector<int>> permutations_of(int n) {
  std::vector<int> p(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) p[static_cast<size_t>(i)] = i + 1;
  std::vector<std::vector<int>> out;
  do {
    out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Horn clause encoded as (n1, n2, p) with codes: Top=0, var i=i, Bot=n+1.
inline std::vector<HornInstance> enumerate_horn_instances(int nvars, int max_clauses,
                                                          bool reduce_symmetry = true) {
  const int top = 0, bot = nvars + 1;
  std::vector<std::array<int, 3>> clause_space;
  for (int a = 0; a <= nvars; ++a)
    for (int b = a; b <= nvars; ++b)
      for (int p = 0; p <= nvars + 1; ++p) clause_space.push_back({a, b, p});

  auto renumber = [&](const std::array<int, 3>& c, const std::vector<int>& perm) {
    auto m = [&](int code) {
      if (code == top || code == bot) return code;
      return perm[static_cast<size_t>(code - 1)];
    };
    std::array<int, 3> r{m(c[0]), m(c[1]), m(c[2])};
    if (r[0] > r[1]) std::swap(r[0], r[1]);
    return r;
  };
  auto perms = permutations_of(nvars);
  auto canonical_key = [&](std::vector<std::array<int, 3>> inst) {
    std::vector<std::array<int, 3>> best;
    for (const auto& perm : perms) {
      std::vector<std::array<int, 3>> mapped;
      for (const auto& c : inst) mapped.push_back(renumber(c, perm));
      std::sort(mapped.begin(), mapped.end());
      if (best.empty() || mapped < best) best = std::move(mapped);
    }
    return best;
  };

  std::set<std::vector<std::array<int, 3>>> seen;
  std::vector<HornInstance> out;
  auto emit = [&](const std::vector<std::array<int, 3>>& inst) {
    auto key = reduce_symmetry ? canonical_key(inst) : inst;
    if (reduce_symmetry && !seen.insert(key).second) return;
    HornInstance h;
    h.nvars = nvars;
    for (const auto& c : key) {
      auto lit = [&](int code) {
        if (code == top) return HornLit::top();
        if (code == bot) return HornLit::bot();
        return HornLit::v(code);
      };
      h.clauses.push_back({lit(c[0]), lit(c[1]), lit(c[2])});
    }
    out.push_back(std::move(h));
  };

  size_t cs = clause_space.size();
  std::vector<std::array<int, 3>> inst;
  auto rec = [&](auto&& self, size_t from, int left) -> void {
    if (!inst.empty()) emit(inst);
    if (left == 0) return;
    for (size_t i = from; i < cs; ++i) {
      inst.push_back(clause_space[i]);
      self(self, i + 1, left - 1);
      inst.pop_back();
    }
  };
  rec(rec, 0, max_clauses);
  return out;
}

inline std::vector<CnfInstance> enumerate_3sat_instances(int nvars, int max_clauses,
                                                         bool reduce_symmetry = true) {
  std::vector<int> lits;
  for (int v = 1; v <= nvars; ++v) {
    lits.push_back(v);
    lits.push_back(-v);
  }
  std::vector<std::array<int, 3>> clause_space;
  for (size_t a = 0; a < lits.size(); ++a)
    for (size_t b = a; b < lits.size(); ++b)
      for (size_t c = b; c < lits.size(); ++c)
        clause_space.push_back({lits[a], lits[b], lits[c]});

  auto perms = permutations_of(nvars);
  auto canonical_key = [&](const std::vector<std::array<int, 3>>& inst) {
    std::vector<std::array<int, 3>> best;
    for (const auto& perm : perms) {
      std::vector<std::array<int, 3>> mapped;
      for (const auto& c : inst) {
        std::array<int, 3> r;
        for (int i = 0; i < 3; ++i) {
          int v = std::abs(c[static_cast<size_t>(i)]);
          int mv = perm[static_cast<size_t>(v - 1)];
          r[static_cast<size_t>(i)] = c[static_cast<size_t>(i)] > 0 ? mv : -mv;
        }
        std::sort(r.begin(), r.end());
        mapped.push_back(r);
      }
      std::sort(mapped.begin(), mapped.end());
      if (best.empty() || mapped < best) best = std::move(mapped);
    }
    return best;
  };

  std::set<std::vector<std::array<int, 3>>> seen;
  std::vector<CnfInstance> out;
  auto emit = [&](const std::vector<std::array<int, 3>>& inst) {
    auto key = reduce_symmetry ? canonical_key(inst) : inst;
    if (reduce_symmetry && !seen.insert(key).second) return;
    CnfInstance c;
    c.nvars = nvars;
    c.clauses = key;
    out.push_back(std::move(c));
  };
  size_t cs = clause_space.size();
  std::vector<std::array<int, 3>> inst;
  auto rec = [&](auto&& self, size_t from, int left) -> void {
    if (!inst.empty()) emit(inst);
    if (left == 0) return;
    for (size_t i = from; i < cs; ++i) {
      inst.push_back(clause_space[i]);
      self(self, i + 1, left - 1);
      inst.pop_back();
    }
  };
  rec(rec, 0, max_clauses);
  return out;
}

/// Alternating prenex QBF instances: vars 1..n split into <= max_blocks
/// consecutive nonempty blocks starting existential; matrix of 1..max_clauses
/// distinct non-tautological clauses.
inline std::vector<QbfInstance> enumerate_qbf_instances(int max_blocks, int max_vars,
                                                        int max_clauses) {
  std::vector<QbfInstance> out;
  for (int n = 1; n <= max_vars; ++n) {
    // clause space: per variable absent/positive/negative, not all absent
    std::vector<std::vector<int>> clause_space;
    std::vector<int> pow3(static_cast<size_t>(n) + 1, 1);
    for (int i = 1; i <= n; ++i) pow3[static_cast<size_t>(i)] = pow3[static_cast<size_t>(i - 1)] * 3;
    for (int code = 1; code < pow3[static_cast<size_t>(n)]; ++code) {
      std::vector<int> clause;
      int c = code;
      for (int v = 1; v <= n; ++v) {
        int d = c % 3;
        c /= 3;
        if (d == 1) clause.push_back(v);
        if (d == 2) clause.push_back(-v);
      }
      clause_space.push_back(std::move(clause));
    }
    // block compositions
    std::vector<std::vector<int>> comps;
    std::vector<int> cur;
    auto comp = [&](auto&& self, int left, int blocks) -> void {
      if (left == 0) {
        comps.push_back(cur);
        return;
      }
      if (blocks == 0) return;
      for (int take = 1; take <= left; ++take) {
        cur.push_back(take);
        self(self, left - take, blocks - 1);
        cur.pop_back();
      }
    };
    comp(comp, n, max_blocks);

    std::vector<std::vector<std::vector<int>>> matrices;
    {
      std::vector<std::vector<int>> inst;
      auto rec = [&](auto&& self, size_t from, int left) -> void {
        if (!inst.empty()) matrices.push_back(inst);
        if (left == 0) return;
        for (size_t i = from; i < clause_space.size(); ++i) {
          inst.push_back(clause_space[i]);
          self(self, i + 1, left - 1);
          inst.pop_back();
        }
      };
      rec(rec, 0, max_clauses);
    }

    for (const auto& sizes : comps) {
      QbfInstance base;
      base.nvars = n;
      int v = 1;
      bool exists = true;
      for (int s : sizes) {
        QbfBlock b;
        b.exists = exists;
        for (int i = 0; i < s; ++i) b.vars.push_back(v++);
        base.blocks.push_back(std::move(b));
        exists = !exists;
      }
      for (const auto& m : matrices) {
        QbfInstance q = base;
        q.clauses = m;
        out.push_back(std::move(q));
      }
    }
  }
  return out;
}

}  // namespace testutil

#endif
