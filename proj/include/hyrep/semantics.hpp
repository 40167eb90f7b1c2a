#ifndef HYREP_SEMANTICS_HPP
#define HYREP_SEMANTICS_HPP

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyrep/errors.hpp"
#include "hyrep/formula.hpp"
#include "hyrep/kripke.hpp"
#include "hyrep/trace.hpp"

namespace hyrep {

/// Partial map from trace variables to traces.
struct TraceAssignment {
  std::map<std::string, UltimatelyPeriodicTrace> map;
};

// Position index beyond which the joint letter tuple of the assigned traces
// repeats with the lcm of the loop lengths. Evaluation only ever inspects
// positions below stabilization + period.
struct EvalHorizon {
  size_t stabilization = 0;
  size_t period = 1;
};

enum class Tri : int8_t { False = 0, True = 1, Unknown = 2 };

inline Tri tri_of(bool b) { return b ? Tri::True : Tri::False; }
inline Tri not3(Tri a) {
  if (a == Tri::Unknown) return Tri::Unknown;
  return a == Tri::True ? Tri::False : Tri::True;
}
inline Tri or3(Tri a, Tri b) {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::False && b == Tri::False) return Tri::False;
  return Tri::Unknown;
}
inline Tri and3(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::True && b == Tri::True) return Tri::True;
  return Tri::Unknown;
}

// Interns canonical traces and proposition names; memoizes per-position atom
// values so the evaluator works on flat arrays.
class TracePool {
 public:
  int intern(UltimatelyPeriodicTrace t) {
    t = canonical(std::move(t));
    auto it = tidx_.find(t);
    if (it != tidx_.end()) return it->second;
    int id = static_cast<int>(traces_.size());
    traces_.push_back(t);
    tidx_.emplace(std::move(t), id);
    vals_.emplace_back();
    return id;
  }

  int intern_prop(const std::string& p) {
    auto it = pidx_.find(p);
    if (it != pidx_.end()) return it->second;
    int id = static_cast<int>(props_.size());
    props_.push_back(p);
    pidx_.emplace(p, id);
    return id;
  }

  const UltimatelyPeriodicTrace& trace(int id) const { return traces_[static_cast<size_t>(id)]; }
  size_t num_traces() const { return traces_.size(); }

  bool atom_value(int trace_id, int prop_id, size_t pos) {
    auto& per_prop = vals_[static_cast<size_t>(trace_id)];
    if (per_prop.size() <= static_cast<size_t>(prop_id)) per_prop.resize(props_.size());
    auto& flags = per_prop[static_cast<size_t>(prop_id)];
    const auto& t = traces_[static_cast<size_t>(trace_id)];
    size_t total = t.stem.size() + t.loop.size();
    if (flags.empty()) {
      flags.assign(total, 0);
      const std::string& name = props_[static_cast<size_t>(prop_id)];
      for (size_t i = 0; i < t.stem.size(); ++i) flags[i] = t.stem[i].count(name) ? 1 : 0;
      for (size_t i = 0; i < t.loop.size(); ++i)
        flags[t.stem.size() + i] = t.loop[i].count(name) ? 1 : 0;
    }
    size_t idx = pos < t.stem.size() ? pos : t.stem.size() + (pos - t.stem.size()) % t.loop.size();
    return flags[idx] != 0;
  }

 private:
  std::vector<UltimatelyPeriodicTrace> traces_;
  std::map<UltimatelyPeriodicTrace, int> tidx_;
  std::vector<std::string> props_;
  std::map<std::string, int> pidx_;
  // vals_[trace][prop] -> one flag per stem+loop position, filled on demand
  std::vector<std::vector<std::vector<uint8_t>>> vals_;
};

// Evaluates one HyperLTL formula against trace sets drawn from a shared pool.
// The quantifier player recurses over the prefix; before each binding the
// body is partially evaluated (unbound atoms are Unknown), which prunes the
// search as soon as the bound variables alone decide the outcome.
class Evaluator {
 public:
  Evaluator(TracePool& pool, const HyperFormula& f) : pool_(pool) {
    validate_formula(f);
    for (const auto& [q, v] : f.prefix) {
      quants_.push_back(q);
      var_slot_[v] = static_cast<int>(quants_.size()) - 1;
      vars_.push_back(v);
    }
    root_ = compile(desugar(f.body));
  }

  size_t num_vars() const { return quants_.size(); }
  const std::vector<Quantifier>& quantifiers() const { return quants_; }
  const std::vector<std::string>& variables() const { return vars_; }
  TracePool& pool() { return pool_; }

  /// T, Pi_empty |= f with T given as pool ids.
  bool evaluate_set(const std::vector<int>& trace_ids) {
    if (trace_ids.empty()) throw Error(ErrorCode::EmptyTraceSet, "evaluation over empty trace set");
    std::vector<int> assign(quants_.size(), -1);
    Tri r = play(assign, 0, trace_ids);
    return r == Tri::True;
  }

  /// Player for the prefix suffix starting at `slot` under a partial
  /// assignment; used directly by repair strategies (marking, enumeration).
  Tri play(std::vector<int>& assign, size_t slot, const std::vector<int>& trace_ids) {
    Tri t = eval_partial(assign);
    if (t != Tri::Unknown) return t;
    if (slot >= quants_.size())
      throw Error(ErrorCode::BadInput, "undetermined body under full assignment");
    bool exists = quants_[slot] == Quantifier::Exists;
    for (int tid : trace_ids) {
      assign[slot] = tid;
      Tri r = play(assign, slot + 1, trace_ids);
      assign[slot] = -1;
      if (exists && r == Tri::True) return Tri::True;
      if (!exists && r == Tri::False) return Tri::False;
    }
    return exists ? Tri::False : Tri::True;
  }

  /// Body truth value at a full assignment and position.
  bool body_holds(const std::vector<int>& assign, size_t position) {
    for (size_t i = 0; i < assign.size(); ++i)
      if (assign[i] < 0) throw Error(ErrorCode::UnboundVariable, "variable '" + vars_[i] + "'");
    Ctx ctx = make_ctx(assign);
    size_t pos = position < ctx.horizon ? position
                                        : ctx.stab + (position - ctx.stab) % ctx.period;
    Tri r = eval(ctx, root_, pos);
    return r == Tri::True;
  }

  EvalHorizon horizon_for(const std::vector<int>& assign) {
    Ctx c = make_ctx(assign);
    return EvalHorizon{c.stab, c.period};
  }

 private:
  struct Node {
    NodeKind kind;
    int a = -1;
    int b = -1;
    int prop = -1;
    int slot = -1;
  };

  struct Ctx {
    std::vector<int> assign;
    size_t stab = 0;
    size_t period = 1;
    size_t horizon = 1;
  };

  int compile(const LtlBody& b) {
    Node n;
    n.kind = b->kind;
    switch (b->kind) {
      case NodeKind::True:
        break;
      case NodeKind::Atom: {
        n.prop = pool_.intern_prop(b->prop);
        auto it = var_slot_.find(b->var);
        if (it == var_slot_.end())
          throw Error(ErrorCode::UnboundVariable, "variable '" + b->var + "'");
        n.slot = it->second;
        break;
      }
      case NodeKind::Not:
      case NodeKind::Next:
        n.a = compile(b->lhs);
        break;
      case NodeKind::Or:
      case NodeKind::Until:
        n.a = compile(b->lhs);
        n.b = compile(b->rhs);
        break;
      default:
        throw Error(ErrorCode::BadInput, "compile expects a desugared body");
    }
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  Ctx make_ctx(const std::vector<int>& assign) {
    Ctx c;
    c.assign = assign;
    size_t period = 1;
    for (int tid : assign) {
      if (tid < 0) continue;
      const auto& t = pool_.trace(tid);
      c.stab = std::max(c.stab, t.stem.size());
      period = std::lcm(period, t.loop.size());
    }
    c.period = period;
    c.horizon = c.stab + c.period;
    if (c.horizon > (1u << 20))
      throw Error(ErrorCode::TooLarge, "evaluation horizon exceeds supported size");
    return c;
  }

  // Partial evaluation with the tuple cache. The cached value depends only on
  // the assignment (not on the candidate trace set), so it stays valid across
  // repair-candidate checks sharing this evaluator. Small pools get a flat
  // array indexed by the packed tuple; larger ones fall back to hashing.
  Tri eval_partial(const std::vector<int>& assign) {
    ensure_flat();
    if (flat_ok_) {
      size_t idx = 0;
      for (size_t i = 0; i < assign.size(); ++i)
        idx = idx * flat_base_ + static_cast<size_t>(assign[i] + 1);
      int8_t hit = flat_[idx];
      if (hit >= 0) return static_cast<Tri>(hit);
      Ctx ctx = make_ctx(assign);
      Tri r = eval(ctx, root_, 0);
      flat_[idx] = static_cast<int8_t>(r);
      return r;
    }
    uint64_t key = 0;
    bool packable = assign.size() <= 8;
    if (packable) {
      for (size_t i = 0; i < assign.size(); ++i) {
        int v = assign[i];
        if (v >= 254) {
          packable = false;
          break;
        }
        key |= static_cast<uint64_t>(v + 1) << (8 * i);
      }
    }
    if (packable) {
      auto it = cache_.find(key);
      if (it != cache_.end()) return static_cast<Tri>(it->second);
    }
    Ctx ctx = make_ctx(assign);
    Tri r = eval(ctx, root_, 0);
    if (packable) cache_.emplace(key, static_cast<int8_t>(r));
    return r;
  }

  void ensure_flat() {
    size_t base = pool_.num_traces() + 1;
    if (base == flat_base_) return;
    size_t total = 1;
    const size_t cap = size_t{1} << 22;
    bool ok = true;
    for (size_t i = 0; i < quants_.size(); ++i) {
      if (total > cap / base) {
        ok = false;
        break;
      }
      total *= base;
    }
    flat_base_ = base;
    flat_ok_ = ok;
    if (ok) flat_.assign(total, -1);
  }

  size_t succ(const Ctx& c, size_t i) const { return i + 1 < c.horizon ? i + 1 : c.stab; }

  Tri eval(Ctx& c, int node, size_t pos) {
    prepare_buffers(c);
    return eval_memo(c, node, pos);
  }

  void prepare_buffers(Ctx& c) {
    size_t need = nodes_.size() * c.horizon;
    if (memo_.size() < need) {
      memo_.assign(need, 0);
      memo_ep_.assign(need, 0);
    }
    size_t vneed = c.horizon * 3;
    if (wvisit_.size() < vneed) wvisit_.assign(vneed, 0);
    ++epoch_;
    cur_horizon_ = c.horizon;
  }

  Tri eval_memo(Ctx& c, int node, size_t pos) {
    size_t key = static_cast<size_t>(node) * cur_horizon_ + pos;
    if (memo_ep_[key] == epoch_) return static_cast<Tri>(memo_[key]);
    Tri r = eval_raw(c, node, pos);
    memo_ep_[key] = epoch_;
    memo_[key] = static_cast<int8_t>(r);
    return r;
  }

  Tri eval_raw(Ctx& c, int node, size_t pos) {
    const Node& n = nodes_[static_cast<size_t>(node)];
    switch (n.kind) {
      case NodeKind::True:
        return Tri::True;
      case NodeKind::Atom: {
        int tid = c.assign[static_cast<size_t>(n.slot)];
        if (tid < 0) return Tri::Unknown;
        return tri_of(pool_.atom_value(tid, n.prop, pos));
      }
      case NodeKind::Not:
        return not3(eval_memo(c, n.a, pos));
      case NodeKind::Or:
        return or3(eval_memo(c, n.a, pos), eval_memo(c, n.b, pos));
      case NodeKind::Next:
        return eval_memo(c, n.a, succ(c, pos));
      case NodeKind::Until:
        return eval_until(c, n, pos);
      default:
        throw Error(ErrorCode::BadInput, "unexpected node kind in core evaluation");
    }
  }

  // x U y on the folded lasso of positions. Walks successors accumulating
  //   acc = OR_j ( y@p_j AND prefix_j ),  prefix_j = AND_{l<j} x@p_l,
  // stopping once the (position, prefix) pair repeats; from there on every
  // further term repeats an already accumulated value.
  Tri eval_until(Ctx& c, const Node& n, size_t start) {
    uint32_t ep = ++walk_epoch_;
    size_t cur = start;
    Tri prefix = Tri::True;
    Tri acc = Tri::False;
    while (true) {
      size_t vkey = cur * 3 + static_cast<size_t>(prefix);
      if (wvisit_[vkey] == ep) break;
      wvisit_[vkey] = ep;
      Tri y = eval_memo(c, n.b, cur);
      acc = or3(acc, and3(y, prefix));
      if (acc == Tri::True) return Tri::True;
      Tri x = eval_memo(c, n.a, cur);
      prefix = and3(prefix, x);
      if (prefix == Tri::False) break;
      cur = succ(c, cur);
    }
    return acc;
  }

  TracePool& pool_;
  std::vector<Quantifier> quants_;
  std::vector<std::string> vars_;
  std::map<std::string, int> var_slot_;
  std::vector<Node> nodes_;
  int root_ = -1;

  std::unordered_map<uint64_t, int8_t> cache_;
  std::vector<int8_t> flat_;
  size_t flat_base_ = 0;
  bool flat_ok_ = false;
  std::vector<int8_t> memo_;
  std::vector<uint32_t> memo_ep_;
  std::vector<uint32_t> wvisit_;
  uint32_t epoch_ = 0;
  uint32_t walk_epoch_ = 0;
  size_t cur_horizon_ = 0;
};

/// T, Pi |= body at the given position; all body variables must be assigned.
inline bool evaluate_body(const TraceAssignment& assignment, const LtlBody& body,
                          size_t position) {
  std::set<std::string> used;
  collect_body_vars(body, used);
  for (const auto& v : used)
    if (!assignment.map.count(v))
      throw Error(ErrorCode::UnboundVariable, "variable '" + v + "' not in assignment");
  HyperFormula f;
  for (const auto& [v, t] : assignment.map) {
    (void)t;
    f.prefix.emplace_back(Quantifier::Forall, v);
  }
  if (f.prefix.empty()) f.prefix.emplace_back(Quantifier::Forall, "_pi");
  f.body = body;
  TracePool pool;
  Evaluator ev(pool, f);
  std::vector<int> assign(ev.num_vars(), -1);
  UltimatelyPeriodicTrace unit;
  unit.loop.push_back({});
  for (size_t i = 0; i < ev.num_vars(); ++i) {
    auto it = assignment.map.find(ev.variables()[i]);
    assign[i] = pool.intern(it == assignment.map.end() ? unit : it->second);
  }
  return ev.body_holds(assign, position);
}

inline EvalHorizon horizon_of(const TraceAssignment& assignment) {
  EvalHorizon h;
  for (const auto& [v, t] : assignment.map) {
    (void)v;
    h.stabilization = std::max(h.stabilization, t.stem.size());
    h.period = std::lcm(h.period, t.loop.size());
  }
  return h;
}

/// T |= f for an explicit finite trace set.
inline bool evaluate(const std::vector<UltimatelyPeriodicTrace>& T, const HyperFormula& f) {
  if (T.empty()) throw Error(ErrorCode::EmptyTraceSet, "evaluation over empty trace set");
  TracePool pool;
  Evaluator ev(pool, f);
  std::set<int> ids;
  for (const auto& t : T) ids.insert(pool.intern(t));
  return ev.evaluate_set({ids.begin(), ids.end()});
}

struct LassoBounds {
  size_t stem = 1;
  size_t loop = 1;
};

struct CheckResult {
  bool holds = false;
  bool bounded = false;  // verdict obtained under lasso bounds (general frames)
  std::optional<LassoBounds> bounds_used;
};

inline LassoBounds default_bounds(const KripkeStructure& k, const HyperFormula& f) {
  // |S|^n for n quantifiers, saturated to keep arithmetic sane
  const size_t cap = 1000000000;
  size_t b = 1;
  for (size_t i = 0; i < f.prefix.size(); ++i) {
    if (b > cap / std::max<size_t>(k.num_states(), 1)) {
      b = cap;
      break;
    }
    b *= std::max<size_t>(k.num_states(), 1);
  }
  return LassoBounds{b, b};
}

/// K |= f. Exact on tree/acyclic frames; on general frames the verdict is
/// relative to the lasso bounds and flagged as bounded.
inline CheckResult model_check(const KripkeStructure& k, const HyperFormula& f,
                               std::optional<LassoBounds> bounds = {}) {
  validate(k);
  FrameShape shape = classify_frame(k);
  CheckResult r;
  if (shape == FrameShape::General) {
    LassoBounds b = bounds ? *bounds : default_bounds(k, f);
    r.bounded = true;
    r.bounds_used = b;
    r.holds = evaluate(enumerate_lassos(k, b.stem, b.loop), f);
  } else {
    r.holds = evaluate(enumerate_traces(k), f);
  }
  return r;
}

}  // namespace hyrep

#endif
