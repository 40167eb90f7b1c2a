#ifndef HYREP_REPAIR_HPP
#define HYREP_REPAIR_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <set>
#include <string>
#include <vector>

#include "hyrep/errors.hpp"
#include "hyrep/formula.hpp"
#include "hyrep/kripke.hpp"
#include "hyrep/semantics.hpp"

namespace hyrep {

enum class Verdict { Repairable, NotRepairable, BoundedUnknown };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Repairable: return "repairable";
    case Verdict::NotRepairable: return "not-repairable";
    case Verdict::BoundedUnknown: return "bounded-unknown";
  }
  return "?";
}

enum class StrategyTag {
  McOnly,
  SingleTrace,
  TreeExistEnum,
  TreeMarking,
  GuessCheck,
  BruteForce,
  BoundedGeneral,
};

inline const char* strategy_tag_name(StrategyTag s) {
  switch (s) {
    case StrategyTag::McOnly: return "mc-only";
    case StrategyTag::SingleTrace: return "single-trace";
    case StrategyTag::TreeExistEnum: return "exist-enum";
    case StrategyTag::TreeMarking: return "marking";
    case StrategyTag::GuessCheck: return "guess-check";
    case StrategyTag::BruteForce: return "brute";
    case StrategyTag::BoundedGeneral: return "bounded";
  }
  return "?";
}

enum class Prefer { Max, Min, Any };
enum class StrategyChoice { Auto, Brute, Marking, SingleTrace, ExistEnum, McOnly, Bounded };

struct RepairOptions {
  Prefer prefer = Prefer::Any;
  StrategyChoice strategy = StrategyChoice::Auto;
  std::optional<LassoBounds> bounds;
};

struct RepairResult {
  Verdict verdict = Verdict::NotRepairable;
  std::optional<RepairCandidate> witness;
  StrategyTag strategy = StrategyTag::BruteForce;
  std::string certificate;
  std::optional<LassoBounds> bounds_used;
};

// Shared state for one repair run: the compiled formula, the interned master
// traces, and per-path transition masks so a candidate's trace set follows
// from bit tests instead of rebuilding a structure per candidate. Body
// evaluations are cached per assignment tuple and stay valid for every
// candidate, since they do not depend on the candidate's trace set.
class RepairSession {
 public:
  RepairSession(const KripkeStructure& k, const HyperFormula& f,
                std::optional<LassoBounds> bounds_opt)
      : k_(k), ev_(pool_, f) {
    validate(k);
    shape_ = classify_frame(k);
    bounded_ = shape_ == FrameShape::General;
    if (bounded_) bounds_ = bounds_opt ? *bounds_opt : default_bounds(k, f);
    masks_ok_ = k.num_transitions() <= 127;
    if (shape_ != FrameShape::General) {
      build_path_masks();
    } else if (masks_ok_) {
      build_lasso_masks();
    }
    fast_ok_ = masks_ok_ && pool_.num_traces() <= 64;
  }

  const KripkeStructure& structure() const { return k_; }
  FrameShape shape() const { return shape_; }
  bool bounded() const { return bounded_; }
  LassoBounds bounds() const { return bounds_; }
  Evaluator& evaluator() { return ev_; }
  TracePool& pool() { return pool_; }

  using EdgeMask = unsigned __int128;

  struct MasterPath {
    std::vector<int> states;
    EdgeMask mask = 0;
    int trace = -1;
  };

  const std::vector<MasterPath>& master_paths() const { return paths_; }

  /// all master trace ids, sorted unique
  std::vector<int> all_traces() {
    return candidate_traces(identity_repair(k_));
  }

  /// trace-id set of a candidate as a bitmask; valid when every master trace
  /// id fits into 64 bits (the usual case at this problem scale)
  uint64_t candidate_trace_mask(const RepairCandidate& c) const {
    EdgeMask kept = 0;
    for (int i : c.kept) kept |= EdgeMask(1) << i;
    uint64_t out = 0;
    if (shape_ != FrameShape::General) {
      for (const auto& p : paths_)
        if ((p.mask & kept) == p.mask) out |= 1ull << p.trace;
    } else {
      for (const auto& [tid, masks] : lasso_masks_)
        for (EdgeMask m : masks)
          if ((m & kept) == m) {
            out |= 1ull << tid;
            break;
          }
    }
    return out;
  }

  std::vector<int> candidate_traces(const RepairCandidate& c) {
    if (fast_ok_) {
      uint64_t mask = candidate_trace_mask(c);
      std::vector<int> ids;
      for (int t = 0; mask; ++t, mask >>= 1)
        if (mask & 1) ids.push_back(t);
      return ids;
    }
    // fallback: materialize the substructure
    KripkeStructure s = apply_repair(k_, c);
    auto traces = bounded_ ? enumerate_lassos(s, bounds_.stem, bounds_.loop) : enumerate_traces(s);
    std::set<int> ids;
    for (auto& t : traces) ids.insert(pool_.intern(std::move(t)));
    return {ids.begin(), ids.end()};
  }

  bool check_candidate(const RepairCandidate& c) {
    // distinct candidates frequently share a trace set; the verdict only
    // depends on the set
    if (fast_ok_) {
      uint64_t mask = candidate_trace_mask(c);
      if (mask == 0) return false;
      auto it = fast_cache_.find(mask);
      if (it != fast_cache_.end()) return it->second;
      scratch_ids_.clear();
      uint64_t m = mask;
      for (int t = 0; m; ++t, m >>= 1)
        if (m & 1) scratch_ids_.push_back(t);
      bool r = ev_.evaluate_set(scratch_ids_);
      fast_cache_.emplace(mask, r);
      return r;
    }
    auto ids = candidate_traces(c);
    if (ids.empty()) return false;
    auto it = set_cache_.find(ids);
    if (it != set_cache_.end()) return it->second;
    bool r = ev_.evaluate_set(ids);
    set_cache_.emplace(std::move(ids), r);
    return r;
  }

 private:
  void build_path_masks() {
    auto rps = root_paths(k_);
    std::map<std::pair<int, int>, int> edge_index;
    for (size_t i = 0; i < k_.num_transitions(); ++i) edge_index[k_.transitions()[i]] = static_cast<int>(i);
    for (auto& rp : rps) {
      MasterPath mp;
      mp.states = rp.states;
      if (masks_ok_) {
        for (size_t i = 0; i + 1 < rp.states.size(); ++i)
          mp.mask |= EdgeMask(1) << edge_index.at({rp.states[i], rp.states[i + 1]});
        int last = rp.states.back();
        mp.mask |= EdgeMask(1) << edge_index.at({last, last});
      }
      mp.trace = pool_.intern(std::move(rp.trace));
      paths_.push_back(std::move(mp));
    }
  }

  void build_lasso_masks() {
    auto adj = k_.adjacency();
    std::map<std::pair<int, int>, int> edge_index;
    for (size_t i = 0; i < k_.num_transitions(); ++i) edge_index[k_.transitions()[i]] = static_cast<int>(i);

    std::vector<Letter> stem_letters;
    std::vector<int> walk;
    auto note = [&](const std::vector<Letter>& stem, const std::vector<int>& cycle, EdgeMask mask) {
      UltimatelyPeriodicTrace t;
      t.stem = stem;
      for (int s : cycle) t.loop.push_back(k_.state(s).labels);
      int tid = pool_.intern(canonical(std::move(t)));
      auto& ms = lasso_masks_[tid];
      for (EdgeMask m : ms)
        if ((m & mask) == m) return;  // an easier walk already realizes it
      ms.push_back(mask);
    };
    auto cycles = [&](int anchor, EdgeMask stem_mask) {
      std::vector<int> cyc{anchor};
      auto rec = [&](auto&& self, int v, size_t len, EdgeMask mask) -> void {
        for (int w : adj[static_cast<size_t>(v)]) {
          EdgeMask m2 = mask | (EdgeMask(1) << edge_index.at({v, w}));
          if (w == anchor) note(stem_letters, cyc, m2);
          if (len + 1 <= bounds_.loop) {
            cyc.push_back(w);
            self(self, w, len + 1, m2);
            cyc.pop_back();
          }
        }
      };
      rec(rec, anchor, 1, stem_mask);
    };
    auto stems = [&](auto&& self, int v, size_t len, EdgeMask mask) -> void {
      cycles(v, mask);
      if (len >= bounds_.stem) return;
      for (int w : adj[static_cast<size_t>(v)]) {
        stem_letters.push_back(k_.state(v).labels);
        self(self, w, len + 1, mask | (EdgeMask(1) << edge_index.at({v, w})));
        stem_letters.pop_back();
      }
    };
    stems(stems, k_.init_index(), 0, 0);
  }

  const KripkeStructure& k_;
  TracePool pool_;
  Evaluator ev_;
  FrameShape shape_ = FrameShape::General;
  bool bounded_ = false;
  LassoBounds bounds_;
  bool masks_ok_ = false;
  std::vector<MasterPath> paths_;
  std::map<int, std::vector<EdgeMask>> lasso_masks_;
  bool fast_ok_ = false;
  std::unordered_map<uint64_t, bool> fast_cache_;
  std::vector<int> scratch_ids_;
  std::map<std::vector<int>, bool> set_cache_;
};

namespace detail {

inline size_t leading_run(const HyperFormula& f) {
  size_t i = 1;
  while (i < f.prefix.size() && f.prefix[i].first == f.prefix[0].first) ++i;
  return i;
}

inline bool is_exists_then_foralls(const HyperFormula& f) {
  // E^m A^j, m >= 0, j >= 0
  size_t i = 0;
  while (i < f.prefix.size() && f.prefix[i].first == Quantifier::Exists) ++i;
  while (i < f.prefix.size() && f.prefix[i].first == Quantifier::Forall) ++i;
  return i == f.prefix.size();
}

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(ErrorCode::StrategyMismatch, msg);
}

}  // namespace detail

/// E* on any frame: the repair problem coincides with model checking and the
/// identity is the only witness ever needed.
inline RepairResult repair_existential(RepairSession& s, const HyperFormula& f) {
  detail::require(classify_fragment(f).exists_only(), "mc-only requires fragment EStar");
  RepairResult r;
  r.strategy = StrategyTag::McOnly;
  auto ids = s.all_traces();
  bool holds = !ids.empty() && s.evaluator().evaluate_set(ids);
  if (holds) {
    r.verdict = Verdict::Repairable;
    r.witness = identity_repair(s.structure());
    r.certificate = "identity repair";
  } else {
    r.verdict = s.bounded() ? Verdict::BoundedUnknown : Verdict::NotRepairable;
  }
  return r;
}

/// A* / E<=1 A* on tree or acyclic frames: one self-satisfying trace decides,
/// and the witness keeps a single realizing path.
inline RepairResult repair_single_trace(RepairSession& s, const HyperFormula& f) {
  FragmentClass fc = classify_fragment(f);
  detail::require(fc.single_trace_fragment(),
                  "single-trace requires fragment AStar or ELe1AStar");
  detail::require(s.shape() != FrameShape::General,
                  "single-trace requires a tree or acyclic frame");
  RepairResult r;
  r.strategy = StrategyTag::SingleTrace;
  std::map<int, const RepairSession::MasterPath*> by_trace;
  for (const auto& p : s.master_paths())
    if (!by_trace.count(p.trace)) by_trace[p.trace] = &p;
  Evaluator& ev = s.evaluator();
  for (const auto& [tid, path] : by_trace) {
    std::vector<int> assign(ev.num_vars(), tid);
    if (!ev.body_holds(assign, 0)) continue;
    RootPath rp;
    rp.states = path->states;
    r.verdict = Verdict::Repairable;
    r.witness = substructure_from_paths(s.structure(), {&rp}, TotalityFill::Minimal);
    r.certificate = "witness trace " + to_string(s.pool().trace(tid));
    return r;
  }
  r.verdict = Verdict::NotRepairable;
  return r;
}

/// E*A* on trees: enumerate assignments of traces to the existential
/// variables; universal variables range over the chosen traces only, and the
/// chosen branches form the witness.
inline RepairResult repair_tree_exist_enum(RepairSession& s, const HyperFormula& f) {
  detail::require(detail::is_exists_then_foralls(f), "exist-enum requires fragment E*A*");
  detail::require(s.shape() == FrameShape::Tree, "exist-enum requires a tree frame");
  RepairResult r;
  r.strategy = StrategyTag::TreeExistEnum;
  size_t m = 0;
  while (m < f.prefix.size() && f.prefix[m].first == Quantifier::Exists) ++m;

  std::set<int> trace_set;
  for (const auto& p : s.master_paths()) trace_set.insert(p.trace);
  std::vector<int> traces(trace_set.begin(), trace_set.end());
  Evaluator& ev = s.evaluator();

  size_t tuple_len = std::max<size_t>(m, 1);
  std::vector<size_t> odo(tuple_len, 0);
  while (true) {
    std::vector<int> assign(ev.num_vars(), -1);
    std::vector<int> chosen;
    for (size_t i = 0; i < tuple_len; ++i) chosen.push_back(traces[odo[i]]);
    for (size_t i = 0; i < m; ++i) assign[i] = chosen[i];
    std::sort(chosen.begin(), chosen.end());
    chosen.erase(std::unique(chosen.begin(), chosen.end()), chosen.end());
    if (ev.play(assign, m, chosen) == Tri::True) {
      std::set<int> chosen_ids(chosen.begin(), chosen.end());
      std::vector<const RootPath*> keep;
      std::vector<RootPath> storage;
      storage.reserve(s.master_paths().size());
      for (const auto& p : s.master_paths()) {
        if (chosen_ids.count(p.trace)) {
          storage.push_back(RootPath{p.states, {}});
        }
      }
      for (const auto& rp : storage) keep.push_back(&rp);
      r.verdict = Verdict::Repairable;
      r.witness = substructure_from_paths(s.structure(), keep, TotalityFill::KeepSubtrees);
      std::string cert = "chosen traces:";
      for (int tid : chosen_ids) cert += " " + to_string(s.pool().trace(tid));
      r.certificate = cert;
      return r;
    }
    // advance odometer (tuple[0] most significant)
    size_t i = tuple_len;
    while (i-- > 0) {
      if (++odo[i] < traces.size()) break;
      odo[i] = 0;
      if (i == 0) {
        r.verdict = Verdict::NotRepairable;
        return r;
      }
    }
  }
}

/// A E* on trees: the polynomial leaf-marking fixpoint. A marked leaf
/// instantiates the universal variable; it survives a round if some tuple of
/// marked leaves satisfies the body. The surviving branches are the witness.
inline RepairResult repair_tree_marking(RepairSession& s, const HyperFormula& f) {
  detail::require(classify_fragment(f).tag == FragmentTag::AEStar,
                  "marking requires fragment AEStar (one forall, then exists)");
  detail::require(s.shape() == FrameShape::Tree, "marking requires a tree frame");
  RepairResult r;
  r.strategy = StrategyTag::TreeMarking;
  const auto& paths = s.master_paths();
  std::vector<bool> marked(paths.size(), true);
  Evaluator& ev = s.evaluator();

  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> marked_traces;
    {
      std::set<int> ids;
      for (size_t i = 0; i < paths.size(); ++i)
        if (marked[i]) ids.insert(paths[i].trace);
      marked_traces.assign(ids.begin(), ids.end());
    }
    if (marked_traces.empty()) break;
    for (size_t i = 0; i < paths.size(); ++i) {
      if (!marked[i]) continue;
      std::vector<int> assign(ev.num_vars(), -1);
      assign[0] = paths[i].trace;
      if (ev.play(assign, 1, marked_traces) != Tri::True) {
        marked[i] = false;
        changed = true;
      }
    }
  }

  std::vector<RootPath> storage;
  std::vector<const RootPath*> keep;
  std::string leaves;
  for (size_t i = 0; i < paths.size(); ++i) {
    if (!marked[i]) continue;
    storage.push_back(RootPath{paths[i].states, {}});
    if (!leaves.empty()) leaves += ",";
    leaves += s.structure().state(paths[i].states.back()).id;
  }
  for (const auto& rp : storage) keep.push_back(&rp);
  if (keep.empty()) {
    r.verdict = Verdict::NotRepairable;
    r.certificate = "no leaves survive the marking fixpoint";
    return r;
  }
  r.verdict = Verdict::Repairable;
  r.witness = substructure_from_paths(s.structure(), keep, TotalityFill::KeepSubtrees);
  r.certificate = "surviving leaves: " + leaves;
  return r;
}

/// Full logic on tree/acyclic frames: ordered deterministic search over all
/// deadlock-free substructures, model checking each. Doubles as the oracle.
inline RepairResult repair_guess_check(RepairSession& s, const HyperFormula& f, Prefer prefer,
                                       StrategyTag tag = StrategyTag::GuessCheck) {
  (void)f;
  detail::require(s.shape() != FrameShape::General,
                  "guess-check requires a tree or acyclic frame");
  RepairResult r;
  r.strategy = tag;
  auto order = prefer == Prefer::Min ? RepairEnumerator::Order::AscendingCardinality
                                     : RepairEnumerator::Order::DescendingCardinality;
  RepairEnumerator en(s.structure(), order);
  while (auto c = en.next()) {
    if (s.check_candidate(*c)) {
      r.verdict = Verdict::Repairable;
      r.witness = std::move(*c);
      return r;
    }
  }
  r.verdict = Verdict::NotRepairable;
  return r;
}

/// General frames: enumerate repairs and model check each under the lasso
/// bounds. Failure is reported as bounded-unknown, never as not-repairable.
inline RepairResult repair_bounded_general(RepairSession& s, const HyperFormula& f,
                                           Prefer prefer) {
  (void)f;
  detail::require(s.shape() == FrameShape::General, "bounded search targets general frames");
  RepairResult r;
  r.strategy = StrategyTag::BoundedGeneral;
  auto order = prefer == Prefer::Min ? RepairEnumerator::Order::AscendingCardinality
                                     : RepairEnumerator::Order::DescendingCardinality;
  RepairEnumerator en(s.structure(), order);
  while (auto c = en.next()) {
    if (s.check_candidate(*c)) {
      r.verdict = Verdict::Repairable;
      r.witness = std::move(*c);
      return r;
    }
  }
  r.verdict = Verdict::BoundedUnknown;
  return r;
}

namespace detail {

inline void refine_max(RepairSession& s, RepairResult& r) {
  if (r.verdict != Verdict::Repairable) return;
  std::set<int> kept(r.witness->kept.begin(), r.witness->kept.end());
  size_t m = s.structure().num_transitions();
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < m; ++i) {
      if (kept.count(static_cast<int>(i))) continue;
      RepairCandidate c;
      c.kept.assign(kept.begin(), kept.end());
      c.kept.insert(std::lower_bound(c.kept.begin(), c.kept.end(), static_cast<int>(i)),
                    static_cast<int>(i));
      if (s.check_candidate(c)) {
        kept.insert(static_cast<int>(i));
        changed = true;
      }
    }
  }
  r.witness->kept.assign(kept.begin(), kept.end());
}

inline void refine_min(RepairSession& s, RepairResult& r) {
  if (r.verdict != Verdict::Repairable) return;
  std::set<int> kept(r.witness->kept.begin(), r.witness->kept.end());
  const auto& trans = s.structure().transitions();
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = kept.begin(); it != kept.end();) {
      int idx = *it;
      std::map<int, int> outdeg;
      for (int e : kept) ++outdeg[trans[static_cast<size_t>(e)].first];
      if (outdeg[trans[static_cast<size_t>(idx)].first] <= 1) {
        ++it;
        continue;
      }
      RepairCandidate c;
      for (int e : kept)
        if (e != idx) c.kept.push_back(e);
      if (s.check_candidate(c)) {
        it = kept.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  r.witness->kept.assign(kept.begin(), kept.end());
}

}  // namespace detail

/// The repair decision procedure: dispatches to the fragment/frame specific
/// strategy, honors the witness preference, and re-verifies every witness.
inline RepairResult repair(const KripkeStructure& k, const HyperFormula& f,
                           const RepairOptions& opts = {}) {
  FragmentClass fc = classify_fragment(f);
  RepairSession session(k, f, opts.bounds);
  FrameShape shape = session.shape();
  RepairResult r;

  auto run_auto = [&]() {
    if (fc.exists_only()) return repair_existential(session, f);
    if (opts.prefer == Prefer::Min) {
      // global minimality comes from ascending exhaustive search
      if (shape == FrameShape::General) return repair_bounded_general(session, f, opts.prefer);
      return repair_guess_check(session, f, opts.prefer, StrategyTag::BruteForce);
    }
    if (shape == FrameShape::General) return repair_bounded_general(session, f, opts.prefer);
    if (fc.single_trace_fragment()) return repair_single_trace(session, f);
    if (shape == FrameShape::Tree) {
      if (fc.tag == FragmentTag::EStarAStar) return repair_tree_exist_enum(session, f);
      if (fc.tag == FragmentTag::AEStar) return repair_tree_marking(session, f);
    }
    return repair_guess_check(session, f, opts.prefer);
  };

  switch (opts.strategy) {
    case StrategyChoice::Auto:
      r = run_auto();
      break;
    case StrategyChoice::Brute:
      detail::require(shape != FrameShape::General,
                      "brute requires a tree or acyclic frame (use bounded on general frames)");
      r = repair_guess_check(session, f, opts.prefer, StrategyTag::BruteForce);
      break;
    case StrategyChoice::Marking:
      r = repair_tree_marking(session, f);
      break;
    case StrategyChoice::SingleTrace:
      r = repair_single_trace(session, f);
      break;
    case StrategyChoice::ExistEnum:
      r = repair_tree_exist_enum(session, f);
      break;
    case StrategyChoice::McOnly:
      r = repair_existential(session, f);
      break;
    case StrategyChoice::Bounded:
      detail::require(shape == FrameShape::General, "bounded targets general frames");
      r = repair_bounded_general(session, f, opts.prefer);
      break;
  }

  bool exhaustive = r.strategy == StrategyTag::BruteForce || r.strategy == StrategyTag::GuessCheck ||
                    r.strategy == StrategyTag::BoundedGeneral;
  if (opts.prefer == Prefer::Max) detail::refine_max(session, r);
  if (opts.prefer == Prefer::Min && !exhaustive) detail::refine_min(session, r);

  if (r.verdict == Verdict::Repairable) {
    if (!r.witness || !session.check_candidate(*r.witness))
      throw Error(ErrorCode::BadInput, "internal: repair witness failed re-verification");
  }
  if (session.bounded()) r.bounds_used = session.bounds();
  return r;
}

}  // namespace hyrep

#endif
