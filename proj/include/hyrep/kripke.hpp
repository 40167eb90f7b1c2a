#ifndef HYREP_KRIPKE_HPP
#define HYREP_KRIPKE_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hyrep/errors.hpp"
#include "hyrep/trace.hpp"

namespace hyrep {

// Finite state-labeled transition system with a designated initial state and
// a total transition relation. States are addressed by string ids; the
// transition list is kept sorted by (from-id, to-id), which fixes the
// "transition id" order used everywhere for deterministic enumeration.
class KripkeStructure {
 public:
  struct State {
    std::string id;
    Letter labels;
  };

  int add_state(const std::string& id, Letter labels = {}) {
    if (index_.count(id)) throw Error(ErrorCode::BadInput, "duplicate state id '" + id + "'");
    states_.push_back(State{id, std::move(labels)});
    index_[id] = static_cast<int>(states_.size()) - 1;
    return static_cast<int>(states_.size()) - 1;
  }

  void set_init(const std::string& id) { init_ = index_of(id); }

  void add_transition(const std::string& from, const std::string& to) {
    int f = index_of(from);
    int t = index_of(to);
    auto key = std::make_pair(from, to);
    auto pos = std::lower_bound(trans_.begin(), trans_.end(), key,
                                [this](const std::pair<int, int>& tr, const auto& k) {
                                  return id_pair(tr) < k;
                                });
    if (pos != trans_.end() && id_pair(*pos) == key)
      throw Error(ErrorCode::DuplicateTransition, from + " -> " + to);
    trans_.insert(pos, {f, t});
  }

  bool has_state(const std::string& id) const { return index_.count(id) != 0; }

  int index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorCode::UnknownState, "'" + id + "'");
    return it->second;
  }

  size_t num_states() const { return states_.size(); }
  size_t num_transitions() const { return trans_.size(); }
  const State& state(int i) const { return states_[static_cast<size_t>(i)]; }
  const std::vector<State>& states() const { return states_; }
  int init_index() const { return init_; }
  const std::string& init_id() const { return states_[static_cast<size_t>(init_)].id; }
  const std::vector<std::pair<int, int>>& transitions() const { return trans_; }

  std::pair<std::string, std::string> id_pair(const std::pair<int, int>& tr) const {
    return {states_[static_cast<size_t>(tr.first)].id, states_[static_cast<size_t>(tr.second)].id};
  }

  /// successor state indices per state, in transition order
  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(states_.size());
    for (const auto& [f, t] : trans_) adj[static_cast<size_t>(f)].push_back(t);
    return adj;
  }

  /// outgoing transition indices per state
  std::vector<std::vector<int>> out_transitions() const {
    std::vector<std::vector<int>> out(states_.size());
    for (size_t i = 0; i < trans_.size(); ++i)
      out[static_cast<size_t>(trans_[i].first)].push_back(static_cast<int>(i));
    return out;
  }

 private:
  std::vector<State> states_;
  std::map<std::string, int> index_;
  int init_ = -1;
  std::vector<std::pair<int, int>> trans_;
};

inline void validate(const KripkeStructure& k) {
  if (k.num_states() == 0 || k.init_index() < 0)
    throw Error(ErrorCode::MissingInit, "structure has no initial state");
  std::vector<bool> has_out(k.num_states(), false);
  for (const auto& [f, t] : k.transitions()) {
    if (f < 0 || t < 0 || static_cast<size_t>(f) >= k.num_states() ||
        static_cast<size_t>(t) >= k.num_states())
      throw Error(ErrorCode::UnknownState, "transition endpoint out of range");
    has_out[static_cast<size_t>(f)] = true;
  }
  for (size_t i = 0; i < k.num_states(); ++i)
    if (!has_out[i]) throw Error(ErrorCode::DeadlockState, "'" + k.state(static_cast<int>(i)).id + "'");
}

enum class FrameShape { Tree, Acyclic, General };

inline const char* frame_shape_name(FrameShape s) {
  switch (s) {
    case FrameShape::Tree: return "tree";
    case FrameShape::Acyclic: return "acyclic";
    case FrameShape::General: return "general";
  }
  return "?";
}

// Acyclic: the only loops are self-loops on otherwise terminal states.
// Tree: additionally unique predecessors (self-loops aside), root = init.
inline FrameShape classify_frame(const KripkeStructure& k) {
  size_t n = k.num_states();
  std::vector<int> outdeg(n, 0);
  std::vector<bool> self(n, false);
  for (const auto& [f, t] : k.transitions()) {
    ++outdeg[static_cast<size_t>(f)];
    if (f == t) self[static_cast<size_t>(f)] = true;
  }
  for (size_t i = 0; i < n; ++i)
    if (self[i] && outdeg[i] > 1) return FrameShape::General;

  // cycle detection on the graph without self-loops
  auto adj = k.adjacency();
  std::vector<int> color(n, 0);  // 0 unseen, 1 on stack, 2 done
  bool cyclic = false;
  auto dfs = [&](auto&& self, int v) -> void {
    color[static_cast<size_t>(v)] = 1;
    for (int w : adj[static_cast<size_t>(v)]) {
      if (cyclic) return;
      if (w == v) continue;  // terminal self-loop
      if (color[static_cast<size_t>(w)] == 1) {
        cyclic = true;
        return;
      }
      if (color[static_cast<size_t>(w)] == 0) self(self, w);
    }
    color[static_cast<size_t>(v)] = 2;
  };
  for (size_t s = 0; s < n; ++s) {
    if (color[s] == 0) dfs(dfs, static_cast<int>(s));
    if (cyclic) return FrameShape::General;
  }

  std::vector<int> preds(n, 0);
  for (const auto& [f, t] : k.transitions())
    if (f != t) ++preds[static_cast<size_t>(t)];
  int init = k.init_index();
  bool tree = preds[static_cast<size_t>(init)] == 0;
  for (size_t i = 0; i < n && tree; ++i)
    if (static_cast<int>(i) != init && preds[i] != 1) tree = false;
  return tree ? FrameShape::Tree : FrameShape::Acyclic;
}

// A maximal path from init in a tree/acyclic frame: simple until it reaches a
// self-looping terminal state. The realized trace drops the terminal label
// into the loop part.
struct RootPath {
  std::vector<int> states;  // init .. terminal
  UltimatelyPeriodicTrace trace;
};

inline std::vector<RootPath> root_paths(const KripkeStructure& k) {
  validate(k);
  if (classify_frame(k) == FrameShape::General)
    throw Error(ErrorCode::NotAcyclic, "trace enumeration requires a tree or acyclic frame");
  auto adj = k.adjacency();
  std::vector<RootPath> out;
  std::vector<int> path;
  auto emit = [&](const std::vector<int>& p) {
    RootPath rp;
    rp.states = p;
    UltimatelyPeriodicTrace t;
    for (size_t i = 0; i + 1 < p.size(); ++i) t.stem.push_back(k.state(p[i]).labels);
    t.loop.push_back(k.state(p.back()).labels);
    rp.trace = canonical(std::move(t));
    out.push_back(std::move(rp));
  };
  // iterative DFS over simple paths (the frame is a DAG once self-loops are set aside)
  struct Frame {
    int state;
    size_t next = 0;
  };
  std::vector<Frame> stack{{k.init_index(), 0}};
  path.push_back(k.init_index());
  while (!stack.empty()) {
    Frame& f = stack.back();
    const auto& succs = adj[static_cast<size_t>(f.state)];
    bool terminal = succs.size() == 1 && succs[0] == f.state;
    if (terminal) {
      emit(path);
      stack.pop_back();
      path.pop_back();
      continue;
    }
    bool advanced = false;
    while (f.next < succs.size()) {
      int w = succs[f.next++];
      if (w == f.state) continue;
      stack.push_back({w, 0});
      path.push_back(w);
      advanced = true;
      break;
    }
    if (!advanced) {
      stack.pop_back();
      path.pop_back();
    }
  }
  return out;
}

/// The trace set of a tree/acyclic structure, canonical and deduplicated.
inline std::vector<UltimatelyPeriodicTrace> enumerate_traces(const KripkeStructure& k) {
  std::set<UltimatelyPeriodicTrace> set;
  for (auto& rp : root_paths(k)) set.insert(std::move(rp.trace));
  return {set.begin(), set.end()};
}

/// Label traces realized by lassos with stem length <= stem_bound and loop
/// length <= loop_bound, canonical and deduplicated. Exhaustive within the
/// bounds; exponential in them by nature.
inline std::vector<UltimatelyPeriodicTrace> enumerate_lassos(const KripkeStructure& k,
                                                             size_t stem_bound,
                                                             size_t loop_bound) {
  validate(k);
  if (loop_bound < 1) throw Error(ErrorCode::BadInput, "loop bound must be >= 1");
  auto adj = k.adjacency();
  std::set<UltimatelyPeriodicTrace> set;

  std::vector<Letter> loop_letters;
  // closed walks anchor -> ... -> anchor of length 1..loop_bound
  auto cycles_from = [&](int anchor, const std::vector<Letter>& stem_letters) {
    std::vector<int> walk{anchor};
    auto rec = [&](auto&& self, int v, size_t len) -> void {
      if (len > loop_bound) return;
      for (int w : adj[static_cast<size_t>(v)]) {
        if (w == anchor) {
          UltimatelyPeriodicTrace t;
          t.stem = stem_letters;
          for (int s : walk) t.loop.push_back(k.state(s).labels);
          set.insert(canonical(std::move(t)));
        }
        if (len + 1 <= loop_bound) {
          walk.push_back(w);
          self(self, w, len + 1);
          walk.pop_back();
        }
      }
    };
    rec(rec, anchor, 1);
  };

  std::vector<int> stem_states;
  std::vector<Letter> stem_letters;
  auto walk_stem = [&](auto&& self, int v, size_t len) -> void {
    cycles_from(v, stem_letters);
    if (len >= stem_bound) return;
    for (int w : adj[static_cast<size_t>(v)]) {
      stem_letters.push_back(k.state(v).labels);
      self(self, w, len + 1);
      stem_letters.pop_back();
    }
  };
  walk_stem(walk_stem, k.init_index(), 0);
  return {set.begin(), set.end()};
}

// A repair candidate: the subset of parent transitions that is kept. States,
// labels and the initial state never change.
struct RepairCandidate {
  std::vector<int> kept;  // sorted transition indices into the parent
};

inline KripkeStructure apply_repair(const KripkeStructure& k, const RepairCandidate& c) {
  KripkeStructure out;
  for (const auto& s : k.states()) out.add_state(s.id, s.labels);
  out.set_init(k.init_id());
  std::vector<bool> has_out(k.num_states(), false);
  for (int idx : c.kept) {
    if (idx < 0 || static_cast<size_t>(idx) >= k.num_transitions())
      throw Error(ErrorCode::BadInput, "kept transition index out of range");
    has_out[static_cast<size_t>(k.transitions()[static_cast<size_t>(idx)].first)] = true;
  }
  for (size_t i = 0; i < k.num_states(); ++i)
    if (!has_out[i])
      throw Error(ErrorCode::WouldDeadlock, "'" + k.state(static_cast<int>(i)).id + "'");
  for (int idx : c.kept) {
    auto [f, t] = k.transitions()[static_cast<size_t>(idx)];
    out.add_transition(k.state(f).id, k.state(t).id);
  }
  return out;
}

inline RepairCandidate identity_repair(const KripkeStructure& k) {
  RepairCandidate c;
  c.kept.resize(k.num_transitions());
  for (size_t i = 0; i < c.kept.size(); ++i) c.kept[i] = static_cast<int>(i);
  return c;
}

// Streams every deadlock-free transition subset. Order: decreasing kept
// cardinality, ties by lexicographically smallest kept set, so the identity
// repair comes first and maximal repairs are met early. Ascending order is
// used by minimality-preferring searches.
class RepairEnumerator {
 public:
  enum class Order { DescendingCardinality, AscendingCardinality };

  explicit RepairEnumerator(const KripkeStructure& k, Order order = Order::DescendingCardinality)
      : order_(order) {
    validate(k);
    auto out = k.out_transitions();
    for (auto& edges : out)
      if (!edges.empty()) groups_.push_back(std::move(edges));
    for (const auto& g : groups_) max_removed_ += g.size() - 1;
    level_ = 0;
  }

  std::optional<RepairCandidate> next() {
    while (cursor_ >= buffer_.size()) {
      if (level_ > max_removed_) return std::nullopt;
      size_t removed = order_ == Order::DescendingCardinality ? level_ : max_removed_ - level_;
      fill_level(removed);
      ++level_;
      cursor_ = 0;
    }
    RepairCandidate c;
    c.kept = buffer_[cursor_++];
    return c;
  }

 private:
  void fill_level(size_t removed) {
    buffer_.clear();
    std::vector<int> kept;
    gen(0, removed, kept);
    std::sort(buffer_.begin(), buffer_.end());
  }

  void gen(size_t gi, size_t to_remove, std::vector<int>& kept) {
    if (gi == groups_.size()) {
      if (to_remove == 0) buffer_.push_back(kept);
      return;
    }
    size_t rest_capacity = 0;
    for (size_t j = gi + 1; j < groups_.size(); ++j) rest_capacity += groups_[j].size() - 1;
    const auto& g = groups_[gi];
    size_t max_here = std::min(g.size() - 1, to_remove);
    size_t min_here = to_remove > rest_capacity ? to_remove - rest_capacity : 0;
    for (size_t r = min_here; r <= max_here; ++r) {
      // all kept-subsets of size |g| - r
      size_t keep = g.size() - r;
      std::vector<size_t> pick(keep);
      for (size_t i = 0; i < keep; ++i) pick[i] = i;
      while (true) {
        size_t base = kept.size();
        for (size_t i : pick) kept.push_back(g[i]);
        gen(gi + 1, to_remove - r, kept);
        kept.resize(base);
        // next combination
        size_t i = keep;
        while (i-- > 0) {
          if (pick[i] + (keep - i) < g.size()) {
            ++pick[i];
            for (size_t j = i + 1; j < keep; ++j) pick[j] = pick[j - 1] + 1;
            break;
          }
          if (i == 0) {
            i = keep + 1;  // done marker
            break;
          }
        }
        if (i == keep + 1 || keep == 0) break;
      }
    }
  }

  Order order_;
  std::vector<std::vector<int>> groups_;
  size_t max_removed_ = 0;
  size_t level_ = 0;
  std::vector<std::vector<int>> buffer_;
  size_t cursor_ = 0;
};

/// Eager convenience wrapper; mainly for tests and small structures.
inline std::vector<RepairCandidate> enumerate_repairs(const KripkeStructure& k) {
  RepairEnumerator e(k);
  std::vector<RepairCandidate> out;
  while (auto c = e.next()) out.push_back(std::move(*c));
  return out;
}

enum class TotalityFill {
  KeepSubtrees,  // states off the kept paths keep all their transitions
  Minimal,       // states off the kept paths keep their first transition only
};

/// Substructure keeping exactly the given root paths; every other state gets
/// enough outgoing transitions to stay deadlock-free.
inline RepairCandidate substructure_from_paths(const KripkeStructure& k,
                                               const std::vector<const RootPath*>& paths,
                                               TotalityFill fill) {
  std::set<std::pair<int, int>> kept_pairs;
  std::vector<bool> covered(k.num_states(), false);
  for (const RootPath* p : paths) {
    for (size_t i = 0; i + 1 < p->states.size(); ++i) {
      kept_pairs.insert({p->states[i], p->states[i + 1]});
      covered[static_cast<size_t>(p->states[i])] = true;
    }
    int last = p->states.back();
    kept_pairs.insert({last, last});
    covered[static_cast<size_t>(last)] = true;
  }
  auto out = k.out_transitions();
  RepairCandidate c;
  for (size_t i = 0; i < k.num_transitions(); ++i) {
    auto tr = k.transitions()[i];
    if (kept_pairs.count(tr)) {
      c.kept.push_back(static_cast<int>(i));
    } else if (!covered[static_cast<size_t>(tr.first)]) {
      if (fill == TotalityFill::KeepSubtrees) {
        c.kept.push_back(static_cast<int>(i));
      } else if (out[static_cast<size_t>(tr.first)].front() == static_cast<int>(i)) {
        c.kept.push_back(static_cast<int>(i));
      }
    }
  }
  return c;
}

/// Adds the mandatory self-loop to states without outgoing transitions.
/// Explicit normalization; validation itself never mutates.
inline KripkeStructure add_terminal_loops(const KripkeStructure& k) {
  std::vector<bool> has_out(k.num_states(), false);
  for (const auto& [f, t] : k.transitions()) has_out[static_cast<size_t>(f)] = true;
  KripkeStructure out;
  for (const auto& s : k.states()) out.add_state(s.id, s.labels);
  if (k.init_index() >= 0) out.set_init(k.init_id());
  for (const auto& [f, t] : k.transitions())
    out.add_transition(k.state(f).id, k.state(t).id);
  for (size_t i = 0; i < k.num_states(); ++i)
    if (!has_out[i]) out.add_transition(k.state(static_cast<int>(i)).id, k.state(static_cast<int>(i)).id);
  return out;
}

// JSON format:
// {"states": [{"id": "s0", "labels": ["a"]}, ...], "init": "s0",
//  "transitions": [["s0","s1"], ...]}
inline KripkeStructure structure_from_json(const nlohmann::json& j) {
  KripkeStructure k;
  if (!j.is_object() || !j.contains("states") || !j.contains("init") || !j.contains("transitions"))
    throw Error(ErrorCode::BadInput, "structure JSON needs states, init and transitions");
  for (const auto& s : j.at("states")) {
    Letter labels;
    if (s.contains("labels"))
      for (const auto& l : s.at("labels")) labels.insert(l.get<std::string>());
    k.add_state(s.at("id").get<std::string>(), std::move(labels));
  }
  std::string init = j.at("init").get<std::string>();
  if (!k.has_state(init)) throw Error(ErrorCode::MissingInit, "init state '" + init + "' not declared");
  k.set_init(init);
  for (const auto& t : j.at("transitions")) {
    if (!t.is_array() || t.size() != 2)
      throw Error(ErrorCode::BadInput, "transition entries must be [from, to] pairs");
    k.add_transition(t.at(0).get<std::string>(), t.at(1).get<std::string>());
  }
  return k;
}

inline nlohmann::ordered_json structure_to_json(const KripkeStructure& k) {
  nlohmann::ordered_json j;
  j["states"] = nlohmann::ordered_json::array();
  for (const auto& s : k.states()) {
    nlohmann::ordered_json st;
    st["id"] = s.id;
    st["labels"] = s.labels;
    j["states"].push_back(std::move(st));
  }
  j["init"] = k.init_id();
  j["transitions"] = nlohmann::ordered_json::array();
  for (const auto& tr : k.transitions()) {
    auto [f, t] = k.id_pair(tr);
    j["transitions"].push_back({f, t});
  }
  return j;
}

inline std::string to_dot(const KripkeStructure& k) {
  std::string s = "digraph K {\n";
  for (const auto& st : k.states()) {
    s += "  \"" + st.id + "\" [label=\"" + st.id + "\\n{";
    bool first = true;
    for (const auto& p : st.labels) {
      if (!first) s += ",";
      s += p;
      first = false;
    }
    s += "}\"";
    if (st.id == k.init_id()) s += ", shape=doublecircle";
    s += "];\n";
  }
  for (const auto& tr : k.transitions()) {
    auto [f, t] = k.id_pair(tr);
    s += "  \"" + f + "\" -> \"" + t + "\";\n";
  }
  s += "}\n";
  return s;
}

}  // namespace hyrep

#endif
