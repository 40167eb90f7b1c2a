#ifndef HYREP_EDAS_HPP
#define HYREP_EDAS_HPP

#include <string>
#include <utility>
#include <vector>

#include "hyrep/kripke.hpp"
#include "hyrep/parse.hpp"
#include "hyrep/repair.hpp"
#include "hyrep/semantics.hpp"

namespace hyrep {

// Built-in conference-manager sketch. Four papers cover the reachable
// internal decision contexts (ntf, dec, ses with ses following dec); the hole
// that computes the Session column is a nondeterministic choice, so every
// context branches into a session-yes and a session-no leaf. Repairing the
// sketch against
//
//   forall p. forall q. G ((pending[p] & pending[q]) -> (session[p] <-> session[q]))
//
// prunes exactly the session choices that leak the hidden decision through
// the pending rows.

struct EdasContext {
  std::string paper;
  bool ntf, dec, ses;
};

struct EdasRow {
  std::string paper;
  bool ntf, dec, ses;
  std::string status;
  std::string session;
};

struct EdasDemo {
  KripkeStructure structure;
  HyperFormula formula;
  bool sketch_check = false;       // the unrepaired sketch against phi
  bool leaky_check = false;        // the hole<-ses completion against phi
  std::vector<EdasRow> table_leak; // output of the leaky completion
  bool repaired = false;
  RepairResult result;
  bool post_check = false;
  std::vector<EdasRow> table_fixed;
  std::vector<std::pair<std::string, std::string>> removed;
};

inline const std::vector<EdasContext>& edas_contexts() {
  static const std::vector<EdasContext> rows = {
      {"foo1", true, true, true},
      {"bar1", true, false, false},
      {"foo2", false, false, false},
      {"bar2", false, true, true},
  };
  return rows;
}

inline std::string edas_status(const EdasContext& c) {
  return c.ntf ? (c.dec ? "Accept" : "Reject") : "Pending";
}

inline KripkeStructure build_edas_structure() {
  // hierarchical ids keep the root edges first in transition order, so the
  // preference refinement reattaches rows before weighing their hole choices
  KripkeStructure k;
  k.add_state("r");
  k.set_init("r");
  for (const auto& c : edas_contexts()) {
    std::string ctx = "r_" + c.paper;
    k.add_state(ctx);
    k.add_transition("r", ctx);
    std::string status_prop = c.ntf ? (c.dec ? "accept" : "reject") : "pending";
    k.add_state(ctx + "_no", Letter{status_prop});
    k.add_state(ctx + "_yes", Letter{status_prop, "session"});
    k.add_transition(ctx, ctx + "_no");
    k.add_transition(ctx, ctx + "_yes");
    k.add_transition(ctx + "_no", ctx + "_no");
    k.add_transition(ctx + "_yes", ctx + "_yes");
  }
  return k;
}

inline HyperFormula edas_formula() {
  return parse_formula(
      "forall p. forall q. "
      "G ((pending[p] & pending[q]) -> (session[p] <-> session[q]))");
}

namespace detail {

inline RepairCandidate edas_completion(const KripkeStructure& k,
                                       const std::vector<bool>& session_yes) {
  // keep, per context, exactly one hole branch
  RepairCandidate c;
  const auto& ctxs = edas_contexts();
  for (size_t i = 0; i < k.num_transitions(); ++i) {
    auto [from, to] = k.id_pair(k.transitions()[i]);
    bool keep = true;
    for (size_t j = 0; j < ctxs.size(); ++j) {
      if (from != "r_" + ctxs[j].paper) continue;
      keep = to == "r_" + ctxs[j].paper + (session_yes[j] ? "_yes" : "_no");
    }
    if (keep) c.kept.push_back(static_cast<int>(i));
  }
  return c;
}

inline std::vector<EdasRow> edas_rows(const KripkeStructure& k, const RepairCandidate& c) {
  std::set<std::pair<std::string, std::string>> kept;
  for (int i : c.kept) kept.insert(k.id_pair(k.transitions()[static_cast<size_t>(i)]));
  std::vector<EdasRow> rows;
  for (const auto& ctx : edas_contexts()) {
    std::string node = "r_" + ctx.paper;
    bool yes = kept.count({node, node + "_yes"}) != 0;
    bool no = kept.count({node, node + "_no"}) != 0;
    // both kept: the hole stays unconstrained there, the completion keeps the
    // original program's value (session <- ses)
    bool session = yes && no ? ctx.ses : yes;
    rows.push_back(EdasRow{ctx.paper, ctx.ntf, ctx.dec, ctx.ses, edas_status(ctx),
                           session ? "Yes" : "No"});
  }
  return rows;
}

}  // namespace detail

inline EdasDemo run_edas_demo(bool do_repair = true) {
  EdasDemo d;
  d.structure = build_edas_structure();
  d.formula = edas_formula();

  d.sketch_check = model_check(d.structure, d.formula).holds;

  // the paper's incorrect completion: fill the hole with ses
  std::vector<bool> ses_values;
  for (const auto& c : edas_contexts()) ses_values.push_back(c.ses);
  RepairCandidate leaky = detail::edas_completion(d.structure, ses_values);
  d.leaky_check = model_check(apply_repair(d.structure, leaky), d.formula).holds;
  d.table_leak = detail::edas_rows(d.structure, leaky);

  if (!do_repair) return d;

  RepairOptions opts;
  opts.prefer = Prefer::Max;
  d.result = repair(d.structure, d.formula, opts);
  d.repaired = d.result.verdict == Verdict::Repairable;
  if (d.repaired) {
    d.post_check = model_check(apply_repair(d.structure, *d.result.witness), d.formula).holds;
    d.table_fixed = detail::edas_rows(d.structure, *d.result.witness);
    std::set<int> kept(d.result.witness->kept.begin(), d.result.witness->kept.end());
    for (size_t i = 0; i < d.structure.num_transitions(); ++i)
      if (!kept.count(static_cast<int>(i)))
        d.removed.push_back(d.structure.id_pair(d.structure.transitions()[i]));
  }
  return d;
}

}  // namespace hyrep

#endif
