#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hyrep/parse.hpp"
#include "hyrep/repair.hpp"
#include "helpers.hpp"

using namespace hyrep;
using testutil::fig1;
using testutil::fig1_tree;
using testutil::two_cycle;

namespace {

bool reverify(const KripkeStructure& k, const HyperFormula& f, const RepairResult& r,
              std::optional<LassoBounds> bounds = {}) {
  REQUIRE(r.witness);
  if (!bounds) bounds = r.bounds_used;
  return model_check(apply_repair(k, *r.witness), f, bounds).holds;
}

RepairResult run(const KripkeStructure& k, const std::string& formula, RepairOptions o = {}) {
  return repair(k, parse_formula(formula), o);
}

}  // namespace

TEST_CASE("existential fragment repairs coincide with model checking") {
  auto r1 = run(fig1(), "exists p. F b[p]");
  CHECK(r1.verdict == Verdict::Repairable);
  CHECK(r1.strategy == StrategyTag::McOnly);
  REQUIRE(r1.witness);
  CHECK(r1.witness->kept.size() == fig1().num_transitions());  // identity witness

  auto r2 = run(fig1(), "exists p. G a[p]");
  CHECK(r2.verdict == Verdict::NotRepairable);

  KripkeStructure one;
  one.add_state("s");
  one.set_init("s");
  one.add_transition("s", "s");
  CHECK(run(one, "exists p. true").verdict == Verdict::Repairable);
}

TEST_CASE("unsatisfiable bodies are never repairable") {
  CHECK(run(fig1(), "exists p. false").verdict == Verdict::NotRepairable);
  CHECK(run(fig1_tree(), "forall p. false").verdict == Verdict::NotRepairable);
}

TEST_CASE("single-trace strategy on the universal fragment") {
  auto r = run(fig1(), "forall p. F b[p]", {Prefer::Any, StrategyChoice::SingleTrace, {}});
  CHECK(r.verdict == Verdict::Repairable);
  CHECK(r.strategy == StrategyTag::SingleTrace);
  CHECK(reverify(fig1(), parse_formula("forall p. F b[p]"), r));

  // whole structure also works, so max preference grows back to the identity
  auto rmax = run(fig1(), "forall p. F b[p]", {Prefer::Max, StrategyChoice::Auto, {}});
  REQUIRE(rmax.witness);
  CHECK(rmax.witness->kept.size() == fig1().num_transitions());

  CHECK(run(fig1(), "forall p. G a[p]").verdict == Verdict::NotRepairable);
}

TEST_CASE("single-trace handles reachability instances") {
  auto red = reduce_reachability({{"s", "m"}, {"m", "t"}, {"s", "x"}}, "s", "t");
  CHECK(repair(red.structure, red.universal).verdict == Verdict::Repairable);
  CHECK(repair(red.structure, red.existential).verdict == Verdict::Repairable);

  auto gone = reduce_reachability({{"s", "m"}, {"t", "u"}}, "s", "t");
  CHECK(repair(gone.structure, gone.universal).verdict == Verdict::NotRepairable);
  CHECK(repair(gone.structure, gone.existential).verdict == Verdict::NotRepairable);

  auto self = reduce_reachability({{"s", "m"}}, "s", "s");
  CHECK(repair(self.structure, self.universal).verdict == Verdict::Repairable);
}

TEST_CASE("exist-enum picks a witness trace set on trees") {
  // a single existential followed by universals routes to single-trace under
  // auto dispatch; the enumeration strategy handles it when asked directly
  auto r = run(fig1_tree(), "exists p. forall q. G (a[p] <-> a[q])",
               {Prefer::Any, StrategyChoice::ExistEnum, {}});
  CHECK(r.verdict == Verdict::Repairable);
  CHECK(r.strategy == StrategyTag::TreeExistEnum);
  // a single trace satisfies the body diagonally
  auto sub = apply_repair(fig1_tree(), *r.witness);
  CHECK(enumerate_traces(sub).size() == 1);

  // body forcing two distinct traces: one must reach b, one must stay in a
  KripkeStructure k;
  k.add_state("r", {"a"});
  k.add_state("u", {"b"});
  k.add_state("v", {"a"});
  k.set_init("r");
  k.add_transition("r", "u");
  k.add_transition("r", "v");
  k.add_transition("u", "u");
  k.add_transition("v", "v");
  // the universal trace variable forces every chosen trace to stay in a,
  // which clashes with the trace that must reach b
  auto r2 = run(k, "exists p. exists q. forall t. F b[p] & G a[t]");
  CHECK(r2.strategy == StrategyTag::TreeExistEnum);
  CHECK(r2.verdict == Verdict::NotRepairable);
  auto r3 = run(k, "exists p. exists q. F b[p] & G a[q]");
  CHECK(r3.verdict == Verdict::Repairable);
  CHECK(enumerate_traces(apply_repair(k, *r3.witness)).size() == 2);
}

TEST_CASE("exist-enum with zero existentials matches single-trace semantics") {
  std::mt19937 rng(17);
  for (int i = 0; i < 80; ++i) {
    auto k = testutil::random_tree(rng);
    auto f = testutil::random_formula(rng, "AA", 2);
    auto a = repair(k, f, {Prefer::Any, StrategyChoice::ExistEnum, {}});
    auto b = repair(k, f, {Prefer::Any, StrategyChoice::SingleTrace, {}});
    REQUIRE(a.verdict == b.verdict);
  }
}

TEST_CASE("marking keeps everything when the body is trivial") {
  auto r = run(fig1_tree(), "forall p. exists q. true",
               {Prefer::Any, StrategyChoice::Marking, {}});
  CHECK(r.verdict == Verdict::Repairable);
  CHECK(r.strategy == StrategyTag::TreeMarking);
  REQUIRE(r.witness);
  CHECK(r.witness->kept.size() == fig1_tree().num_transitions());
  CHECK(r.certificate.find("surviving leaves") != std::string::npos);
}

TEST_CASE("marking drops the leaf without a partner in round one") {
  // three branches: {x}, {x,y}, {} — the empty leaf needs a y-partner with no
  // x anywhere and none exists
  KripkeStructure k;
  k.add_state("r");
  k.add_state("l1", {"x"});
  k.add_state("l2", {"x", "y"});
  k.add_state("l3", {});
  k.set_init("r");
  k.add_transition("r", "l1");
  k.add_transition("r", "l2");
  k.add_transition("r", "l3");
  k.add_transition("l1", "l1");
  k.add_transition("l2", "l2");
  k.add_transition("l3", "l3");
  // guarded by X: position 0 carries the shared root label
  auto f = parse_formula("forall p. exists q. X (G (x[p] <-> x[q]) & G (y[p] <-> !y[q]))");
  auto r = repair(k, f);
  CHECK(r.strategy == StrategyTag::TreeMarking);
  CHECK(r.verdict == Verdict::Repairable);
  CHECK(r.certificate == "surviving leaves: l1,l2");
  auto sub = apply_repair(k, *r.witness);
  CHECK(enumerate_traces(sub).size() == 2);
  CHECK(model_check(sub, f).holds);
}

TEST_CASE("marking that empties out means not repairable") {
  KripkeStructure k;
  k.add_state("r");
  k.add_state("l1", {"x"});
  k.set_init("r");
  k.add_transition("r", "l1");
  k.add_transition("l1", "l1");
  auto r = repair(k, parse_formula("forall p. exists q. G (x[p] <-> !x[q])"));
  CHECK(r.verdict == Verdict::NotRepairable);
  CHECK(r.certificate.find("no leaves survive") != std::string::npos);
}

TEST_CASE("guess-check finds identity-only repairs") {
  KripkeStructure k;
  k.add_state("r", {"a"});
  k.add_state("u", {"b"});
  k.add_state("v", {"a"});
  k.set_init("r");
  k.add_transition("r", "u");
  k.add_transition("r", "v");
  k.add_transition("u", "u");
  k.add_transition("v", "v");
  // demands both a b-trace and an a-only trace with two alternations
  auto f = parse_formula("forall t. exists p. forall s. exists q. F b[p] & G a[q]");
  auto r = repair(k, f);
  CHECK(r.strategy == StrategyTag::GuessCheck);
  CHECK(r.verdict == Verdict::Repairable);
  CHECK(r.witness->kept.size() == k.num_transitions());
}

TEST_CASE("bounded search on general frames") {
  auto k = two_cycle();
  auto f = parse_formula("forall p. G F a[p]");
  auto r = repair(k, f, {Prefer::Any, StrategyChoice::Auto, LassoBounds{2, 2}});
  CHECK(r.strategy == StrategyTag::BoundedGeneral);
  CHECK(r.verdict == Verdict::Repairable);
  REQUIRE(r.bounds_used);
  CHECK(r.bounds_used->loop == 2);
  CHECK(reverify(k, f, r));

  // loop bound 1 admits no lasso at all: nothing can be verified
  auto r1 = repair(k, f, {Prefer::Any, StrategyChoice::Auto, LassoBounds{1, 1}});
  CHECK(r1.verdict == Verdict::BoundedUnknown);
}

TEST_CASE("general frames never report not-repairable") {
  std::mt19937 rng(23);
  for (int i = 0; i < 60; ++i) {
    auto k = testutil::random_general(rng);
    auto f = testutil::random_formula(rng, testutil::random_pattern(rng, 2), 2);
    auto r = repair(k, f, {Prefer::Any, StrategyChoice::Auto, LassoBounds{3, 3}});
    CHECK(r.verdict != Verdict::NotRepairable);
    if (r.verdict == Verdict::Repairable) CHECK(reverify(k, f, r));
  }
}

TEST_CASE("three-cycle witness appears once the loop bound fits") {
  KripkeStructure k;
  k.add_state("c0", {"a"});
  k.add_state("c1", {});
  k.add_state("c2", {});
  k.set_init("c0");
  k.add_transition("c0", "c1");
  k.add_transition("c1", "c2");
  k.add_transition("c2", "c0");
  auto f = parse_formula("forall p. G F a[p]");
  CHECK(repair(k, f, {Prefer::Any, StrategyChoice::Auto, LassoBounds{2, 2}}).verdict ==
        Verdict::BoundedUnknown);
  CHECK(repair(k, f, {Prefer::Any, StrategyChoice::Auto, LassoBounds{2, 3}}).verdict ==
        Verdict::Repairable);
}

TEST_CASE("strategy preconditions are explicit errors") {
  try {
    run(fig1(), "forall p. exists q. true", {Prefer::Any, StrategyChoice::Marking, {}});
    FAIL("marking on an acyclic frame must be rejected");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StrategyMismatch);
    CHECK(std::string(e.what()).find("tree") != std::string::npos);
  }
  try {
    run(fig1_tree(), "exists p. exists q. true", {Prefer::Any, StrategyChoice::Marking, {}});
    FAIL("marking needs an AE* prefix");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StrategyMismatch);
    CHECK(std::string(e.what()).find("AEStar") != std::string::npos);
  }
  CHECK_THROWS_AS(run(fig1_tree(), "forall p. true", {Prefer::Any, StrategyChoice::McOnly, {}}),
                  Error);
  CHECK_THROWS_AS(run(two_cycle(), "exists p. true", {Prefer::Any, StrategyChoice::Brute, {}}),
                  Error);
  CHECK_THROWS_AS(run(fig1(), "exists p. true", {Prefer::Any, StrategyChoice::Bounded, {}}),
                  Error);
}

TEST_CASE("specialized strategies agree with brute force") {
  std::mt19937 rng(321);
  const std::vector<std::pair<StrategyChoice, std::vector<std::string>>> table = {
      {StrategyChoice::McOnly, {"E", "EE"}},
      {StrategyChoice::SingleTrace, {"A", "AA", "EAA"}},
      {StrategyChoice::ExistEnum, {"EA", "EEA", "EEAA"}},
      {StrategyChoice::Marking, {"AE", "AEE"}},
  };
  for (const auto& [choice, patterns] : table) {
    for (int i = 0; i < 40; ++i) {
      auto k = testutil::random_tree(rng);
      auto f = testutil::random_formula(
          rng, patterns[static_cast<size_t>(i) % patterns.size()], 2);
      auto special = repair(k, f, {Prefer::Any, choice, {}});
      auto brute = repair(k, f, {Prefer::Any, StrategyChoice::Brute, {}});
      REQUIRE(special.verdict == brute.verdict);
      if (special.verdict == Verdict::Repairable) CHECK(reverify(k, f, special));
    }
  }
}

TEST_CASE("auto dispatch agrees with brute force on acyclic frames") {
  std::mt19937 rng(654);
  for (int i = 0; i < 120; ++i) {
    auto k = testutil::random_acyclic(rng, 6);
    auto f = testutil::random_formula(rng, testutil::random_pattern(rng, 3), 2);
    auto a = repair(k, f);
    auto b = repair(k, f, {Prefer::Any, StrategyChoice::Brute, {}});
    REQUIRE(a.verdict == b.verdict);
    if (a.verdict == Verdict::Repairable) CHECK(reverify(k, f, a));
  }
}

TEST_CASE("existential repair verdict equals the model checking verdict") {
  std::mt19937 rng(200);
  for (int i = 0; i < 200; ++i) {
    auto k = i % 2 ? testutil::random_tree(rng) : testutil::random_acyclic(rng);
    auto f = testutil::random_formula(rng, i % 3 ? "E" : "EE", 2);
    bool mc = model_check(k, f).holds;
    auto r = repair(k, f);
    REQUIRE((r.verdict == Verdict::Repairable) == mc);
  }
}

TEST_CASE("universal repairs are closed under trace-preserving shrinking") {
  std::mt19937 rng(77);
  int found = 0;
  for (int i = 0; i < 200 && found < 40; ++i) {
    auto k = testutil::random_tree(rng, 6, 8);
    auto f = testutil::random_formula(rng, i % 2 ? "A" : "AA", 2);
    auto r = repair(k, f);
    if (r.verdict != Verdict::Repairable) continue;
    ++found;
    auto witness_structure = apply_repair(k, *r.witness);
    for (const auto& sub : enumerate_repairs(witness_structure)) {
      CHECK(model_check(apply_repair(witness_structure, sub), f).holds);
    }
  }
  CHECK(found > 0);
}

TEST_CASE("max witnesses cannot grow by one transition") {
  std::mt19937 rng(88);
  int found = 0;
  for (int i = 0; i < 120 && found < 30; ++i) {
    auto k = testutil::random_tree(rng, 6, 8);
    auto f = testutil::random_formula(rng, testutil::random_pattern(rng, 2), 2);
    auto r = repair(k, f, {Prefer::Max, StrategyChoice::Auto, {}});
    if (r.verdict != Verdict::Repairable) continue;
    ++found;
    std::set<int> kept(r.witness->kept.begin(), r.witness->kept.end());
    for (size_t t = 0; t < k.num_transitions(); ++t) {
      if (kept.count(static_cast<int>(t))) continue;
      RepairCandidate grown;
      grown.kept = r.witness->kept;
      grown.kept.insert(
          std::lower_bound(grown.kept.begin(), grown.kept.end(), static_cast<int>(t)),
          static_cast<int>(t));
      CHECK(!model_check(apply_repair(k, grown), f).holds);
    }
  }
  CHECK(found > 0);
}

TEST_CASE("min witnesses cannot shrink") {
  std::mt19937 rng(89);
  int found = 0;
  for (int i = 0; i < 80 && found < 20; ++i) {
    auto k = testutil::random_tree(rng, 6, 8);
    auto f = testutil::random_formula(rng, testutil::random_pattern(rng, 2), 2);
    auto r = repair(k, f, {Prefer::Min, StrategyChoice::Auto, {}});
    if (r.verdict != Verdict::Repairable) continue;
    ++found;
    // ascending exhaustive search: no repair has strictly fewer transitions
    auto brute_min = repair(k, f, {Prefer::Min, StrategyChoice::Auto, {}});
    CHECK(brute_min.witness->kept.size() == r.witness->kept.size());
    auto witness_structure = apply_repair(k, *r.witness);
    for (const auto& sub : enumerate_repairs(witness_structure)) {
      if (sub.kept.size() == r.witness->kept.size()) continue;
      CHECK(!model_check(apply_repair(witness_structure, sub), f).holds);
    }
  }
  CHECK(found > 0);
}

TEST_CASE("bounded unknown never appears on tree or acyclic frames") {
  std::mt19937 rng(90);
  for (int i = 0; i < 150; ++i) {
    auto k = i % 2 ? testutil::random_tree(rng) : testutil::random_acyclic(rng);
    auto f = testutil::random_formula(rng, testutil::random_pattern(rng, 3), 2);
    auto r = repair(k, f);
    CHECK(r.verdict != Verdict::BoundedUnknown);
    CHECK(!r.bounds_used);
  }
}
