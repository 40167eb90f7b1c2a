// hyrep: decide and construct repairs of finite Kripke structures against
// HyperLTL specifications.
//
// Exit codes: 0 satisfied/repairable, 1 violated/unrepairable,
// 2 bounded-unknown, >2 usage or input errors.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hyrep/edas.hpp"
#include "hyrep/errors.hpp"
#include "hyrep/kripke.hpp"
#include "hyrep/parse.hpp"
#include "hyrep/reductions.hpp"
#include "hyrep/repair.hpp"
#include "hyrep/report.hpp"
#include "hyrep/semantics.hpp"

namespace {

using nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw hyrep::Error(hyrep::ErrorCode::BadInput, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw hyrep::Error(hyrep::ErrorCode::BadInput, "cannot write '" + path + "'");
  out << data;
}

struct LoadedStructure {
  hyrep::KripkeStructure k;
  std::string digest;
};

LoadedStructure load_structure(const std::string& path, bool add_loops) {
  std::string text = read_file(path);
  auto k = hyrep::structure_from_json(nlohmann::json::parse(text));
  if (add_loops) k = hyrep::add_terminal_loops(k);
  hyrep::validate(k);
  return {std::move(k), hyrep::digest_hex(text)};
}

struct LoadedFormula {
  hyrep::HyperFormula f;
  std::string digest;
};

LoadedFormula load_formula(const std::string& path) {
  std::string text = read_file(path);
  return {hyrep::parse_formula(text), hyrep::digest_hex(text)};
}

std::optional<hyrep::LassoBounds> bounds_from(const std::optional<size_t>& stem,
                                              const std::optional<size_t>& loop) {
  if (!stem && !loop) {
    if (const char* env = std::getenv("HYREP_DEFAULT_BOUNDS")) {
      size_t s = 0, l = 0;
      char comma = 0;
      std::istringstream in(env);
      if (in >> s >> comma >> l && comma == ',')
        return hyrep::LassoBounds{s, l};
      throw hyrep::Error(hyrep::ErrorCode::BadInput,
                         "HYREP_DEFAULT_BOUNDS expects 'stem,loop'");
    }
    return std::nullopt;
  }
  hyrep::LassoBounds b;
  b.stem = stem.value_or(loop.value_or(1));
  b.loop = loop.value_or(stem.value_or(1));
  return b;
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  long ms() const {
    return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count());
  }
};

void emit(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

ordered_json bounds_json(const hyrep::LassoBounds& b) {
  ordered_json j;
  j["stem"] = b.stem;
  j["loop"] = b.loop;
  return j;
}

ordered_json rows_json(const std::vector<hyrep::EdasRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json row;
    row["paper"] = r.paper;
    row["ntf"] = r.ntf;
    row["dec"] = r.dec;
    row["ses"] = r.ses;
    row["status"] = r.status;
    row["session"] = r.session;
    arr.push_back(std::move(row));
  }
  return arr;
}

void print_table(const std::string& title, const std::vector<hyrep::EdasRow>& rows) {
  std::cout << title << "\n";
  std::cout << "  paper  ntf    dec    ses    | status   session\n";
  for (const auto& r : rows) {
    auto b = [](bool v) { return v ? "true " : "false"; };
    std::cout << "  " << r.paper << "   " << b(r.ntf) << "  " << b(r.dec) << "  " << b(r.ses)
              << "  | " << r.status;
    for (size_t i = r.status.size(); i < 8; ++i) std::cout << ' ';
    std::cout << " " << r.session << "\n";
  }
}

int run(int argc, char** argv) {
  CLI::App app{"repair of finite Kripke structures against HyperLTL specifications"};
  app.require_subcommand(1);

  // classify ---------------------------------------------------------------
  std::string cl_structure, cl_formula;
  bool cl_add_loops = false, cl_pretty = false;
  std::string cl_dot;
  auto* classify = app.add_subcommand("classify", "report frame shape and formula fragment");
  classify->add_option("structure", cl_structure, "structure JSON file")->required();
  classify->add_option("formula", cl_formula, "formula file")->required();
  classify->add_flag("--add-terminal-loops", cl_add_loops, "add self-loops to terminal states");
  classify->add_flag("--pretty", cl_pretty, "human-readable output");
  classify->add_option("--dot", cl_dot, "write the structure in DOT format");

  // check ------------------------------------------------------------------
  std::string ck_structure, ck_formula;
  bool ck_add_loops = false, ck_pretty = false;
  std::optional<size_t> ck_stem, ck_loop;
  auto* check = app.add_subcommand("check", "model check a structure against a formula");
  check->add_option("structure", ck_structure)->required();
  check->add_option("formula", ck_formula)->required();
  check->add_flag("--add-terminal-loops", ck_add_loops);
  check->add_flag("--pretty", ck_pretty);
  check->add_option("--stem-bound", ck_stem, "lasso stem bound for general frames");
  check->add_option("--loop-bound", ck_loop, "lasso loop bound for general frames");

  // repair -----------------------------------------------------------------
  std::string rp_structure, rp_formula, rp_out, rp_dot;
  bool rp_add_loops = false, rp_pretty = false;
  std::string rp_strategy = "auto", rp_prefer = "max";
  std::optional<size_t> rp_stem, rp_loop;
  auto* rep = app.add_subcommand("repair", "decide and construct a repair");
  rep->add_option("structure", rp_structure)->required();
  rep->add_option("formula", rp_formula)->required();
  rep->add_option("--strategy", rp_strategy,
                  "auto|brute|marking|single-trace|exist-enum|mc-only|bounded")
      ->check(CLI::IsMember(
          {"auto", "brute", "marking", "single-trace", "exist-enum", "mc-only", "bounded"}));
  rep->add_option("--prefer", rp_prefer, "max|min|any")
      ->check(CLI::IsMember({"max", "min", "any"}));
  rep->add_option("--out", rp_out, "write the repaired structure JSON here");
  rep->add_option("--dot", rp_dot, "write the repaired structure in DOT format");
  rep->add_flag("--add-terminal-loops", rp_add_loops);
  rep->add_flag("--pretty", rp_pretty);
  rep->add_option("--stem-bound", rp_stem);
  rep->add_option("--loop-bound", rp_loop);

  // reduce -----------------------------------------------------------------
  std::string rd_kind, rd_instance, rd_out_structure, rd_out_formula, rd_source, rd_target;
  auto* red = app.add_subcommand("reduce", "generate a repair instance from a hardness reduction");
  red->add_option("kind", rd_kind, "horn|3sat|qbf|reach")
      ->required()
      ->check(CLI::IsMember({"horn", "3sat", "qbf", "reach"}));
  red->add_option("instance", rd_instance, "instance file (horn lines, DIMACS, QDIMACS, edge list)")
      ->required();
  red->add_option("--out-structure", rd_out_structure, "output structure JSON")->required();
  red->add_option("--out-formula", rd_out_formula, "output formula file")->required();
  red->add_option("--source", rd_source, "source vertex (reach)");
  red->add_option("--target", rd_target, "target vertex (reach)");

  // demo-edas ----------------------------------------------------------------
  bool demo_no_repair = false, demo_pretty = false;
  std::string demo_out;
  auto* demo = app.add_subcommand("demo-edas", "run the built-in conference-manager demo");
  demo->add_flag("--no-repair", demo_no_repair, "only check the sketch, skip the repair");
  demo->add_flag("--pretty", demo_pretty);
  demo->add_option("--out", demo_out, "write the repaired structure JSON here");

  CLI11_PARSE(app, argc, argv);

  if (*classify) {
    Timer t;
    auto ls = load_structure(cl_structure, cl_add_loops);
    auto lf = load_formula(cl_formula);
    hyrep::FrameShape shape = hyrep::classify_frame(ls.k);
    auto frag = hyrep::classify_fragment(lf.f);
    std::string summary =
        std::string(hyrep::frame_shape_name(shape)) + " / " + hyrep::fragment_notation(frag);
    if (!cl_dot.empty()) write_file(cl_dot, hyrep::to_dot(ls.k));
    if (cl_pretty) {
      std::cout << summary << "  (prefix " << hyrep::prefix_string(lf.f) << ")\n";
      return 0;
    }
    ordered_json j;
    j["command"] = "classify";
    j["inputs"] = {{"structure", ls.digest}, {"formula", lf.digest}};
    j["frame"] = hyrep::frame_shape_name(shape);
    j["fragment"] = hyrep::fragment_json(lf.f);
    j["summary"] = summary;
    j["wall_ms"] = t.ms();
    emit(j);
    return 0;
  }

  if (*check) {
    Timer t;
    auto ls = load_structure(ck_structure, ck_add_loops);
    auto lf = load_formula(ck_formula);
    auto res = hyrep::model_check(ls.k, lf.f, bounds_from(ck_stem, ck_loop));
    int exit_code = res.holds ? 0 : (res.bounded ? 2 : 1);
    if (ck_pretty) {
      std::cout << (res.holds ? "satisfied" : res.bounded ? "violated (bounded)" : "violated")
                << "\n";
      return exit_code;
    }
    ordered_json j;
    j["command"] = "check";
    j["inputs"] = {{"structure", ls.digest}, {"formula", lf.digest}};
    j["frame"] = hyrep::frame_shape_name(hyrep::classify_frame(ls.k));
    j["fragment"] = hyrep::fragment_json(lf.f);
    j["holds"] = res.holds;
    j["bounded"] = res.bounded;
    if (res.bounds_used) j["bounds"] = bounds_json(*res.bounds_used);
    j["exit"] = exit_code;
    j["wall_ms"] = t.ms();
    emit(j);
    return exit_code;
  }

  if (*rep) {
    Timer t;
    auto ls = load_structure(rp_structure, rp_add_loops);
    auto lf = load_formula(rp_formula);
    hyrep::RepairOptions opts;
    opts.bounds = bounds_from(rp_stem, rp_loop);
    opts.prefer = rp_prefer == "max" ? hyrep::Prefer::Max
                 : rp_prefer == "min" ? hyrep::Prefer::Min
                                      : hyrep::Prefer::Any;
    opts.strategy = rp_strategy == "brute"          ? hyrep::StrategyChoice::Brute
                    : rp_strategy == "marking"      ? hyrep::StrategyChoice::Marking
                    : rp_strategy == "single-trace" ? hyrep::StrategyChoice::SingleTrace
                    : rp_strategy == "exist-enum"   ? hyrep::StrategyChoice::ExistEnum
                    : rp_strategy == "mc-only"      ? hyrep::StrategyChoice::McOnly
                    : rp_strategy == "bounded"      ? hyrep::StrategyChoice::Bounded
                                                    : hyrep::StrategyChoice::Auto;
    auto r = hyrep::repair(ls.k, lf.f, opts);
    int exit_code = r.verdict == hyrep::Verdict::Repairable      ? 0
                    : r.verdict == hyrep::Verdict::NotRepairable ? 1
                                                                 : 2;
    if (r.witness) {
      auto repaired = hyrep::apply_repair(ls.k, *r.witness);
      if (!rp_out.empty()) write_file(rp_out, hyrep::structure_to_json(repaired).dump(2) + "\n");
      if (!rp_dot.empty()) write_file(rp_dot, hyrep::to_dot(repaired));
    }
    if (rp_pretty) {
      std::cout << hyrep::verdict_name(r.verdict) << " via " << hyrep::strategy_tag_name(r.strategy)
                << "\n";
      return exit_code;
    }
    ordered_json j;
    j["command"] = "repair";
    j["inputs"] = {{"structure", ls.digest}, {"formula", lf.digest}};
    j["frame"] = hyrep::frame_shape_name(hyrep::classify_frame(ls.k));
    j["fragment"] = hyrep::fragment_json(lf.f);
    j["verdict"] = hyrep::verdict_name(r.verdict);
    j["strategy"] = hyrep::strategy_tag_name(r.strategy);
    j["prefer"] = rp_prefer;
    if (!r.certificate.empty()) j["certificate"] = r.certificate;
    if (r.witness) j["witness"] = hyrep::witness_json(ls.k, *r.witness);
    if (r.bounds_used) j["bounds"] = bounds_json(*r.bounds_used);
    j["exit"] = exit_code;
    j["wall_ms"] = t.ms();
    emit(j);
    return exit_code;
  }

  if (*red) {
    Timer t;
    std::string text = read_file(rd_instance);
    hyrep::KripkeStructure structure;
    std::string formula_text;
    ordered_json stats;
    if (rd_kind == "horn") {
      auto r = hyrep::reduce_horn(hyrep::parse_horn(text));
      structure = std::move(r.structure);
      formula_text = hyrep::to_string(r.formula);
      for (const auto& [k, v] : r.stats) stats[k] = v;
    } else if (rd_kind == "3sat") {
      auto r = hyrep::reduce_3sat(hyrep::parse_dimacs(text));
      structure = std::move(r.structure);
      formula_text = hyrep::to_string(r.formula);
      for (const auto& [k, v] : r.stats) stats[k] = v;
    } else if (rd_kind == "qbf") {
      auto r = hyrep::reduce_qbf(hyrep::parse_qdimacs(text));
      structure = std::move(r.structure);
      formula_text = hyrep::to_string(r.formula);
      for (const auto& [k, v] : r.stats) stats[k] = v;
    } else {
      if (rd_source.empty() || rd_target.empty())
        throw hyrep::Error(hyrep::ErrorCode::BadInput, "reach requires --source and --target");
      std::vector<std::pair<std::string, std::string>> edges;
      std::istringstream in(text);
      std::string line;
      while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string a, b;
        if (ls >> a >> b) edges.emplace_back(a, b);
      }
      auto r = hyrep::reduce_reachability(edges, rd_source, rd_target);
      structure = std::move(r.structure);
      formula_text = hyrep::to_string(r.existential) + "\n" + hyrep::to_string(r.universal);
      stats["edges"] = edges.size();
    }
    write_file(rd_out_structure, hyrep::structure_to_json(structure).dump(2) + "\n");
    write_file(rd_out_formula, formula_text + "\n");
    ordered_json j;
    j["command"] = "reduce";
    j["kind"] = rd_kind;
    j["inputs"] = {{"instance", hyrep::digest_hex(text)}};
    j["stats"] = stats;
    j["states"] = structure.num_states();
    j["transitions"] = structure.num_transitions();
    j["wall_ms"] = t.ms();
    emit(j);
    return 0;
  }

  if (*demo) {
    Timer t;
    auto d = hyrep::run_edas_demo(!demo_no_repair);
    int exit_code;
    if (demo_no_repair)
      exit_code = d.sketch_check ? 0 : 1;
    else
      exit_code = d.repaired && d.post_check ? 0 : 1;
    if (!demo_out.empty() && d.repaired)
      write_file(demo_out,
                 hyrep::structure_to_json(hyrep::apply_repair(d.structure, *d.result.witness))
                         .dump(2) +
                     "\n");
    if (demo_pretty) {
      std::cout << "sketch |= phi: " << (d.sketch_check ? "yes" : "no (leak)") << "\n\n";
      print_table("Output with leak (hole <- ses):", d.table_leak);
      std::cout << "  check: " << (d.leaky_check ? "satisfied" : "violated") << "\n\n";
      if (!demo_no_repair && d.repaired) {
        print_table("Output without leak (repaired):", d.table_fixed);
        std::cout << "  check: " << (d.post_check ? "satisfied" : "violated") << "\n";
        std::cout << "  removed:";
        for (auto& [f2, t2] : d.removed) std::cout << " " << f2 << "->" << t2;
        std::cout << "\n";
      }
      return exit_code;
    }
    ordered_json j;
    j["command"] = "demo-edas";
    j["formula"] = hyrep::to_string(d.formula);
    j["sketch_check"] = d.sketch_check;
    j["leaky_check"] = d.leaky_check;
    j["table_with_leak"] = rows_json(d.table_leak);
    if (!demo_no_repair) {
      j["repaired"] = d.repaired;
      j["post_check"] = d.post_check;
      j["table_without_leak"] = rows_json(d.table_fixed);
      j["removed"] = ordered_json::array();
      for (auto& [f2, t2] : d.removed) j["removed"].push_back({f2, t2});
      j["strategy"] = hyrep::strategy_tag_name(d.result.strategy);
    }
    j["exit"] = exit_code;
    j["wall_ms"] = t.ms();
    emit(j);
    return exit_code;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const hyrep::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
