#ifndef HYREP_REPORT_HPP
#define HYREP_REPORT_HPP

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hyrep/formula.hpp"
#include "hyrep/kripke.hpp"
#include "hyrep/repair.hpp"

namespace hyrep {

inline uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string digest_hex(std::string_view data) {
  static const char* hexdig = "0123456789abcdef";
  uint64_t h = fnv1a64(data);
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<size_t>(i)] = hexdig[h & 0xf];
    h >>= 4;
  }
  return s;
}

inline nlohmann::ordered_json fragment_json(const HyperFormula& f) {
  FragmentClass fc = classify_fragment(f);
  nlohmann::ordered_json j;
  j["tag"] = fragment_tag_name(fc.tag);
  j["notation"] = fragment_notation(fc);
  j["alternations"] = fc.alternations;
  j["leading"] = fc.leading == Quantifier::Exists ? "exists" : "forall";
  j["prefix"] = prefix_string(f);
  return j;
}

inline nlohmann::ordered_json witness_json(const KripkeStructure& k, const RepairCandidate& c) {
  nlohmann::ordered_json j;
  std::set<int> kept(c.kept.begin(), c.kept.end());
  j["kept"] = nlohmann::ordered_json::array();
  j["removed"] = nlohmann::ordered_json::array();
  for (size_t i = 0; i < k.num_transitions(); ++i) {
    auto [f, t] = k.id_pair(k.transitions()[i]);
    if (kept.count(static_cast<int>(i)))
      j["kept"].push_back({f, t});
    else
      j["removed"].push_back({f, t});
  }
  return j;
}

}  // namespace hyrep

#endif
