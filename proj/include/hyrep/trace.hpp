#ifndef HYREP_TRACE_HPP
#define HYREP_TRACE_HPP

#include <set>
#include <string>
#include <vector>

namespace hyrep {

using Letter = std::set<std::string>;

// stem . loop^omega over 2^AP. Canonical form: the loop is primitive (not a
// power of a shorter word) and the stem has no suffix that could be absorbed
// into a rotation of the loop, which makes equality of canonical forms
// coincide with equality of the infinite words.
struct UltimatelyPeriodicTrace {
  std::vector<Letter> stem;
  std::vector<Letter> loop;

  const Letter& letter(size_t i) const {
    if (i < stem.size()) return stem[i];
    return loop[(i - stem.size()) % loop.size()];
  }

  size_t stem_length() const { return stem.size(); }
  size_t loop_length() const { return loop.size(); }

  bool operator==(const UltimatelyPeriodicTrace& o) const {
    return stem == o.stem && loop == o.loop;
  }
  bool operator<(const UltimatelyPeriodicTrace& o) const {
    if (stem != o.stem) return stem < o.stem;
    return loop < o.loop;
  }
};

inline UltimatelyPeriodicTrace canonical(UltimatelyPeriodicTrace t) {
  // primitive root of the loop
  size_t n = t.loop.size();
  for (size_t d = 1; d <= n / 2; ++d) {
    if (n % d != 0) continue;
    bool power = true;
    for (size_t i = d; i < n && power; ++i)
      if (t.loop[i] != t.loop[i % d]) power = false;
    if (power) {
      t.loop.resize(d);
      break;
    }
  }
  // absorb stem suffix letters that merely repeat the loop
  while (!t.stem.empty() && t.stem.back() == t.loop.back()) {
    t.loop.insert(t.loop.begin(), t.loop.back());
    t.loop.pop_back();
    t.stem.pop_back();
  }
  return t;
}

inline std::string to_string(const UltimatelyPeriodicTrace& t) {
  auto letter_str = [](const Letter& l) {
    std::string s = "{";
    bool first = true;
    for (const auto& p : l) {
      if (!first) s += ",";
      s += p;
      first = false;
    }
    s += "}";
    return s;
  };
  std::string s;
  for (const auto& l : t.stem) s += letter_str(l);
  s += "(";
  for (const auto& l : t.loop) s += letter_str(l);
  s += ")^w";
  return s;
}

}  // namespace hyrep

#endif
