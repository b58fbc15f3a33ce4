#pragma once

// Calibration fixtures: a key-value text file with one [section] per field.
//
//   [x^3-x-1]
//   C_bad2 = 0.32289
//   G = 4140
//
// Lines starting with '#' are comments. Keys keep their insertion order.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "littlewood/errors.hpp"
#include "littlewood/interval.hpp"
#include "littlewood/numtheory.hpp"

namespace littlewood {

/// Calibration grid shared by the calibrate command and the acceptance run.
inline const std::vector<long> kGridD{1, 2, 3, 4};
inline const std::vector<Rat> kGridEps{Rat(1), Rat(1, 2), Rat(1, 4)};

/// Modular fingerprint of a big integer: residues mod 2^255-19 and 2^127-1
/// plus the bit length.
inline std::string fingerprint(const Int& x) {
  Int p1 = 1, p2 = 1;
  p1 <<= 255;
  p1 -= 19;
  p2 <<= 127;
  p2 -= 1;
  return mod_floor(x, p1).get_str(16) + ":" + mod_floor(x, p2).get_str(16) + ":" +
         std::to_string(mpz_sizeinbase(x.get_mpz_t(), 2)) + (x < 0 ? "-" : "");
}

class Fixtures {
 public:
  using Section = std::vector<std::pair<std::string, std::string>>;

  static Fixtures load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open fixtures file " + path);
    Fixtures f;
    std::string line, current;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      if (t.front() == '[') {
        if (t.back() != ']') throw InvalidInput(path + ":" + std::to_string(lineno) + ": bad section header");
        current = t.substr(1, t.size() - 2);
        f.section(current);
        continue;
      }
      const auto eq = t.find('=');
      if (eq == std::string::npos || current.empty())
        throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected key = value inside a section");
      f.set(current, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return f;
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write fixtures file " + path);
    out << str();
  }

  std::string str() const {
    std::ostringstream os;
    os << "# calibration fixtures, written by `littlewood calibrate`\n";
    for (const auto& name : order_) {
      os << "\n[" << name << "]\n";
      for (const auto& [k, v] : sections_.at(name)) os << k << " = " << v << "\n";
    }
    return os.str();
  }

  bool has(const std::string& sec, const std::string& key) const { return find(sec, key) != nullptr; }
  bool has_section(const std::string& sec) const { return sections_.count(sec) != 0; }

  const std::string& get(const std::string& sec, const std::string& key) const {
    const std::string* v = find(sec, key);
    if (!v) throw InvalidInput("fixtures: missing key '" + key + "' in [" + sec + "]");
    return *v;
  }
  Rat get_rat(const std::string& sec, const std::string& key) const { return parse_rational(get(sec, key)); }
  Int get_int(const std::string& sec, const std::string& key) const {
    const Rat r = get_rat(sec, key);
    if (r.get_den() != 1) throw InvalidInput("fixtures: '" + key + "' is not an integer");
    return r.get_num();
  }

  void set(const std::string& sec, const std::string& key, const std::string& value) {
    Section& s = section(sec);
    for (auto& kv : s)
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    s.emplace_back(key, value);
  }

  void erase_section(const std::string& sec) {
    sections_.erase(sec);
    std::erase(order_, sec);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }

  Section& section(const std::string& name) {
    auto it = sections_.find(name);
    if (it == sections_.end()) {
      order_.push_back(name);
      it = sections_.emplace(name, Section{}).first;
    }
    return it->second;
  }

  const std::string* find(const std::string& sec, const std::string& key) const {
    auto it = sections_.find(sec);
    if (it == sections_.end()) return nullptr;
    for (const auto& kv : it->second)
      if (kv.first == key) return &kv.second;
    return nullptr;
  }

  std::map<std::string, Section> sections_;
  std::vector<std::string> order_;
};

/// Grid-cell key, e.g. "D2_eps1/4".
inline std::string cell_key(const Int& D, const Rat& eps) { return "D" + D.get_str() + "_eps" + rat_str(eps); }

}  // namespace littlewood
