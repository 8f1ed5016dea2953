#ifndef FLUXLAB_CONFIG_HPP
#define FLUXLAB_CONFIG_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fluxlab/gauge.hpp"
#include "fluxlab/geometry.hpp"

namespace fluxlab {

// Flat `key = value` experiment config: one pair per line, '#' comments,
// keys are [a-z0-9_]. Parsing is strict: duplicate or unknown keys are
// rejected so configs stay diffable and typo-proof.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text,
                                   const std::string& origin = "<inline>");

  // CLI flag overrides; later values replace earlier ones.
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  // Throws InvalidInputError when a key is present but unparseable.
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, std::string fallback) const;

  // Rejects any key not in `known`, listing the offenders.
  void require_known_keys(const std::set<std::string>& known) const;

  // Sorted key/value pairs, for manifests.
  std::vector<std::pair<std::string, std::string>> entries() const;

 private:
  std::map<std::string, std::string> values_;
};

// Path file: optional leading `closed` / `open` directive, then one `x y`
// pair per line; '#' comments allowed.
PolylinePath read_path_file(const std::string& path);

// Small closed-form gauge functions for the CLI, e.g. "3x+y", "0.5x - 2",
// "1.5sin(x)cos(y)". Terms are [coefficient][x | y | sin(x)cos(y)] joined by
// + or -; the gradient is analytic.
GaugeFunction parse_gauge_lambda(const std::string& expression);

}  // namespace fluxlab

#endif
