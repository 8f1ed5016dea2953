#include "fluxlab/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fluxlab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (const char c : key) {
    if (!(std::islower(static_cast<unsigned char>(c)) ||
          std::isdigit(static_cast<unsigned char>(c)) || c == '_'))
      return false;
  }
  return true;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text,
                                          const std::string& origin) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInputError(origin + ":" + std::to_string(lineno) +
                              ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!valid_key(key))
      throw InvalidInputError(origin + ":" + std::to_string(lineno) +
                              ": bad key `" + key + "`");
    if (cfg.values_.count(key))
      throw InvalidInputError(origin + ":" + std::to_string(lineno) +
                              ": duplicate key `" + key + "`");
    cfg.values_[key] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open config file: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_text(text.str(), path);
}

void KeyValueConfig::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw InvalidInputError("bad config key `" + key + "`");
  values_[key] = value;
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const int v = std::stoi(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw InvalidInputError("config key `" + key + "`: not an integer: " +
                            it->second);
  }
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size() || !std::isfinite(v))
      throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw InvalidInputError("config key `" + key + "`: not a finite number: " +
                            it->second);
  }
}

std::string KeyValueConfig::get_string(const std::string& key,
                                       std::string fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

void KeyValueConfig::require_known_keys(const std::set<std::string>& known) const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (!known.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty())
    throw InvalidInputError("unknown config keys: " + unknown);
}

std::vector<std::pair<std::string, std::string>> KeyValueConfig::entries() const {
  return {values_.begin(), values_.end()};
}

PolylinePath read_path_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInputError("cannot open path file: " + path);

  bool closed = false;
  bool directive_allowed = true;
  std::vector<Vec2> vertices;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (directive_allowed && (line == "closed" || line == "open")) {
      closed = line == "closed";
      directive_allowed = false;
      continue;
    }
    directive_allowed = false;
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y))
      throw InvalidInputError(path + ":" + std::to_string(lineno) +
                              ": expected `x y`");
    std::string extra;
    if (ls >> extra)
      throw InvalidInputError(path + ":" + std::to_string(lineno) +
                              ": trailing content `" + extra + "`");
    vertices.push_back({x, y});
  }
  return PolylinePath(std::move(vertices), closed);
}

namespace {

struct LambdaTerm {
  double coefficient = 0.0;
  enum class Kind { Constant, X, Y, SinXCosY } kind = Kind::Constant;
};

LambdaTerm parse_term(const std::string& term, const std::string& full) {
  std::string body = trim(term);
  if (body.empty())
    throw InvalidInputError("gauge lambda `" + full + "`: empty term");

  LambdaTerm out;
  std::size_t pos = 0;
  // optional leading coefficient
  if (std::isdigit(static_cast<unsigned char>(body[0])) || body[0] == '.') {
    std::size_t used = 0;
    out.coefficient = std::stod(body, &used);
    pos = used;
  } else {
    out.coefficient = 1.0;
  }
  std::string symbol = trim(body.substr(pos));
  if (!symbol.empty() && symbol[0] == '*') symbol = trim(symbol.substr(1));

  if (symbol.empty()) {
    if (pos == 0)
      throw InvalidInputError("gauge lambda `" + full + "`: bad term `" + term +
                              "`");
    out.kind = LambdaTerm::Kind::Constant;
  } else if (symbol == "x") {
    out.kind = LambdaTerm::Kind::X;
  } else if (symbol == "y") {
    out.kind = LambdaTerm::Kind::Y;
  } else if (symbol == "sin(x)cos(y)" || symbol == "sin(x)*cos(y)") {
    out.kind = LambdaTerm::Kind::SinXCosY;
  } else {
    throw InvalidInputError("gauge lambda `" + full + "`: unsupported term `" +
                            term + "` (use x, y, sin(x)cos(y), constants)");
  }
  return out;
}

}  // namespace

GaugeFunction parse_gauge_lambda(const std::string& expression) {
  std::vector<LambdaTerm> terms;
  std::string current;
  double sign = 1.0;
  auto flush = [&](double next_sign) {
    if (!trim(current).empty()) {
      LambdaTerm t = parse_term(current, expression);
      t.coefficient *= sign;
      terms.push_back(t);
    } else if (!terms.empty()) {
      throw InvalidInputError("gauge lambda `" + expression + "`: empty term");
    }
    current.clear();
    sign = next_sign;
  };

  for (const char c : expression) {
    if (c == '+') {
      flush(1.0);
    } else if (c == '-') {
      if (trim(current).empty() && terms.empty() && sign == 1.0) {
        sign = -1.0;  // leading minus
      } else {
        flush(-1.0);
      }
    } else {
      current += c;
    }
  }
  flush(1.0);
  if (terms.empty())
    throw InvalidInputError("gauge lambda `" + expression + "`: no terms");

  return GaugeFunction{
      .value =
          [terms](Vec2 p) {
            double v = 0.0;
            for (const LambdaTerm& t : terms) {
              switch (t.kind) {
                case LambdaTerm::Kind::Constant: v += t.coefficient; break;
                case LambdaTerm::Kind::X: v += t.coefficient * p.x; break;
                case LambdaTerm::Kind::Y: v += t.coefficient * p.y; break;
                case LambdaTerm::Kind::SinXCosY:
                  v += t.coefficient * std::sin(p.x) * std::cos(p.y);
                  break;
              }
            }
            return v;
          },
      .gradient =
          [terms](Vec2 p) {
            Vec2 g{0.0, 0.0};
            for (const LambdaTerm& t : terms) {
              switch (t.kind) {
                case LambdaTerm::Kind::Constant: break;
                case LambdaTerm::Kind::X: g.x += t.coefficient; break;
                case LambdaTerm::Kind::Y: g.y += t.coefficient; break;
                case LambdaTerm::Kind::SinXCosY:
                  g.x += t.coefficient * std::cos(p.x) * std::cos(p.y);
                  g.y -= t.coefficient * std::sin(p.x) * std::sin(p.y);
                  break;
              }
            }
            return g;
          },
  };
}

}  // namespace fluxlab
