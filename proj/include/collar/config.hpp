#pragma once

// Flat key = value configuration files with [section] headers. Parsing keeps
// the original entry order so that parse -> serialize is the identity on
// canonical files; consumers reject unknown keys explicitly.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "problem.hpp"

namespace collar {

struct ConfigError : std::runtime_error {
  int line;
  int col;
  ConfigError(const std::string& msg, int line_, int col_)
      : std::runtime_error("config:" + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_),
        col(col_) {}
};

class Config {
 public:
  struct Entry {
    std::string section;
    std::string key;
    std::string value;
    int line = 0;
  };

  static Config parse(const std::string& text) {
    Config cfg;
    std::string section;
    int lineno = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      ++lineno;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      const auto last = line.find_last_not_of(" \t\r");
      std::string body = line.substr(first, last - first + 1);
      if (body[0] == '#') continue;
      if (body.front() == '[') {
        if (body.back() != ']' || body.size() < 3) {
          throw ConfigError("malformed section header", lineno, int(first) + 1);
        }
        section = body.substr(1, body.size() - 2);
        cfg.section_order_.push_back(section);
        continue;
      }
      const auto eq = body.find('=');
      if (eq == std::string::npos) {
        throw ConfigError("expected key = value", lineno, int(first) + 1);
      }
      Entry e;
      e.section = section;
      e.line = lineno;
      const auto kend = body.find_last_not_of(" \t", eq == 0 ? 0 : eq - 1);
      if (eq == 0 || kend == std::string::npos) {
        throw ConfigError("empty key", lineno, int(first) + 1);
      }
      e.key = body.substr(0, kend + 1);
      auto vstart = body.find_first_not_of(" \t", eq + 1);
      e.value = vstart == std::string::npos ? "" : body.substr(vstart);
      if (cfg.find(e.section, e.key)) {
        throw ConfigError("duplicate key '" + e.key + "'", lineno,
                          int(first) + 1);
      }
      cfg.entries_.push_back(std::move(e));
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  std::string serialize() const {
    std::ostringstream out;
    std::string cur;
    bool first = true;
    for (const auto& e : entries_) {
      if (e.section != cur || (first && !e.section.empty())) {
        if (!first) out << "\n";
        if (!e.section.empty()) out << "[" << e.section << "]\n";
        cur = e.section;
      }
      out << e.key << " = " << e.value << "\n";
      first = false;
    }
    return out.str();
  }

  const std::vector<Entry>& entries() const { return entries_; }

  const Entry* find(const std::string& section, const std::string& key) const {
    for (const auto& e : entries_) {
      if (e.section == section && e.key == key) return &e;
    }
    return nullptr;
  }

  std::optional<std::string> get(const std::string& section,
                                 const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::string require(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) {
      throw std::runtime_error("config: missing required key [" + section +
                               "] " + key);
    }
    return e->value;
  }

  double get_double(const std::string& section, const std::string& key,
                    double fallback) const {
    const Entry* e = find(section, key);
    return e ? parse_double(*e) : fallback;
  }

  double require_double(const std::string& section,
                        const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) {
      throw std::runtime_error("config: missing required key [" + section +
                               "] " + key);
    }
    return parse_double(*e);
  }

  int get_int(const std::string& section, const std::string& key,
              int fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const double v = parse_double(*e);
    const int iv = int(v);
    if (double(iv) != v) {
      throw ConfigError("expected integer for '" + key + "'", e->line, 1);
    }
    return iv;
  }

  // Reject keys in `section` outside the allowed set (with diagnostics).
  void check_known(const std::string& section,
                   const std::set<std::string>& allowed) const {
    for (const auto& e : entries_) {
      if (e.section == section && !allowed.count(e.key)) {
        throw ConfigError("unknown key '" + e.key + "' in [" + section + "]",
                          e.line, 1);
      }
    }
  }

  void check_sections(const std::set<std::string>& allowed) const {
    for (const auto& e : entries_) {
      if (!allowed.count(e.section)) {
        throw ConfigError("unknown section [" + e.section + "]", e.line, 1);
      }
    }
  }

 private:
  static double parse_double(const Entry& e) {
    std::size_t pos = 0;
    double v;
    try {
      v = std::stod(e.value, &pos);
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + e.value + "'", e.line, 1);
    }
    if (pos != e.value.size()) {
      throw ConfigError("trailing characters in number '" + e.value + "'",
                        e.line, 1);
    }
    return v;
  }

  std::vector<Entry> entries_;
  std::vector<std::string> section_order_;
};

// Build the [problem] block into a full ProblemSpec.
inline ProblemSpec problem_from_config(const Config& cfg) {
  cfg.check_known("problem",
                  {"manifold", "m", "p", "sigma", "a", "V", "series_coeffs"});
  ProblemSpec spec;
  const std::string kind = cfg.require("problem", "manifold");
  const int m = cfg.get_int("problem", "m", 2);
  if (kind == "euclidean") {
    spec.manifold = make_manifold(m, WarpingFunction::euclidean());
  } else if (kind == "hyperbolic") {
    spec.manifold = make_manifold(m, WarpingFunction::hyperbolic());
  } else if (kind == "custom") {
    std::vector<double> coeffs;
    std::istringstream cs(cfg.get("problem", "series_coeffs").value_or(""));
    for (std::string tok; std::getline(cs, tok, ',');) {
      coeffs.push_back(std::stod(tok));
    }
    spec.manifold = make_manifold(m, WarpingFunction::custom_series(coeffs));
  } else {
    throw std::runtime_error("config: unknown manifold kind '" + kind + "'");
  }
  spec.exps = exponents(cfg.get_double("problem", "p", 2.0),
                        cfg.require_double("problem", "sigma"));
  if (auto a = cfg.get("problem", "a")) spec.a = parse_ple(*a);
  if (auto V = cfg.get("problem", "V")) spec.V = parse_ple(*V);
  spec.validate();
  return spec;
}

}  // namespace collar
