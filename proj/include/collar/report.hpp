#pragma once

// Machine-readable outputs: JSON reports and plot-ready CSV tables, with all
// floating-point values rendered at 17 significant digits so that reruns are
// byte-identical and values round-trip exactly.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "problem.hpp"  // detail::fmt17

namespace collar {

inline constexpr const char* kToolVersion = "1.0.0";

using Json = nlohmann::ordered_json;

namespace detail {

inline void dump_json17(const Json& j, std::string& out, int indent,
                        int depth) {
  const std::string pad(std::size_t(indent) * depth, ' ');
  const std::string pad1(std::size_t(indent) * (depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad1 + Json(it.key()).dump() + ": ";
        dump_json17(it.value(), out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad1;
        dump_json17(j[i], out, indent, depth + 1);
        if (i + 1 < j.size()) out += ",";
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += fmt17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

inline std::string dump_json17(const Json& j, int indent = 2) {
  std::string out;
  detail::dump_json17(j, out, indent, 0);
  out += "\n";
  return out;
}

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

inline void write_json_report(const std::string& path, const Json& j) {
  write_text_file(path, dump_json17(j));
}

// CSV with a header row; every cell fmt17-rendered.
inline std::string to_csv(const std::vector<std::string>& header,
                          const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ",";
    out += header[i];
  }
  out += "\n";
  for (const auto& row : rows) {
    if (row.size() != header.size()) {
      throw std::invalid_argument("to_csv: ragged row");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += detail::fmt17(row[i]);
    }
    out += "\n";
  }
  return out;
}

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
  write_text_file(path, to_csv(header, rows));
}

}  // namespace collar
