#pragma once

// Output formatting and file emission shared by the CLI.
//
// Doubles are written in the shortest decimal form that round-trips
// (std::to_chars without precision), so identical runs give identical bytes.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "solnet/error.hpp"
#include "solnet/fock.hpp"

namespace solnet::io {

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw NumericalError("format_double: conversion failed");
  return std::string(buf, end);
}

/// Inclusive grid `start:stop:count`, or a single value.
inline std::vector<double> parse_grid(std::string_view text) {
  auto number = [&](std::string_view s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
      throw ConfigError("invalid number '" + std::string(s) + "' in grid '" + std::string(text) + "'");
    return v;
  };
  const auto c1 = text.find(':');
  if (c1 == std::string_view::npos) return {number(text)};
  const auto c2 = text.find(':', c1 + 1);
  if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
    throw ConfigError("grid '" + std::string(text) + "' must be start:stop:count");
  const double start = number(text.substr(0, c1));
  const double stop = number(text.substr(c1 + 1, c2 - c1 - 1));
  const auto count_text = text.substr(c2 + 1);
  long count = 0;
  auto [ptr, ec] = std::from_chars(count_text.data(), count_text.data() + count_text.size(), count);
  if (ec != std::errc{} || ptr != count_text.data() + count_text.size() || count < 1)
    throw ConfigError("grid count in '" + std::string(text) + "' must be a positive integer");
  if (count == 1) {
    if (start != stop) throw ConfigError("grid '" + std::string(text) + "' has count 1 but start != stop");
    return {start};
  }
  std::vector<double> g(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) g[i] = start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
  g.back() = stop;
  return g;
}

/// Comma-separated list of values, each optionally a grid.
inline std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = text.find(',', pos);
    auto part = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (part.empty()) throw ConfigError("empty entry in list '" + std::string(text) + "'");
    for (double v : parse_grid(part)) out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

using Cell = std::variant<double, long long, std::string>;

inline std::string cell_text(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return format_double(*d);
  if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

/// Column-named rows, written as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw NumericalError("Table: row width does not match header");
    rows.push_back(std::move(row));
  }

  std::string csv() const {
    std::string out;
    for (std::size_t j = 0; j < columns.size(); ++j) out += (j ? "," : "") + columns[j];
    out += '\n';
    for (const auto& r : rows) {
      for (std::size_t j = 0; j < r.size(); ++j) out += (j ? "," : "") + cell_text(r[j]);
      out += '\n';
    }
    return out;
  }

  std::string json() const {
    std::string out = "[\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out += "  {";
      for (std::size_t j = 0; j < columns.size(); ++j) {
        out += (j ? ", \"" : "\"") + columns[j] + "\": ";
        const auto& c = rows[i][j];
        if (auto s = std::get_if<std::string>(&c)) {
          out += '"' + *s + '"';
        } else {
          const auto t = cell_text(c);
          out += (t == "nan" || t == "inf" || t == "-inf") ? "null" : t;
        }
      }
      out += i + 1 < rows.size() ? "},\n" : "}\n";
    }
    return out + "]\n";
  }

  std::string render(std::string_view format) const {
    if (format == "csv") return csv();
    if (format == "json") return json();
    throw ConfigError("unknown format '" + std::string(format) + "'");
  }
};

/// Writes via a sibling temporary file and rename, so readers never see a
/// partial file. The directory must already exist.
inline void write_file(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  const auto dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw ConfigError("output directory '" + dir.string() + "' does not exist");
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("cannot write '" + tmp.string() + "'");
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) {
      f.close();
      fs::remove(tmp, ec);
      throw ConfigError("write to '" + tmp.string() + "' failed");
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot rename into '" + path.string() + "'");
  }
}

/// Columns N1,N2,re,im in basis order.
inline Table state_table(const StateVector& psi) {
  Table t{{"N1", "N2", "re", "im"}, {}};
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const auto& s = psi.basis().state_of(i);
    t.add({Cell{static_cast<long long>(s.n1)}, Cell{static_cast<long long>(s.n2)}, Cell{psi[i].real()},
           Cell{psi[i].imag()}});
  }
  return t;
}

/// Inverse of state_table's CSV form.
inline StateVector read_state_csv(const FockBasis3& basis, std::string_view text) {
  StateVector psi(basis);
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "N1,N2,re,im") throw ConfigError("state CSV: bad header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int n1 = 0, n2 = 0;
    double re = 0.0, im = 0.0;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &n1, &n2, &re, &im) != 4)
      throw ConfigError("state CSV: malformed row '" + line + "'");
    if (!basis.contains(n1, n2)) throw ConfigError("state CSV: row outside basis");
    psi.at(n1, n2) = cplx(re, im);
  }
  return psi;
}

}  // namespace solnet::io
