#pragma once

// CSV ingestion and output. Numbers are parsed and printed with
// std::from_chars / std::to_chars: locale independent, shortest round-trip.

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "stochvar/error.hpp"
#include "stochvar/estimators.hpp"
#include "stochvar/series.hpp"
#include "stochvar/simulate.hpp"

namespace stochvar::io {

/// Shortest representation that parses back to the same double.
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

/// True for a valid calendar date written YYYY-MM-DD.
inline bool is_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  int y = 0;
  unsigned m = 0, d = 0;
  auto num = [](std::string_view part, auto& v) {
    const auto r = std::from_chars(part.data(), part.data() + part.size(), v);
    return r.ec == std::errc() && r.ptr == part.data() + part.size();
  };
  if (!num(s.substr(0, 4), y) || !num(s.substr(5, 2), m) || !num(s.substr(8, 2), d)) return false;
  return std::chrono::year_month_day{std::chrono::year{y}, std::chrono::month{m},
                                     std::chrono::day{d}}
      .ok();
}

/// ISO date `days` after 2000-01-01 (synthetic fixtures).
inline std::string synthetic_date(std::int64_t days) {
  using namespace std::chrono;
  const year_month_day ymd{sys_days{year{2000} / January / 1} + std::chrono::days{days}};
  std::ostringstream os;
  os << std::setfill('0') << std::setw(4) << static_cast<int>(ymd.year()) << '-' << std::setw(2)
     << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2)
     << static_cast<unsigned>(ymd.day());
  return os.str();
}

/// A `date,<column>` file: column is "close" (prices) or "return".
struct DatedSeries {
  std::string column;
  std::vector<std::string> dates;
  std::vector<double> values;
  std::string path;
};

/// Reads `date,close` or `date,return`. Dates must be ISO and strictly
/// increasing; closes strictly positive. Errors carry 1-based line numbers.
inline DatedSeries read_dated_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path, 0);
  DatedSeries out;
  out.path = path;
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw ParseError(path + ":" + std::to_string(lineno) + ": expected exactly 2 columns", lineno);
    const std::string_view a = trim(row.substr(0, comma));
    const std::string_view b = trim(row.substr(comma + 1));
    if (!header) {
      if (a != "date" || (b != "close" && b != "return"))
        throw ParseError(path + ":" + std::to_string(lineno) +
                             ": header must be 'date,close' or 'date,return'",
                         lineno);
      out.column = std::string(b);
      header = true;
      continue;
    }
    if (!is_iso_date(a))
      throw ParseError(path + ":" + std::to_string(lineno) + ": invalid ISO date '" +
                           std::string(a) + "'",
                       lineno);
    if (!out.dates.empty() && !(out.dates.back() < a))
      throw ParseError(path + ":" + std::to_string(lineno) + ": date " + std::string(a) +
                           " is not after " + out.dates.back(),
                       lineno);
    double v = 0.0;
    if (!parse_double(b, v) || !std::isfinite(v))
      throw ParseError(path + ":" + std::to_string(lineno) + ": invalid number '" +
                           std::string(b) + "'",
                       lineno);
    if (out.column == "close" && !(v > 0.0))
      throw ParseError(path + ":" + std::to_string(lineno) + ": close must be > 0", lineno);
    out.dates.emplace_back(a);
    out.values.push_back(v);
  }
  if (!header) throw ParseError(path + ": empty file", lineno);
  return out;
}

/// Daily detrended returns from a price or return file. Prices are
/// log-differenced; both are demeaned.
inline ReturnSeries load_returns(const std::string& path, const std::string& source) {
  const DatedSeries ds = read_dated_csv(path);
  if (ds.column == "close") return detrend(ds.values, source);
  if (ds.values.size() < 2) throw InsufficientData("load_returns: need at least 2 returns");
  ReturnSeries r;
  r.values = ds.values;
  r.source = source;
  double m = 0.0;
  for (double x : r.values) m += x;
  m /= static_cast<double>(r.values.size());
  for (double& x : r.values) x -= m;
  return r;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  return out;
}

inline void write_dated_csv(const std::string& path, const std::vector<std::string>& dates,
                            const std::vector<double>& values, const std::string& column) {
  if (dates.size() != values.size()) throw DomainError("write_dated_csv: length mismatch");
  auto out = open_out(path);
  out << "date," << column << '\n';
  for (std::size_t i = 0; i < dates.size(); ++i)
    out << dates[i] << ',' << format_number(values[i]) << '\n';
}

/// `lag,value` rows.
inline void write_lag_csv(const std::string& path, const std::vector<double>& lags,
                          const std::vector<double>& values) {
  if (lags.size() != values.size()) throw DomainError("write_lag_csv: length mismatch");
  auto out = open_out(path);
  out << "lag,value\n";
  for (std::size_t i = 0; i < lags.size(); ++i)
    out << format_number(lags[i]) << ',' << format_number(values[i]) << '\n';
}

/// Generic table with a header row.
inline void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                            const std::vector<std::vector<double>>& columns) {
  for (const auto& c : columns)
    if (c.size() != columns.front().size()) throw DomainError("write_table_csv: ragged columns");
  auto out = open_out(path);
  for (std::size_t j = 0; j < header.size(); ++j) out << (j ? "," : "") << header[j];
  out << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) out << (j ? "," : "") << format_number(columns[j][i]);
    out << '\n';
  }
}

/// `step,v,dx` rows; step 0 holds the initial variance and dx = 0.
inline void write_path_csv(const std::string& path, const VariancePath& v,
                           const std::vector<double>* returns = nullptr) {
  auto out = open_out(path);
  out << "step,v,dx\n";
  out << "0," << format_number(v.initial) << ",0\n";
  for (std::size_t k = 0; k < v.values.size(); ++k)
    out << (k + 1) << ',' << format_number(v.values[k]) << ','
        << format_number(returns ? (*returns)[k] : 0.0) << '\n';
}

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
inline std::string fnv1a_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path, 0);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

}  // namespace stochvar::io
