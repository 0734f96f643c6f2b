#pragma once

// Result CSV. Numbers are written with std::to_chars, so the bytes never
// depend on the process locale.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "hris/errors.hpp"
#include "hris/harness/sweep.hpp"

namespace hris::harness {

inline constexpr const char* kCsvHeader =
    "sweep_var,sweep_value,scheme,realization,wc_illum_dbm,min_sinr_db,max_tgt_noise_dbm,pris_dbm,thm1_bound_dbm,"
    "iterations,status";

inline std::string format_fixed(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  if (res.ec != std::errc()) throw std::runtime_error("number does not fit the CSV field");
  std::string out(buf, res.ptr);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

inline std::string format_csv(const std::vector<SweepResult>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += to_string(r.sweep_var);
    out += ',' + format_fixed(r.sweep_value);
    out += ',';
    out += opt::to_string(r.scheme);
    out += ',' + std::to_string(r.realization);
    for (double v : {r.wc_illum_dbm, r.min_sinr_db, r.max_tgt_noise_dbm, r.pris_dbm, r.thm1_bound_dbm})
      out += ',' + format_fixed(v);
    out += ',' + std::to_string(r.iterations);
    out += ',';
    out += to_string(r.status);
    out += '\n';
  }
  return out;
}

inline void emit_csv(const std::vector<SweepResult>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const std::string text = format_csv(rows);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

struct CsvRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string scheme;
  int realization = 0;
  double wc_illum_dbm = 0.0;
  double min_sinr_db = 0.0;
  double max_tgt_noise_dbm = 0.0;
  double pris_dbm = 0.0;
  double thm1_bound_dbm = 0.0;
  int iterations = 0;
  std::string status;
};

namespace detail {

inline double parse_number(const std::string& s, std::size_t line, const char* field) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("bad number '" + s + "'", line, field);
  return v;
}

inline int parse_int(const std::string& s, std::size_t line, const char* field) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError("bad integer '" + s + "'", line, field);
  return v;
}

}  // namespace detail

inline std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw ParseError("missing or unexpected CSV header", 1, "header");
  std::vector<CsvRow> rows;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw ParseError("expected 11 fields", number, "row");
    CsvRow r;
    r.sweep_var = f[0];
    r.sweep_value = detail::parse_number(f[1], number, "sweep_value");
    r.scheme = f[2];
    r.realization = detail::parse_int(f[3], number, "realization");
    r.wc_illum_dbm = detail::parse_number(f[4], number, "wc_illum_dbm");
    r.min_sinr_db = detail::parse_number(f[5], number, "min_sinr_db");
    r.max_tgt_noise_dbm = detail::parse_number(f[6], number, "max_tgt_noise_dbm");
    r.pris_dbm = detail::parse_number(f[7], number, "pris_dbm");
    r.thm1_bound_dbm = detail::parse_number(f[8], number, "thm1_bound_dbm");
    r.iterations = detail::parse_int(f[9], number, "iterations");
    r.status = f[10];
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace hris::harness
