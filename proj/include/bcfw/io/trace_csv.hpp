#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "bcfw/trace.hpp"

namespace bcfw {
namespace io {

// CSV trace format: header `passes,k,primal,dual,gap,train_error,test_error,seconds`,
// one row per checkpoint, empty fields for absent values, '.' decimals, LF endings.

inline constexpr const char* kTraceHeader = "passes,k,primal,dual,gap,train_error,test_error,seconds";

namespace detail_io {

inline void append_csv_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

inline void append_csv_opt(std::string& out, const std::optional<double>& v) {
  if (v.has_value()) append_csv_double(out, *v);
}

inline void check_trace(const ConvergenceTrace& trace) {
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& r = trace[i];
    if (i > 0 && r.effective_passes < trace[i - 1].effective_passes) {
      throw std::invalid_argument("trace: effective passes must be nondecreasing");
    }
    if (r.gap.has_value() && *r.gap < -1e-9) {
      throw std::invalid_argument("trace: negative duality gap beyond tolerance");
    }
  }
}

inline std::string render_rows(const ConvergenceTrace& trace) {
  std::string out;
  for (const auto& r : trace) {
    append_csv_double(out, r.effective_passes);
    out += ',';
    out += std::to_string(r.k);
    out += ',';
    append_csv_opt(out, r.primal);
    out += ',';
    append_csv_opt(out, r.dual);
    out += ',';
    append_csv_opt(out, r.gap);
    out += ',';
    append_csv_opt(out, r.train_error);
    out += ',';
    append_csv_opt(out, r.test_error);
    out += ',';
    append_csv_double(out, r.wall_seconds);
    out += '\n';
  }
  return out;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

inline double parse_csv_double(std::string_view s, const std::string& path, int lineno) {
  double v = 0.0;
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(s.data(), last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed number");
  }
  return v;
}

inline std::optional<double> parse_csv_opt(std::string_view s, const std::string& path, int lineno) {
  if (s.empty()) return std::nullopt;
  return parse_csv_double(s, path, lineno);
}

}  // namespace detail_io

inline void write_trace_csv(const ConvergenceTrace& trace, const std::string& path) {
  detail_io::check_trace(trace);
  std::string out = std::string(kTraceHeader) + "\n" + detail_io::render_rows(trace);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error(path + ": write failed");
}

inline ConvergenceTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string raw;
  if (!std::getline(in, raw)) throw std::runtime_error(path + ": missing header");
  if (!raw.empty() && raw.back() == '\r') raw.pop_back();
  if (raw != kTraceHeader) throw std::runtime_error(path + ": unexpected trace header");
  ConvergenceTrace trace;
  int lineno = 1;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.empty()) continue;
    const auto fields = detail_io::split_fields(raw);
    if (fields.size() != 8) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 8 fields");
    }
    TraceRecord r;
    r.effective_passes = detail_io::parse_csv_double(fields[0], path, lineno);
    r.k = static_cast<std::int64_t>(detail_io::parse_csv_double(fields[1], path, lineno));
    r.primal = detail_io::parse_csv_opt(fields[2], path, lineno);
    r.dual = detail_io::parse_csv_opt(fields[3], path, lineno);
    r.gap = detail_io::parse_csv_opt(fields[4], path, lineno);
    r.train_error = detail_io::parse_csv_opt(fields[5], path, lineno);
    r.test_error = detail_io::parse_csv_opt(fields[6], path, lineno);
    r.wall_seconds = detail_io::parse_csv_double(fields[7], path, lineno);
    trace.push_back(r);
  }
  detail_io::check_trace(trace);
  return trace;
}

// Appends rows to an existing trace file, or creates it when absent.
// Fails if the first new row would break the nondecreasing-passes invariant.
inline void append_trace_csv(const ConvergenceTrace& trace, const std::string& path) {
  detail_io::check_trace(trace);
  bool exists = false;
  {
    std::ifstream probe(path, std::ios::binary);
    exists = static_cast<bool>(probe);
  }
  if (!exists) {
    write_trace_csv(trace, path);
    return;
  }
  const ConvergenceTrace existing = read_trace_csv(path);
  if (!existing.empty() && !trace.empty() &&
      trace.front().effective_passes < existing.back().effective_passes) {
    throw std::invalid_argument("trace append: effective passes must be nondecreasing across files");
  }
  std::string out = detail_io::render_rows(trace);
  std::ofstream f(path, std::ios::binary | std::ios::app);
  if (!f) throw std::runtime_error(path + ": cannot open for append");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error(path + ": write failed");
}

}  // namespace io
}  // namespace bcfw
