#pragma once

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "bcfw/chain/model.hpp"

namespace bcfw {
namespace io {

// Text dataset format:
//   #seq p=<int> q=<int>
//   <label> <feat>:<value> <feat>:<value> ...
//   ...one line per position, blank line between sequences...
// Values use '.' decimals; serialization writes shortest round-trip floats.

namespace detail_io {

[[noreturn]] inline void parse_fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

inline std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

inline bool blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t') return false;
  }
  return true;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_int(std::string_view s, int& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline bool parse_double(std::string_view s, double& out) {
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto res = std::from_chars(first, last, out);
  return res.ec == std::errc() && res.ptr == last;
}

inline void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace detail_io

inline chain::SequenceDataset load_sequence_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string raw;
  int lineno = 0;

  if (!std::getline(in, raw)) detail_io::parse_fail(path, 1, "missing header");
  ++lineno;
  const auto header = detail_io::split_ws(detail_io::strip_cr(raw));
  int p = -1;
  int q = -1;
  if (header.size() != 3 || header[0] != "#seq" || header[1].substr(0, 2) != "p=" ||
      header[2].substr(0, 2) != "q=" || !detail_io::parse_int(header[1].substr(2), p) ||
      !detail_io::parse_int(header[2].substr(2), q) || p < 1 || q < 1) {
    detail_io::parse_fail(path, lineno, "malformed header, expected `#seq p=<int> q=<int>`");
  }

  chain::SequenceDataset ds;
  ds.n_features = p;
  ds.n_labels = q;
  chain::SequenceExample cur;
  const auto flush = [&] {
    if (!cur.positions.empty()) {
      ds.examples.push_back(std::move(cur));
      cur = {};
    }
  };

  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = detail_io::strip_cr(raw);
    if (detail_io::blank(line)) {
      flush();
      continue;
    }
    const auto tokens = detail_io::split_ws(line);
    int label = -1;
    if (!detail_io::parse_int(tokens[0], label)) {
      detail_io::parse_fail(path, lineno, "malformed label");
    }
    if (label < 0 || label >= q) {
      detail_io::parse_fail(path, lineno, "label out of range [0, q)");
    }
    std::vector<std::pair<int, double>> feats;
    feats.reserve(tokens.size() - 1);
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      int fid = -1;
      double val = 0.0;
      if (colon == std::string_view::npos || !detail_io::parse_int(tok.substr(0, colon), fid) ||
          !detail_io::parse_double(tok.substr(colon + 1), val)) {
        detail_io::parse_fail(path, lineno, "malformed feature token, expected <id>:<value>");
      }
      if (fid < 0 || fid >= p) detail_io::parse_fail(path, lineno, "feature id out of range [0, p)");
      feats.emplace_back(fid, val);
    }
    cur.labels.push_back(label);
    cur.positions.push_back(std::move(feats));
  }
  flush();
  return ds;
}

inline void save_sequence_dataset(const chain::SequenceDataset& ds, const std::string& path) {
  std::string out = "#seq p=" + std::to_string(ds.n_features) + " q=" + std::to_string(ds.n_labels) + "\n";
  for (std::size_t e = 0; e < ds.examples.size(); ++e) {
    if (e != 0) out += "\n";
    const auto& ex = ds.examples[e];
    for (std::size_t t = 0; t < ex.positions.size(); ++t) {
      out += std::to_string(ex.labels[t]);
      for (const auto& [f, v] : ex.positions[t]) {
        out += ' ';
        out += std::to_string(f);
        out += ':';
        detail_io::append_double(out, v);
      }
      out += '\n';
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error(path + ": write failed");
}

}  // namespace io
}  // namespace bcfw
