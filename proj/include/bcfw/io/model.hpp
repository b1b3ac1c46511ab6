#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "bcfw/chain/model.hpp"
#include "bcfw/detail/vec.hpp"

namespace bcfw {
namespace io {

// Binary model file, fixed little-endian layout:
//   magic "BCFWSVM1", u32 version,
//   i32 q, i32 p, i32 d, u8 loss_kind, u8 has_dual, u8 has_avg, u8 reserved,
//   f64 lambda, f64 ell, f64 ell_avg, d*f64 w, [d*f64 w_avg].
// Doubles round-trip bit-exactly.

struct ModelFile {
  int n_labels = 0;
  int n_features = 0;
  chain::LossSpec loss;
  double lambda = 0.0;
  bool has_dual = false;  // ell carries a dual value usable for gap certificates
  DenseVec w;
  double ell = 0.0;
  bool has_avg = false;
  DenseVec w_avg;
  double ell_avg = 0.0;
};

namespace detail_io {

inline constexpr char kModelMagic[8] = {'B', 'C', 'F', 'W', 'S', 'V', 'M', '1'};
inline constexpr std::uint32_t kModelVersion = 1;

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_i32(std::string& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }

inline void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

struct ByteReader {
  const std::string& buf;
  const std::string& path;
  std::size_t pos = 0;

  void need(std::size_t n) const {
    if (pos + n > buf.size()) throw std::runtime_error(path + ": truncated model file");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint8_t u8() {
    need(1);
    return static_cast<std::uint8_t>(buf[pos++]);
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    pos += 8;
    return std::bit_cast<double>(v);
  }
};

}  // namespace detail_io

inline void save_model(const ModelFile& m, const std::string& path) {
  const chain::ChainModel layout(m.n_labels, m.n_features);
  const int d = layout.weight_dim();
  if (static_cast<int>(m.w.size()) != d) throw std::invalid_argument("save_model: w size mismatch");
  if (m.has_avg && static_cast<int>(m.w_avg.size()) != d) {
    throw std::invalid_argument("save_model: w_avg size mismatch");
  }
  std::string out;
  out.append(detail_io::kModelMagic, sizeof(detail_io::kModelMagic));
  detail_io::put_u32(out, detail_io::kModelVersion);
  detail_io::put_i32(out, m.n_labels);
  detail_io::put_i32(out, m.n_features);
  detail_io::put_i32(out, d);
  out.push_back(m.loss.kind == chain::LossKind::hamming ? 1 : 0);
  out.push_back(m.has_dual ? 1 : 0);
  out.push_back(m.has_avg ? 1 : 0);
  out.push_back(0);
  detail_io::put_f64(out, m.lambda);
  detail_io::put_f64(out, m.ell);
  detail_io::put_f64(out, m.has_avg ? m.ell_avg : 0.0);
  for (double v : m.w) detail_io::put_f64(out, v);
  if (m.has_avg) {
    for (double v : m.w_avg) detail_io::put_f64(out, v);
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error(path + ": cannot open for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw std::runtime_error(path + ": write failed");
}

inline ModelFile load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail_io::ByteReader r{buf, path};

  r.need(sizeof(detail_io::kModelMagic));
  if (std::memcmp(buf.data(), detail_io::kModelMagic, sizeof(detail_io::kModelMagic)) != 0) {
    throw std::runtime_error(path + ": not a model file (bad magic)");
  }
  r.pos = sizeof(detail_io::kModelMagic);
  const auto version = r.u32();
  if (version != detail_io::kModelVersion) {
    throw std::runtime_error(path + ": unsupported model version " + std::to_string(version));
  }

  ModelFile m;
  m.n_labels = r.i32();
  m.n_features = r.i32();
  const int d = r.i32();
  if (m.n_labels < 1 || m.n_features < 1) throw std::runtime_error(path + ": invalid model layout");
  const chain::ChainModel layout(m.n_labels, m.n_features);
  if (d != layout.weight_dim()) {
    throw std::runtime_error(path + ": weight dimension does not match q/p layout");
  }
  const auto loss_kind = r.u8();
  if (loss_kind > 1) throw std::runtime_error(path + ": invalid loss kind");
  m.loss.kind = loss_kind == 1 ? chain::LossKind::hamming : chain::LossKind::normalized_hamming;
  const auto has_dual = r.u8();
  const auto has_avg = r.u8();
  if (has_dual > 1 || has_avg > 1) throw std::runtime_error(path + ": invalid flag byte");
  m.has_dual = has_dual == 1;
  m.has_avg = has_avg == 1;
  if (r.u8() != 0) throw std::runtime_error(path + ": invalid reserved byte");
  m.lambda = r.f64();
  m.ell = r.f64();
  m.ell_avg = r.f64();
  m.w.resize(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) m.w[i] = r.f64();
  if (m.has_avg) {
    m.w_avg.resize(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) m.w_avg[i] = r.f64();
  }
  if (r.pos != buf.size()) throw std::runtime_error(path + ": trailing bytes after model payload");
  return m;
}

}  // namespace io
}  // namespace bcfw
