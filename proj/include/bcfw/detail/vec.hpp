#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bcfw {

using DenseVec = std::vector<double>;

// Sparse vector with strictly increasing indices. Small supports only
// (feature-map differences, per-block dual images).
struct SparseVec {
  std::vector<int> idx;
  std::vector<double> val;

  std::size_t nnz() const { return idx.size(); }
  bool empty() const { return idx.empty(); }
  void clear() {
    idx.clear();
    val.clear();
  }
};

// Builds a SparseVec from unordered (index, value) pairs, summing duplicates
// and dropping exact zeros.
inline SparseVec make_sparse(std::vector<std::pair<int, double>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVec out;
  out.idx.reserve(entries.size());
  out.val.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size();) {
    const int id = entries[i].first;
    double sum = 0.0;
    for (; i < entries.size() && entries[i].first == id; ++i) sum += entries[i].second;
    if (sum != 0.0) {
      out.idx.push_back(id);
      out.val.push_back(sum);
    }
  }
  return out;
}

inline double dot(const DenseVec& a, const DenseVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dot(const SparseVec& a, const DenseVec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.idx.size(); ++i) s += a.val[i] * b[static_cast<std::size_t>(a.idx[i])];
  return s;
}

inline double dot(const SparseVec& a, const SparseVec& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.idx.size() && j < b.idx.size()) {
    if (a.idx[i] < b.idx[j]) {
      ++i;
    } else if (a.idx[i] > b.idx[j]) {
      ++j;
    } else {
      s += a.val[i] * b.val[j];
      ++i;
      ++j;
    }
  }
  return s;
}

inline double norm_sq(const DenseVec& a) { return dot(a, a); }
inline double norm_sq(const SparseVec& a) {
  double s = 0.0;
  for (double v : a.val) s += v * v;
  return s;
}

// y += c * x
inline void add_scaled(DenseVec& y, const SparseVec& x, double c) {
  for (std::size_t i = 0; i < x.idx.size(); ++i) y[static_cast<std::size_t>(x.idx[i])] += c * x.val[i];
}

inline void add_scaled(DenseVec& y, const DenseVec& x, double c) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

// a*x + b*y as a fresh sparse vector (sorted merge). Exact zeros are kept
// out of the result only when both inputs miss the index.
inline SparseVec linear_combine(double a, const SparseVec& x, double b, const SparseVec& y) {
  SparseVec out;
  out.idx.reserve(x.idx.size() + y.idx.size());
  out.val.reserve(x.idx.size() + y.idx.size());
  std::size_t i = 0, j = 0;
  while (i < x.idx.size() || j < y.idx.size()) {
    int id;
    double v;
    if (j >= y.idx.size() || (i < x.idx.size() && x.idx[i] < y.idx[j])) {
      id = x.idx[i];
      v = a * x.val[i];
      ++i;
    } else if (i >= x.idx.size() || y.idx[j] < x.idx[i]) {
      id = y.idx[j];
      v = b * y.val[j];
      ++j;
    } else {
      id = x.idx[i];
      v = a * x.val[i] + b * y.val[j];
      ++i;
      ++j;
    }
    out.idx.push_back(id);
    out.val.push_back(v);
  }
  return out;
}

inline SparseVec sparse_diff(const SparseVec& x, const SparseVec& y) {
  return linear_combine(1.0, x, -1.0, y);
}

// ||x - y||^2 without materializing the difference.
inline double diff_norm_sq(const SparseVec& x, const SparseVec& y) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < x.idx.size() || j < y.idx.size()) {
    double d;
    if (j >= y.idx.size() || (i < x.idx.size() && x.idx[i] < y.idx[j])) {
      d = x.val[i];
      ++i;
    } else if (i >= x.idx.size() || y.idx[j] < x.idx[i]) {
      d = -y.val[j];
      ++j;
    } else {
      d = x.val[i] - y.val[j];
      ++i;
      ++j;
    }
    s += d * d;
  }
  return s;
}

// y = a*y + b*x elementwise; aliasing x with y is allowed. This is the
// only arithmetic the averaging recurrences need.
inline void scale_add(DenseVec& y, double a, const DenseVec& x, double b) {
  if (y.size() != x.size()) throw std::invalid_argument("scale_add: size mismatch");
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = a * y[i] + b * x[i];
}

inline void scale_add(double& y, double a, const double& x, double b) { y = a * y + b * x; }

}  // namespace bcfw
