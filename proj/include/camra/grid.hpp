#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "camra/error.hpp"

namespace camra {

/// Row-major 2-D array. `(r, c)` addresses row r, column c.
template <class T>
class Grid {
public:
  using value_type = T;

  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(checked(width)) * static_cast<std::size_t>(checked(height)), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * width_ + c]; }
  const T& operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * width_ + c]; }

  std::span<T> row(int r) { return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)}; }
  std::span<const T> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * width_, static_cast<std::size_t>(width_)};
  }

  std::vector<T>& values() noexcept { return data_; }
  const std::vector<T>& values() const noexcept { return data_; }

  bool same_shape(const Grid& o) const noexcept { return width_ == o.width_ && height_ == o.height_; }

  /// Copies the rectangle [r0, r0+h) x [c0, c0+w).
  Grid crop(int r0, int c0, int w, int h) const {
    Grid out(w, h);
    for (int r = 0; r < h; ++r)
      std::copy_n(&(*this)(r0 + r, c0), w, &out(r, 0));
    return out;
  }

  /// Writes `src` with its top-left corner at (r0, c0).
  void paste(const Grid& src, int r0, int c0) {
    for (int r = 0; r < src.height(); ++r)
      std::copy_n(&src(r, 0), src.width(), &(*this)(r0 + r, c0));
  }

  template <class U>
  Grid<U> cast() const {
    Grid<U> out(width_, height_);
    std::transform(data_.begin(), data_.end(), out.values().begin(), [](T v) { return static_cast<U>(v); });
    return out;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.data_ == b.data_;
  }

private:
  static int checked(int n) {
    if (n < 0) throw DimensionError("negative grid dimension");
    return n;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using IntGrid = Grid<std::int32_t>;
using RealGrid = Grid<double>;

inline void require_same_shape(const auto& a, const auto& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DimensionError(std::string(what) + ": grid dimensions differ");
}

}  // namespace camra
