#pragma once

#include "rstreg/raster.hpp"

#include <optional>
#include <span>
#include <vector>

namespace rstreg {

inline constexpr double kDefaultThreshold = 0.5;

/// Row-major ink flags; true marks a signature pixel. May be empty of ink.
class InkMask {
 public:
  InkMask(int width, int height, std::vector<bool> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool at(int col, int row) const {
    return bits_[static_cast<std::size_t>(row) * width_ + col];
  }
  bool empty() const noexcept;
  std::size_t ink_count() const noexcept;

 private:
  int width_;
  int height_;
  std::vector<bool> bits_;
};

/// Inclusive pixel bounds in the top-left frame.
struct BoundingBox {
  int left = 0;
  int top = 0;
  int right = 0;
  int bottom = 0;

  int width() const noexcept { return right - left + 1; }
  int height() const noexcept { return bottom - top + 1; }

  friend bool operator==(const BoundingBox &, const BoundingBox &) = default;
};

/// Ink is dark on light: a bit is set where pixel < threshold.
InkMask binarize(const GrayImage &image, double threshold = kDefaultThreshold);

/// (x - min) / (max - min). Throws DegenerateRange for empty or constant input.
std::vector<double> minmax_normalize(std::span<const double> values);

std::optional<BoundingBox> bounding_box(const InkMask &mask);

/// Sub-image covering bounding_box(mask). Throws BlankImage when the mask has
/// no ink and DimensionMismatch when mask and image sizes differ.
GrayImage crop_to_content(const GrayImage &image, const InkMask &mask);

/// binarize + crop_to_content.
GrayImage crop_to_content(const GrayImage &image, double threshold);

GrayImage sub_image(const GrayImage &image, const BoundingBox &box);

}  // namespace rstreg
