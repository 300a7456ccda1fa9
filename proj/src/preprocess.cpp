#include "rstreg/preprocess.hpp"

#include "rstreg/error.hpp"

#include <algorithm>

namespace rstreg {

InkMask::InkMask(int width, int height, std::vector<bool> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width < 1 || height < 1 ||
      bits_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::DimensionMismatch, "ink mask size does not match dimensions");
  }
}

bool InkMask::empty() const noexcept {
  return std::none_of(bits_.begin(), bits_.end(), [](bool b) { return b; });
}

std::size_t InkMask::ink_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

InkMask binarize(const GrayImage &image, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "binarization threshold must lie in (0, 1)");
  }
  std::vector<bool> bits;
  bits.reserve(image.size());
  for (double p : image.pixels()) bits.push_back(p < threshold);
  return InkMask(image.width(), image.height(), std::move(bits));
}

std::vector<double> minmax_normalize(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorKind::DegenerateRange, "cannot normalize an empty sequence");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  if (!(range > 0.0)) {
    throw Error(ErrorKind::DegenerateRange, "min-max normalization of a constant sequence");
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back((v - min) / range);
  return out;
}

std::optional<BoundingBox> bounding_box(const InkMask &mask) {
  BoundingBox box{mask.width(), mask.height(), -1, -1};
  for (int row = 0; row < mask.height(); ++row) {
    for (int col = 0; col < mask.width(); ++col) {
      if (!mask.at(col, row)) continue;
      box.left = std::min(box.left, col);
      box.right = std::max(box.right, col);
      box.top = std::min(box.top, row);
      box.bottom = std::max(box.bottom, row);
    }
  }
  if (box.right < 0) return std::nullopt;
  return box;
}

GrayImage sub_image(const GrayImage &image, const BoundingBox &box) {
  if (box.left < 0 || box.top < 0 || box.right >= image.width() ||
      box.bottom >= image.height() || box.left > box.right || box.top > box.bottom) {
    throw Error(ErrorKind::InvalidArgument, "bounding box outside image");
  }
  std::vector<double> px;
  px.reserve(static_cast<std::size_t>(box.width()) * box.height());
  for (int row = box.top; row <= box.bottom; ++row) {
    for (int col = box.left; col <= box.right; ++col) px.push_back(image.at(col, row));
  }
  return GrayImage(box.width(), box.height(), std::move(px));
}

GrayImage crop_to_content(const GrayImage &image, const InkMask &mask) {
  if (mask.width() != image.width() || mask.height() != image.height()) {
    throw Error(ErrorKind::DimensionMismatch, "ink mask and image sizes differ");
  }
  const auto box = bounding_box(mask);
  if (!box) throw Error(ErrorKind::BlankImage, "image has no ink content to crop");
  return sub_image(image, *box);
}

GrayImage crop_to_content(const GrayImage &image, double threshold) {
  return crop_to_content(image, binarize(image, threshold));
}

}  // namespace rstreg
