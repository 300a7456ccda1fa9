#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rstreg {

/// Zero-based pixel position, top-left origin, rows increasing downward.
struct PixelCoord {
  int col = 0;
  int row = 0;

  friend bool operator==(const PixelCoord &, const PixelCoord &) = default;
};

/// Row-major luminance raster with every sample in [0, 1].
///
/// 0 is black (ink), 1 is white (paper). Dimensions are at least 1x1.
class GrayImage {
 public:
  GrayImage(int width, int height, double fill = 1.0);
  GrayImage(int width, int height, std::vector<double> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  double at(int col, int row) const {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  // Value is clamped into [0, 1].
  void set(int col, int row, double value);

  std::span<const double> pixels() const noexcept { return pixels_; }

  bool contains(PixelCoord p) const noexcept {
    return p.col >= 0 && p.row >= 0 && p.col < width_ && p.row < height_;
  }

  friend bool operator==(const GrayImage &, const GrayImage &) = default;

 private:
  int width_;
  int height_;
  std::vector<double> pixels_;
};

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb &, const Rgb &) = default;
};

class RgbImage {
 public:
  RgbImage(int width, int height, Rgb fill = {1.0, 1.0, 1.0});
  RgbImage(int width, int height, std::vector<Rgb> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  const Rgb &at(int col, int row) const {
    return pixels_[static_cast<std::size_t>(row) * width_ + col];
  }
  void set(int col, int row, Rgb value);

  std::span<const Rgb> pixels() const noexcept { return pixels_; }

 private:
  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

using AnyImage = std::variant<GrayImage, RgbImage>;

/// Decodes P2/P3/P5/P6. Samples are divided by maxval. Throws rstreg::Error
/// with MalformedHeader, TruncatedData, ZeroDimensions or UnsupportedFormat.
AnyImage load_pnm(std::span<const std::uint8_t> bytes);

/// Binary PGM (P5). maxval above 255 writes 16-bit big-endian samples.
std::vector<std::uint8_t> save_pnm(const GrayImage &image, int maxval = 255);

/// BT.601 luma.
GrayImage to_grayscale(const RgbImage &image);

/// Grayscale passes through; color goes through to_grayscale.
GrayImage as_grayscale(const AnyImage &image);

// File helpers; failures raise ErrorKind::Io naming the path.
std::vector<std::uint8_t> read_file(const std::string &path);
void write_file(const std::string &path, std::span<const std::uint8_t> bytes);

}  // namespace rstreg
