#include "rstreg/raster.hpp"

#include "rstreg/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

namespace rstreg {

namespace {

constexpr int kMaxDimension = 1 << 16;

void check_dimensions(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorKind::ZeroDimensions,
                "image dimensions must be at least 1x1, got " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
}

bool in_unit_range(double v) { return v >= 0.0 && v <= 1.0; }

// Tokenizer over a PNM header: whitespace separated, '#' comments run to EOL.
class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::optional<std::string> next_token() {
    skip_space_and_comments();
    std::string token;
    while (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) &&
           bytes_[pos_] != '#') {
      token.push_back(static_cast<char>(bytes_[pos_++]));
    }
    if (token.empty()) return std::nullopt;
    return token;
  }

  long next_integer(const char *what) {
    auto token = next_token();
    if (!token) {
      throw Error(ErrorKind::MalformedHeader,
                  std::string("PNM header ends before ") + what);
    }
    if (!std::all_of(token->begin(), token->end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        token->size() > 9) {
      throw Error(ErrorKind::MalformedHeader, std::string("PNM ") + what +
                                                  " is not a valid integer: '" +
                                                  *token + "'");
    }
    return std::stol(*token);
  }

  // Binary rasters start after exactly one whitespace byte following maxval.
  void consume_single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw Error(ErrorKind::MalformedHeader,
                  "PNM header must end with a whitespace byte");
    }
    ++pos_;
  }

  std::size_t position() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct PnmHeader {
  char kind;  // '2', '3', '5' or '6'
  int width;
  int height;
  int maxval;
};

int channels_of(char kind) { return (kind == '3' || kind == '6') ? 3 : 1; }

std::vector<double> read_samples(HeaderReader &reader,
                                 std::span<const std::uint8_t> bytes,
                                 const PnmHeader &h) {
  const std::size_t count = static_cast<std::size_t>(h.width) * h.height *
                            channels_of(h.kind);
  const double scale = 1.0 / h.maxval;
  std::vector<double> samples;
  samples.reserve(count);

  if (h.kind == '2' || h.kind == '3') {
    for (std::size_t i = 0; i < count; ++i) {
      auto token = reader.next_token();
      if (!token) {
        throw Error(ErrorKind::TruncatedData,
                    "ASCII PNM raster ends after " + std::to_string(i) + " of " +
                        std::to_string(count) + " samples");
      }
      char *end = nullptr;
      const long v = std::strtol(token->c_str(), &end, 10);
      if (*end != '\0' || v < 0 || v > h.maxval) {
        throw Error(ErrorKind::MalformedHeader,
                    "ASCII PNM sample out of range: '" + *token + "'");
      }
      samples.push_back(static_cast<double>(v) * scale);
    }
    return samples;
  }

  reader.consume_single_whitespace();
  const std::size_t start = reader.position();
  const std::size_t bytes_per_sample = h.maxval > 255 ? 2 : 1;
  const std::size_t needed = count * bytes_per_sample;
  if (bytes.size() - start < needed) {
    throw Error(ErrorKind::TruncatedData,
                "binary PNM raster needs " + std::to_string(needed) +
                    " bytes, found " + std::to_string(bytes.size() - start));
  }
  for (std::size_t i = 0; i < count; ++i) {
    unsigned v = 0;
    if (bytes_per_sample == 1) {
      v = bytes[start + i];
    } else {
      v = (static_cast<unsigned>(bytes[start + 2 * i]) << 8) | bytes[start + 2 * i + 1];
    }
    samples.push_back(std::min(1.0, static_cast<double>(v) * scale));
  }
  return samples;
}

}  // namespace

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  check_dimensions(width, height);
  if (!in_unit_range(fill)) {
    throw Error(ErrorKind::InvalidArgument, "fill luminance outside [0, 1]");
  }
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dimensions(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::DimensionMismatch,
                "pixel count does not match width x height");
  }
  if (!std::all_of(pixels_.begin(), pixels_.end(), in_unit_range)) {
    throw Error(ErrorKind::InvalidArgument, "pixel luminance outside [0, 1]");
  }
}

void GrayImage::set(int col, int row, double value) {
  pixels_[static_cast<std::size_t>(row) * width_ + col] = std::clamp(value, 0.0, 1.0);
}

RgbImage::RgbImage(int width, int height, Rgb fill) : width_(width), height_(height) {
  check_dimensions(width, height);
  pixels_.assign(static_cast<std::size_t>(width) * height, fill);
}

RgbImage::RgbImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dimensions(width, height);
  if (pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorKind::DimensionMismatch,
                "pixel count does not match width x height");
  }
  for (const Rgb &p : pixels_) {
    if (!in_unit_range(p.r) || !in_unit_range(p.g) || !in_unit_range(p.b)) {
      throw Error(ErrorKind::InvalidArgument, "channel value outside [0, 1]");
    }
  }
}

void RgbImage::set(int col, int row, Rgb value) {
  value.r = std::clamp(value.r, 0.0, 1.0);
  value.g = std::clamp(value.g, 0.0, 1.0);
  value.b = std::clamp(value.b, 0.0, 1.0);
  pixels_[static_cast<std::size_t>(row) * width_ + col] = value;
}

AnyImage load_pnm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') {
    throw Error(ErrorKind::UnsupportedFormat, "not a PNM file (missing 'P' magic)");
  }
  const char kind = static_cast<char>(bytes[1]);
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    throw Error(ErrorKind::UnsupportedFormat,
                std::string("unsupported PNM magic 'P") + kind + "'");
  }
  if (bytes.size() > 2 && !std::isspace(bytes[2]) && bytes[2] != '#') {
    throw Error(ErrorKind::MalformedHeader, "PNM magic must be followed by whitespace");
  }

  HeaderReader reader(bytes.subspan(2));
  PnmHeader h{kind, 0, 0, 0};
  const long width = reader.next_integer("width");
  const long height = reader.next_integer("height");
  const long maxval = reader.next_integer("maxval");
  if (width == 0 || height == 0) {
    throw Error(ErrorKind::ZeroDimensions,
                "PNM dimensions " + std::to_string(width) + "x" +
                    std::to_string(height) + " are empty");
  }
  if (width > kMaxDimension || height > kMaxDimension) {
    throw Error(ErrorKind::UnsupportedFormat, "PNM dimensions exceed 65536");
  }
  if (maxval < 1 || maxval > 65535) {
    throw Error(ErrorKind::MalformedHeader,
                "PNM maxval must be in [1, 65535], got " + std::to_string(maxval));
  }
  h.width = static_cast<int>(width);
  h.height = static_cast<int>(height);
  h.maxval = static_cast<int>(maxval);

  std::vector<double> samples = read_samples(reader, bytes.subspan(2), h);
  if (channels_of(kind) == 1) {
    return GrayImage(h.width, h.height, std::move(samples));
  }
  std::vector<Rgb> rgb(samples.size() / 3);
  for (std::size_t i = 0; i < rgb.size(); ++i) {
    rgb[i] = {samples[3 * i], samples[3 * i + 1], samples[3 * i + 2]};
  }
  return RgbImage(h.width, h.height, std::move(rgb));
}

std::vector<std::uint8_t> save_pnm(const GrayImage &image, int maxval) {
  if (maxval < 1 || maxval > 65535) {
    throw Error(ErrorKind::InvalidArgument, "maxval must be in [1, 65535]");
  }
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n" +
                             std::to_string(maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = maxval > 255;
  out.reserve(out.size() + image.size() * (wide ? 2 : 1));
  for (double p : image.pixels()) {
    const auto q = static_cast<unsigned>(std::lround(p * maxval));
    if (wide) out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xFF));
  }
  return out;
}

GrayImage to_grayscale(const RgbImage &image) {
  std::vector<double> luma;
  luma.reserve(image.pixels().size());
  for (const Rgb &p : image.pixels()) {
    // Neutral pixels pass through untouched; the weighted sum can drift by an ulp.
    if (p.r == p.g && p.g == p.b) {
      luma.push_back(p.r);
      continue;
    }
    luma.push_back(std::clamp(0.299 * p.r + 0.587 * p.g + 0.114 * p.b, 0.0, 1.0));
  }
  return GrayImage(image.width(), image.height(), std::move(luma));
}

GrayImage as_grayscale(const AnyImage &image) {
  if (const auto *gray = std::get_if<GrayImage>(&image)) return *gray;
  return to_grayscale(std::get<RgbImage>(image));
}

std::vector<std::uint8_t> read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::Io, "read failure on '" + path + "'");
  return bytes;
}

void write_file(const std::string &path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::Io, "write failure on '" + path + "'");
}

}  // namespace rstreg
