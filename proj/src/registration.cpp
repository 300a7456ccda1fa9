#include "rstreg/registration.hpp"

#include "rstreg/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace rstreg {

namespace {

bool preferred_on_tie(double a, double b) {
  if (std::abs(a) != std::abs(b)) return std::abs(a) < std::abs(b);
  return a < b;
}

template <typename Value>
std::size_t argmax_by(const std::vector<CorrelationSample> &entries, Value value) {
  if (entries.empty()) {
    throw Error(ErrorKind::InvalidArgument, "argmax of an empty correlation trace");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    const double v = value(entries[i]);
    const double b = value(entries[best]);
    if (v > b || (v == b && preferred_on_tie(entries[i].angle, entries[best].angle))) {
      best = i;
    }
  }
  return best;
}

double lerp(double a, double b, double t) { return a + t * (b - a); }

// Exact cosine/sine for multiples of 90 degrees.
std::pair<double, double> cos_sin_deg(double angle_deg) {
  const double quarter = angle_deg / 90.0;
  if (quarter == std::round(quarter)) {
    const long q = ((static_cast<long>(std::round(quarter)) % 4) + 4) % 4;
    static constexpr double kCos[] = {1.0, 0.0, -1.0, 0.0};
    static constexpr double kSin[] = {0.0, 1.0, 0.0, -1.0};
    return {kCos[q], kSin[q]};
  }
  const double rad = angle_deg * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

}  // namespace

bool CorrelationTrace::degenerate() const {
  if (entries.empty()) return true;
  const double first = entries.front().raw;
  return std::all_of(entries.begin(), entries.end(),
                     [first](const CorrelationSample &s) { return s.raw == first; });
}

std::size_t CorrelationTrace::argmax() const {
  return argmax_by(entries, [](const CorrelationSample &s) { return s.raw; });
}

std::size_t CorrelationTrace::argmax_normalized() const {
  return argmax_by(entries,
                   [](const CorrelationSample &s) { return s.normalized.value_or(0.0); });
}

void RotationSearchConfig::validate() const {
  auto fail = [](const std::string &what) {
    throw Error(ErrorKind::InvalidArgument, "rotation search config: " + what);
  };
  if (!std::isfinite(range_min) || !std::isfinite(range_max) || !(range_min < range_max))
    fail("range_min must be below range_max");
  if (!(coarse_step > 0.0)) fail("coarse_step must be positive");
  if (!(fine_step > 0.0)) fail("fine_step must be positive");
  if (fine_step > coarse_step) fail("fine_step must not exceed coarse_step");
  if (fine_halfwidth < fine_step) fail("fine_halfwidth must be at least fine_step");
  if (!(fill >= 0.0 && fill <= 1.0)) fail("fill must lie in [0, 1]");
}

std::pair<GrayImage, GrayImage> embed_common(const GrayImage &a, const GrayImage &b,
                                             double fill) {
  const int width = std::max(a.width(), b.width());
  const int height = std::max(a.height(), b.height());
  auto place = [&](const GrayImage &src) {
    if (src.width() == width && src.height() == height) return src;
    GrayImage out(width, height, fill);
    const int ox = (width - src.width()) / 2;
    const int oy = (height - src.height()) / 2;
    for (int row = 0; row < src.height(); ++row) {
      for (int col = 0; col < src.width(); ++col) out.set(col + ox, row + oy, src.at(col, row));
    }
    return out;
  };
  return {place(a), place(b)};
}

double cross_correlation(const GrayImage &x, const GrayImage &y) {
  if (x.width() != y.width() || x.height() != y.height()) {
    throw Error(ErrorKind::DimensionMismatch,
                "cross-correlation needs equal sizes, got " + std::to_string(x.width()) +
                    "x" + std::to_string(x.height()) + " and " +
                    std::to_string(y.width()) + "x" + std::to_string(y.height()));
  }
  const auto xs = x.pixels();
  const auto ys = y.pixels();
  const double n = static_cast<double>(xs.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double r = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) r += (xs[i] - mx) * (ys[i] - my);
  return r;
}

double sample_bilinear(const GrayImage &image, double x, double y, double fill) {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const int x0 = static_cast<int>(fx0);
  const int y0 = static_cast<int>(fy0);
  const double tx = x - fx0;
  const double ty = y - fy0;
  auto tap = [&](int col, int row) {
    if (col < 0 || row < 0 || col >= image.width() || row >= image.height()) return fill;
    return image.at(col, row);
  };
  const double top = lerp(tap(x0, y0), tap(x0 + 1, y0), tx);
  const double bottom = lerp(tap(x0, y0 + 1), tap(x0 + 1, y0 + 1), tx);
  return lerp(top, bottom, ty);
}

std::pair<int, int> rotated_extent(int width, int height, double angle_deg) {
  const auto [c, s] = cos_sin_deg(angle_deg);
  const double w = width * std::abs(c) + height * std::abs(s);
  const double h = width * std::abs(s) + height * std::abs(c);
  return {std::max(1, static_cast<int>(std::ceil(w - 1e-9))),
          std::max(1, static_cast<int>(std::ceil(h - 1e-9)))};
}

GrayImage rotate(const GrayImage &image, double angle_deg, double fill) {
  if (!std::isfinite(angle_deg)) {
    throw Error(ErrorKind::InvalidArgument, "rotation angle must be finite");
  }
  if (angle_deg == 0.0) return image;

  const auto [c, s] = cos_sin_deg(angle_deg);
  const auto [out_w, out_h] = rotated_extent(image.width(), image.height(), angle_deg);
  const double cx = (image.width() - 1) / 2.0;
  const double cy = (image.height() - 1) / 2.0;
  const double ocx = (out_w - 1) / 2.0;
  const double ocy = (out_h - 1) / 2.0;

  GrayImage out(out_w, out_h, fill);
  for (int row = 0; row < out_h; ++row) {
    const double v = row - ocy;
    for (int col = 0; col < out_w; ++col) {
      const double u = col - ocx;
      // Inverse of the y-down counterclockwise map (u, v) -> (uc + vs, -us + vc).
      const double sx = cx + u * c - v * s;
      const double sy = cy + u * s + v * c;
      if (sx <= -1.0 || sy <= -1.0 || sx >= image.width() || sy >= image.height()) continue;
      out.set(col, row, sample_bilinear(image, sx, sy, fill));
    }
  }
  return out;
}

GrayImage resize(const GrayImage &image, double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw Error(ErrorKind::InvalidArgument, "resize ratio must be positive and finite");
  }
  const int out_w = round_half_up(image.width() * ratio);
  const int out_h = round_half_up(image.height() * ratio);
  if (out_w < 1 || out_h < 1) {
    throw Error(ErrorKind::DegenerateSize,
                "resize by " + std::to_string(ratio) + " collapses " +
                    std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                    " to zero size");
  }
  if (out_w == image.width() && out_h == image.height()) return image;

  const double step_x = static_cast<double>(image.width()) / out_w;
  const double step_y = static_cast<double>(image.height()) / out_h;
  const double max_x = image.width() - 1;
  const double max_y = image.height() - 1;

  std::vector<double> px;
  px.reserve(static_cast<std::size_t>(out_w) * out_h);
  for (int row = 0; row < out_h; ++row) {
    const double sy = std::clamp((row + 0.5) * step_y - 0.5, 0.0, max_y);
    const int y0 = static_cast<int>(sy);
    const int y1 = std::min(y0 + 1, image.height() - 1);
    const double ty = sy - y0;
    for (int col = 0; col < out_w; ++col) {
      const double sx = std::clamp((col + 0.5) * step_x - 0.5, 0.0, max_x);
      const int x0 = static_cast<int>(sx);
      const int x1 = std::min(x0 + 1, image.width() - 1);
      const double tx = sx - x0;
      const double top = lerp(image.at(x0, y0), image.at(x1, y0), tx);
      const double bottom = lerp(image.at(x0, y1), image.at(x1, y1), tx);
      px.push_back(std::clamp(lerp(top, bottom, ty), 0.0, 1.0));
    }
  }
  return GrayImage(out_w, out_h, std::move(px));
}

double rotation_score(const GrayImage &reference_crop, const GrayImage &user_crop,
                      double angle_deg, const RotationSearchConfig &cfg, double threshold) {
  GrayImage candidate = rotate(user_crop, -angle_deg, cfg.fill);
  const InkMask mask = binarize(candidate, threshold);
  if (const auto box = bounding_box(mask)) candidate = sub_image(candidate, *box);
  if (cfg.normalize_scale && candidate.height() != reference_crop.height()) {
    candidate = resize(candidate, static_cast<double>(reference_crop.height()) / candidate.height());
  }
  const auto [x, y] = embed_common(reference_crop, candidate, cfg.fill);
  return cross_correlation(x, y);
}

CorrelationTrace correlation_sweep(const GrayImage &reference_crop,
                                   const GrayImage &user_crop,
                                   const std::vector<double> &angles,
                                   const RotationSearchConfig &cfg, double threshold) {
  CorrelationTrace trace;
  trace.entries.reserve(angles.size());
  std::vector<double> raw;
  raw.reserve(angles.size());
  for (double angle : angles) {
    raw.push_back(rotation_score(reference_crop, user_crop, angle, cfg, threshold));
    trace.entries.push_back({angle, raw.back(), std::nullopt});
  }
  if (!trace.degenerate()) {
    const std::vector<double> normalized = minmax_normalize(raw);
    for (std::size_t i = 0; i < normalized.size(); ++i) {
      trace.entries[i].normalized = normalized[i];
    }
  }
  return trace;
}

std::vector<double> angle_grid(double start, double stop, double step) {
  std::vector<double> grid;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  for (long k = 0; k <= n; ++k) grid.push_back(start + static_cast<double>(k) * step);
  return grid;
}

RotationEstimate detect_rotation(const GrayImage &reference, const GrayImage &user,
                                 const RotationSearchConfig &cfg, double threshold) {
  cfg.validate();
  const GrayImage reference_crop = crop_to_content(reference, threshold);
  const GrayImage user_crop = crop_to_content(user, threshold);

  RotationEstimate est;
  est.coarse = correlation_sweep(reference_crop, user_crop,
                                 angle_grid(cfg.range_min, cfg.range_max, cfg.coarse_step),
                                 cfg, threshold);
  if (est.coarse.degenerate()) {
    throw Error(ErrorKind::NoSignal,
                "every rotation candidate correlates identically; no orientation signal");
  }
  const double approx = est.coarse.best_angle();

  std::vector<double> fine_angles;
  const auto k = static_cast<long>(std::floor(cfg.fine_halfwidth / cfg.fine_step + 1e-9));
  for (long i = -k; i <= k; ++i) {
    const double a = approx + static_cast<double>(i) * cfg.fine_step;
    if (a >= cfg.range_min - 1e-9 && a <= cfg.range_max + 1e-9) fine_angles.push_back(a);
  }
  est.fine = correlation_sweep(reference_crop, user_crop, fine_angles, cfg, threshold);
  est.angle = est.fine.best_angle();
  return est;
}

Translation2D detect_translation(const InkMask &mask) {
  const auto box = bounding_box(mask);
  if (!box) throw Error(ErrorKind::BlankImage, "cannot measure translation of a blank image");
  return {box->left, mask.height() - 1 - box->bottom};
}

double detect_scaling(const GrayImage &reference_cropped, const GrayImage &user_cropped) {
  return static_cast<double>(reference_cropped.height()) / user_cropped.height();
}

double detect_scaling_x(const GrayImage &reference_cropped, const GrayImage &user_cropped) {
  return static_cast<double>(reference_cropped.width()) / user_cropped.width();
}

}  // namespace rstreg
