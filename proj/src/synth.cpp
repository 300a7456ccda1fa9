#include "rstreg/synth.hpp"

#include "rstreg/error.hpp"
#include "rstreg/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

namespace rstreg {

namespace {

struct Point {
  double x;
  double y;
};

Point catmull_rom(const Point &p0, const Point &p1, const Point &p2, const Point &p3,
                  double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  auto blend = [&](double a, double b, double c, double d) {
    return 0.5 * (2.0 * b + (-a + c) * t + (2.0 * a - 5.0 * b + 4.0 * c - d) * t2 +
                  (-a + 3.0 * b - 3.0 * c + d) * t3);
  };
  return {blend(p0.x, p1.x, p2.x, p3.x), blend(p0.y, p1.y, p2.y, p3.y)};
}

std::vector<Point> smooth(const std::vector<Point> &ctrl, double lo_x, double hi_x,
                          double lo_y, double hi_y) {
  constexpr int kSubdivisions = 12;
  std::vector<Point> out;
  const std::size_t n = ctrl.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const Point &p0 = ctrl[i == 0 ? 0 : i - 1];
    const Point &p3 = ctrl[std::min(i + 2, n - 1)];
    for (int s = 0; s < kSubdivisions; ++s) {
      Point p = catmull_rom(p0, ctrl[i], ctrl[i + 1], p3, static_cast<double>(s) / kSubdivisions);
      p.x = std::clamp(p.x, lo_x, hi_x);
      p.y = std::clamp(p.y, lo_y, hi_y);
      out.push_back(p);
    }
  }
  out.push_back(ctrl.back());
  return out;
}

double segment_distance(double px, double py, const Point &a, const Point &b) {
  const double vx = b.x - a.x;
  const double vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? ((px - a.x) * vx + (py - a.y) * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (a.x + t * vx);
  const double dy = py - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

// Anti-aliased stroke: luminance ramps from 0 to 1 across one pixel at the edge.
void draw_polyline(GrayImage &img, const std::vector<Point> &path, double thickness) {
  const double radius = thickness / 2.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point &a = path[i];
    const Point &b = path[i + 1];
    const int c0 = std::max(0, static_cast<int>(std::floor(std::min(a.x, b.x) - radius - 1)));
    const int c1 = std::min(img.width() - 1, static_cast<int>(std::ceil(std::max(a.x, b.x) + radius + 1)));
    const int r0 = std::max(0, static_cast<int>(std::floor(std::min(a.y, b.y) - radius - 1)));
    const int r1 = std::min(img.height() - 1, static_cast<int>(std::ceil(std::max(a.y, b.y) + radius + 1)));
    for (int row = r0; row <= r1; ++row) {
      for (int col = c0; col <= c1; ++col) {
        const double d = segment_distance(col, row, a, b);
        const double v = std::clamp(d - radius + 0.5, 0.0, 1.0);
        if (v < img.at(col, row)) img.set(col, row, v);
      }
    }
  }
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

GrayImage generate_glyph(const GlyphSpec &spec) {
  if (spec.thickness_min < 2.0 || spec.thickness_max < spec.thickness_min) {
    throw Error(ErrorKind::InvalidArgument, "glyph thickness range must satisfy 2 <= min <= max");
  }
  if (spec.strokes_min < 1 || spec.strokes_max < spec.strokes_min) {
    throw Error(ErrorKind::InvalidArgument, "glyph stroke count range must satisfy 1 <= min <= max");
  }
  const double margin = spec.thickness_max / 2.0 + 2.0;
  const double min_extent = 2.0 * margin + 8.0;
  if (spec.canvas_width < min_extent || spec.canvas_height < min_extent) {
    throw Error(ErrorKind::InvalidArgument,
                "glyph canvas " + std::to_string(spec.canvas_width) + "x" +
                    std::to_string(spec.canvas_height) + " too small for the stroke margin");
  }

  Rng rng(spec.seed);
  GrayImage img(spec.canvas_width, spec.canvas_height, 1.0);
  const double lo_x = margin;
  const double hi_x = spec.canvas_width - 1 - margin;
  const double lo_y = margin;
  const double hi_y = spec.canvas_height - 1 - margin;
  const double span_x = hi_x - lo_x;
  const double span_y = hi_y - lo_y;

  // Main signature body: a left-to-right zigzag alternating between the
  // upper and lower bands, smoothed into loops.
  {
    const int n = rng.uniform_int(7, 11);
    std::vector<Point> ctrl;
    bool upper = rng.uniform() < 0.5;
    for (int k = 0; k < n; ++k) {
      const double fx = (k + rng.uniform(-0.3, 0.3)) / (n - 1);
      const double x = lo_x + span_x * std::clamp(fx, 0.0, 1.0);
      const double band = upper ? rng.uniform(0.0, 0.45) : rng.uniform(0.55, 1.0);
      ctrl.push_back({x, lo_y + span_y * band});
      if (rng.uniform() < 0.8) upper = !upper;
    }
    // Anchor the extremes so the ink spans the canvas width.
    ctrl.front().x = lo_x;
    ctrl.back().x = hi_x;
    draw_polyline(img, smooth(ctrl, lo_x, hi_x, lo_y, hi_y),
                  rng.uniform(spec.thickness_min, spec.thickness_max));
  }

  const int strokes = rng.uniform_int(spec.strokes_min, spec.strokes_max);
  for (int s = 1; s < strokes; ++s) {
    const int n = rng.uniform_int(3, 5);
    const double start = rng.uniform(0.0, 0.5);
    const double length = rng.uniform(0.25, 0.5);
    const double base = rng.uniform(0.0, 1.0);
    std::vector<Point> ctrl;
    for (int k = 0; k < n; ++k) {
      const double fx = std::clamp(start + length * k / (n - 1), 0.0, 1.0);
      const double fy = std::clamp(base + rng.uniform(-0.3, 0.3), 0.0, 1.0);
      ctrl.push_back({lo_x + span_x * fx, lo_y + span_y * fy});
    }
    draw_polyline(img, smooth(ctrl, lo_x, hi_x, lo_y, hi_y),
                  rng.uniform(spec.thickness_min, spec.thickness_max));
  }
  return img;
}

std::vector<GlyphSpec> glyph_family(std::uint64_t seed, int count) {
  std::vector<GlyphSpec> specs;
  for (int i = 0; i < count; ++i) {
    GlyphSpec spec;
    spec.seed = mix(seed, static_cast<std::uint64_t>(i));
    spec.id = "g" + std::to_string(i);
    specs.push_back(spec);
  }
  return specs;
}

GrayImage transform_content(const GrayImage &image, const RstParams &params, double threshold) {
  if (!(params.scale > 0.0) || !std::isfinite(params.scale)) {
    throw Error(ErrorKind::InvalidArgument, "forward scale must be positive");
  }
  const GrayImage scaled = resize(image, 1.0 / params.scale);
  const GrayImage rotated = rotate(scaled, params.rotation, 1.0);
  return crop_to_content(rotated, threshold);
}

GrayImage place_content(const GrayImage &content, Translation2D offset, int canvas_width,
                        int canvas_height) {
  if (offset.dx < 0 || offset.dy < 0) {
    throw Error(ErrorKind::InvalidArgument, "translation offsets must be non-negative");
  }
  if (content.width() + offset.dx > canvas_width || content.height() + offset.dy > canvas_height) {
    throw Error(ErrorKind::ContentOverflow,
                std::to_string(content.width()) + "x" + std::to_string(content.height()) +
                    " content at offset (" + std::to_string(offset.dx) + ", " +
                    std::to_string(offset.dy) + ") exceeds the " +
                    std::to_string(canvas_width) + "x" + std::to_string(canvas_height) +
                    " canvas");
  }
  GrayImage canvas(canvas_width, canvas_height, 1.0);
  const int top = canvas_height - offset.dy - content.height();
  for (int row = 0; row < content.height(); ++row) {
    for (int col = 0; col < content.width(); ++col) {
      canvas.set(offset.dx + col, top + row, content.at(col, row));
    }
  }
  return canvas;
}

GrayImage forward_rst(const GrayImage &image, const RstParams &params, int canvas_width,
                      int canvas_height, double threshold) {
  return place_content(transform_content(image, params, threshold), params.translation,
                       canvas_width, canvas_height);
}

OracleResult exhaustive_rotation_oracle(const GrayImage &reference, const GrayImage &user,
                                        double step, const RotationSearchConfig &cfg,
                                        double threshold) {
  if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "oracle step must be positive");
  const GrayImage reference_crop = crop_to_content(reference, threshold);
  const GrayImage user_crop = crop_to_content(user, threshold);
  OracleResult result;
  result.trace = correlation_sweep(reference_crop, user_crop,
                                   angle_grid(cfg.range_min, cfg.range_max, step), cfg,
                                   threshold);
  if (result.trace.degenerate()) {
    throw Error(ErrorKind::NoSignal, "exhaustive sweep found no orientation signal");
  }
  result.angle = result.trace.best_angle();
  return result;
}

CorrectionMode mode_of(TableId table) {
  switch (table) {
    case TableId::PureRotation: return CorrectionMode::Rotation;
    case TableId::PureScaling: return CorrectionMode::Scaling;
    case TableId::PureTranslation: return CorrectionMode::Translation;
    case TableId::Combined:
    case TableId::Envelope: return CorrectionMode::Combined;
  }
  return CorrectionMode::Combined;
}

std::vector<RstParams> table_parameters(TableId table) {
  std::vector<RstParams> rows;
  switch (table) {
    case TableId::PureRotation:
      for (double a : {-60.0, -48.0, -20.0, -6.0, 0.0, 4.0, 13.0, 27.0, 37.0, 59.0})
        rows.push_back({a, 1.0, {}});
      break;
    case TableId::PureScaling:
      for (double s : {7.69, 5.0, 4.0, 2.17, 1.28, 1.0, 0.63, 0.54, 0.48, 0.31})
        rows.push_back({0.0, s, {}});
      break;
    case TableId::PureTranslation:
      for (auto [x, y] : std::vector<std::pair<int, int>>{{0, 5}, {5, 5}, {10, 0}, {15, 10},
                                                          {0, 25}, {25, 25}, {25, 50}, {50, 50},
                                                          {50, 100}, {150, 150}})
        rows.push_back({0.0, 1.0, {x, y}});
      break;
    case TableId::Combined:
      for (auto [a, s] : std::vector<std::pair<double, double>>{
               {50, 1.67}, {12, 1.33}, {31, 1.11}, {-40, 0.91}, {-30, 0.8}})
        rows.push_back({a, s, {}});
      break;
    case TableId::Envelope:
      // Inside the band: the combined-table ratios. Outside: the pure-scaling
      // table ratios that fall beyond 0.67..1.33.
      for (double a : {-40.0, -15.0, 10.0, 35.0}) {
        for (double s : {0.67, 0.8, 0.91, 1.0, 1.11, 1.28, 1.33,
                         7.69, 5.0, 4.0, 2.17, 0.63, 0.54, 0.48, 0.31})
          rows.push_back({a, s, {}});
      }
      break;
  }
  return rows;
}

bool within_envelope(CorrectionMode mode, const RstParams &params) {
  const bool rotation_ok = std::abs(params.rotation) <= kRotationReliable;
  switch (mode) {
    case CorrectionMode::Rotation: return rotation_ok;
    case CorrectionMode::Scaling:
      return params.scale >= kPureScaleMin - 1e-12 && params.scale <= kPureScaleMax + 1e-12;
    case CorrectionMode::Translation: return true;
    case CorrectionMode::Combined:
      return rotation_ok && params.scale >= kCombinedScaleMin - 1e-12 &&
             params.scale <= kCombinedScaleMax + 1e-12;
  }
  return true;
}

std::pair<int, int> default_canvas(TableId table) {
  switch (table) {
    case TableId::PureRotation: return {256, 256};
    case TableId::PureScaling: return {512, 512};
    case TableId::PureTranslation: return {384, 384};
    case TableId::Combined: return {384, 384};
    case TableId::Envelope: return {768, 768};
  }
  return {512, 512};
}

namespace {

ExperimentRow run_row(TableId table, const GlyphSpec &glyph, const GrayImage &reference,
                      const RstParams &params, std::size_t index, int canvas_w, int canvas_h,
                      const SuiteOptions &options) {
  ExperimentRow row;
  row.sample = glyph.id + "-s" + std::to_string(index + 1);
  row.mode = mode_of(table);
  row.actual = params;
  row.in_envelope = within_envelope(row.mode, params);
  try {
    const GrayImage content = transform_content(reference, params, options.threshold);
    const int room_x = canvas_w - content.width();
    const int room_y = canvas_h - content.height();
    switch (table) {
      case TableId::PureRotation:
      case TableId::PureScaling:
        row.actual.translation = {std::max(0, room_x / 2), std::max(0, room_y / 2)};
        break;
      case TableId::PureTranslation:
        break;
      case TableId::Combined:
      case TableId::Envelope: {
        Rng rng(mix(glyph.seed, 1000 + index));
        row.actual.translation = {rng.uniform_int(0, std::max(0, room_x)),
                                  rng.uniform_int(0, std::max(0, room_y))};
        break;
      }
    }
    const GrayImage user = place_content(content, row.actual.translation, canvas_w, canvas_h);
    const RegistrationReport report =
        correct_pure(reference, user, row.mode, options.search, options.threshold);
    row.detected = report.detected;
    row.errors = compare(row.detected, row.actual);
  } catch (const Error &e) {
    if (e.kind() != ErrorKind::ContentOverflow && e.kind() != ErrorKind::DegenerateSize &&
        e.kind() != ErrorKind::BlankImage && e.kind() != ErrorKind::NoSignal) {
      throw;
    }
    row.skipped = true;
    row.reason = std::string(to_string(e.kind())) + ": " + e.what();
  }
  if (!row.skipped && !row.in_envelope) row.reason = "outside reliable envelope";
  return row;
}

}  // namespace

std::vector<ExperimentRow> run_table_suite(TableId table, const std::vector<GlyphSpec> &glyphs,
                                           const SuiteOptions &options) {
  if (glyphs.empty()) throw Error(ErrorKind::InvalidArgument, "table suite needs at least one glyph");
  options.search.validate();
  const auto [dw, dh] = default_canvas(table);
  const int canvas_w = options.canvas_width.value_or(dw);
  const int canvas_h = options.canvas_height.value_or(dh);
  const std::vector<RstParams> params = table_parameters(table);

  struct Job {
    std::size_t glyph;
    std::size_t param;
  };
  std::vector<Job> jobs;
  for (std::size_t g = 0; g < glyphs.size(); ++g) {
    for (std::size_t p = 0; p < params.size(); ++p) jobs.push_back({g, p});
  }

  std::vector<GrayImage> references;
  for (const GlyphSpec &spec : glyphs) {
    references.push_back(crop_to_content(generate_glyph(spec), options.threshold));
  }

  std::vector<std::optional<ExperimentRow>> rows(jobs.size());
  unsigned threads = options.threads != 0 ? options.threads
                                          : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(jobs.size()));

  // Rows are written into fixed slots, so scheduling never affects output order.
  auto worker = [&](unsigned first) {
    for (std::size_t i = first; i < jobs.size(); i += threads) {
      const Job &job = jobs[i];
      rows[i] = run_row(table, glyphs[job.glyph], references[job.glyph], params[job.param],
                        job.param, canvas_w, canvas_h, options);
    }
  };
  std::vector<std::future<void>> pending;
  for (unsigned t = 1; t < threads; ++t) pending.push_back(std::async(std::launch::async, worker, t));
  worker(0);
  for (auto &f : pending) f.get();

  std::vector<ExperimentRow> out;
  out.reserve(rows.size());
  for (auto &row : rows) out.push_back(std::move(*row));
  return out;
}

}  // namespace rstreg
