#pragma once

#include "rstreg/pipeline.hpp"
#include "rstreg/raster.hpp"
#include "rstreg/registration.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rstreg {

/// Seeded uniform source whose sequence is identical on every platform
/// (std::mt19937_64 output is fully specified; the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Inclusive on both ends.
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(uniform() * (static_cast<double>(hi) - lo + 1.0));
  }

 private:
  std::mt19937_64 engine_;
};

struct GlyphSpec {
  std::uint64_t seed = 1;
  int canvas_width = 200;
  int canvas_height = 100;
  int strokes_min = 2;
  int strokes_max = 3;
  double thickness_min = 3.5;
  double thickness_max = 6.0;
  std::string id = "glyph";
};

/// Deterministic black-on-white cursive-like strokes. Throws InvalidArgument
/// for a canvas too small to hold strokes with a one-pixel margin.
GrayImage generate_glyph(const GlyphSpec &spec);

/// Glyph specs for a benchmark run: seeds derived from `seed`, ids g0, g1, ...
std::vector<GlyphSpec> glyph_family(std::uint64_t seed, int count);

/// Resize by 1 / params.scale, rotate by params.rotation and crop to ink.
GrayImage transform_content(const GrayImage &image, const RstParams &params,
                            double threshold = kDefaultThreshold);

/// Places `content` on a white canvas with its bottom-left corner at
/// `offset` (bottom-left frame). Throws ContentOverflow if it does not fit.
GrayImage place_content(const GrayImage &content, Translation2D offset, int canvas_width,
                        int canvas_height);

/// Forward model: transform_content then place_content at params.translation.
GrayImage forward_rst(const GrayImage &image, const RstParams &params, int canvas_width,
                      int canvas_height, double threshold = kDefaultThreshold);

struct OracleResult {
  double angle = 0.0;
  CorrelationTrace trace;
};

/// One full sweep of [cfg.range_min, cfg.range_max] at `step` degrees with the
/// same kernel and tie-break as detect_rotation.
OracleResult exhaustive_rotation_oracle(const GrayImage &reference, const GrayImage &user,
                                        double step, const RotationSearchConfig &cfg = {},
                                        double threshold = kDefaultThreshold);

enum class TableId { PureRotation = 1, PureScaling = 2, PureTranslation = 3, Combined = 4, Envelope = 5 };

CorrectionMode mode_of(TableId table);

/// Actual parameters for each row of a table (translation filled in per row
/// for the translation table only).
std::vector<RstParams> table_parameters(TableId table);

/// Scale band on combined correction where accuracy is promised.
inline constexpr double kCombinedScaleMin = 0.67;
inline constexpr double kCombinedScaleMax = 1.33;
/// Pure scaling stays accurate from 0.48 to 2.17; beyond that the shrunken
/// user loses stroke extent to resampling.
inline constexpr double kPureScaleMin = 0.48;
inline constexpr double kPureScaleMax = 2.17;
/// Rotations past this magnitude sit next to the coarse grid endpoint.
inline constexpr double kRotationReliable = 57.0;

/// True when the parameters lie inside the accuracy envelope of the mode.
bool within_envelope(CorrectionMode mode, const RstParams &params);

struct ExperimentRow {
  std::string sample;
  CorrectionMode mode = CorrectionMode::Combined;
  RstParams actual;
  RstParams detected;
  ErrorSummary errors;
  bool in_envelope = true;
  bool skipped = false;
  std::string reason;
};

struct SuiteOptions {
  RotationSearchConfig search;
  double threshold = kDefaultThreshold;
  // Per-table default when unset.
  std::optional<int> canvas_width;
  std::optional<int> canvas_height;
  // Worker threads for independent rows; 0 picks hardware concurrency.
  unsigned threads = 0;
};

std::pair<int, int> default_canvas(TableId table);

/// One row per (glyph, parameter) pair in glyph-major order. Rows whose
/// transformed content does not fit the canvas are kept with skipped = true.
std::vector<ExperimentRow> run_table_suite(TableId table, const std::vector<GlyphSpec> &glyphs,
                                           const SuiteOptions &options = {});

}  // namespace rstreg
