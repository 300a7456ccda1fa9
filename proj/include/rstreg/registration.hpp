#pragma once

#include "rstreg/preprocess.hpp"
#include "rstreg/raster.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace rstreg {

struct CorrelationSample {
  double angle = 0.0;  // degrees, counterclockwise positive
  double raw = 0.0;
  std::optional<double> normalized;  // absent when the sweep is constant
};

/// One rotation sweep ordered by strictly increasing angle.
struct CorrelationTrace {
  std::vector<CorrelationSample> entries;

  bool degenerate() const;
  /// Index of the best raw correlation. Ties go to the smallest |angle|, then
  /// to the negative angle.
  std::size_t argmax() const;
  std::size_t argmax_normalized() const;
  double best_angle() const { return entries.at(argmax()).angle; }
};

struct RotationSearchConfig {
  double range_min = -60.0;
  double range_max = 60.0;
  double coarse_step = 5.0;
  double fine_halfwidth = 3.0;
  double fine_step = 1.0;
  double fill = 1.0;
  // Resize each de-rotated candidate to the reference crop height before
  // correlating. Without it, a scale mismatch between the two images
  // dominates the correlation surface.
  bool normalize_scale = true;

  /// Throws InvalidArgument when the step/range invariants do not hold.
  void validate() const;
};

/// Signed offsets in the bottom-left frame: dx rightward, dy upward.
struct Translation2D {
  int dx = 0;
  int dy = 0;

  friend bool operator==(const Translation2D &, const Translation2D &) = default;
};

/// Centers both images on a canvas of the larger width and height.
std::pair<GrayImage, GrayImage> embed_common(const GrayImage &a, const GrayImage &b,
                                             double fill = 1.0);

/// Sum of products of mean-centered samples. Requires equal dimensions.
double cross_correlation(const GrayImage &x, const GrayImage &y);

/// Samples `image` at a fractional position with bilinear weights; taps
/// outside the raster read `fill`.
double sample_bilinear(const GrayImage &image, double x, double y, double fill);

/// Canvas size that holds a w x h raster rotated by angle_deg without clipping.
std::pair<int, int> rotated_extent(int width, int height, double angle_deg);

/// Counterclockwise rotation about the image center onto an expanded canvas.
/// Inverse-mapped bilinear sampling; exposed canvas takes `fill`. Multiples of
/// 90 degrees use exact trigonometry so the grid maps onto itself.
GrayImage rotate(const GrayImage &image, double angle_deg, double fill = 1.0);

/// Uniform rescale, output size round-half-up(w * ratio) x round-half-up(h * ratio).
/// Throws DegenerateSize if either output dimension would be zero.
GrayImage resize(const GrayImage &image, double ratio);

/// Correlation score for the hypothesis "user is rotated by angle_deg
/// relative to reference": the user content is rotated back by -angle_deg,
/// cropped to its ink, optionally brought to the reference crop height, and
/// center-embedded against the cropped reference.
/// Both the two-stage search and the exhaustive oracle use this kernel.
double rotation_score(const GrayImage &reference_crop, const GrayImage &user_crop,
                      double angle_deg, const RotationSearchConfig &cfg, double threshold);

/// Evaluates rotation_score at each angle and fills in the normalized column.
CorrelationTrace correlation_sweep(const GrayImage &reference_crop,
                                   const GrayImage &user_crop,
                                   const std::vector<double> &angles,
                                   const RotationSearchConfig &cfg, double threshold);

/// {start, start + step, ...} up to and including stop (within 1e-9).
std::vector<double> angle_grid(double start, double stop, double step);

struct RotationEstimate {
  double angle = 0.0;
  CorrelationTrace coarse;
  CorrelationTrace fine;
};

/// Coarse sweep over [range_min, range_max], then a fine sweep of
/// +/- fine_halfwidth around the coarse optimum, clamped to the range.
/// The returned angle is how far the user appears rotated; correcting means
/// rotating the user by its negative.
/// Throws BlankImage if either image has no ink and NoSignal when every
/// coarse candidate correlates identically.
RotationEstimate detect_rotation(const GrayImage &reference, const GrayImage &user,
                                 const RotationSearchConfig &cfg = {},
                                 double threshold = kDefaultThreshold);

/// Blank columns on the left and blank rows at the bottom of the mask.
Translation2D detect_translation(const InkMask &mask);

/// Height ratio reference / user of two content crops.
double detect_scaling(const GrayImage &reference_cropped, const GrayImage &user_cropped);

/// Width ratio; reported for diagnostics, never applied.
double detect_scaling_x(const GrayImage &reference_cropped, const GrayImage &user_cropped);

}  // namespace rstreg
