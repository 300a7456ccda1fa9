#pragma once

#include "rstreg/preprocess.hpp"
#include "rstreg/raster.hpp"
#include "rstreg/registration.hpp"

#include <optional>
#include <string_view>

namespace rstreg {

struct RstParams {
  double rotation = 0.0;  // degrees, counterclockwise positive
  double scale = 1.0;     // reference size / user size
  Translation2D translation;

  friend bool operator==(const RstParams &, const RstParams &) = default;
};

enum class CorrectionMode { Combined, Rotation, Scaling, Translation };

std::string_view to_string(CorrectionMode mode);

struct CropSize {
  int width = 0;
  int height = 0;
};

struct StageTimings {
  double rotation_ms = 0.0;
  double translation_ms = 0.0;
  double scaling_ms = 0.0;
  double total_ms = 0.0;
};

/// Detected values compared against known ground truth.
struct ErrorSummary {
  RstParams actual;
  double rotation_error_deg = 0.0;
  double rotation_error_pct = 0.0;
  double scale_error_pct = 0.0;
  bool translation_exact = false;
};

/// |detected - actual| / |actual| * 100, or the plain absolute error when
/// actual is zero.
double percent_error(double detected, double actual);

ErrorSummary compare(const RstParams &detected, const RstParams &actual);

struct RegistrationReport {
  CorrectionMode mode = CorrectionMode::Combined;
  RstParams detected;
  double scale_x = 1.0;  // width ratio, diagnostic only
  // Ink margins of the de-rotated user canvas (combined mode).
  Translation2D derotated_margins;
  CropSize reference_crop;
  CropSize user_crop;
  CorrelationTrace coarse_trace;
  CorrelationTrace fine_trace;
  RotationSearchConfig config;
  double threshold = kDefaultThreshold;
  StageTimings timings;
  std::optional<ErrorSummary> ground_truth;

  void attach_ground_truth(const RstParams &actual) {
    ground_truth = compare(detected, actual);
  }
};

struct CorrectionResult {
  GrayImage corrected;
  RegistrationReport report;
};

/// Rotation, then translation (by cropping), then scaling.
///
/// The reference is reduced to its ink crop and acts as the template. The
/// user is de-rotated by the detected angle, re-binarized at the same
/// threshold and cropped; the crop height ratio gives the scale, and the
/// resized crop (re-cropped to its ink) is the corrected output.
/// Translation is reported as the user's ink offset minus the reference's,
/// in the bottom-left frame.
CorrectionResult correct_rst(const GrayImage &reference, const GrayImage &user,
                             const RotationSearchConfig &cfg = {},
                             double threshold = kDefaultThreshold);

/// Runs a single detector. Parameters the mode does not measure keep their
/// identity values (0 degrees, scale 1, zero translation).
RegistrationReport correct_pure(const GrayImage &reference, const GrayImage &user,
                                CorrectionMode mode, const RotationSearchConfig &cfg = {},
                                double threshold = kDefaultThreshold);

}  // namespace rstreg
