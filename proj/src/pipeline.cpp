#include "rstreg/pipeline.hpp"

#include "rstreg/error.hpp"

#include <chrono>
#include <cmath>

namespace rstreg {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

Translation2D relative_offset(const InkMask &user, const InkMask &reference) {
  const Translation2D u = detect_translation(user);
  const Translation2D r = detect_translation(reference);
  return {u.dx - r.dx, u.dy - r.dy};
}

CropSize size_of(const GrayImage &img) { return {img.width(), img.height()}; }

}  // namespace

std::string_view to_string(CorrectionMode mode) {
  switch (mode) {
    case CorrectionMode::Combined: return "combined";
    case CorrectionMode::Rotation: return "rotation";
    case CorrectionMode::Scaling: return "scaling";
    case CorrectionMode::Translation: return "translation";
  }
  return "unknown";
}

double percent_error(double detected, double actual) {
  const double diff = std::abs(detected - actual);
  if (actual == 0.0) return diff;
  return diff / std::abs(actual) * 100.0;
}

ErrorSummary compare(const RstParams &detected, const RstParams &actual) {
  ErrorSummary e;
  e.actual = actual;
  e.rotation_error_deg = std::abs(detected.rotation - actual.rotation);
  e.rotation_error_pct = percent_error(detected.rotation, actual.rotation);
  e.scale_error_pct = percent_error(detected.scale, actual.scale);
  e.translation_exact = detected.translation == actual.translation;
  return e;
}

CorrectionResult correct_rst(const GrayImage &reference, const GrayImage &user,
                             const RotationSearchConfig &cfg, double threshold) {
  const auto start = Clock::now();
  RegistrationReport report;
  report.mode = CorrectionMode::Combined;
  report.config = cfg;
  report.threshold = threshold;

  const InkMask reference_mask = binarize(reference, threshold);
  const GrayImage reference_crop = crop_to_content(reference, reference_mask);
  const InkMask user_mask = binarize(user, threshold);
  if (user_mask.empty()) throw Error(ErrorKind::BlankImage, "user image has no ink content");
  report.reference_crop = size_of(reference_crop);

  auto stage = Clock::now();
  RotationEstimate rotation = detect_rotation(reference_crop, user, cfg, threshold);
  report.detected.rotation = rotation.angle;
  report.coarse_trace = std::move(rotation.coarse);
  report.fine_trace = std::move(rotation.fine);
  const GrayImage derotated = rotate(user, -report.detected.rotation, cfg.fill);
  report.timings.rotation_ms = elapsed_ms(stage);

  stage = Clock::now();
  const InkMask derotated_mask = binarize(derotated, threshold);
  if (derotated_mask.empty()) {
    throw Error(ErrorKind::BlankImage, "user ink vanished after rotation correction");
  }
  report.derotated_margins = detect_translation(derotated_mask);
  report.detected.translation = relative_offset(user_mask, reference_mask);
  const GrayImage user_crop = crop_to_content(derotated, derotated_mask);
  report.user_crop = size_of(user_crop);
  report.timings.translation_ms = elapsed_ms(stage);

  stage = Clock::now();
  report.detected.scale = detect_scaling(reference_crop, user_crop);
  report.scale_x = detect_scaling_x(reference_crop, user_crop);
  const GrayImage resized = resize(user_crop, report.detected.scale);
  const InkMask resized_mask = binarize(resized, threshold);
  GrayImage corrected = resized_mask.empty() ? resized : crop_to_content(resized, resized_mask);
  report.timings.scaling_ms = elapsed_ms(stage);

  report.timings.total_ms = elapsed_ms(start);
  return {std::move(corrected), std::move(report)};
}

RegistrationReport correct_pure(const GrayImage &reference, const GrayImage &user,
                                CorrectionMode mode, const RotationSearchConfig &cfg,
                                double threshold) {
  if (mode == CorrectionMode::Combined) return correct_rst(reference, user, cfg, threshold).report;

  const auto start = Clock::now();
  RegistrationReport report;
  report.mode = mode;
  report.config = cfg;
  report.threshold = threshold;

  const InkMask reference_mask = binarize(reference, threshold);
  const GrayImage reference_crop = crop_to_content(reference, reference_mask);
  const InkMask user_mask = binarize(user, threshold);
  const GrayImage user_crop = crop_to_content(user, user_mask);
  report.reference_crop = size_of(reference_crop);
  report.user_crop = size_of(user_crop);

  switch (mode) {
    case CorrectionMode::Rotation: {
      RotationEstimate rotation = detect_rotation(reference_crop, user_crop, cfg, threshold);
      report.detected.rotation = rotation.angle;
      report.coarse_trace = std::move(rotation.coarse);
      report.fine_trace = std::move(rotation.fine);
      report.timings.rotation_ms = elapsed_ms(start);
      break;
    }
    case CorrectionMode::Scaling:
      report.detected.scale = detect_scaling(reference_crop, user_crop);
      report.scale_x = detect_scaling_x(reference_crop, user_crop);
      report.timings.scaling_ms = elapsed_ms(start);
      break;
    case CorrectionMode::Translation:
      report.detected.translation = relative_offset(user_mask, reference_mask);
      report.timings.translation_ms = elapsed_ms(start);
      break;
    case CorrectionMode::Combined:
      break;
  }
  report.timings.total_ms = elapsed_ms(start);
  return report;
}

}  // namespace rstreg
