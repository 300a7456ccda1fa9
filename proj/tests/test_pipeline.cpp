#include "doctest.h"

#include "rstreg/error.hpp"
#include "rstreg/pipeline.hpp"
#include "rstreg/synth.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace rstreg;

namespace {

constexpr int kCanvas = 384;

Translation2D centered(const GrayImage &content) {
  return {(kCanvas - content.width()) / 2, (kCanvas - content.height()) / 2};
}

}  // namespace

TEST_CASE("percent_error") {
  CHECK(percent_error(60, 59) == doctest::Approx(100.0 / 59.0));
  CHECK(percent_error(1.9, 1.67) == doctest::Approx(13.772455).epsilon(1e-6));
  CHECK(percent_error(3, 0) == 3.0);
  CHECK(percent_error(-2, 0) == 2.0);

  const ErrorSummary e = compare({52, 1.90, {10, 20}}, {50, 1.67, {10, 20}});
  CHECK(e.rotation_error_deg == 2.0);
  CHECK(e.rotation_error_pct == doctest::Approx(4.0));
  CHECK(e.translation_exact);
  CHECK_FALSE(compare({0, 1, {1, 0}}, {0, 1, {0, 0}}).translation_exact);
}

TEST_CASE("combined correction on a large rotation and downscale") {
  const GrayImage &ref = testing::reference_glyph(0);
  const GrayImage content = transform_content(ref, {50, 1.67, {}});
  const Translation2D t = centered(content);
  const GrayImage user = place_content(content, t, kCanvas, kCanvas);

  CorrectionResult res = correct_rst(ref, user);
  const RstParams &d = res.report.detected;
  CHECK(std::abs(d.rotation - 50.0) <= 3.0);
  CHECK(percent_error(d.scale, 1.67) <= 15.0);
  CHECK(d.translation == t);

  res.report.attach_ground_truth({50, 1.67, t});
  REQUIRE(res.report.ground_truth.has_value());
  CHECK(res.report.ground_truth->translation_exact);
  CHECK(res.report.reference_crop.height == ref.height());
  CHECK(std::abs(res.corrected.height() - ref.height()) <= 1);
}

TEST_CASE("identity input is left alone") {
  const GrayImage &ref = testing::reference_glyph(1);
  const CorrectionResult res = correct_rst(ref, ref);
  CHECK(res.report.detected.rotation == 0.0);
  CHECK(res.report.detected.scale == 1.0);
  CHECK(res.report.detected.translation == Translation2D{0, 0});
  CHECK(res.corrected == ref);
}

TEST_CASE("random combined transforms") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const GrayImage &ref = testing::reference_glyph(trial % 5);
    const RstParams actual{std::round(rng.uniform(-45.0, 45.0)), rng.uniform(0.8, 1.25), {}};
    const GrayImage content = transform_content(ref, actual);
    const Translation2D t{rng.uniform_int(0, kCanvas - content.width()),
                          rng.uniform_int(0, kCanvas - content.height())};
    const CorrectionResult res = correct_rst(ref, place_content(content, t, kCanvas, kCanvas));
    CAPTURE(trial);
    CAPTURE(actual.rotation);
    CAPTURE(actual.scale);
    CHECK(std::abs(res.report.detected.rotation - actual.rotation) <= 3.0);
    CHECK(percent_error(res.report.detected.scale, actual.scale) <= 15.0);
    CHECK(res.report.detected.translation == t);
  }
}

TEST_CASE("single-detector modes") {
  const GrayImage &ref = testing::reference_glyph(2);

  const GrayImage shifted = place_content(ref, {150, 150}, 600, 600);
  const RegistrationReport tr = correct_pure(ref, shifted, CorrectionMode::Translation);
  CHECK(tr.detected.translation == Translation2D{150, 150});
  CHECK(tr.detected.rotation == 0.0);
  CHECK(tr.detected.scale == 1.0);

  const GrayImage quarter = forward_rst(ref, {0, 4, {20, 20}}, 256, 256);
  const RegistrationReport sc = correct_pure(ref, quarter, CorrectionMode::Scaling);
  CHECK(percent_error(sc.detected.scale, 4.0) <= 7.0);
  CHECK(sc.detected.rotation == 0.0);
  CHECK(sc.detected.translation == Translation2D{0, 0});

  const RegistrationReport rot = correct_pure(ref, ref, CorrectionMode::Rotation);
  CHECK(rot.detected.rotation == 0.0);
  const RegistrationReport rot27 =
      correct_pure(ref, forward_rst(ref, {27, 1, {30, 30}}, 384, 384), CorrectionMode::Rotation);
  CHECK(std::abs(rot27.detected.rotation - 27.0) <= 1.0);
  CHECK(rot27.detected.scale == 1.0);
}

TEST_CASE("scaling must follow rotation correction") {
  const GrayImage &ref = testing::reference_glyph(3);
  const RstParams actual{40, 1.0, {}};
  const GrayImage user = forward_rst(ref, actual, kCanvas, kCanvas);

  // Height ratio of the still-rotated crop.
  const double premature = detect_scaling(ref, crop_to_content(user, kDefaultThreshold));
  CHECK(percent_error(premature, actual.scale) > 25.0);

  const CorrectionResult res = correct_rst(ref, user);
  CHECK(percent_error(res.report.detected.scale, actual.scale) <= 15.0);
}

TEST_CASE("re-registering a corrected output is a no-op") {
  for (int g = 0; g < 5; ++g) {
    const GrayImage &ref = testing::reference_glyph(g);
    for (const RstParams &p : table_parameters(TableId::Combined)) {
      const GrayImage content = transform_content(ref, p);
      const GrayImage user = place_content(content, centered(content), kCanvas, kCanvas);
      const CorrectionResult first = correct_rst(ref, user);
      const CorrectionResult second = correct_rst(ref, first.corrected);
      CAPTURE(g);
      CAPTURE(p.rotation);
      CHECK(std::abs(second.report.detected.rotation) <= 1.0);
      CHECK(percent_error(second.report.detected.scale, 1.0) <= 5.0);
      CHECK(second.report.detected.translation == Translation2D{0, 0});
    }
  }
}

TEST_CASE("pipeline errors") {
  const GrayImage &ref = testing::reference_glyph(0);
  CHECK_THROWS_AS(correct_rst(ref, GrayImage(100, 100, 1.0)), Error);
  try {
    (void)correct_rst(ref, GrayImage(100, 100, 1.0));
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::BlankImage);
  }
  try {
    (void)correct_pure(GrayImage(10, 10, 1.0), ref, CorrectionMode::Scaling);
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::BlankImage);
  }
}

TEST_CASE("report carries traces and timings") {
  const GrayImage &ref = testing::reference_glyph(4);
  const CorrectionResult res = correct_rst(ref, forward_rst(ref, {-20, 1.1, {40, 15}}, 384, 384));
  CHECK(res.report.coarse_trace.entries.size() == 25);
  CHECK_FALSE(res.report.fine_trace.entries.empty());
  CHECK(res.report.timings.total_ms >= res.report.timings.rotation_ms);
  CHECK(res.report.mode == CorrectionMode::Combined);
  CHECK(to_string(CorrectionMode::Scaling) == "scaling");
}
