#include "rstreg/report_io.hpp"

#include "rstreg/error.hpp"

#include <cstdio>

namespace rstreg {

namespace {

std::string fmt(double v, const char *spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

bool measures_rotation(CorrectionMode m) {
  return m == CorrectionMode::Combined || m == CorrectionMode::Rotation;
}
bool measures_scale(CorrectionMode m) {
  return m == CorrectionMode::Combined || m == CorrectionMode::Scaling;
}
bool measures_translation(CorrectionMode m) {
  return m == CorrectionMode::Combined || m == CorrectionMode::Translation;
}

}  // namespace

nlohmann::json params_to_sidecar(const RstParams &params) {
  return {{"rotation_deg", params.rotation},
          {"scale", params.scale},
          {"tx", params.translation.dx},
          {"ty", params.translation.dy}};
}

RstParams params_from_sidecar(const nlohmann::json &j) {
  try {
    RstParams p;
    p.rotation = j.at("rotation_deg").get<double>();
    p.scale = j.at("scale").get<double>();
    p.translation = {j.at("tx").get<int>(), j.at("ty").get<int>()};
    if (!(p.scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "sidecar scale must be positive");
    return p;
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::InvalidArgument, std::string("ground-truth sidecar: ") + e.what());
  }
}

nlohmann::json config_to_json(const RotationSearchConfig &cfg, double threshold) {
  return {{"range_min", cfg.range_min},           {"range_max", cfg.range_max},
          {"coarse_step", cfg.coarse_step},       {"fine_halfwidth", cfg.fine_halfwidth},
          {"fine_step", cfg.fine_step},           {"fill", cfg.fill},
          {"normalize_scale", cfg.normalize_scale}, {"threshold", threshold}};
}

nlohmann::json trace_to_json(const CorrelationTrace &trace) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CorrelationSample &s : trace.entries) {
    arr.push_back({{"angle", s.angle},
                   {"raw", s.raw},
                   {"normalized", s.normalized ? nlohmann::json(*s.normalized) : nlohmann::json()}});
  }
  return arr;
}

nlohmann::json report_to_json(const RegistrationReport &r) {
  nlohmann::json j;
  j["mode"] = std::string(to_string(r.mode));
  j["rotation_convention"] = "counterclockwise-positive degrees";
  j["translation_origin"] = "bottom-left";
  j["detected"] = params_to_sidecar(r.detected);
  j["scale_x"] = r.scale_x;
  j["derotated_margins"] = {{"tx", r.derotated_margins.dx}, {"ty", r.derotated_margins.dy}};
  j["reference_crop"] = {{"width", r.reference_crop.width}, {"height", r.reference_crop.height}};
  j["user_crop"] = {{"width", r.user_crop.width}, {"height", r.user_crop.height}};
  j["coarse_trace"] = trace_to_json(r.coarse_trace);
  j["fine_trace"] = trace_to_json(r.fine_trace);
  j["config"] = config_to_json(r.config, r.threshold);
  j["timings_ms"] = {{"rotation", r.timings.rotation_ms},
                     {"translation", r.timings.translation_ms},
                     {"scaling", r.timings.scaling_ms},
                     {"total", r.timings.total_ms}};
  if (r.ground_truth) {
    const ErrorSummary &e = *r.ground_truth;
    j["ground_truth"] = params_to_sidecar(e.actual);
    j["errors"] = {{"rotation_deg", e.rotation_error_deg},
                   {"rotation_pct", e.rotation_error_pct},
                   {"scale_pct", e.scale_error_pct},
                   {"translation_exact", e.translation_exact}};
  }
  return j;
}

void write_csv_row(std::ostream &out, const ExperimentRow &row, bool has_truth) {
  const bool ok = !row.skipped;
  const bool rot = ok && measures_rotation(row.mode);
  const bool scl = ok && measures_scale(row.mode);
  const bool trn = ok && measures_translation(row.mode);
  auto cell = [](bool present, const std::string &v) { return present ? v : std::string(); };

  out << csv_escape(row.sample) << ','
      << cell(has_truth, fmt(row.actual.rotation)) << ','
      << cell(has_truth, fmt(row.actual.scale)) << ','
      << cell(has_truth, std::to_string(row.actual.translation.dx)) << ','
      << cell(has_truth, std::to_string(row.actual.translation.dy)) << ','
      << cell(rot, fmt(row.detected.rotation)) << ','
      << cell(scl, fmt(row.detected.scale)) << ','
      << cell(trn, std::to_string(row.detected.translation.dx)) << ','
      << cell(trn, std::to_string(row.detected.translation.dy)) << ','
      << cell(has_truth && rot, fmt(row.errors.rotation_error_deg)) << ','
      << cell(has_truth && scl, fmt(row.errors.scale_error_pct, "%.4f")) << ','
      << cell(has_truth && trn, row.errors.translation_exact ? "true" : "false") << ','
      << (row.skipped ? "true" : "false") << ','
      << csv_escape(row.reason) << '\n';
}

void write_csv(std::ostream &out, const std::vector<ExperimentRow> &rows) {
  out << kCsvHeader << '\n';
  for (const ExperimentRow &row : rows) write_csv_row(out, row);
}

ExperimentRow row_from_report(const std::string &sample, const RegistrationReport &report) {
  ExperimentRow row;
  row.sample = sample;
  row.mode = report.mode;
  row.detected = report.detected;
  if (report.ground_truth) {
    row.actual = report.ground_truth->actual;
    row.errors = *report.ground_truth;
    row.in_envelope = within_envelope(row.mode, row.actual);
    if (!row.in_envelope) row.reason = "outside reliable envelope";
  }
  return row;
}

}  // namespace rstreg
