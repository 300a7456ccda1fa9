#pragma once

#include "rstreg/pipeline.hpp"
#include "rstreg/synth.hpp"

#include "json.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace rstreg {

/// Ground-truth sidecar: {"rotation_deg", "scale", "tx", "ty"}.
nlohmann::json params_to_sidecar(const RstParams &params);
RstParams params_from_sidecar(const nlohmann::json &j);

nlohmann::json config_to_json(const RotationSearchConfig &cfg, double threshold);
nlohmann::json trace_to_json(const CorrelationTrace &trace);
nlohmann::json report_to_json(const RegistrationReport &report);

/// Header shared by bench, batch and `--format csv` single-pair output.
inline constexpr const char *kCsvHeader =
    "sample,actual_rotation,actual_scale,actual_tx,actual_ty,detected_rotation,"
    "detected_scale,detected_tx,detected_ty,rot_err,scale_err_pct,trans_exact,skipped,reason";

/// Cells for parameters a pure-mode row does not measure are left empty, as
/// are the actual/error cells of rows without ground truth.
void write_csv_row(std::ostream &out, const ExperimentRow &row, bool has_truth = true);
void write_csv(std::ostream &out, const std::vector<ExperimentRow> &rows);

/// Converts a single-pair report into a row for CSV output.
ExperimentRow row_from_report(const std::string &sample, const RegistrationReport &report);

}  // namespace rstreg
