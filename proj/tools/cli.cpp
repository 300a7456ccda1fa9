#include "cli.hpp"

#include "rstreg/error.hpp"
#include "rstreg/pipeline.hpp"
#include "rstreg/raster.hpp"
#include "rstreg/report_io.hpp"
#include "rstreg/synth.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rstreg::cli {

namespace {

namespace fs = std::filesystem;

constexpr const char *kExitCodeHelp =
    "Exit codes:\n"
    "  0  success\n"
    "  1  internal error\n"
    "  2  usage error or invalid option value\n"
    "  3  file not found, unreadable, or not writable\n"
    "  4  malformed, truncated, or unsupported PNM data\n"
    "  5  blank image (no ink below the threshold)\n"
    "  6  no rotation signal (all candidates correlate equally)\n"
    "  7  synthetic content does not fit the canvas\n"
    "  8  resize would produce an empty image\n";

struct RunConfig {
  RotationSearchConfig search;
  double threshold = kDefaultThreshold;
  bool no_scale_normalize = false;
  std::string format = "json";

  void finalize() {
    search.normalize_scale = !no_scale_normalize;
    search.validate();
    if (!(threshold > 0.0 && threshold < 1.0)) {
      throw Error(ErrorKind::InvalidArgument, "--threshold must lie in (0, 1)");
    }
  }
};

void add_search_flags(CLI::App &cmd, RunConfig &cfg) {
  cmd.add_option("--threshold", cfg.threshold, "Ink threshold on luminance in (0,1)")
      ->capture_default_str();
  cmd.add_option("--range-min", cfg.search.range_min, "Rotation search lower bound (deg)")
      ->capture_default_str();
  cmd.add_option("--range-max", cfg.search.range_max, "Rotation search upper bound (deg)")
      ->capture_default_str();
  cmd.add_option("--coarse-step", cfg.search.coarse_step, "Coarse sweep step (deg)")
      ->capture_default_str();
  cmd.add_option("--fine-step", cfg.search.fine_step, "Fine sweep step (deg)")
      ->capture_default_str();
  cmd.add_option("--fine-halfwidth", cfg.search.fine_halfwidth,
                 "Fine sweep half-width around the coarse optimum (deg)")
      ->capture_default_str();
  cmd.add_option("--fill", cfg.search.fill, "Luminance of exposed canvas after rotation")
      ->capture_default_str();
  cmd.add_flag("--no-scale-normalize", cfg.no_scale_normalize,
               "Correlate rotation candidates without height normalization");
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return kIo;
    case ErrorKind::MalformedHeader:
    case ErrorKind::TruncatedData:
    case ErrorKind::ZeroDimensions:
    case ErrorKind::UnsupportedFormat: return kCodec;
    case ErrorKind::BlankImage: return kBlankImage;
    case ErrorKind::NoSignal:
    case ErrorKind::DegenerateRange: return kNoSignal;
    case ErrorKind::ContentOverflow: return kOverflow;
    case ErrorKind::DegenerateSize: return kDegenerateSize;
    case ErrorKind::InvalidArgument: return kUsage;
    case ErrorKind::DimensionMismatch: return kInternal;
  }
  return kInternal;
}

GrayImage load_gray(const std::string &path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    return as_grayscale(load_pnm(bytes));
  } catch (const Error &e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
}

RstParams load_sidecar(const std::string &path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  nlohmann::json j = nlohmann::json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::InvalidArgument, path + ": not valid JSON");
  return params_from_sidecar(j);
}

void write_text(const std::string &path, const std::string &text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()), text.size()));
}

void emit_report(std::ostream &out, const std::string &sample, const RegistrationReport &report,
                 const std::string &format) {
  if (format == "csv") {
    out << kCsvHeader << '\n';
    write_csv_row(out, row_from_report(sample, report), report.ground_truth.has_value());
  } else {
    out << report_to_json(report).dump(2) << '\n';
  }
}

struct PairArgs {
  std::string reference;
  std::string user;
  std::string truth;
  std::string out;
};

int cmd_detect(const PairArgs &args, RunConfig cfg, std::ostream &out) {
  cfg.finalize();
  const GrayImage reference = load_gray(args.reference);
  const GrayImage user = load_gray(args.user);
  CorrectionResult result = correct_rst(reference, user, cfg.search, cfg.threshold);
  if (!args.truth.empty()) result.report.attach_ground_truth(load_sidecar(args.truth));
  emit_report(out, args.user, result.report, cfg.format);
  return kOk;
}

int cmd_correct(const PairArgs &args, RunConfig cfg, std::ostream &out) {
  cfg.finalize();
  const GrayImage reference = load_gray(args.reference);
  const GrayImage user = load_gray(args.user);
  CorrectionResult result = correct_rst(reference, user, cfg.search, cfg.threshold);
  if (!args.truth.empty()) result.report.attach_ground_truth(load_sidecar(args.truth));
  write_file(args.out, save_pnm(result.corrected));
  emit_report(out, args.user, result.report, cfg.format);
  return kOk;
}

struct BenchArgs {
  std::string table = "all";
  int glyphs = 5;
  std::uint64_t seed = 1;
  std::optional<int> canvas_width;
  std::optional<int> canvas_height;
  unsigned threads = 0;
  std::string out;
};

std::vector<TableId> parse_tables(const std::string &selector) {
  if (selector == "1") return {TableId::PureRotation};
  if (selector == "2") return {TableId::PureScaling};
  if (selector == "3") return {TableId::PureTranslation};
  if (selector == "4") return {TableId::Combined};
  if (selector == "envelope") return {TableId::Envelope};
  if (selector == "all") {
    return {TableId::PureRotation, TableId::PureScaling, TableId::PureTranslation,
            TableId::Combined};
  }
  throw Error(ErrorKind::InvalidArgument,
              "--table must be one of 1, 2, 3, 4, all, envelope; got '" + selector + "'");
}

int cmd_bench(const BenchArgs &args, RunConfig cfg, std::ostream &out) {
  cfg.finalize();
  const std::vector<TableId> tables = parse_tables(args.table);
  if (args.glyphs < 1) throw Error(ErrorKind::InvalidArgument, "--glyphs must be at least 1");
  const std::vector<GlyphSpec> glyphs = glyph_family(args.seed, args.glyphs);

  SuiteOptions options;
  options.search = cfg.search;
  options.threshold = cfg.threshold;
  options.canvas_width = args.canvas_width;
  options.canvas_height = args.canvas_height;
  options.threads = args.threads;

  std::vector<ExperimentRow> all;
  for (TableId table : tables) {
    std::vector<ExperimentRow> rows = run_table_suite(table, glyphs, options);
    const std::string prefix =
        table == TableId::Envelope ? "env-" : "t" + std::to_string(static_cast<int>(table)) + "-";
    for (ExperimentRow &row : rows) {
      row.sample = prefix + row.sample;
      all.push_back(std::move(row));
    }
  }
  std::ostringstream csv;
  write_csv(csv, all);
  if (args.out.empty()) {
    out << csv.str();
  } else {
    write_text(args.out, csv.str());
  }
  return kOk;
}

struct SynthArgs {
  GlyphSpec glyph;
  RstParams params;
  int canvas_width = 256;
  int canvas_height = 256;
  std::string out;
  std::string sidecar;
  std::string reference_out;
};

int cmd_synth(SynthArgs args, RunConfig cfg, std::ostream &out) {
  cfg.finalize();
  if (!(args.params.scale > 0.0)) throw Error(ErrorKind::InvalidArgument, "--scale must be positive");
  const GrayImage reference = crop_to_content(generate_glyph(args.glyph), cfg.threshold);
  const GrayImage user =
      forward_rst(reference, args.params, args.canvas_width, args.canvas_height, cfg.threshold);
  if (args.sidecar.empty()) args.sidecar = fs::path(args.out).replace_extension(".json").string();
  write_file(args.out, save_pnm(user));
  write_text(args.sidecar, params_to_sidecar(args.params).dump(2) + "\n");
  if (!args.reference_out.empty()) write_file(args.reference_out, save_pnm(reference));
  out << "wrote " << args.out << " and " << args.sidecar << '\n';
  return kOk;
}

bool is_pnm(const fs::path &p) {
  const std::string ext = p.extension().string();
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

// One subject per subdirectory: reference.{pgm,ppm,pnm} plus any number of
// test images, each optionally paired with a <stem>.json ground-truth sidecar.
int cmd_batch(const std::string &dir, RunConfig cfg, std::ostream &out) {
  cfg.finalize();
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "'" + dir + "' is not a directory");
  std::vector<fs::path> subjects;
  for (const auto &entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) subjects.push_back(entry.path());
  }
  std::sort(subjects.begin(), subjects.end());

  std::vector<ExperimentRow> rows;
  std::vector<bool> truth_flags;
  nlohmann::json reports = nlohmann::json::array();
  for (const fs::path &subject : subjects) {
    std::optional<fs::path> reference_path;
    std::vector<fs::path> tests;
    for (const auto &entry : fs::directory_iterator(subject)) {
      if (!entry.is_regular_file() || !is_pnm(entry.path())) continue;
      if (entry.path().stem() == "reference") {
        reference_path = entry.path();
      } else {
        tests.push_back(entry.path());
      }
    }
    std::sort(tests.begin(), tests.end());
    if (!reference_path) continue;
    const GrayImage reference = load_gray(reference_path->string());
    for (const fs::path &test : tests) {
      const std::string sample = subject.filename().string() + "/" + test.filename().string();
      fs::path truth = test;
      truth.replace_extension(".json");
      const bool has_truth = fs::exists(truth);
      ExperimentRow row;
      row.sample = sample;
      try {
        CorrectionResult result =
            correct_rst(reference, load_gray(test.string()), cfg.search, cfg.threshold);
        if (has_truth) result.report.attach_ground_truth(load_sidecar(truth.string()));
        row = row_from_report(sample, result.report);
        reports.push_back({{"sample", sample}, {"report", report_to_json(result.report)}});
      } catch (const Error &e) {
        row.skipped = true;
        row.reason = std::string(to_string(e.kind())) + ": " + e.what();
        if (has_truth) row.actual = load_sidecar(truth.string());
        reports.push_back({{"sample", sample}, {"error", row.reason}});
      }
      rows.push_back(row);
      truth_flags.push_back(has_truth);
    }
  }
  if (cfg.format == "json") {
    out << reports.dump(2) << '\n';
  } else {
    out << kCsvHeader << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) write_csv_row(out, rows[i], truth_flags[i]);
  }
  return kOk;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Rotation, scaling and translation registration of signature images"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);

  RunConfig cfg;
  PairArgs pair;
  BenchArgs bench;
  SynthArgs synth;
  std::string batch_dir;

  auto *detect = app.add_subcommand("detect", "Estimate RST between a reference and a user image");
  detect->add_option("reference", pair.reference, "Reference PNM")->required();
  detect->add_option("user", pair.user, "User PNM")->required();
  detect->add_option("--truth", pair.truth, "Ground-truth sidecar JSON");
  detect->add_option("--format", cfg.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_search_flags(*detect, cfg);

  auto *correct = app.add_subcommand("correct", "Write the RST-corrected user image");
  correct->add_option("reference", pair.reference, "Reference PNM")->required();
  correct->add_option("user", pair.user, "User PNM")->required();
  correct->add_option("--out", pair.out, "Output PGM")->required();
  correct->add_option("--truth", pair.truth, "Ground-truth sidecar JSON");
  correct->add_option("--format", cfg.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  add_search_flags(*correct, cfg);

  auto *bench_cmd = app.add_subcommand("bench", "Run synthetic table experiments, CSV output");
  bench_cmd->add_option("--table", bench.table, "1, 2, 3, 4, all or envelope")->capture_default_str();
  bench_cmd->add_option("--glyphs", bench.glyphs, "Number of synthetic glyphs")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Glyph family seed")->capture_default_str();
  bench_cmd->add_option("--canvas-width", bench.canvas_width, "Override canvas width");
  bench_cmd->add_option("--canvas-height", bench.canvas_height, "Override canvas height");
  bench_cmd->add_option("--threads", bench.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "Write CSV here instead of stdout");
  add_search_flags(*bench_cmd, cfg);

  auto *synth_cmd = app.add_subcommand("synth", "Write a perturbed synthetic glyph and its sidecar");
  synth_cmd->add_option("--seed", synth.glyph.seed, "Glyph seed")->capture_default_str();
  synth_cmd->add_option("--glyph-width", synth.glyph.canvas_width, "Glyph canvas width")
      ->capture_default_str();
  synth_cmd->add_option("--glyph-height", synth.glyph.canvas_height, "Glyph canvas height")
      ->capture_default_str();
  synth_cmd->add_option("--rotation", synth.params.rotation, "Rotation (deg, CCW positive)")
      ->capture_default_str();
  synth_cmd->add_option("--scale", synth.params.scale, "Scale ratio reference/user")
      ->capture_default_str();
  synth_cmd->add_option("--tx", synth.params.translation.dx, "Left margin (px)")->capture_default_str();
  synth_cmd->add_option("--ty", synth.params.translation.dy, "Bottom margin (px)")->capture_default_str();
  synth_cmd->add_option("--canvas-width", synth.canvas_width, "Output canvas width")
      ->capture_default_str();
  synth_cmd->add_option("--canvas-height", synth.canvas_height, "Output canvas height")
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output PGM")->required();
  synth_cmd->add_option("--sidecar", synth.sidecar, "Sidecar path (default: <out>.json)");
  synth_cmd->add_option("--reference-out", synth.reference_out, "Also write the cropped glyph");
  add_search_flags(*synth_cmd, cfg);

  auto *batch = app.add_subcommand("batch", "Register every subject directory under a root");
  batch->add_option("dir", batch_dir, "Root with one subdirectory per subject")->required();
  batch->add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  add_search_flags(*batch, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*detect) return cmd_detect(pair, cfg, out);
    if (*correct) return cmd_correct(pair, cfg, out);
    if (*bench_cmd) return cmd_bench(bench, cfg, out);
    if (*synth_cmd) return cmd_synth(synth, cfg, out);
    if (*batch) {
      if (batch->count("--format") == 0) cfg.format = "csv";
      return cmd_batch(batch_dir, cfg, out);
    }
  } catch (const Error &e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception &e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace rstreg::cli
