// Command-line front end: process, design-filter, resample, analyze, evaluate.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srirnn/analysis.hpp"
#include "srirnn/error.hpp"
#include "srirnn/evaluation.hpp"
#include "srirnn/filters.hpp"
#include "srirnn/io/model_json.hpp"
#include "srirnn/io/report.hpp"
#include "srirnn/io/wav.hpp"
#include "srirnn/model.hpp"
#include "srirnn/resample.hpp"
#include "srirnn/simd/kernels.hpp"
#include "srirnn/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace srirnn;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  bool verbose = false;
  std::string kernels = "auto";
};

struct FilterOptions {
  std::string ratio = "1/1";
  std::string method = "lagrange";
  std::size_t order = 1;
  double band = 0.25;
  std::size_t grid = 512;
  double train_rate = 0.0;  // 0: take it from the model (or 44100)
};

GlobalOptions g_opts;

void log(const std::string& msg) {
  if (g_opts.verbose) std::cerr << msg << '\n';
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    io::write_text_file(path, text);
  }
}

void add_filter_flags(CLI::App* cmd, FilterOptions& f, bool ratio_required) {
  auto* r = cmd->add_option("--ratio", f.ratio, "Inference/training rate ratio P/Q");
  if (ratio_required) r->required();
  cmd->add_option("--method", f.method, "Filter design: lagrange, minimax or naive")
      ->check(CLI::IsMember({"lagrange", "minimax", "naive"}));
  cmd->add_option("--order", f.order, "Filter order K");
  cmd->add_option("--band", f.band, "Minimax band edge as a fraction of the sample rate");
  cmd->add_option("--grid", f.grid, "Minimax frequency grid size");
  cmd->add_option("--train-rate", f.train_rate, "Training sample rate in Hz (default: model's)");
}

FirCoefficients design_from(const FilterOptions& f, const DelaySpec& spec) {
  MinimaxOptions mm;
  mm.band_fraction = f.band;
  mm.grid_size = f.grid;
  const DesignMethod method = parse_design_method(f.method);
  auto filter = design_filter(method, spec.delta, f.order, mm);
  return filter;
}

// ---- design-filter --------------------------------------------------------

struct DesignArgs {
  FilterOptions filter;
  std::string out;
  std::string response_csv;
  std::size_t response_grid = 512;
};

void run_design(const DesignArgs& a) {
  const double fs = a.filter.train_rate > 0.0 ? a.filter.train_rate : 44100.0;
  const DelaySpec spec = delta_for_ratio(Ratio::parse(a.filter.ratio), fs);
  const FirCoefficients filter = design_from(a.filter, spec);
  emit(a.out, io::design_to_json(filter, spec).dump(2) + "\n");
  if (!a.response_csv.empty()) {
    std::ostringstream csv;
    io::write_response_csv(csv, frequency_response(filter, a.response_grid));
    io::write_text_file(a.response_csv, csv.str());
  }
}

// ---- resample -------------------------------------------------------------

struct ResampleArgs {
  std::string ratio;
  std::string input;
  std::string output;
  std::string format = "float32";
};

void run_resample(const ResampleArgs& a) {
  const Ratio ratio = Ratio::parse(a.ratio);
  io::AudioBuffer in = io::read_wav(a.input);
  const std::size_t keep = resample_input_length(in.samples.size(), ratio);
  if (keep != in.samples.size()) {
    std::cerr << "warning: trimming input from " << in.samples.size() << " to " << keep
              << " samples (multiple of " << ratio.den << ")\n";
  }
  io::AudioBuffer out;
  out.samples = dft_resample(std::span<const double>(in.samples).first(keep), ratio);
  out.sample_rate = in.sample_rate * ratio.value();
  io::write_wav(a.output, out, io::parse_sample_format(a.format));
}

// ---- process --------------------------------------------------------------

struct ProcessArgs {
  std::string model;
  FilterOptions filter;
  bool ratio_given = false;
  std::string input;
  std::string output;
  std::string format = "float32";
};

void run_process(const ProcessArgs& a) {
  const LstmModel model = io::load_model(a.model);
  const io::AudioBuffer in = io::read_wav(a.input);
  io::AudioBuffer out;
  out.sample_rate = in.sample_rate;
  if (!a.ratio_given) {
    if (in.sample_rate != model.train_rate()) {
      std::cerr << "warning: input is " << in.sample_rate << " Hz but the model was trained at "
                << model.train_rate() << " Hz; pass --ratio to compensate\n";
    }
    out.samples = process_native(model, in.samples);
  } else {
    const double fs = a.filter.train_rate > 0.0 ? a.filter.train_rate : model.train_rate();
    const DelaySpec spec = delta_for_ratio(Ratio::parse(a.filter.ratio), fs);
    if (std::abs(in.sample_rate - spec.inference_rate) > 0.5) {
      std::cerr << "warning: input is " << in.sample_rate << " Hz, expected "
                << spec.inference_rate << " Hz for ratio " << spec.ratio.str() << '\n';
    }
    const FirCoefficients filter = design_from(a.filter, spec);
    log("filter taps: " + json(filter.taps).dump());
    out.samples = process_adjusted(model, in.samples, filter.taps);
  }
  io::write_wav(a.output, out, io::parse_sample_format(a.format));
}

// ---- analyze --------------------------------------------------------------

struct AnalyzeArgs {
  std::string model;
  FilterOptions filter;
  std::string poles = "structured";
  std::string out;
  std::string emit_poles;
  std::string emit_ringdown;
  std::size_t run_length = 10000;
  std::size_t average_length = 1000;
  std::size_t ringdown_after = 20000;
  std::size_t stft_window = 1024;
  std::size_t stft_hop = 256;
};

// Zero input: unit filter for `switch_at` samples, then the designed filter.
Signal ringdown(const LstmModel& model, std::span<const double> taps, std::size_t switch_at,
                std::size_t after, std::string& note) {
  std::vector<double> naive(taps.size(), 0.0);
  naive[0] = 1.0;
  FeedbackLoop<LstmModel> loop(model, naive);
  Signal y;
  y.reserve(switch_at + after);
  try {
    for (std::size_t n = 0; n < switch_at + after; ++n) {
      if (n == switch_at) loop.set_taps(taps);
      y.push_back(loop.tick(0.0));
    }
  } catch (const NumericError& e) {
    note = std::string("ringdown stopped: ") + e.what();
  }
  return y;
}

void run_analyze(const AnalyzeArgs& a) {
  const LstmModel model = io::load_model(a.model);
  const double fs = a.filter.train_rate > 0.0 ? a.filter.train_rate : model.train_rate();
  const DelaySpec spec = delta_for_ratio(Ratio::parse(a.filter.ratio), fs);
  const FirCoefficients filter = design_from(a.filter, spec);

  StabilityOptions so;
  so.fixed_point.run_length = a.run_length;
  so.fixed_point.average_length = a.average_length;
  so.method = a.poles == "dense" ? PoleMethod::dense : PoleMethod::structured;
  const StabilityReport report = predict_stability(model, filter, spec.inference_rate, so);

  json doc = io::stability_to_json(report, filter, spec);
  if (!a.emit_poles.empty()) {
    std::ostringstream csv;
    io::write_poles_csv(csv, report.poles);
    io::write_text_file(a.emit_poles, csv.str());
  }
  if (!a.emit_ringdown.empty()) {
    std::string note;
    const Signal y = ringdown(model, filter.taps, a.run_length, a.ringdown_after, note);
    std::ostringstream csv;
    io::write_stft_csv(csv, stft_magnitude_db(y, a.stft_window, a.stft_hop));
    io::write_text_file(a.emit_ringdown, csv.str());
    doc["ringdown"] = {{"samples", y.size()}, {"switch_at", a.run_length}, {"note", note}};
  }
  emit(a.out, doc.dump(2) + "\n");
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string models;
  std::string input;
  double duration = 10.0;
  std::string ratios = "160/147,147/160";
  std::string filters = "lagrange:1-5,minimax:1-5";
  std::string out;
  std::string contingency;
  std::string violin;
  std::size_t truncate = 44100;
  double band = 0.25;
  std::size_t grid = 512;
};

std::vector<NamedModel<LstmModel>> load_model_dir(const std::string& where) {
  std::vector<fs::path> files;
  if (fs::is_directory(where)) {
    for (const auto& e : fs::directory_iterator(where)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
  } else {
    files.emplace_back(where);
  }
  std::sort(files.begin(), files.end());
  std::vector<NamedModel<LstmModel>> models;
  for (const auto& f : files) {
    try {
      models.push_back({f.stem().string(), io::load_model(f)});
    } catch (const Error& e) {
      std::cerr << json{{"warning", "model skipped"}, {"path", f.string()}, {"reason", e.what()}}.dump()
                << '\n';
    }
  }
  if (models.empty()) throw Error("no loadable models found in '" + where + "'");
  return models;
}

void run_evaluate(const EvaluateArgs& a) {
  const auto models = load_model_dir(a.models);
  log("loaded " + std::to_string(models.size()) + " models");

  Signal x;
  if (!a.input.empty()) {
    io::AudioBuffer in = io::read_wav(a.input);
    if (in.sample_rate != models.front().model.train_rate()) {
      std::cerr << "warning: test signal is " << in.sample_rate << " Hz, models expect "
                << models.front().model.train_rate() << " Hz\n";
    }
    x = std::move(in.samples);
  } else {
    const auto n = static_cast<std::size_t>(a.duration * models.front().model.train_rate());
    x = synthetic_test_signal(n, g_opts.seed);
    log("using synthetic test signal (seed " + std::to_string(g_opts.seed) + ")");
  }

  BatchOptions bo;
  bo.truncate = a.truncate;
  bo.minimax.band_fraction = a.band;
  bo.minimax.grid_size = a.grid;
  bo.threads = g_opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : g_opts.threads;
  const auto ratios = parse_ratio_list(a.ratios);
  const auto filters = parse_filter_set(a.filters);
  const BatchResult result =
      batch_experiment<LstmModel>(models, x, ratios, filters, bo);

  std::ostringstream csv;
  io::write_records_csv(csv, result.records);
  emit(a.out, csv.str());
  if (!a.contingency.empty()) {
    io::write_text_file(a.contingency,
                        io::contingency_to_json(result.table, result.summaries).dump(2) + "\n");
  }
  if (!a.violin.empty()) {
    std::ostringstream v;
    io::write_violin_csv(v, result.records);
    io::write_text_file(a.violin, v.str());
  }
}

int report_error(const std::string& kind, const std::string& message, const json& extra = {}) {
  json doc = {{"error", kind}, {"message", message}};
  if (extra.is_object()) doc.update(extra);
  std::cerr << doc.dump() << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sample-rate adjustment and stability analysis for LSTM audio-effect models"};
  app.require_subcommand(1);
  app.add_option("--seed", g_opts.seed, "Seed for randomised test-signal generation");
  app.add_option("--threads", g_opts.threads, "Worker threads for batch evaluation (0: all cores)");
  app.add_flag("--verbose", g_opts.verbose, "Progress messages on stderr");
  app.add_option("--kernels", g_opts.kernels, "Inner-loop kernels: auto, scalar or avx2")
      ->check(CLI::IsMember({"auto", "scalar", "avx2"}));

  DesignArgs design;
  auto* design_cmd = app.add_subcommand("design-filter", "Design a fractional delay/advance FIR filter");
  add_filter_flags(design_cmd, design.filter, true);
  design_cmd->add_option("--out", design.out, "JSON output file (default stdout)");
  design_cmd->add_option("--response-csv", design.response_csv, "Write (omega, |H|, phase delay error)");
  design_cmd->add_option("--response-grid", design.response_grid, "Points in the response table");

  ResampleArgs resample;
  auto* resample_cmd = app.add_subcommand("resample", "DFT-based rational rate conversion of a WAV file");
  resample_cmd->add_option("--ratio", resample.ratio, "Output/input rate ratio P/Q")->required();
  resample_cmd->add_option("--format", resample.format, "pcm16, pcm24 or float32");
  resample_cmd->add_option("input", resample.input)->required();
  resample_cmd->add_option("output", resample.output)->required();

  ProcessArgs process;
  auto* process_cmd = app.add_subcommand("process", "Run a model over a WAV file");
  process_cmd->add_option("--model", process.model, "Model JSON")->required();
  add_filter_flags(process_cmd, process.filter, false);
  process_cmd->add_option("--format", process.format, "pcm16, pcm24 or float32");
  process_cmd->add_option("input", process.input)->required();
  process_cmd->add_option("output", process.output)->required();

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Linearised stability prediction");
  analyze_cmd->add_option("--model", analyze.model, "Model JSON")->required();
  add_filter_flags(analyze_cmd, analyze.filter, true);
  analyze_cmd->add_option("--poles", analyze.poles, "structured or dense")
      ->check(CLI::IsMember({"structured", "dense"}));
  analyze_cmd->add_option("--out", analyze.out, "JSON output file (default stdout)");
  analyze_cmd->add_option("--emit-poles", analyze.emit_poles, "Write pole table (re, im, abs)");
  analyze_cmd->add_option("--emit-ringdown", analyze.emit_ringdown,
                          "Write STFT (frame, bin, db) of the zero-input ringdown");
  analyze_cmd->add_option("--run-length", analyze.run_length, "Fixed-point search length");
  analyze_cmd->add_option("--average-length", analyze.average_length, "Fixed-point averaging window");
  analyze_cmd->add_option("--ringdown-after", analyze.ringdown_after,
                          "Samples to run after enabling the filter");

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Batch SNR experiment and contingency table");
  evaluate_cmd->add_option("--models", evaluate.models, "Model directory or single model file")->required();
  evaluate_cmd->add_option("--input", evaluate.input, "Test WAV at the training rate (default: synthetic)");
  evaluate_cmd->add_option("--duration", evaluate.duration, "Synthetic test signal length in seconds");
  evaluate_cmd->add_option("--ratios", evaluate.ratios, "Comma-separated P/Q list");
  evaluate_cmd->add_option("--filters", evaluate.filters, "e.g. lagrange:1-5,minimax:1-5");
  evaluate_cmd->add_option("--out", evaluate.out, "Results CSV (default stdout)");
  evaluate_cmd->add_option("--contingency", evaluate.contingency, "Contingency table JSON");
  evaluate_cmd->add_option("--violin", evaluate.violin, "Per-model SNR columns CSV");
  evaluate_cmd->add_option("--truncate", evaluate.truncate, "Leading samples dropped before SNR");
  evaluate_cmd->add_option("--band", evaluate.band, "Minimax band edge fraction");
  evaluate_cmd->add_option("--grid", evaluate.grid, "Minimax grid size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    if (g_opts.kernels != "auto") {
      simd::set_active_backend(g_opts.kernels == "avx2" ? simd::Backend::avx2 : simd::Backend::scalar);
    }
    log("kernels: " + std::string(simd::to_string(simd::active_backend())));
    process.ratio_given = process_cmd->count("--ratio") > 0;

    if (*design_cmd) run_design(design);
    if (*resample_cmd) run_resample(resample);
    if (*process_cmd) run_process(process);
    if (*analyze_cmd) run_analyze(analyze);
    if (*evaluate_cmd) run_evaluate(evaluate);
  } catch (const FormatError& e) {
    json extra = json::object();
    if (e.offset() != FormatError::npos) extra["offset"] = e.offset();
    return report_error("format", e.what(), extra);
  } catch (const NumericError& e) {
    return report_error("numeric", e.what(), {{"sample", e.index()}});
  } catch (const ConvergenceError& e) {
    return report_error("convergence", e.what());
  } catch (const ArgumentError& e) {
    return report_error("argument", e.what());
  } catch (const ShapeError& e) {
    return report_error("shape", e.what());
  } catch (const Error& e) {
    return report_error("error", e.what());
  } catch (const std::exception& e) {
    return report_error("internal", e.what());
  }
  return 0;
}
