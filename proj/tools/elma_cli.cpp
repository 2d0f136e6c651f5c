// SPDX-FileCopyrightText: © 2026 The ELMA Authors
//
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: matrix denoising, synthetic RSE sweep, image
// denoising, noise injection and threshold curve export.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "elma/image.hpp"
#include "elma/lrma.hpp"
#include "elma/synth_bench.hpp"

namespace {

using namespace elma;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Expands `--config <file>` into command-line tokens for the selected
// subcommand. Keys already given as flags are skipped so the command line
// wins. Blank lines and lines starting with '#' or ';' are ignored.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
  CLI::App* cmd = nullptr;
  std::size_t cmd_pos = 0;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!cmd && (cmd = app.get_subcommand_no_throw(args[i]))) cmd_pos = i;
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!cmd || path.empty()) return args;

  auto given = [&](const std::string& flag) {
    for (const auto& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path);
  std::vector<std::string> extra;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(line_no);
    if (eq == std::string::npos) throw FormatError(where + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    const std::string flag = "--" + key;
    if (key == "config" || given(flag)) continue;
    const CLI::Option* opt = cmd->get_option_no_throw(flag);
    if (!opt) throw FormatError(where + ": unknown key '" + key + "' for " + cmd->get_name());
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1") extra.push_back(flag);
      else if (value != "false" && value != "0")
        throw FormatError(where + ": '" + key + "' expects true or false");
      continue;
    }
    extra.push_back(flag);
    extra.push_back(value);
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(cmd_pos) + 1, extra.begin(),
              extra.end());
  return args;
}

// Writes through a temporary file and renames on success so a failed run
// never leaves a partial output behind. "-" writes to stdout.
void write_output(const std::string& path,
                  const std::function<void(std::ostream&)>& emit,
                  bool binary = false) {
  if (path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
    if (!out) throw FormatError("cannot open " + path + " for writing");
    try {
      emit(out);
      out.flush();
      if (!out) throw FormatError("write failed: " + path);
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string join(const Vector& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_real(v(i));
  }
  return s;
}

Method require_method(const std::string& name) {
  const auto m = parse_method(name);
  if (!m) throw ParameterError("unknown method '" + name + "'");
  return *m;
}

// ---------------------------------------------------------------------------

struct DenoiseMatrixArgs {
  std::string in;
  std::string out = "-";
  std::string method = "elma";
  double lambda = 0.0;
  MethodParams params;
};

int run_denoise_matrix(const DenoiseMatrixArgs& a) {
  const Method method = require_method(a.method);
  const Matrix y = read_matrix_csv(a.in);
  const PenaltySpec spec = make_penalty(method, a.lambda, a.params);
  const auto result = solve(y, spec);
  write_output(a.out, [&](std::ostream& os) { write_matrix_csv(os, result.x_hat); });
  const std::string line = "rank=" + std::to_string(rank_of(result)) +
                           " sigma_in=" + join(result.sigma_in) +
                           " sigma_out=" + join(result.sigma_out);
  (a.out == "-" ? std::cerr : std::cout) << line << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct SynthBenchArgs {
  BenchConfig cfg;
  std::vector<std::string> methods{"elma", "nnm", "ps", "wnnm"};
  double beta_elma = 0, beta_nnm = 0, beta_ps = 0, beta_wnnm = 0;
  bool tune = false;
  std::vector<double> tune_grid = default_beta_grid();
  double tune_sigma = 5.0;
  std::string out = "-";
  std::string summary;
};

int run_synth_bench(SynthBenchArgs& a) {
  BenchConfig& cfg = a.cfg;
  cfg.methods.clear();
  for (const auto& name : a.methods) cfg.methods.push_back(require_method(name));
  const std::pair<Method, double> explicit_beta[] = {
      {Method::Elma, a.beta_elma},
      {Method::Nnm, a.beta_nnm},
      {Method::Ps, a.beta_ps},
      {Method::Wnnm, a.beta_wnnm}};
  if (a.tune) {
    for (const auto& [method, choice] : tune_beta(cfg, a.tune_grid, a.tune_sigma)) {
      cfg.beta[method] = choice.beta;
      std::cerr << "tuned " << method_name(method) << ": beta=" << choice.beta
                << " (c=" << choice.coefficient
                << ", mean_rse=" << choice.mean_rse << ")\n";
    }
  }
  for (const auto& [method, beta] : explicit_beta) {
    if (beta > 0.0) cfg.beta[method] = beta;
  }
  cfg.validate();
  for (Method m : cfg.methods) {
    std::cerr << method_name(m) << ": beta=" << cfg.beta_for(m) << '\n';
  }

  const auto records = run_sweep(cfg);
  for (const auto& r : records) {
    if (!r.error.empty()) {
      std::cerr << "warning: " << method_name(r.method) << " sigma=" << r.sigma
                << " trial=" << r.trial << ": " << r.error << '\n';
    }
  }
  write_output(a.out, [&](std::ostream& os) { write_records_csv(os, records); });
  if (!a.summary.empty()) {
    const auto rows = summarize(records);
    write_output(a.summary, [&](std::ostream& os) { write_summary_csv(os, rows); });
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct DenoiseImageArgs {
  std::string in;
  std::string out;
  std::string reference;
  std::string method = "elma";
  double beta = 0.0;
  NssConfig cfg;
};

int run_denoise_image(DenoiseImageArgs& a) {
  a.cfg.method = require_method(a.method);
  if (a.beta > 0.0) a.cfg.beta = a.beta;
  const GrayImage noisy = read_pgm(a.in);
  const GrayImage reference =
      a.reference.empty() ? GrayImage() : read_pgm(a.reference);
  if (!a.reference.empty() && (reference.width() != noisy.width() ||
                               reference.height() != noisy.height())) {
    throw ParameterError("reference image dimensions differ from input");
  }
  const GrayImage clean = denoise_image(noisy, a.cfg);
  write_output(a.out, [&](std::ostream& os) { write_pgm(os, clean); }, true);
  if (!a.reference.empty()) {
    // Score the image as written (quantized), not the internal real values.
    std::stringstream buf;
    write_pgm(buf, clean);
    const double db = psnr(read_pgm(buf), reference);
    std::cout << "psnr_db=" << (std::isinf(db) ? std::string("inf") : format_real(db))
              << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct AddNoiseArgs {
  std::string in;
  std::string out;
  double sigma = 0.0;
  std::uint64_t seed = 0;
};

int run_add_noise(const AddNoiseArgs& a) {
  const GrayImage clean = read_pgm(a.in);
  Rng rng(a.seed);
  const GrayImage noisy(add_awgn(clean.pixels, a.sigma, rng));
  write_output(a.out, [&](std::ostream& os) { write_pgm(os, noisy); }, true);
  return 0;
}

// ---------------------------------------------------------------------------

struct ThresholdPlotArgs {
  std::string family = "firm";
  double lambda = 1.0;
  MethodParams params;
  double lo = -5.0;
  double hi = 5.0;
  double step = 0.01;
  std::string out = "-";
};

int run_threshold_plot(const ThresholdPlotArgs& a) {
  static const std::map<std::string, Method> families{
      {"firm", Method::Elma},   {"elma", Method::Elma}, {"soft", Method::Nnm},
      {"nnm", Method::Nnm},     {"ps", Method::Ps},     {"weighted", Method::Wnnm},
      {"wnnm", Method::Wnnm}};
  const auto it = families.find(a.family);
  if (it == families.end()) throw ParameterError("unknown family '" + a.family + "'");
  const PenaltySpec spec = make_penalty(it->second, a.lambda, a.params);
  const auto rows = emit_curves(spec, a.lo, a.hi, a.step);
  write_output(a.out, [&](std::ostream& os) { write_curves_csv(os, rows); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ELMA: low-rank matrix approximation by non-convex singular "
               "value thresholding with a convex objective",
               "elma"};
  app.require_subcommand(1);
  app.get_formatter()->column_width(36);

  // denoise-matrix
  DenoiseMatrixArgs dm;
  auto* dm_cmd = app.add_subcommand("denoise-matrix",
                                    "Closed-form low-rank estimate of a CSV matrix");
  dm_cmd->add_option("--in", dm.in, "Input matrix CSV")->required()->check(CLI::ExistingFile);
  dm_cmd->add_option("--out", dm.out, "Output CSV ('-' = stdout)")->capture_default_str();
  dm_cmd->add_option("--method", dm.method, "elma | svt (nnm) | ps | wnnm")
      ->capture_default_str();
  dm_cmd->add_option("--lambda", dm.lambda, "Regularization lambda (> 0)")->required();
  dm_cmd->add_option("--a-fraction", dm.params.a_fraction,
                     "ELMA non-convexity as a fraction of 1/lambda, in [0, 1)")
      ->capture_default_str();
  dm_cmd->add_option("--p", dm.params.p, "p-shrinkage exponent")->capture_default_str();
  dm_cmd->add_option("--weight-eps", dm.params.weight_eps, "WNNM weight offset")
      ->capture_default_str();

  // synth-bench
  SynthBenchArgs sb;
  auto* sb_cmd = app.add_subcommand("synth-bench",
                                    "RSE sweep over noise levels on random low-rank matrices");
  sb_cmd->add_option("--m", sb.cfg.m, "Rows")->capture_default_str();
  sb_cmd->add_option("--n", sb.cfg.n, "Columns")->capture_default_str();
  sb_cmd->add_option("--k", sb.cfg.k, "Rank of the ground truth")->capture_default_str();
  sb_cmd->add_option("--sigma", sb.cfg.sigma_list, "Noise levels (comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  sb_cmd->add_option("--trials", sb.cfg.trials, "Realizations per noise level")
      ->capture_default_str();
  sb_cmd->add_option("--methods", sb.methods, "Methods: elma,nnm,ps,wnnm")
      ->delimiter(',')
      ->capture_default_str();
  sb_cmd->add_option("--beta-elma", sb.beta_elma, "ELMA beta (lambda = beta*sigma); 0 = default");
  sb_cmd->add_option("--beta-nnm", sb.beta_nnm, "NNM beta; 0 = default");
  sb_cmd->add_option("--beta-ps", sb.beta_ps, "PS beta; 0 = default");
  sb_cmd->add_option("--beta-wnnm", sb.beta_wnnm, "WNNM beta; 0 = default");
  sb_cmd->add_flag("--tune-beta", sb.tune,
                   "Grid-search beta = c*sqrt(max(m,n)) per method before the sweep");
  sb_cmd->add_option("--tune-grid", sb.tune_grid, "Coefficients c for --tune-beta")
      ->delimiter(',')
      ->capture_default_str();
  sb_cmd->add_option("--tune-sigma", sb.tune_sigma, "Noise level used by --tune-beta")
      ->capture_default_str();
  sb_cmd->add_option("--a-fraction", sb.cfg.params.a_fraction, "ELMA a*lambda")
      ->capture_default_str();
  sb_cmd->add_option("--p", sb.cfg.params.p, "p-shrinkage exponent")->capture_default_str();
  sb_cmd->add_option("--weight-eps", sb.cfg.params.weight_eps, "WNNM weight offset")
      ->capture_default_str();
  sb_cmd->add_option("--seed", sb.cfg.seed, "Random seed")->capture_default_str();
  sb_cmd->add_option("--threads", sb.cfg.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  sb_cmd->add_flag("--timing", sb.cfg.timing,
                   "Record wall_ms (otherwise 0, keeping output reproducible)");
  sb_cmd->add_option("--out", sb.out, "Per-record CSV ('-' = stdout)")->capture_default_str();
  sb_cmd->add_option("--summary", sb.summary, "Summary CSV path");

  // denoise-image
  DenoiseImageArgs di;
  auto* di_cmd = app.add_subcommand("denoise-image",
                                    "Non-local self-similarity denoising of a PGM image");
  di_cmd->add_option("--in", di.in, "Noisy PGM")->required()->check(CLI::ExistingFile);
  di_cmd->add_option("--out", di.out, "Denoised PGM")->required();
  di_cmd->add_option("--sigma", di.cfg.sigma, "Noise standard deviation")->required();
  di_cmd->add_option("--reference", di.reference, "Clean PGM; prints psnr_db=<value>")
      ->check(CLI::ExistingFile);
  di_cmd->add_option("--method", di.method, "elma | nnm | ps | wnnm")->capture_default_str();
  di_cmd->add_option("--beta", di.beta, "lambda = beta*sigma; 0 = method default");
  di_cmd->add_option("--a-fraction", di.cfg.params.a_fraction, "ELMA a*lambda")
      ->capture_default_str();
  di_cmd->add_option("--p", di.cfg.params.p, "p-shrinkage exponent")->capture_default_str();
  di_cmd->add_option("--weight-eps", di.cfg.params.weight_eps, "WNNM weight offset")
      ->capture_default_str();
  di_cmd->add_option("--patch-size", di.cfg.patch_size, "Patch side length")
      ->capture_default_str();
  di_cmd->add_option("--stride", di.cfg.stride, "Reference patch stride")->capture_default_str();
  di_cmd->add_option("--search-radius", di.cfg.search_radius, "Block matching radius")
      ->capture_default_str();
  di_cmd->add_option("--group-size", di.cfg.group_size, "Patches per group")
      ->capture_default_str();
  di_cmd->add_option("--weighting", di.cfg.weighting, "Aggregation: uniform | group-rank")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, AggregationWeight>{
              {"uniform", AggregationWeight::Uniform},
              {"group-rank", AggregationWeight::GroupRank}},
          CLI::ignore_case))
      ->default_str("uniform");
  di_cmd->add_option("--threads", di.cfg.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();

  // add-noise
  AddNoiseArgs an;
  auto* an_cmd = app.add_subcommand("add-noise", "Add white Gaussian noise to a PGM image");
  an_cmd->add_option("--in", an.in, "Clean PGM")->required()->check(CLI::ExistingFile);
  an_cmd->add_option("--out", an.out, "Noisy PGM (clamped to [0,255], rounded)")->required();
  an_cmd->add_option("--sigma", an.sigma, "Noise standard deviation")->required();
  an_cmd->add_option("--seed", an.seed, "Random seed")->capture_default_str();

  // threshold-plot
  ThresholdPlotArgs tp;
  auto* tp_cmd = app.add_subcommand("threshold-plot",
                                    "Sample penalty, s-function and threshold curves as CSV");
  tp_cmd->add_option("--family", tp.family, "firm | soft | ps | weighted")
      ->capture_default_str();
  tp_cmd->add_option("--lambda", tp.lambda, "Regularization lambda (> 0)")
      ->capture_default_str();
  tp_cmd->add_option("--a-fraction", tp.params.a_fraction, "Firm a*lambda, in [0, 1)")
      ->capture_default_str();
  tp_cmd->add_option("--p", tp.params.p, "p-shrinkage exponent")->capture_default_str();
  tp_cmd->add_option("--lo", tp.lo, "Range start")->capture_default_str();
  tp_cmd->add_option("--hi", tp.hi, "Range end (inclusive)")->capture_default_str();
  tp_cmd->add_option("--step", tp.step, "Sample spacing")->capture_default_str();
  tp_cmd->add_option("--out", tp.out, "Output CSV ('-' = stdout)")->capture_default_str();

  std::string config_path;
  for (auto* sub : {dm_cmd, sb_cmd, di_cmd, an_cmd, tp_cmd}) {
    sub->add_option("--config", config_path,
                    "Flat key=value file; keys are flag names without dashes, "
                    "command-line flags take precedence");
  }

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(app, std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    if (*dm_cmd) return run_denoise_matrix(dm);
    if (*sb_cmd) return run_synth_bench(sb);
    if (*di_cmd) return run_denoise_image(di);
    if (*an_cmd) return run_add_noise(an);
    if (*tp_cmd) return run_threshold_plot(tp);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
