// Copyright 2026 The qmlab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front door: loads JSON states/maps, runs seeded measurement
// simulations and identity checks, and emits machine-readable reports.
//
// Exit codes: 0 success, 1 a requested check failed its tolerance, 2 bad
// input data (malformed or invalid state/map files), 3 bad configuration
// (unknown flags, missing files, inconsistent dimensions).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmlab/qmlab.hpp"

namespace {

using namespace qmlab;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitBadConfig = 3;

struct Options {
  std::optional<std::uint64_t> seed;
  std::size_t samples = 10000;
  std::string state_path;
  std::string map_path;
  std::vector<Eigen::Index> dims;
  Eigen::Index base_dim = 0;
  Eigen::Index degree = 0;
  double spin = 0.0;
  double tol = 5.0;  // identity checks, in standard-error units
  std::string out_path;
  std::string csv_path;
  int threads = 1;
};

std::uint64_t resolve_seed(const Options& opt) {
  if (opt.seed) return *opt.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

Json report_envelope(const std::string& command, std::uint64_t seed,
                     const Json& config, const Json& checks) {
  return Json{{"tool", "qmlab"},   {"version", QMLAB_VERSION},
              {"command", command}, {"seed", seed},
              {"timestamp", utc_timestamp()}, {"config", config},
              {"checks", checks}};
}

void emit(const Json& report, const Options& opt) {
  if (opt.out_path.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    write_json_file(opt.out_path, report);
  }
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) {
    throw CLI::ValidationError(what, "a file path is required");
  }
  if (!std::filesystem::exists(path)) {
    throw CLI::ValidationError(what, "file not found: " + path);
  }
}

template <class SampleT>
void maybe_dump_csv(const Options& opt, const std::vector<SampleT>& samples) {
  if (opt.csv_path.empty()) return;
  std::ofstream os(opt.csv_path);
  if (!os) throw Error("cannot write " + opt.csv_path);
  write_samples_csv(os, std::span<const SampleT>(samples));
}

Json matrix_with_errors(const ComplexMatrix& value, const RealMatrix& se) {
  Json j;
  j["value"] = matrix_to_json(value);
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < se.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < se.cols(); ++c) row.push_back(se(r, c));
    rows.push_back(std::move(row));
  }
  j["std_error"] = std::move(rows);
  return j;
}

//-------------------------------------------------------------------------
// Commands
//-------------------------------------------------------------------------

int cmd_tomography(const Options& opt) {
  require_file(opt.state_path, "--state");
  const auto w = state_from_json(read_json_file(opt.state_path));
  const std::uint64_t seed = resolve_seed(opt);

  TomographyOptions run_opt;
  run_opt.threads = opt.threads;
  run_opt.keep_samples = !opt.csv_path.empty();
  const auto run = run_tomography(w, opt.samples, seed, run_opt);
  maybe_dump_csv(opt, run.samples);

  Json config{{"state", opt.state_path}, {"samples", opt.samples},
              {"threads", opt.threads}, {"csv_samples", opt.csv_path}};
  Json report = report_envelope(
      "tomography", seed, config,
      Json::array({"ensemble-dilution", "linear-inversion-recovery"}));
  report["result"] = {
      {"input_state", state_to_json(w)},
      {"n_samples", run.n_samples},
      {"ensemble_estimate", matrix_with_errors(run.ensemble.matrix(),
                                               run.ensemble_std_error)},
      {"reconstruction_raw", matrix_to_json(run.reconstruction_raw)},
      {"reconstruction_psd", state_to_json(run.reconstruction)},
      {"reconstruction_std_error",
       matrix_with_errors(run.reconstruction_raw, run.reconstruction_std_error)
           .at("std_error")},
      {"trace_distance_to_input", run.td_reconstruction_to_input},
      {"trace_distance_ensemble_to_expected", run.td_ensemble_to_expected},
  };
  emit(report, opt);
  return kExitOk;
}

int cmd_disentangle(const Options& opt) {
  require_file(opt.state_path, "--state");
  if (opt.dims.size() < 2) {
    throw CLI::ValidationError("--dims", "need at least two factor dims");
  }
  const auto sys = FactorizedSystem::make(opt.dims);
  const auto w = state_from_json(read_json_file(opt.state_path));
  if (w.dim() != sys.total_dim) {
    throw CLI::ValidationError(
        "--dims", "product of dims does not match the state dimension");
  }
  const std::uint64_t seed = resolve_seed(opt);

  DisentangleOptions run_opt;
  run_opt.threads = opt.threads;
  run_opt.keep_samples = !opt.csv_path.empty();
  const auto run = run_disentangle(w, sys, opt.samples, seed, run_opt);
  maybe_dump_csv(opt, run.samples);

  Json dims = Json::array();
  for (const auto d : sys.dims) dims.push_back(d);
  Json config{{"state", opt.state_path}, {"dims", dims},
              {"samples", opt.samples},  {"threads", opt.threads},
              {"csv_samples", opt.csv_path}};
  Json factors = Json::array();
  for (std::size_t f = 0; f < sys.n_factors(); ++f) {
    factors.push_back(matrix_with_errors(run.factor_mean_projectors[f],
                                         run.factor_std_errors[f]));
  }
  Json report = report_envelope(
      "disentangle", seed, config,
      Json::array({"product-outcome-statistics", "quadric-support"}));
  report["result"] = {{"input_state", state_to_json(w)},
                      {"n_samples", run.n_samples},
                      {"factor_mean_projectors", std::move(factors)}};
  emit(report, opt);
  return kExitOk;
}

int cmd_coherent(const Options& opt) {
  require_file(opt.state_path, "--state");
  VeroneseConfig cfg =
      opt.spin > 0.0 ? VeroneseConfig::spin(opt.spin)
                     : VeroneseConfig::make(opt.base_dim, opt.degree);
  const auto w = state_from_json(read_json_file(opt.state_path));
  if (w.dim() != cfg.sym_dim) {
    throw CLI::ValidationError(
        "--state", "state dimension does not match the symmetric space");
  }
  const std::uint64_t seed = resolve_seed(opt);

  CoherentOptions run_opt;
  run_opt.threads = opt.threads;
  run_opt.keep_samples = !opt.csv_path.empty();
  const auto run = run_coherent(w, cfg, opt.samples, seed, run_opt);
  maybe_dump_csv(opt, run.samples);

  Json config{{"state", opt.state_path}, {"base_dim", cfg.base_dim},
              {"degree", cfg.degree},    {"samples", opt.samples},
              {"threads", opt.threads}, {"csv_samples", opt.csv_path}};
  Json report = report_envelope("coherent", seed, config,
                                Json::array({"coherent-outcome-statistics"}));
  report["result"] = {
      {"input_state", state_to_json(w)},
      {"n_samples", run.n_samples},
      {"sym_dim", cfg.sym_dim},
      {"direction_mean_projector",
       matrix_with_errors(run.direction_mean_projector,
                          run.direction_std_error)},
      {"outcome_mean_projector",
       matrix_with_errors(run.outcome_mean_projector, run.outcome_std_error)},
  };
  emit(report, opt);
  return kExitOk;
}

Json witness_to_json(const PositivityVerdict& verdict) {
  Json j;
  switch (verdict.kind) {
    case MapPositivity::CompletelyPositive:
      j["kind"] = "completely_positive";
      break;
    case MapPositivity::PositiveCandidate:
      j["kind"] = "positive_candidate";
      break;
    case MapPositivity::NotPositive:
      j["kind"] = "not_positive";
      break;
  }
  j["min_choi_eigenvalue"] = verdict.min_choi_eigenvalue;
  if (verdict.witness) {
    Json x = Json::array(), y = Json::array();
    for (Eigen::Index i = 0; i < verdict.witness->first.dim(); ++i) {
      const Complex xv = verdict.witness->first.vector()(i);
      const Complex yv = verdict.witness->second.vector()(i);
      x.push_back(Json::array({xv.real(), xv.imag()}));
      y.push_back(Json::array({yv.real(), yv.imag()}));
    }
    j["witness"] = {{"x", std::move(x)},
                    {"y", std::move(y)},
                    {"value", verdict.witness_value}};
  }
  return j;
}

int cmd_choi_decompose(const Options& opt) {
  require_file(opt.map_path, "--map");
  const MapData data = map_from_json(read_json_file(opt.map_path));
  const ChoiMatrix choi = std::holds_alternative<KrausSet>(data)
                              ? choi_from_kraus(std::get<KrausSet>(data))
                              : std::get<ChoiMatrix>(data);
  const std::uint64_t seed = resolve_seed(opt);

  Json config{{"map", opt.map_path}, {"threads", opt.threads}};
  Json report = report_envelope(
      "choi-decompose", seed, config,
      Json::array({"kraus-extraction", "choi-roundtrip"}));

  try {
    const KrausSet kraus = kraus_from_choi(choi);
    const double roundtrip =
        (choi_from_kraus(kraus).m - choi.m).cwiseAbs().maxCoeff();
    Json ops = Json::array();
    for (const auto& k : kraus.ops) ops.push_back(matrix_to_json(k));
    report["result"] = {{"dim", kraus.dim},
                        {"kraus", std::move(ops)},
                        {"roundtrip_error", roundtrip}};
    emit(report, opt);
    return kExitOk;
  } catch (const NotCompletelyPositive& e) {
    RandomStream rng(seed);
    const auto verdict = certify_positive(choi, 40, rng, 15);
    report["result"] = {{"dim", choi.dim},
                        {"not_completely_positive", witness_to_json(verdict)}};
    emit(report, opt);
    return kExitCheckFailed;
  }
}

int cmd_validate_map(const Options& opt) {
  require_file(opt.map_path, "--map");
  const Json j = read_json_file(opt.map_path);
  const std::uint64_t seed = resolve_seed(opt);
  Json config{{"map", opt.map_path}, {"threads", opt.threads}};

  if (j.contains("outcomes")) {
    // experiment file: check the transformation-measure conditions
    const auto exp = experiment_from_json(j);
    RandomStream rng(seed);
    const auto result = validate(exp, 20, rng);
    Json report = report_envelope("validate-map", seed, config,
                                  Json::array({"measure-conditions"}));
    report["result"] = {{"kind", "experiment"},
                        {"validation", validation_to_json(result, exp.labels())}};
    emit(report, opt);
    return result.ok() ? kExitOk : kExitCheckFailed;
  }

  const MapData data = map_from_json(j);
  const ChoiMatrix choi = std::holds_alternative<KrausSet>(data)
                              ? choi_from_kraus(std::get<KrausSet>(data))
                              : std::get<ChoiMatrix>(data);
  RandomStream rng(seed);
  const auto verdict = certify_positive(choi, 40, rng, 15);

  // trace conditions from the effect operator, valid in either representation
  const Transform t = std::holds_alternative<KrausSet>(data)
                          ? Transform(std::get<KrausSet>(data))
                          : Transform(std::get<ChoiMatrix>(data));
  const RealVector evals = hermitian_eigenvalues(t.effect());
  const double max_eig = evals.maxCoeff();
  const bool reducing = max_eig <= 1.0 + tol::psd;
  const bool preserving = (evals.array() - 1.0).abs().maxCoeff() <= tol::psd;

  Json report = report_envelope(
      "validate-map", seed, config,
      Json::array({"complete-positivity", "trace-conditions"}));
  report["result"] = {{"kind", "map"},
                      {"positivity", witness_to_json(verdict)},
                      {"trace_reducing", reducing},
                      {"trace_preserving", preserving},
                      {"max_total_eigenvalue", max_eig}};
  emit(report, opt);
  return verdict.kind == MapPositivity::CompletelyPositive ? kExitOk
                                                           : kExitCheckFailed;
}

int cmd_identity_check(const Options& opt) {
  const bool do_quadratic = !opt.dims.empty();
  const bool do_coherent =
      opt.spin > 0.0 || (opt.base_dim > 0 && opt.degree > 0);
  if (!do_quadratic && !do_coherent) {
    throw CLI::ValidationError(
        "identity-check",
        "nothing to check: give --dims N and/or --base-dim/--degree or --spin");
  }
  if (do_quadratic && opt.dims.size() != 1) {
    throw CLI::ValidationError("--dims",
                               "identity-check takes a single dimension");
  }
  const std::uint64_t seed = resolve_seed(opt);

  Json config{{"samples", opt.samples}, {"threads", opt.threads},
              {"tol_se_units", opt.tol}};
  Json checks = Json::array();
  Json result;
  bool failed = false;

  if (do_quadratic) {
    const Eigen::Index n = opt.dims[0];
    config["dims"] = Json::array({n});
    checks.push_back("projector-second-moment");
    const auto report = check_quadratic_identity(
        n, std::max<std::size_t>(opt.samples, 2), seed, opt.threads);
    const bool pass = report.max_se_units <= opt.tol;
    failed = failed || !pass;
    result["quadratic_moment"] = {{"n", n},
                                  {"n_samples", report.n_samples},
                                  {"max_se_units", report.max_se_units},
                                  {"max_abs_deviation", report.max_abs_deviation},
                                  {"pass", pass}};
  }
  if (do_coherent) {
    const VeroneseConfig cfg =
        opt.spin > 0.0 ? VeroneseConfig::spin(opt.spin)
                       : VeroneseConfig::make(opt.base_dim, opt.degree);
    config["base_dim"] = cfg.base_dim;
    config["degree"] = cfg.degree;
    checks.push_back("coherent-resolution-of-identity");
    const auto report = check_coherent_resolution(
        cfg, std::max<std::size_t>(opt.samples, 2), seed + 1, opt.threads);
    const bool pass = report.max_se_units <= opt.tol;
    failed = failed || !pass;
    result["coherent_resolution"] = {
        {"base_dim", cfg.base_dim},
        {"degree", cfg.degree},
        {"sym_dim", cfg.sym_dim},
        {"n_samples", report.n_samples},
        {"max_se_units", report.max_se_units},
        {"max_abs_deviation", report.max_abs_deviation},
        {"pass", pass}};
  }

  Json report = report_envelope("identity-check", seed, config, checks);
  report["result"] = std::move(result);
  emit(report, opt);
  return failed ? kExitCheckFailed : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized quantum measurement laboratory"};
  app.set_version_flag("--version", QMLAB_VERSION);
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd, bool sampling) {
    cmd->add_option("--seed", opt.seed, "Random seed (auto if omitted)");
    cmd->add_option("--out", opt.out_path, "Report path (stdout if omitted)");
    cmd->add_option("--threads", opt.threads, "Worker thread cap")
        ->check(CLI::PositiveNumber);
    if (sampling) {
      cmd->add_option("--samples", opt.samples, "Number of trials")
          ->check(CLI::PositiveNumber);
      cmd->add_option("--csv-samples", opt.csv_path,
                      "Dump raw samples as CSV to this path");
    }
  };

  auto* tomo = app.add_subcommand(
      "tomography", "Run the state-determined pure-outcome measurement");
  tomo->add_option("--state", opt.state_path, "Input state JSON");
  add_common(tomo, true);

  auto* dis = app.add_subcommand(
      "disentangle", "Sample product-state outcomes of a composite system");
  dis->add_option("--state", opt.state_path, "Input state JSON");
  dis->add_option("--dims", opt.dims, "Factor dimensions, e.g. --dims 2,2")
      ->delimiter(',');
  add_common(dis, true);

  auto* coh = app.add_subcommand(
      "coherent", "Sample coherent (symmetric-power) outcomes");
  coh->add_option("--state", opt.state_path, "Input state JSON");
  coh->add_option("--base-dim", opt.base_dim, "Direction space dimension n");
  coh->add_option("--degree", opt.degree, "Embedding degree d");
  coh->add_option("--spin", opt.spin, "Spin s shorthand for n=2, d=2s");
  add_common(coh, true);

  auto* dec = app.add_subcommand(
      "choi-decompose", "Extract Kraus operators from a map file");
  dec->add_option("--map", opt.map_path, "Map JSON (kraus or choi)");
  add_common(dec, false);

  auto* val = app.add_subcommand(
      "validate-map", "Check positivity/trace conditions of a map or experiment");
  val->add_option("--map", opt.map_path, "Map or experiment JSON");
  add_common(val, false);

  auto* idc = app.add_subcommand(
      "identity-check", "Monte Carlo checks of the closed-form identities");
  idc->add_option("--dims", opt.dims,
                  "Dimension for the projector second-moment check")
      ->delimiter(',');
  idc->add_option("--base-dim", opt.base_dim, "Direction space dimension n");
  idc->add_option("--degree", opt.degree, "Embedding degree d");
  idc->add_option("--spin", opt.spin, "Spin s shorthand for n=2, d=2s");
  idc->add_option("--tol", opt.tol, "Failure threshold in std-error units");
  add_common(idc, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion") {
      return app.exit(e);
    }
    app.exit(e);
    return kExitBadConfig;
  }

  try {
    if (app.got_subcommand(tomo)) return cmd_tomography(opt);
    if (app.got_subcommand(dis)) return cmd_disentangle(opt);
    if (app.got_subcommand(coh)) return cmd_coherent(opt);
    if (app.got_subcommand(dec)) return cmd_choi_decompose(opt);
    if (app.got_subcommand(val)) return cmd_validate_map(opt);
    if (app.got_subcommand(idc)) return cmd_identity_check(opt);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const NotHermitian& e) {
    std::cerr << "error: invalid input data: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const NotPositive& e) {
    std::cerr << "error: invalid input data: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const BadTrace& e) {
    std::cerr << "error: invalid input data: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  return kExitBadConfig;
}
