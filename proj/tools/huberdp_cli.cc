// Copyright 2026 The HuberDP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: estimate, sweep, tune, gen and plot.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "huberdp/dataset.h"
#include "huberdp/distributions.h"
#include "huberdp/experiments.h"
#include "huberdp/mechanism.h"
#include "huberdp/random.h"
#include "huberdp/report.h"
#include "huberdp/serialization.h"
#include "huberdp/status_macros.h"
#include "huberdp/wme.h"

namespace huberdp {
namespace {

// Options that override keys of a config file when given on the command
// line. Each binding copies one field from the parsed flags.
using Copier = std::function<void(const ConfigValues&, ConfigValues&)>;
using Bindings = std::vector<std::pair<CLI::Option*, Copier>>;

template <typename T>
void Bind(CLI::App* app, Bindings& bindings, ConfigValues& flags,
          const std::string& name, T ConfigValues::*field,
          const std::string& help) {
  CLI::Option* opt = app->add_option(name, flags.*field, help);
  bindings.emplace_back(opt, [field](const ConfigValues& from,
                                     ConfigValues& to) {
    to.*field = from.*field;
  });
}

// std::optional fields go through a plain value.
template <typename T>
void BindOptional(CLI::App* app, Bindings& bindings, std::shared_ptr<T> slot,
                  const std::string& name, std::optional<T> ConfigValues::*field,
                  const std::string& help) {
  CLI::Option* opt = app->add_option(name, *slot, help);
  bindings.emplace_back(opt, [slot, field](const ConfigValues&,
                                           ConfigValues& to) {
    to.*field = *slot;
  });
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

absl::StatusOr<ConfigValues> ResolveConfig(const std::string& config_path,
                                           const ConfigValues& flags,
                                           const Bindings& bindings) {
  ConfigValues values;
  if (!config_path.empty()) {
    HUBERDP_ASSIGN_OR_RETURN(const std::string text, ReadFile(config_path));
    HUBERDP_ASSIGN_OR_RETURN(values, MergeConfigJson(text, values));
  }
  for (const auto& [opt, copy] : bindings) {
    if (opt->count() > 0) copy(flags, values);
  }
  return values;
}

absl::Status WriteText(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return absl::OkStatus();
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("io error: cannot open ", path));
  out << text;
  out.close();
  if (!out) return absl::InternalError(absl::StrCat("io error: writing ", path));
  return absl::OkStatus();
}

template <typename T>
absl::StatusOr<std::vector<T>> ParseList(const std::string& text,
                                         const std::string& what) {
  std::vector<T> out;
  for (absl::string_view part : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    std::istringstream in{std::string(part)};
    T v;
    if (!(in >> v) || !in.eof()) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad value '", part, "' in ", what));
    }
    out.push_back(v);
  }
  if (out.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(what, " is empty"));
  }
  return out;
}

// Shared experiment options for sweep and tune.
struct ExperimentFlags {
  std::string dists = "uniform:-1:1";
  std::string dims = "1";
  std::string ns = "1000";
  std::string ms;
  std::string gammas;
  size_t total = 0;
  size_t trials = 10;
  std::string radius_text;
};

void AddExperimentOptions(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--dist", f.dists,
                  "Distributions, comma separated (e.g. uniform:-1:1,lomax:4)")
      ->capture_default_str();
  app->add_option("--d", f.dims, "Dimensions, comma separated")
      ->capture_default_str();
  app->add_option("--n", f.ns, "User counts, comma separated")
      ->capture_default_str();
  app->add_option("--m", f.ms, "Samples per user (balanced), comma separated");
  app->add_option("--gamma", f.gammas,
                  "Power-law exponents for imbalanced sizes, comma separated");
  app->add_option("--total", f.total, "Total samples N for imbalanced sizes");
  app->add_option("--trials", f.trials, "Trials per cell")
      ->capture_default_str();
}

absl::StatusOr<std::vector<SizeSpec>> SizeAxis(const ExperimentFlags& f) {
  std::vector<SizeSpec> out;
  if (!f.ms.empty() == !f.gammas.empty()) {
    return absl::InvalidArgumentError("give exactly one of --m or --gamma");
  }
  if (!f.ms.empty()) {
    HUBERDP_ASSIGN_OR_RETURN(const auto ms, ParseList<size_t>(f.ms, "--m"));
    for (size_t m : ms) out.push_back(BalancedSizes{m});
  } else {
    if (f.total == 0) {
      return absl::InvalidArgumentError("--gamma needs --total");
    }
    HUBERDP_ASSIGN_OR_RETURN(const auto gs,
                             ParseList<double>(f.gammas, "--gamma"));
    for (double g : gs) out.push_back(PowerLawSizes{f.total, g});
  }
  return out;
}

// One spec per (dist, d, n, size) cell and method. Both methods in a cell
// share the cell seed and therefore the trial datasets.
absl::StatusOr<std::vector<ExperimentSpec>> BuildSpecs(
    const ExperimentFlags& f, const ConfigValues& values,
    const std::vector<Method>& methods,
    const std::function<void(ExperimentSpec&)>& finish) {
  if (!values.seed.has_value()) {
    return absl::InvalidArgumentError("a seed is required (--seed)");
  }
  HUBERDP_ASSIGN_OR_RETURN(const auto dist_names,
                           ParseList<std::string>(f.dists, "--dist"));
  HUBERDP_ASSIGN_OR_RETURN(const auto dims, ParseList<size_t>(f.dims, "--d"));
  HUBERDP_ASSIGN_OR_RETURN(const auto ns, ParseList<size_t>(f.ns, "--n"));
  HUBERDP_ASSIGN_OR_RETURN(const auto sizes, SizeAxis(f));
  HUBERDP_ASSIGN_OR_RETURN(const DeltaMethod delta_method,
                           ParseDeltaMethod(values.delta_method));
  std::vector<ExperimentSpec> specs;
  uint64_t cell = 0;
  for (const std::string& name : dist_names) {
    for (size_t d : dims) {
      HUBERDP_ASSIGN_OR_RETURN(const DistributionSpec dist,
                               ParseDistribution(name, d));
      for (size_t n : ns) {
        for (const SizeSpec& size : sizes) {
          for (Method method : methods) {
            ExperimentSpec spec;
            spec.distribution = dist;
            spec.n = n;
            spec.sizes = size;
            spec.method = method;
            spec.trials = f.trials;
            spec.seed = DeriveSeed(*values.seed, cell, 0);
            spec.epsilon = values.epsilon;
            spec.delta = values.delta;
            spec.radius = values.radius;
            spec.delta_method = delta_method;
            finish(spec);
            specs.push_back(std::move(spec));
          }
          ++cell;
        }
      }
    }
  }
  return specs;
}

void AddPrivacyOptions(CLI::App* app, Bindings& b, ConfigValues& flags,
                       std::string& config_path) {
  app->add_option("--config", config_path,
                  "JSON config file; explicit flags override its keys");
  Bind(app, b, flags, "--epsilon", &ConfigValues::epsilon, "Privacy epsilon");
  Bind(app, b, flags, "--delta", &ConfigValues::delta, "Privacy delta");
  Bind(app, b, flags, "--radius", &ConfigValues::radius,
       "Clipping radius R_c (0: regime bound, or the distribution default)");
  Bind(app, b, flags, "--delta-method", &ConfigValues::delta_method,
       "Outlier count search: greedy or exact");
}

int Fail(const absl::Status& status) {
  std::cerr << "error: " << status.message() << "\n";
  return 1;
}

}  // namespace

int Main(int argc, char** argv) {
  CLI::App app{"User-level private mean estimation by Huber loss minimization"};
  app.require_subcommand(1);

  // estimate
  CLI::App* estimate = app.add_subcommand(
      "estimate", "Run one private estimate on a dataset file");
  std::string data_path, format_name = "csv", out_path, config_path;
  ConfigValues est_flags;
  Bindings est_bind;
  auto gamma_slot = std::make_shared<double>(1.0);
  auto seed_slot = std::make_shared<uint64_t>(0);
  auto scale_slot = std::make_shared<double>(1.0);
  auto k0_slot = std::make_shared<uint64_t>(1);
  estimate->add_option("--data", data_path, "Dataset file")->required();
  estimate->add_option("--format", format_name, "csv or jsonl")
      ->capture_default_str();
  estimate->add_option("--out", out_path, "Output path (default stdout)");
  AddPrivacyOptions(estimate, est_bind, est_flags, config_path);
  Bind(estimate, est_bind, est_flags, "--method", &ConfigValues::method,
       "hlm or wme");
  Bind(estimate, est_bind, est_flags, "--regime", &ConfigValues::regime,
       "bounded or heavy-tail");
  Bind(estimate, est_bind, est_flags, "--bound", &ConfigValues::bound,
       "Bound R on the data (bounded) or on the mean (heavy-tail)");
  Bind(estimate, est_bind, est_flags, "--p", &ConfigValues::p,
       "Moment order p (heavy-tail)");
  Bind(estimate, est_bind, est_flags, "--moment", &ConfigValues::moment,
       "Moment bound M_p (heavy-tail)");
  Bind(estimate, est_bind, est_flags, "--c-t", &ConfigValues::c_t,
       "Threshold constant C_T (0: regime default)");
  Bind(estimate, est_bind, est_flags, "--mode", &ConfigValues::mode,
       "balanced or imbalanced");
  Bind(estimate, est_bind, est_flags, "--tau", &ConfigValues::tau,
       "WME concentration radius");
  Bind(estimate, est_bind, est_flags, "--stage1-fraction",
       &ConfigValues::stage1_fraction, "WME stage-1 share of epsilon");
  BindOptional(estimate, est_bind, gamma_slot, "--imbalance",
               &ConfigValues::gamma,
               "Imbalance degree gamma (default: computed from sizes)");
  BindOptional(estimate, est_bind, seed_slot, "--seed", &ConfigValues::seed,
               "Noise seed (required)");
  BindOptional(estimate, est_bind, scale_slot, "--threshold-scale",
               &ConfigValues::threshold_scale,
               "Use T = A / sqrt(m) instead of the regime rule");
  BindOptional(estimate, est_bind, k0_slot, "--k0", &ConfigValues::k0,
               "Imbalanced mode: override k0 = floor(n / (8 gamma))");

  // gen
  CLI::App* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  std::string gen_dist = "uniform:-1:1", gen_format = "csv", gen_out;
  size_t gen_d = 1, gen_n = 100, gen_m = 0, gen_total = 0;
  double gen_gamma = 0.0;
  uint64_t gen_seed = 0;
  gen->add_option("--dist", gen_dist, "Distribution")->capture_default_str();
  gen->add_option("--d", gen_d, "Dimension")->capture_default_str();
  gen->add_option("--n", gen_n, "Users")->capture_default_str();
  CLI::Option* gen_m_opt = gen->add_option("--m", gen_m, "Samples per user");
  CLI::Option* gen_gamma_opt =
      gen->add_option("--gamma", gen_gamma, "Power-law size exponent");
  gen->add_option("--total", gen_total, "Total samples N (with --gamma)");
  gen->add_option("--seed", gen_seed, "Seed")->required();
  gen->add_option("--format", gen_format, "csv or jsonl")
      ->capture_default_str();
  gen->add_option("--out", gen_out, "Output path (default stdout)");
  gen_m_opt->excludes(gen_gamma_opt);

  // sweep
  CLI::App* sweep = app.add_subcommand(
      "sweep", "MSE sweep over distributions, sizes and methods (CSV)");
  ExperimentFlags sweep_f;
  ConfigValues sweep_flags;
  Bindings sweep_bind;
  std::string sweep_config, sweep_out, sweep_plot, sweep_methods = "hlm,wme";
  std::string hlm_grid, wme_grid;
  auto sweep_seed = std::make_shared<uint64_t>(0);
  AddExperimentOptions(sweep, sweep_f);
  AddPrivacyOptions(sweep, sweep_bind, sweep_flags, sweep_config);
  BindOptional(sweep, sweep_bind, sweep_seed, "--seed", &ConfigValues::seed,
               "Master seed (required)");
  sweep->add_option("--methods", sweep_methods, "hlm, wme or both")
      ->capture_default_str();
  sweep->add_option("--hlm-grid", hlm_grid,
                    "Threshold scales A to tune over (empty: regime rule)");
  sweep->add_option("--wme-grid", wme_grid,
                    "tau values to tune over (empty: variance-based tau)");
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");
  sweep->add_option("--plot", sweep_plot, "Also write an SVG plot here");

  // tune
  CLI::App* tune = app.add_subcommand(
      "tune", "Tune A (hlm) or tau (wme) on one cell and print the table");
  ExperimentFlags tune_f;
  ConfigValues tune_flags;
  Bindings tune_bind;
  std::string tune_config, tune_out, tune_method = "hlm", tune_grid;
  auto tune_seed = std::make_shared<uint64_t>(0);
  AddExperimentOptions(tune, tune_f);
  AddPrivacyOptions(tune, tune_bind, tune_flags, tune_config);
  BindOptional(tune, tune_bind, tune_seed, "--seed", &ConfigValues::seed,
               "Master seed (required)");
  tune->add_option("--method", tune_method, "hlm or wme")
      ->capture_default_str();
  tune->add_option("--grid", tune_grid, "Candidate values, comma separated")
      ->required();
  tune->add_option("--out", tune_out, "CSV path (default stdout)");

  // plot
  CLI::App* plot = app.add_subcommand("plot", "Render a sweep CSV as SVG");
  std::string plot_in, plot_out, plot_title = "MSE";
  plot->add_option("--in", plot_in, "Sweep CSV")->required();
  plot->add_option("--out", plot_out, "SVG path (default stdout)");
  plot->add_option("--title", plot_title, "Plot title")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (estimate->parsed()) {
    absl::StatusOr<ConfigValues> values =
        ResolveConfig(config_path, est_flags, est_bind);
    if (!values.ok()) return Fail(values.status());
    absl::StatusOr<DatasetFormat> format = ParseDatasetFormat(format_name);
    if (!format.ok()) return Fail(format.status());
    absl::StatusOr<UserDataset> dataset = LoadDataset(data_path, *format);
    if (!dataset.ok()) return Fail(dataset.status());
    absl::StatusOr<Method> method = ParseMethod(values->method);
    if (!method.ok()) return Fail(method.status());
    absl::StatusOr<EstimationResult> result;
    if (*method == Method::kHlm) {
      absl::StatusOr<EstimatorConfig> config =
          ToEstimatorConfig(*values, dataset->dim());
      if (!config.ok()) return Fail(config.status());
      result = Estimate(*dataset, *config);
    } else {
      absl::StatusOr<WmeConfig> config = ToWmeConfig(*values, dataset->dim());
      if (!config.ok()) return Fail(config.status());
      result = WmeEstimate(*dataset, *config);
    }
    if (!result.ok()) return Fail(result.status());
    for (const std::string& line : result->diagnostics) {
      std::cerr << "note: " << line << "\n";
    }
    const absl::Status s =
        WriteText(EstimationResultToJson(*result) + "\n", out_path);
    return s.ok() ? 0 : Fail(s);
  }

  if (gen->parsed()) {
    absl::StatusOr<DistributionSpec> dist = ParseDistribution(gen_dist, gen_d);
    if (!dist.ok()) return Fail(dist.status());
    absl::StatusOr<DatasetFormat> format = ParseDatasetFormat(gen_format);
    if (!format.ok()) return Fail(format.status());
    absl::StatusOr<UserDataset> dataset;
    if (gen_gamma_opt->count() > 0) {
      if (gen_total == 0) return Fail(absl::InvalidArgumentError("--gamma needs --total"));
      dataset = GenImbalanced(*dist, gen_n, gen_total, gen_gamma, gen_seed);
    } else {
      if (gen_m_opt->count() == 0) {
        return Fail(absl::InvalidArgumentError("give --m or --gamma"));
      }
      dataset = GenBalanced(*dist, gen_n, gen_m, gen_seed);
    }
    if (!dataset.ok()) return Fail(dataset.status());
    const absl::Status s =
        gen_out.empty() || gen_out == "-"
            ? WriteDataset(*dataset, *format, std::cout)
            : ExportDataset(*dataset, gen_out, *format);
    return s.ok() ? 0 : Fail(s);
  }

  if (sweep->parsed()) {
    absl::StatusOr<ConfigValues> values =
        ResolveConfig(sweep_config, sweep_flags, sweep_bind);
    if (!values.ok()) return Fail(values.status());
    absl::StatusOr<std::vector<Method>> methods;
    {
      absl::StatusOr<std::vector<std::string>> names =
          ParseList<std::string>(sweep_methods, "--methods");
      if (!names.ok()) return Fail(names.status());
      std::vector<Method> parsed;
      for (const std::string& name : *names) {
        absl::StatusOr<Method> m = ParseMethod(name);
        if (!m.ok()) return Fail(m.status());
        parsed.push_back(*m);
      }
      methods = std::move(parsed);
    }
    std::vector<double> hlm_values, wme_values;
    if (!hlm_grid.empty()) {
      auto g = ParseList<double>(hlm_grid, "--hlm-grid");
      if (!g.ok()) return Fail(g.status());
      hlm_values = *g;
    }
    if (!wme_grid.empty()) {
      auto g = ParseList<double>(wme_grid, "--wme-grid");
      if (!g.ok()) return Fail(g.status());
      wme_values = *g;
    }
    absl::StatusOr<std::vector<ExperimentSpec>> specs = BuildSpecs(
        sweep_f, *values, *methods, [&](ExperimentSpec& spec) {
          spec.tuning_grid =
              spec.method == Method::kHlm ? hlm_values : wme_values;
        });
    if (!specs.ok()) return Fail(specs.status());
    const std::vector<SweepRow> rows = MseSweep(*specs);
    bool any_failed = false;
    for (const SweepRow& row : rows) {
      if (!row.error.empty()) {
        any_failed = true;
        std::cerr << "cell failed: " << row.method << " " << row.dist
                  << " n=" << row.n << ": " << row.error << "\n";
      }
    }
    absl::Status s = EmitCsv(rows, sweep_out);
    if (s.ok() && !sweep_plot.empty()) s = EmitPlot(rows, "MSE", sweep_plot);
    if (!s.ok()) return Fail(s);
    return any_failed ? 1 : 0;
  }

  if (tune->parsed()) {
    absl::StatusOr<ConfigValues> values =
        ResolveConfig(tune_config, tune_flags, tune_bind);
    if (!values.ok()) return Fail(values.status());
    absl::StatusOr<Method> method = ParseMethod(tune_method);
    if (!method.ok()) return Fail(method.status());
    absl::StatusOr<std::vector<double>> grid =
        ParseList<double>(tune_grid, "--grid");
    if (!grid.ok()) return Fail(grid.status());
    absl::StatusOr<std::vector<ExperimentSpec>> specs =
        BuildSpecs(tune_f, *values, {*method}, [](ExperimentSpec&) {});
    if (!specs.ok()) return Fail(specs.status());
    if (specs->size() != 1) {
      return Fail(absl::InvalidArgumentError(
          "tune takes a single cell: one value each for --dist, --d, --n and "
          "--m/--gamma"));
    }
    absl::StatusOr<TuneResult> tuned = TuneHyperparameter(specs->front(), *grid);
    if (!tuned.ok()) return Fail(tuned.status());
    std::ostringstream out;
    out << "param,mse_mean,mse_stderr,mse_median,best\n";
    for (const auto& [value, stats] : tuned->table) {
      out << value << ',' << stats.mse_mean << ',' << stats.mse_stderr << ','
          << stats.mse_median << ',' << (value == tuned->best ? 1 : 0) << '\n';
    }
    const absl::Status s = WriteText(out.str(), tune_out);
    return s.ok() ? 0 : Fail(s);
  }

  if (plot->parsed()) {
    std::ifstream in(plot_in);
    if (!in) return Fail(absl::NotFoundError(absl::StrCat("cannot open ", plot_in)));
    absl::StatusOr<std::vector<SweepRow>> rows = ReadCsv(in);
    if (!rows.ok()) return Fail(rows.status());
    const absl::Status s = EmitPlot(*rows, plot_title, plot_out);
    return s.ok() ? 0 : Fail(s);
  }
  return 0;
}

}  // namespace huberdp

int main(int argc, char** argv) { return huberdp::Main(argc, argv); }
