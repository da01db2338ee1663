// Command-line runner for global autoregressive forecasting experiments.
//
//   globalar sweep-memory    --data d.csv [--meta m.csv] [--lags 1:40] --out dir
//   globalar sweep-model     --data d.csv --lags 1:12 --model linear,poly2,mlp
//   globalar sweep-partition --data d.csv --lags 12 --partitions 1,10,atomic
//   globalar evaluate        --data d.csv --lag 12 --model linear
//   globalar gap-report      --data d.csv --lag 12 --model naive,local-ar,linear
//   globalar coefficients    --data d.csv --lags 12,24
//   globalar bounds          --log-hyp 0.69 --n 50 --k 1 --delta 0.05
//   globalar gen-synthetic   --kind ar1 --count 100 --length 60 --out d.csv
//
// Exit status: 0 success, 1 fatal error, 2 some sweep cells failed.

#include <globalar/bounds.hpp>
#include <globalar/dataset.hpp>
#include <globalar/experiment.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace globalar;

std::ofstream open_output(const std::string& path) {
  const std::filesystem::path fp(path);
  if (fp.has_parent_path()) std::filesystem::create_directories(fp.parent_path());
  std::ofstream f(fp, std::ios::binary);
  if (!f) throw Error("cannot write '" + path + "'");
  return f;
}

std::vector<std::size_t> parse_lags(const std::vector<std::string>& tokens) {
  std::vector<std::size_t> out;
  for (const auto& t : tokens) {
    auto sep = t.find_first_of(":-");
    try {
      if (sep == std::string::npos) {
        out.push_back(std::stoul(t));
      } else {
        auto lo = std::stoul(t.substr(0, sep)), hi = std::stoul(t.substr(sep + 1));
        if (lo > hi) throw DomainError("empty lag range '" + t + "'");
        for (auto p = lo; p <= hi; ++p) out.push_back(p);
      }
    } catch (const std::logic_error&) {
      throw DomainError("invalid lag '" + t + "'");
    }
  }
  for (auto p : out)
    if (p < 1) throw DomainError("lags must be >= 1");
  return out;
}

std::vector<std::size_t> parse_partitions(const std::vector<std::string>& tokens) {
  std::vector<std::size_t> out;
  for (const auto& t : tokens) {
    if (t == "atomic" || t == "K") {
      out.push_back(0);
      continue;
    }
    try {
      auto p = std::stoul(t);
      if (p < 1) throw DomainError("partition counts must be >= 1");
      out.push_back(p);
    } catch (const std::logic_error&) {
      throw DomainError("invalid partition count '" + t + "'");
    }
  }
  return out;
}

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<double> out;
  std::string tok;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    for (char& c : line)
      if (c == ',' || c == ';' || c == '\t') c = ' ';
    std::istringstream ss(line);
    while (ss >> tok) out.push_back(detail::parse_double(tok, line_no, "number"));
  }
  return out;
}

struct ExperimentOptions {
  ExperimentSpec spec;
  std::vector<std::string> lags;
  std::optional<std::size_t> lag;
  std::vector<std::string> models;
  std::optional<int> degree;
  std::vector<std::string> partitions;
  std::string scale = "mase";
  bool no_intercept = false;
  bool no_per_series = false;
  std::string out = ".";
};

void add_experiment_options(CLI::App* cmd, ExperimentOptions& o, bool with_partitions) {
  cmd->add_option("--data", o.spec.data_path, "Long-format CSV series_id,index,value")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--meta", o.spec.meta_path, "Metadata CSV series_id,season_period,horizon")
      ->check(CLI::ExistingFile);
  cmd->add_option("--lags", o.lags, "Lags: list and/or ranges, e.g. 1:12,24")->delimiter(',');
  cmd->add_option("--lag", o.lag, "Single lag (memory order)");
  cmd->add_option("--model", o.models,
                  "Models: linear,poly2,poly3,mlp,naive,snaive,theta,local-ar")
      ->delimiter(',');
  cmd->add_option("--degree", o.degree, "Polynomial degree applied to linear models (1, 2 or 3)")
      ->check(CLI::IsMember({1, 2, 3}));
  cmd->add_option("--scale", o.scale, "Per-series scaling")
      ->check(CLI::IsMember({"none", "mase", "mean"}));
  cmd->add_flag("--seasonal-scale", o.spec.prep.seasonal,
                "Seasonal differences in the MASE scale and metric");
  cmd->add_flag("--scale-feature", o.spec.prep.scale_feature, "Append log(scale) as a feature");
  cmd->add_flag("--no-intercept", o.no_intercept, "Fit linear models without intercept");
  cmd->add_flag("--min-length-filter", o.spec.min_length_filter,
                "Per lag, keep only series whose training part is longer than the lag");
  cmd->add_option("--mlp-seed", o.spec.mlp.seed);
  cmd->add_option("--mlp-epochs", o.spec.mlp.max_epochs);
  cmd->add_option("--mlp-patience", o.spec.mlp.patience);
  cmd->add_option("--feature-cap", o.spec.feature_cap, "Largest polynomial feature count allowed");
  cmd->add_option("--threads", o.spec.threads, "Worker threads for sweep cells");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--no-per-series", o.no_per_series, "Skip per_series.csv");
  if (with_partitions) {
    cmd->add_option("--partitions", o.partitions, "Group counts, e.g. 1,10,atomic")
        ->delimiter(',');
    cmd->add_option("--partition-seed", o.spec.partition_seed);
    cmd->add_option("--partition-key", o.spec.partition_key,
                    "Group by a metadata field instead of randomly");
  }
}

int run_experiment(ExperimentOptions& o, const std::string& command,
                   std::vector<std::string> default_models, bool with_features) {
  auto& spec = o.spec;
  spec.command = command;
  spec.prep.mode = parse_scale_mode(o.scale);
  spec.intercept = !o.no_intercept;
  spec.per_series = !o.no_per_series;
  spec.out_dir = o.out;
  if (o.models.empty()) o.models = std::move(default_models);
  for (const auto& m : o.models) {
    auto kind = parse_model_kind(m);
    if (o.degree && kind == ModelKind::linear)
      kind = *o.degree == 2 ? ModelKind::poly2 : *o.degree == 3 ? ModelKind::poly3 : kind;
    spec.models.push_back(kind);
  }
  if (!o.partitions.empty()) spec.partitions = parse_partitions(o.partitions);
  if (spec.partition_key) spec.partitions = {1};

  const auto data = load_csv(spec.data_path, spec.meta_path);
  const auto split = split_holdout(data);
  spec.lags = parse_lags(o.lags);
  if (o.lag) spec.lags.push_back(*o.lag);
  if (spec.lags.empty()) spec.lags = default_lags(split);

  const auto results = run_sweep(split, spec, cross_cells(spec));
  for (const auto& r : results)
    if (r.error)
      std::cerr << "cell " << to_string(r.cell.model) << " lag=" << r.cell.lag
                << " partitions=" << r.cell.partitions << " failed: " << *r.error << '\n';
  const auto failed = write_artifacts(spec, results, with_features);
  std::cout << "wrote " << results.size() - failed << " summary rows to "
            << (spec.out_dir / "summary.csv").string() << '\n';
  return failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Global autoregressive forecasting experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(GLOBALAR_VERSION));

  ExperimentOptions memory, model, partition, evaluate_opts, gap;
  auto* c_memory = app.add_subcommand("sweep-memory", "Error as a function of memory (lag)");
  add_experiment_options(c_memory, memory, false);
  auto* c_model = app.add_subcommand("sweep-model", "Error per model class and lag");
  add_experiment_options(c_model, model, false);
  auto* c_partition = app.add_subcommand("sweep-partition", "Error per partition count and lag");
  add_experiment_options(c_partition, partition, true);
  auto* c_evaluate = app.add_subcommand("evaluate", "Fit and score one configuration");
  add_experiment_options(c_evaluate, evaluate_opts, true);
  auto* c_gap = app.add_subcommand("gap-report", "In-sample vs one-step out-of-sample error");
  add_experiment_options(c_gap, gap, true);

  // coefficients
  std::string coef_data, coef_out = "coefficients.csv", coef_scale = "mase";
  std::optional<std::string> coef_meta;
  std::vector<std::string> coef_lags;
  bool coef_no_intercept = false, coef_seasonal = false;
  auto* c_coef = app.add_subcommand("coefficients", "Global linear AR coefficients by lag");
  c_coef->add_option("--data", coef_data)->required()->check(CLI::ExistingFile);
  c_coef->add_option("--meta", coef_meta)->check(CLI::ExistingFile);
  c_coef->add_option("--lags", coef_lags)->delimiter(',')->required();
  c_coef->add_option("--scale", coef_scale)->check(CLI::IsMember({"none", "mase", "mean"}));
  c_coef->add_flag("--seasonal-scale", coef_seasonal);
  c_coef->add_flag("--no-intercept", coef_no_intercept);
  c_coef->add_option("--out", coef_out, "Output CSV ('-' for stdout)");

  // bounds
  std::optional<double> log_hyp;
  std::optional<std::string> per_series_file, group_file, orders_file;
  double bound_n = 1.0, bound_delta = 0.05;
  std::optional<double> bound_k;
  auto* c_bounds = app.add_subcommand("bounds", "Generalization bound half-widths");
  c_bounds->add_option("--log-hyp", log_hyp, "Natural log of the global hypothesis count");
  c_bounds->add_option("--per-series-log-hyp", per_series_file,
                       "File of per-series log class sizes (local method)")
      ->check(CLI::ExistingFile);
  c_bounds->add_option("--group-log-hyp", group_file,
                       "File of per-group log class sizes (partitioned method)")
      ->check(CLI::ExistingFile);
  c_bounds->add_option("--memory-orders", orders_file, "File of local AR orders")
      ->check(CLI::ExistingFile);
  c_bounds->add_option("--n", bound_n, "Effective sample size per series")->required();
  c_bounds->add_option("--k", bound_k, "Number of series (defaults to the file length)");
  c_bounds->add_option("--delta", bound_delta, "Failure probability");

  // gen-synthetic
  SyntheticSpec syn;
  std::string syn_kind = "ar1", syn_out = "synthetic.csv";
  std::optional<std::string> syn_meta_out;
  auto* c_gen = app.add_subcommand("gen-synthetic", "Write a seeded synthetic series set");
  c_gen->add_option("--kind", syn_kind)
      ->check(CLI::IsMember({"ar1", "seasonal", "mixed", "profile", "logistic"}));
  c_gen->add_option("--count", syn.count);
  c_gen->add_option("--length", syn.length);
  c_gen->add_option("--phi", syn.phi);
  c_gen->add_option("--period", syn.period);
  c_gen->add_option("--amplitude", syn.amplitude);
  c_gen->add_option("--growth", syn.growth);
  c_gen->add_option("--noise-sd", syn.noise_sd);
  c_gen->add_option("--seed", syn.seed);
  c_gen->add_option("--start", syn.start);
  c_gen->add_option("--horizon", syn.horizon);
  c_gen->add_option("--out", syn_out);
  c_gen->add_option("--meta-out", syn_meta_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_memory->parsed()) return run_experiment(memory, "sweep-memory", {"linear"}, false);
    if (c_model->parsed())
      return run_experiment(model, "sweep-model", {"linear", "poly2", "poly3", "mlp"}, true);
    if (c_partition->parsed())
      return run_experiment(partition, "sweep-partition", {"linear"}, false);
    if (c_evaluate->parsed()) return run_experiment(evaluate_opts, "evaluate", {"linear"}, false);
    if (c_gap->parsed())
      return run_experiment(gap, "gap-report", {"naive", "local-ar", "linear"}, false);

    if (c_coef->parsed()) {
      const auto data = load_csv(coef_data, coef_meta);
      const auto split = split_holdout(data);
      const auto lags = parse_lags(coef_lags);
      const std::string name = std::filesystem::path(coef_data).stem().string();
      PreprocessSpec prep{parse_scale_mode(coef_scale), coef_seasonal, false};
      if (coef_out == "-") {
        coefficient_dump(std::cout, name, split.train, lags, prep, !coef_no_intercept);
      } else {
        auto f = open_output(coef_out);
        coefficient_dump(f, name, split.train, lags, prep, !coef_no_intercept);
      }
      return 0;
    }

    if (c_bounds->parsed()) {
      std::cout << "method,log_hyp,n,k,delta,t\n";
      auto row = [&](const std::string& method, const BoundResult& r) {
        std::cout << method << ',' << format10(r.query.log_hyp) << ',' << format10(r.query.n)
                  << ',' << format10(r.query.k) << ',' << format10(r.query.delta) << ','
                  << format10(r.t) << '\n';
      };
      bool any = false;
      if (log_hyp) {
        row("global", bound_halfwidth({*log_hyp, bound_n, bound_k.value_or(1.0), bound_delta}));
        any = true;
      }
      if (per_series_file) {
        const auto sizes = read_numbers(*per_series_file);
        const double k = bound_k.value_or(static_cast<double>(sizes.size()));
        row("local", bound_halfwidth({local_log_complexity(sizes), bound_n, k, bound_delta}));
        any = true;
      }
      if (group_file) {
        const auto sizes = read_numbers(*group_file);
        if (!bound_k) throw DomainError("--group-log-hyp needs --k");
        row("partitioned(P=" + std::to_string(sizes.size()) + ")",
            partitioned_bound(sizes, bound_n, *bound_k, bound_delta));
        any = true;
      }
      if (orders_file) {
        std::vector<long long> orders;
        for (double v : read_numbers(*orders_file)) orders.push_back(std::llround(v));
        const auto g = memory_equivalent(orders);
        const double k = bound_k.value_or(static_cast<double>(orders.size()));
        std::vector<double> logs;
        for (auto l : orders) logs.push_back(parameter_log_complexity(static_cast<double>(l)));
        row("local-ar(orders)", bound_halfwidth({local_log_complexity(logs), bound_n, k, bound_delta}));
        row("global-ar(" + std::to_string(g) + ")",
            bound_halfwidth({parameter_log_complexity(static_cast<double>(g)), bound_n, k, bound_delta}));
        std::cerr << "memory_equivalent=" << g << '\n';
        any = true;
      }
      if (!any) throw DomainError("give --log-hyp, --per-series-log-hyp, --group-log-hyp or --memory-orders");
      return 0;
    }

    if (c_gen->parsed()) {
      syn.kind = syn_kind == "ar1"        ? SyntheticKind::ar1
                 : syn_kind == "seasonal" ? SyntheticKind::seasonal
                 : syn_kind == "mixed"    ? SyntheticKind::mixed
                 : syn_kind == "profile"  ? SyntheticKind::profile
                                          : SyntheticKind::logistic;
      const auto set = gen_synthetic(syn);
      auto f = open_output(syn_out);
      write_csv(set, f);
      if (syn_meta_out) {
        auto m = open_output(*syn_meta_out);
        write_metadata(set, m);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
