#include "commands.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>

#include "fsnet/data_io.hpp"
#include "fsnet/error.hpp"
#include "fsnet/evaluate.hpp"
#include "fsnet/objective.hpp"
#include "fsnet/params.hpp"
#include "fsnet/rng.hpp"

namespace fsnet::cli {

namespace {

constexpr const char* kFooter = R"(Exit codes: 0 success, 1 validation or config error, 2 runtime or numerical failure.
Config precedence: built-in defaults < --config FILE (flat key=value lines) < flags.

Environment:
  FSNET_THREADS   cap on worker threads for episode and gradient parallelism
                  (default: hardware concurrency). Results do not depend on it.

CSV outputs:
  eval --csv      episode,accuracy
  ablate --csv    episode,V0,V1,V2,V3
  train --trace   step,l_cls,l_disc,l_total   (loss before the update of that step)
  bench --csv     model,features,dim,params,time_ms_median,time_ms_stdev,peak_kib,tasks)";

// Every Config key as a string flag; values go through Config::set so range
// errors carry the legal range.
struct ConfigFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_file;
  std::string view;

  void attach(CLI::App& app) {
    static const std::map<std::string, std::string> help = {
        {"way", "classes per episode (N)"},
        {"shot", "support samples per class (K)"},
        {"query", "query samples per class (M)"},
        {"episodes", "evaluation episodes"},
        {"tau", "low-pass cutoff in (0, 1)"},
        {"lambda", "weight of the subspace orthogonality loss"},
        {"jitter", "std of the noise added before SVD"},
        {"epsilon", "distance floor inside the square root"},
        {"seed", "master seed"},
        {"fusion-space", "similarity | distance"},
        {"spatial-pool", "none | gap (pool both views per channel)"},
        {"variant", "V0 | V1 | V2 | V3"},
        {"d-max", "maximum subspace rank"},
        {"reduction", "attention bottleneck ratio r"},
        {"scale", "initial logit scale"},
        {"lr", "gradient descent step size"},
        {"steps", "training steps"},
        {"fd-step", "finite-difference step h"},
        {"phase", "base | val | novel: classes to draw episodes from"},
    };
    for (const auto& key : Config::keys()) {
      options[key] = app.add_option("--" + key, values[key], help.at(key));
    }
    app.add_option("--config", config_file, "flat key=value config file");
    app.add_option("--view", view, "spatial-only: alias for --variant V0");
  }

  Config resolve(Config config) const {
    if (!config_file.empty()) config.merge_file(config_file);
    for (const auto& key : Config::keys()) {
      if (options.at(key)->count() > 0) config.set(key, values.at(key));
    }
    if (!view.empty()) {
      if (view != "spatial-only") {
        throw ConfigError("config: view=" + view + " is invalid; legal range: spatial-only");
      }
      config.variant = Variant::v0;
    }
    return config;
  }
};

void echo_config(std::ostream& out, std::string_view command, const Config& config) {
  out << "# fsnet " << command << "\n";
  for (const auto& [key, value] : config.entries()) out << "config." << key << "=" << value << "\n";
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open " + path + " for writing");
  f.precision(17);
  return f;
}

ModelParams load_or_init(const std::string& path, const DatasetSplit& split, const Config& c,
                         std::ostream& out) {
  if (!path.empty()) {
    out << "input.params=" << path << "\n";
    return read_params(path);
  }
  out << "input.params=initial\n";
  return ModelParams::initial(split.shape().channels, c.reduction, c.logit_scale,
                              derive_seed({c.seed, stream::kParamInit}));
}

DatasetSplit load_data(const std::string& path, const Config& c, std::ostream& out) {
  out << "input.data=" << path << "\n";
  DatasetSplit split = load_split(path, c.phase);
  if (split.empty()) throw ValidationError(path + ": dataset has no samples");
  return split;
}

void write_params_summary(std::ostream& out, const ModelParams& p) {
  const auto alpha = p.fusion.alpha();
  out << "params.count=" << p.size() << "\n"
      << "params.fusion_logits=" << format_real(p.fusion.logits[0]) << ","
      << format_real(p.fusion.logits[1]) << "\n"
      << "params.alpha=" << format_real(alpha[0]) << "," << format_real(alpha[1]) << "\n"
      << "params.scale=" << format_real(p.logit_scale) << "\n";
}

std::string percent(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * x);
  return buf;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fsnet: frequency-enhanced dual-view subspace few-shot classifier"};
  app.footer(kFooter);
  app.require_subcommand(1);

  // gen-synth
  auto* gen = app.add_subcommand("gen-synth", "write the synthetic benchmark (three FTS files)");
  ConfigFlags gen_flags;
  gen_flags.attach(*gen);
  SynthSpec spec;
  std::string gen_out;
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_option("--classes", spec.classes, "number of classes")->capture_default_str();
  gen->add_option("--samples", spec.samples_per_class, "samples per class")->capture_default_str();
  gen->add_option("--channels", spec.channels, "C")->capture_default_str();
  gen->add_option("--height", spec.height, "H")->capture_default_str();
  gen->add_option("--width", spec.width, "W")->capture_default_str();
  gen->add_option("--template-energy", spec.template_energy)->capture_default_str();
  gen->add_option("--pose-energy", spec.pose_energy)->capture_default_str();
  gen->add_option("--noise-energy", spec.noise_energy)->capture_default_str();
  gen->add_option("--noise-rank", spec.noise_rank, "patterns in the shared clutter bank")
      ->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "mean accuracy and 95% CI over sampled episodes");
  ConfigFlags eval_flags;
  eval_flags.attach(*eval);
  std::string eval_data, eval_params, eval_csv;
  eval->add_option("--data", eval_data, "dataset directory or single FTS file")->required();
  eval->add_option("--params", eval_params, "FSMP parameter file (default: initialization)");
  eval->add_option("--csv", eval_csv, "per-episode accuracy CSV");

  // train
  auto* tr = app.add_subcommand("train", "finite-difference gradient descent on base episodes");
  ConfigFlags train_flags;
  train_flags.attach(*tr);
  std::string train_data, train_init, train_out, train_trace;
  tr->add_option("--data", train_data, "dataset directory or single FTS file")->required();
  tr->add_option("--params", train_init, "starting FSMP file (default: initialization)");
  tr->add_option("--out", train_out, "where to write the trained FSMP file")->required();
  tr->add_option("--trace", train_trace, "loss trace CSV");

  // ablate
  auto* abl = app.add_subcommand("ablate", "V0..V3 on one shared episode stream");
  ConfigFlags ablate_flags;
  ablate_flags.attach(*abl);
  std::string ablate_data, ablate_params, ablate_csv;
  abl->add_option("--data", ablate_data, "dataset directory or single FTS file")->required();
  abl->add_option("--params", ablate_params, "FSMP parameter file (default: initialization)");
  abl->add_option("--csv", ablate_csv, "per-episode accuracy CSV, one column per variant");

  // bench
  auto* bench = app.add_subcommand("bench", "per-task time and memory of V0 vs V3");
  ConfigFlags bench_flags;
  bench_flags.attach(*bench);
  BenchOptions bench_opts;
  std::string bench_csv;
  bench->add_option("--tasks", bench_opts.tasks, "timed tasks per row (>= 20)")
      ->capture_default_str()
      ->check(CLI::Range(std::size_t{20}, std::size_t{100000}));
  bench->add_option("--warmup", bench_opts.warmup, "untimed tasks per row")->capture_default_str();
  bench->add_option("--csv", bench_csv, "bench table as CSV");

  auto* selftest = app.add_subcommand("selftest", "oracle and round-trip checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      const Config c = gen_flags.resolve(Config{});
      spec.seed = c.seed;
      spec.tau = c.tau;
      spec.validate();
      echo_config(out, "gen-synth", c);
      out << "synth.classes=" << spec.classes << "\n"
          << "synth.samples_per_class=" << spec.samples_per_class << "\n"
          << "synth.shape=" << to_string(Shape{spec.channels, spec.height, spec.width}) << "\n"
          << "synth.template_energy=" << format_real(spec.template_energy) << "\n"
          << "synth.pose_energy=" << format_real(spec.pose_energy) << "\n"
          << "synth.noise_energy=" << format_real(spec.noise_energy) << "\n"
          << "synth.noise_rank=" << spec.noise_rank << "\n";
      const SynthDataset data = generate_synthetic(spec);
      write_synthetic(data, spec, gen_out);
      out << "output.dir=" << gen_out << "\n"
          << "output.base=" << data.base.features.size() << "\n"
          << "output.val=" << data.val.features.size() << "\n"
          << "output.novel=" << data.novel.features.size() << "\n";
    } else if (eval->parsed()) {
      const Config c = eval_flags.resolve(Config{});
      echo_config(out, "eval", c);
      const DatasetSplit split = load_data(eval_data, c, out);
      const ModelParams params = load_or_init(eval_params, split, c, out);
      const EvalReport r = evaluate(split, params, EvalOptions::from(c));
      out << "variant=" << to_string(c.variant) << "\n";
      write_report(out, r, "");
      out << "summary=" << to_string(c.variant) << " " << percent(r.mean_accuracy) << " +- "
          << percent(r.ci95) << "\n";
      if (!eval_csv.empty()) {
        auto f = open_output(eval_csv);
        write_accuracy_csv(f, r);
      }
    } else if (tr->parsed()) {
      Config defaults;
      defaults.phase = Phase::base;
      const Config c = train_flags.resolve(defaults);
      echo_config(out, "train", c);
      const DatasetSplit split = load_data(train_data, c, out);
      const ModelParams init = load_or_init(train_init, split, c, out);
      TrainResult result;
      std::optional<NumericalError> failure;
      try {
        result = train(split, init, TrainOptions::from(c));
      } catch (const TrainingDiverged& e) {
        result.trace = e.trace();
        failure.emplace(e.what());
      }
      if (!train_trace.empty()) {
        auto f = open_output(train_trace);
        f << "step,l_cls,l_disc,l_total\n";
        for (std::size_t i = 0; i < result.trace.size(); ++i) {
          const auto& l = result.trace[i];
          f << i << "," << format_real(l.l_cls) << "," << format_real(l.l_disc) << ","
            << format_real(l.l_total) << "\n";
        }
      }
      if (failure) throw *failure;
      write_params(result.params, train_out);
      out << "train.steps=" << result.trace.size() << "\n";
      if (!result.trace.empty()) {
        out << "train.loss_first=" << format_real(result.trace.front().l_total) << "\n"
            << "train.loss_last=" << format_real(result.trace.back().l_total) << "\n";
      }
      write_params_summary(out, result.params);
      out << "output.params=" << train_out << "\n";
    } else if (abl->parsed()) {
      const Config c = ablate_flags.resolve(Config{});
      echo_config(out, "ablate", c);
      const DatasetSplit split = load_data(ablate_data, c, out);
      const ModelParams params = load_or_init(ablate_params, split, c, out);
      const auto rows = ablate(split, params, EvalOptions::from(c));
      out << "variant  description                            accuracy   ci95\n";
      for (const auto& [v, r] : rows) {
        std::string desc(describe(v));
        desc.resize(38, ' ');
        std::string acc = percent(r.mean_accuracy);
        acc.insert(0, acc.size() < 6 ? 6 - acc.size() : 0, ' ');
        out << to_string(v) << "       " << desc << " " << acc << "   +- " << percent(r.ci95)
            << "\n";
      }
      for (const auto& [v, r] : rows) write_report(out, r, std::string(to_string(v)) + ".");
      if (!ablate_csv.empty()) {
        auto f = open_output(ablate_csv);
        f << "episode,V0,V1,V2,V3\n";
        for (std::size_t i = 0; i < rows.front().second.accuracies.size(); ++i) {
          f << i;
          for (const auto& [v, r] : rows) f << "," << format_real(r.accuracies[i]);
          f << "\n";
        }
      }
    } else if (bench->parsed()) {
      const Config c = bench_flags.resolve(Config{});
      echo_config(out, "bench", c);
      bench_opts.way = c.way;
      bench_opts.shot = c.shot;
      bench_opts.queries = c.query;
      bench_opts.seed = c.seed;
      out << "bench.tasks=" << bench_opts.tasks << "\n"
          << "bench.warmup=" << bench_opts.warmup << "\n"
          << "bench.threads=1\n";
      const auto rows = run_bench(bench_opts);
      char line[160];
      std::snprintf(line, sizeof(line), "%-6s %-9s %6s %7s %15s %14s %10s\n", "model", "features",
                    "dim", "params", "time_ms_median", "time_ms_stdev", "peak_kib");
      out << line;
      for (const auto& r : rows) {
        std::snprintf(line, sizeof(line), "%-6s %-9s %6zu %7zu %15.3f %14.3f %10.1f\n",
                      std::string(to_string(r.variant)).c_str(), to_string(r.shape).c_str(),
                      r.shape.size(), r.params, r.median_ms, r.stdev_ms,
                      static_cast<double>(r.peak_bytes) / 1024.0);
        out << line;
      }
      if (!bench_csv.empty()) {
        auto f = open_output(bench_csv);
        f << "model,features,dim,params,time_ms_median,time_ms_stdev,peak_kib,tasks\n";
        for (const auto& r : rows) {
          f << to_string(r.variant) << "," << to_string(r.shape) << "," << r.shape.size() << ","
            << r.params << "," << format_real(r.median_ms) << "," << format_real(r.stdev_ms)
            << "," << format_real(static_cast<double>(r.peak_bytes) / 1024.0) << "," << r.tasks
            << "\n";
        }
      }
    } else if (selftest->parsed()) {
      out << "# fsnet selftest\n";
      std::size_t failed = 0;
      for (const auto& check : run_selftest()) {
        out << (check.passed ? "PASS " : "FAIL ") << check.name << "  " << check.detail << "\n";
        if (!check.passed) ++failed;
      }
      out << "selftest.failed=" << failed << "\n";
      if (failed > 0) {
        err << "fsnet selftest: " << failed << " check(s) failed\n";
        return 2;
      }
    }
  } catch (const ValidationError& e) {
    err << "fsnet: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "fsnet: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace fsnet::cli
