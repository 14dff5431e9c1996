#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"
#include "gridwatch/common.hpp"
#include "manifest.hpp"

namespace cli = gridwatch::cli;

namespace {

void add_common_flags(CLI::App* sub, cli::Options& opt) {
  sub->add_option("--manifest", opt.manifest_path, "experiment manifest (JSON)")
      ->required();
  sub->add_option("--seed", opt.seed, "master seed (overrides the manifest)");
  sub->add_option("--out", opt.out, "output directory (overrides the manifest)");
  sub->add_option("--reps", opt.reps, "repetitions (overrides the manifest)");
  sub->add_option("--channel", opt.channel,
                  "measurement channel (overrides the manifest)")
      ->check(CLI::IsMember({"angle", "voltage"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridwatch: stealthy data-injection detection for grid state "
               "estimation"};
  app.require_subcommand(1);
  cli::Options opt;

  CLI::App* parse = app.add_subcommand(
      "parse", "read a case file and write its canonical JSON form");
  CLI::App* predict = app.add_subcommand(
      "predict-graph", "write the predicted Markov graphs for a case");
  CLI::App* tune = app.add_subcommand(
      "tune", "calibrate a detector on clean data and write the result");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "generate one measurement window, optionally attacked");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "map detection rate across attack sizes and corruption counts");
  CLI::App* anomaly = app.add_subcommand(
      "anomaly", "average per-bus anomaly scores over repeated attacks");
  CLI::App* detect = app.add_subcommand(
      "detect", "run the detector over one window and report the verdict");

  for (CLI::App* sub :
       {parse, predict, tune, simulate, sweep, anomaly, detect})
    add_common_flags(sub, opt);
  sweep->add_option("--threads", opt.threads, "worker threads (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
  for (CLI::App* sub : {simulate, detect})
    sub->add_option("--corrupted", opt.corrupted,
                    "attacked samples at the window tail")
        ->check(CLI::NonNegativeNumber);
  simulate->add_option("--attack-size", opt.attack_size,
                       "attack magnitude (0 = first configured size)");
  detect->add_option("--input", opt.input,
                     "samples CSV to analyze (default: simulate one window)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cli::Manifest mf = cli::load_manifest(opt.manifest_path);
    if (opt.seed) mf.seed = *opt.seed;
    if (opt.channel) mf.channel = cli::channel_from_string(*opt.channel);
    if (opt.reps && *opt.reps < 1)
      throw gridwatch::ConfigError("--reps must be at least 1");

    if (app.got_subcommand(parse)) return cli::cmd_parse(mf, opt);
    if (app.got_subcommand(predict)) return cli::cmd_predict_graph(mf, opt);
    if (app.got_subcommand(tune)) return cli::cmd_tune(mf, opt);
    if (app.got_subcommand(simulate)) return cli::cmd_simulate(mf, opt);
    if (app.got_subcommand(sweep)) return cli::cmd_sweep(mf, opt);
    if (app.got_subcommand(anomaly)) return cli::cmd_anomaly(mf, opt);
    if (app.got_subcommand(detect)) return cli::cmd_detect(mf, opt);
    return 2;
  } catch (const gridwatch::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const gridwatch::TuningError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
