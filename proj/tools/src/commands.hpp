#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "manifest.hpp"

namespace gridwatch::cli {

// Flags shared across subcommands plus the few subcommand-specific ones.
// Optionals override the manifest when set.
struct Options {
  std::string manifest_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  std::optional<std::string> channel;
  int threads = 0;          // sweep workers; 0 = all cores
  int corrupted = 0;        // simulate/detect: attacked tail length
  double attack_size = 0.0; // simulate: 0 = first anomaly size
  std::string input;        // detect: samples CSV; empty = self-simulate
};

int cmd_parse(const Manifest& mf, const Options& opt);
int cmd_predict_graph(const Manifest& mf, const Options& opt);
int cmd_tune(const Manifest& mf, const Options& opt);
int cmd_simulate(const Manifest& mf, const Options& opt);
int cmd_sweep(const Manifest& mf, const Options& opt);
int cmd_anomaly(const Manifest& mf, const Options& opt);
int cmd_detect(const Manifest& mf, const Options& opt);

}  // namespace gridwatch::cli
