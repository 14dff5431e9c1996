#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gridwatch/case_io.hpp"
#include "gridwatch/pipeline.hpp"
#include "gridwatch/stream_cov.hpp"

namespace gridwatch::cli {

// Everything an experiment needs, read from one JSON file. Relative paths
// inside the manifest resolve against the manifest's own directory, so a
// manifest can be invoked from anywhere.
struct Manifest {
  std::filesystem::path dir;
  std::uint32_t crc = 0;  // CRC-32 of the manifest bytes, stamped on outputs
  std::string case_path;
  Channel channel = Channel::angle_active;
  double sigma_p = 0.03;
  double sigma_q = 0.03;
  double noise_sigma = 0.0;
  int eta = 2;
  WindowMode window_mode = WindowMode::sliding;
  int window = 500;
  std::uint64_t seed = 1;
  std::string out_dir = "out";  // --out wins when both are given

  // tuning
  int tune_samples = 2000;
  int mask_windows = 20;
  int tolerance_windows = 20;
  ToleranceRule rule = ToleranceRule::second_max_plus_one;
  int tolerance = 0;
  bool stable_pair_mask = true;
  double fixed_xi = 0.0;
  std::vector<double> xi_grid;
  int max_tuned_distance = -1;

  // sweep
  int kmin = 2;
  int kmax = 6;
  std::vector<double> sweep_sizes = {0.7};
  std::vector<int> sweep_corrupted = {0, 30, 130};
  int sweep_reps = 100;

  // anomaly
  std::vector<int> anomaly_buses;
  std::vector<double> anomaly_sizes = {0.7};
  double threshold = 0.3;
  int anomaly_corrupted = -1;  // -1: corrupt the whole window
  int anomaly_reps = 100;

  GridCase load_case() const;
  double sigma() const;  // sigma_p or sigma_q, by channel
  ProtocolConfig protocol() const;
};

Manifest load_manifest(const std::string& path);

Channel channel_from_string(const std::string& name);
const char* channel_prefix(Channel channel);  // CSV column prefix

}  // namespace gridwatch::cli
