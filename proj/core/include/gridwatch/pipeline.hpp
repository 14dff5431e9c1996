#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gridwatch/attack.hpp"
#include "gridwatch/cct.hpp"
#include "gridwatch/detect.hpp"
#include "gridwatch/gmrf.hpp"

namespace gridwatch {

// How the alarm tolerance is set from the calibration-window distances.
// second_max_plus_one trades a little detection for a near-zero false-alarm
// floor; max_plus_zero keeps the tolerance tight when the null distances are
// concentrated; fixed uses ProtocolConfig::tolerance as-is.
enum class ToleranceRule { second_max_plus_one, max_plus_zero, fixed };

// Full detection protocol: tune xi against the reference topology on a long
// clean stream, freeze the learned baseline graph, drop the pairs whose edge
// decision flickers across clean calibration windows, then calibrate the
// alarm tolerance on fresh clean windows.
struct ProtocolConfig {
  int eta = 2;
  int window = 500;
  int tune_samples = 2000;
  int mask_windows = 20;       // windows used to find decision-stable pairs
  int tolerance_windows = 20;  // windows used to calibrate the tolerance
  ToleranceRule rule = ToleranceRule::second_max_plus_one;
  int tolerance = 0;  // used when rule == fixed
  bool stable_pair_mask = true;
  double sigma_p = 0.03;
  double noise_sigma = 0.0;
  Channel channel = Channel::angle_active;
  GraphMode reference = GraphMode::first_neighbor;
  int max_tuned_distance = -1;  // -1: default bound (|reference| edges)
  double ridge_rel = 1e-10;
  double fixed_xi = 0.0;        // > 0: skip tuning and use this threshold
  std::vector<double> xi_grid;  // explicit tuning grid (default: data-driven)
};

struct TunedDetector {
  double xi = 0.0;
  int eta = 2;
  int window = 500;
  double ridge_rel = 1e-10;
  std::vector<int> var_ids;
  EdgeSet baseline;         // CCT output at xi on the tuning stream
  std::set<std::pair<int, int>> mask;  // decision-stable pairs (bus ids)
  EdgeSet baseline_masked;  // baseline restricted to the mask
  int tolerance = 0;
  // Diagnostics.
  int tuned_distance = 0;   // edit distance to the reference topology
  double interval_low = 0.0;
  double interval_high = 0.0;
  double alpha = 0.0;       // walk-summability of the reference model
  int masked_pairs = 0;     // pairs removed by the stability mask
  std::vector<int> calibration_distances;

  // Edit distance restricted to the stable pairs.
  int masked_distance(const EdgeSet& learned) const;
  // Learn a graph from a window covariance and compare against the baseline.
  DetectionReport evaluate(const Matrix& sigma, int n_used) const;
};

// Runs the whole calibration (tuning stream, mask windows, tolerance
// windows) with sample streams derived from `seed`. Throws Error on tuning
// failure.
TunedDetector calibrate_detector(const GridCase& gc, const ProtocolConfig& cfg,
                                 std::uint64_t seed);

// One sweep cell: a window with `corrupted` attacked samples at the tail,
// evaluated through the detector.
struct SweepOutcome {
  int corrupted = 0;
  int rep = 0;
  std::vector<int> subset;
  double attack_size = 0.0;
  int distance = 0;
  bool alarm = false;
};

// Draw a random connected attacked subset (size in [kmin, kmax]), corrupt
// the trailing `corrupted` samples of a fresh clean window, and evaluate.
// Fully determined by `task_seed`.
SweepOutcome run_sweep_task(const GridCase& gc, const SusceptanceMatrix& b,
                            const TunedDetector& det,
                            const std::vector<std::vector<int>>& subsets,
                            double attack_size, int corrupted, int rep,
                            double sigma_p, double noise_sigma,
                            std::uint64_t task_seed);

struct AnomalyOutcome {
  Vector scores;               // per-variable, indexed like var_ids
  std::vector<int> flagged;    // bus ids over the threshold
  bool top_k_attacked = false; // attacked buses hold the top-|A| scores
  bool flagged_exactly = false;
};

// One localization rep: corrupt `corrupted` samples (default: the whole
// window) on a fixed attacked set, estimate the precision from the window,
// and score nodes against the physical reference model.
AnomalyOutcome run_anomaly_task(const GridCase& gc, const SusceptanceMatrix& b,
                                const std::vector<int>& attacked,
                                double attack_size, int window, int corrupted,
                                double sigma_p, double noise_sigma,
                                double threshold, std::uint64_t task_seed);

}  // namespace gridwatch
