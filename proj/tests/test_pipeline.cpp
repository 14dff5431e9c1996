#include "gridwatch/pipeline.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "gridwatch/case_io.hpp"
#include "gridwatch/stream_cov.hpp"

using namespace gridwatch;

namespace {

GridCase load14() {
  return load_case_file(std::string(GRIDWATCH_DATA_DIR) + "/case14.m");
}

ProtocolConfig small_cfg() {
  ProtocolConfig cfg;
  cfg.tune_samples = 2000;
  cfg.mask_windows = 6;
  cfg.tolerance_windows = 6;
  return cfg;
}

}  // namespace

TEST_CASE("calibration produces a complete, deterministic detector") {
  GridCase gc = load14();
  TunedDetector a = calibrate_detector(gc, small_cfg(), 42);
  TunedDetector b = calibrate_detector(gc, small_cfg(), 42);

  CHECK(a.xi > 0.0);
  CHECK(a.xi == b.xi);
  CHECK(a.baseline == b.baseline);
  CHECK(a.mask == b.mask);
  CHECK(a.tolerance == b.tolerance);
  CHECK(a.var_ids.size() == 13);
  CHECK_FALSE(a.baseline.empty());
  CHECK(a.alpha == doctest::Approx(0.9655).epsilon(1e-3));
  CHECK(a.interval_low <= a.xi);
  CHECK(a.xi <= a.interval_high);
  CHECK(a.calibration_distances.size() == 6);

  for (const auto& e : a.baseline_masked) CHECK(a.mask.count(e) == 1);
  const int pairs = 13 * 12 / 2;
  CHECK(static_cast<int>(a.mask.size()) + a.masked_pairs == pairs);

  TunedDetector c = calibrate_detector(gc, small_cfg(), 43);
  CHECK(c.xi != a.xi);
}

TEST_CASE("tolerance rules apply to the calibration distances") {
  GridCase gc = load14();

  ProtocolConfig cfg = small_cfg();
  cfg.rule = ToleranceRule::second_max_plus_one;
  TunedDetector second = calibrate_detector(gc, cfg, 7);
  std::vector<int> sorted = second.calibration_distances;
  std::sort(sorted.begin(), sorted.end());
  CHECK(second.tolerance == sorted[sorted.size() - 2] + 1);

  cfg.rule = ToleranceRule::max_plus_zero;
  TunedDetector maxr = calibrate_detector(gc, cfg, 7);
  CHECK(maxr.tolerance == sorted.back());

  cfg.rule = ToleranceRule::fixed;
  cfg.tolerance = 11;
  CHECK(calibrate_detector(gc, cfg, 7).tolerance == 11);
}

TEST_CASE("disabling the stability mask keeps every pair") {
  GridCase gc = load14();
  ProtocolConfig cfg = small_cfg();
  cfg.stable_pair_mask = false;
  TunedDetector det = calibrate_detector(gc, cfg, 7);
  CHECK(det.masked_pairs == 0);
  CHECK(det.baseline_masked == det.baseline);
}

TEST_CASE("calibration validates its configuration") {
  GridCase gc = load14();
  ProtocolConfig cfg = small_cfg();
  cfg.window = 1;
  CHECK_THROWS_AS(calibrate_detector(gc, cfg, 1), ConfigError);
  cfg = small_cfg();
  cfg.tune_samples = 1;
  CHECK_THROWS_AS(calibrate_detector(gc, cfg, 1), ConfigError);
  cfg = small_cfg();
  cfg.mask_windows = -1;
  CHECK_THROWS_AS(calibrate_detector(gc, cfg, 1), ConfigError);
}

TEST_CASE("a fixed threshold or an explicit grid bypasses the default tuning") {
  GridCase gc = load14();
  ProtocolConfig cfg = small_cfg();
  TunedDetector tuned = calibrate_detector(gc, cfg, 42);

  cfg.fixed_xi = tuned.xi;
  TunedDetector fixed = calibrate_detector(gc, cfg, 42);
  CHECK(fixed.xi == tuned.xi);
  CHECK(fixed.baseline == tuned.baseline);
  CHECK(fixed.tolerance == tuned.tolerance);
  CHECK(fixed.interval_low == fixed.interval_high);

  ProtocolConfig grid = small_cfg();
  grid.xi_grid = {tuned.xi};
  TunedDetector gridded = calibrate_detector(gc, grid, 42);
  CHECK(gridded.xi == tuned.xi);
  CHECK(gridded.baseline == tuned.baseline);

  cfg.xi_grid = {0.1, 0.2};
  CHECK_THROWS_AS(calibrate_detector(gc, cfg, 42), ConfigError);
  cfg.xi_grid.clear();
  cfg.fixed_xi = -0.5;
  CHECK_THROWS_AS(calibrate_detector(gc, cfg, 42), ConfigError);
}

TEST_CASE("an unreachable tuning bound raises TuningError") {
  GridCase gc = load14();
  ProtocolConfig cfg = small_cfg();
  cfg.max_tuned_distance = 0;
  CHECK_THROWS_AS(calibrate_detector(gc, cfg, 1), TuningError);
}

TEST_CASE("masked distance ignores pairs outside the mask") {
  TunedDetector det;
  det.mask = {{1, 2}, {2, 3}};
  det.baseline_masked = {{1, 2}};
  CHECK(det.masked_distance({{1, 2}}) == 0);
  CHECK(det.masked_distance({{1, 2}, {7, 9}}) == 0);  // unstable pair ignored
  CHECK(det.masked_distance({{2, 3}}) == 2);
  CHECK(det.masked_distance({}) == 1);
}

TEST_CASE("sweep tasks are deterministic and attack-sensitive") {
  GridCase gc = load14();
  SusceptanceMatrix b = build_susceptance_matrix(gc);
  TunedDetector det = calibrate_detector(gc, small_cfg(), 42);
  auto subsets = enumerate_connected_subsets(gc, 2, 6);

  SweepOutcome one = run_sweep_task(gc, b, det, subsets, 0.7, 130, 3, 0.03, 0.0, 999);
  SweepOutcome two = run_sweep_task(gc, b, det, subsets, 0.7, 130, 3, 0.03, 0.0, 999);
  CHECK(one.subset == two.subset);
  CHECK(one.distance == two.distance);
  CHECK(one.alarm == two.alarm);
  CHECK(one.corrupted == 130);
  CHECK(one.rep == 3);
  CHECK(std::find(subsets.begin(), subsets.end(), one.subset) != subsets.end());
  CHECK(one.alarm == (one.distance > det.tolerance));

  SweepOutcome other = run_sweep_task(gc, b, det, subsets, 0.7, 130, 4, 0.03, 0.0, 1000);
  CHECK((other.subset != one.subset || other.distance != one.distance));

  CHECK_THROWS_AS(run_sweep_task(gc, b, det, {}, 0.7, 130, 0, 0.03, 0.0, 1), Error);
}

TEST_CASE("a heavy corruption raises the alarm; a clean window does not") {
  GridCase gc = load14();
  SusceptanceMatrix b = build_susceptance_matrix(gc);
  ProtocolConfig cfg;
  cfg.tune_samples = 2000;
  cfg.mask_windows = 20;
  cfg.tolerance_windows = 20;
  TunedDetector det = calibrate_detector(gc, cfg, 1);
  auto subsets = enumerate_connected_subsets(gc, 2, 6);

  int clean_alarms = 0, attacked_alarms = 0;
  for (int r = 0; r < 10; ++r) {
    clean_alarms +=
        run_sweep_task(gc, b, det, subsets, 0.7, 0, r, 0.03, 0.0,
                       derive_seed(1, {3, 0, static_cast<std::uint64_t>(r)}))
            .alarm;
    attacked_alarms +=
        run_sweep_task(gc, b, det, subsets, 0.7, 200, r, 0.03, 0.0,
                       derive_seed(1, {3, 200, static_cast<std::uint64_t>(r)}))
            .alarm;
  }
  CHECK(clean_alarms <= 1);
  CHECK(attacked_alarms >= 9);
}

TEST_CASE("anomaly tasks rank and flag the attacked buses") {
  GridCase gc = load14();
  SusceptanceMatrix b = build_susceptance_matrix(gc);
  for (std::uint64_t r = 0; r < 5; ++r) {
    AnomalyOutcome out = run_anomaly_task(gc, b, {4, 5, 6}, 0.7, 500, 500, 0.03,
                                          0.0, 0.3, derive_seed(1, {4, r}));
    CHECK(out.scores.size() == 13);
    CHECK(out.top_k_attacked);
    CHECK(out.flagged_exactly);
    CHECK(out.flagged == std::vector<int>{4, 5, 6});
    CHECK(out.scores(b.var_pos(5)) > 0.3);
    CHECK(out.scores(b.var_pos(13)) < 0.3);
  }

  AnomalyOutcome a = run_anomaly_task(gc, b, {4, 5, 6}, 0.7, 500, 500, 0.03, 0.0,
                                      0.3, 77);
  AnomalyOutcome c = run_anomaly_task(gc, b, {4, 5, 6}, 0.7, 500, 500, 0.03, 0.0,
                                      0.3, 77);
  CHECK(a.scores == c.scores);
}

TEST_CASE("anomaly scores grow with the attack size") {
  GridCase gc = load14();
  SusceptanceMatrix b = build_susceptance_matrix(gc);
  double prev = 0.0;
  for (double size : {0.3, 0.5, 0.7, 1.0}) {
    AnomalyOutcome out =
        run_anomaly_task(gc, b, {4, 5, 6}, size, 500, 500, 0.03, 0.0, 0.3, 5);
    const double attacked_mean = (out.scores(b.var_pos(4)) + out.scores(b.var_pos(5)) +
                                  out.scores(b.var_pos(6))) /
                                 3.0;
    CHECK(attacked_mean > prev);
    prev = attacked_mean;
    CHECK(out.top_k_attacked);
  }
}
