#include "gridwatch/pipeline.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "gridwatch/stream_cov.hpp"

namespace gridwatch {

namespace {

EdgeSet all_pairs(const std::vector<int>& var_ids) {
  EdgeSet out;
  for (size_t a = 0; a < var_ids.size(); ++a)
    for (size_t c = a + 1; c < var_ids.size(); ++c)
      out.insert(edge(var_ids[a], var_ids[c]));
  return out;
}

// Pairs whose edge decision matches the baseline in every window graph.
EdgeSet stable_pairs(const std::vector<int>& var_ids, const EdgeSet& baseline,
                     const std::vector<EdgeSet>& windows) {
  EdgeSet mask;
  for (const auto& pr : all_pairs(var_ids)) {
    const bool base = baseline.count(pr) > 0;
    bool stable = true;
    for (const auto& w : windows) {
      if ((w.count(pr) > 0) != base) {
        stable = false;
        break;
      }
    }
    if (stable) mask.insert(pr);
  }
  return mask;
}

EdgeSet restrict_to(const EdgeSet& graph, const EdgeSet& mask) {
  EdgeSet out;
  for (const auto& e : graph)
    if (mask.count(e)) out.insert(e);
  return out;
}

}  // namespace

int TunedDetector::masked_distance(const EdgeSet& learned) const {
  return edit_distance(restrict_to(learned, mask), baseline_masked);
}

DetectionReport TunedDetector::evaluate(const Matrix& sigma, int n_used) const {
  const CctConfig cfg{xi, eta, ridge_rel};
  DetectionReport rep;
  rep.learned = run_cct(sigma, cfg, var_ids).edges;
  rep.reference = baseline_masked;
  rep.config = cfg;
  rep.tolerance = tolerance;
  rep.n_used = n_used;
  rep.distance = masked_distance(rep.learned);
  rep.alarm = rep.distance > tolerance;
  return rep;
}

TunedDetector calibrate_detector(const GridCase& gc, const ProtocolConfig& cfg,
                                 std::uint64_t seed) {
  if (cfg.window < 2) throw ConfigError("window must hold at least two samples");
  if (cfg.tune_samples < 2) throw ConfigError("tuning stream too short");
  if (cfg.mask_windows < 0 || cfg.tolerance_windows < 0)
    throw ConfigError("window counts must be nonnegative");
  if (cfg.fixed_xi < 0.0) throw ConfigError("fixed xi must be positive");
  if (cfg.fixed_xi > 0.0 && !cfg.xi_grid.empty())
    throw ConfigError("fixed xi and a tuning grid are mutually exclusive");

  const SusceptanceMatrix b = build_susceptance_matrix(gc);
  const PrecisionModel model = precision_from_b(b, cfg.sigma_p, cfg.channel);
  const EdgeSet reference = predicted_markov_graph(gc, cfg.reference);

  TunedDetector det;
  det.eta = cfg.eta;
  det.window = cfg.window;
  det.ridge_rel = cfg.ridge_rel;
  det.var_ids = b.var_ids;

  const PrecisionModel fn = first_neighbor_precision(b, cfg.sigma_p, cfg.channel);
  det.alpha = walk_summability_alpha(partial_correlations(fn.j));

  const SampleMatrix tuning = sample_gmrf(model, b, cfg.tune_samples,
                                          derive_seed(seed, {0}), cfg.noise_sigma);
  TuningResult tr;
  if (cfg.fixed_xi > 0.0) {
    const CctConfig fixed{cfg.fixed_xi, cfg.eta, cfg.ridge_rel};
    tr.xi = tr.interval_low = tr.interval_high = cfg.fixed_xi;
    tr.learned = run_cct(batch_covariance(tuning.samples), fixed, b.var_ids).edges;
    tr.achieved_distance = edit_distance(tr.learned, reference);
  } else {
    tr = tune_threshold(tuning, reference, cfg.eta, cfg.xi_grid,
                        cfg.max_tuned_distance);
  }
  if (tr.failed)
    throw TuningError("threshold tuning failed: best edit distance " +
                      std::to_string(tr.achieved_distance) +
                      " does not beat the bound " +
                      std::to_string(tr.max_distance));
  det.xi = tr.xi;
  det.tuned_distance = tr.achieved_distance;
  det.interval_low = tr.interval_low;
  det.interval_high = tr.interval_high;
  det.baseline = tr.learned;

  const CctConfig ccfg{det.xi, det.eta, det.ridge_rel};

  std::vector<EdgeSet> graphs;
  graphs.reserve(cfg.mask_windows);
  for (int w = 0; w < cfg.mask_windows; ++w) {
    const SampleMatrix win =
        sample_gmrf(model, b, cfg.window,
                    derive_seed(seed, {1, static_cast<std::uint64_t>(w)}),
                    cfg.noise_sigma);
    graphs.push_back(run_cct(batch_covariance(win.samples), ccfg, b.var_ids).edges);
  }
  det.mask = cfg.stable_pair_mask ? stable_pairs(b.var_ids, det.baseline, graphs)
                                  : all_pairs(b.var_ids);
  const int p = static_cast<int>(b.var_ids.size());
  det.masked_pairs = p * (p - 1) / 2 - static_cast<int>(det.mask.size());
  det.baseline_masked = restrict_to(det.baseline, det.mask);

  std::vector<int>& dists = det.calibration_distances;
  dists.reserve(cfg.tolerance_windows);
  for (int w = 0; w < cfg.tolerance_windows; ++w) {
    const SampleMatrix win =
        sample_gmrf(model, b, cfg.window,
                    derive_seed(seed, {2, static_cast<std::uint64_t>(w)}),
                    cfg.noise_sigma);
    dists.push_back(det.masked_distance(
        run_cct(batch_covariance(win.samples), ccfg, b.var_ids).edges));
  }
  std::vector<int> sorted = dists;
  std::sort(sorted.begin(), sorted.end());
  switch (cfg.rule) {
    case ToleranceRule::second_max_plus_one:
      if (sorted.empty())
        det.tolerance = 1;
      else if (sorted.size() == 1)
        det.tolerance = sorted.back() + 1;
      else
        det.tolerance = sorted[sorted.size() - 2] + 1;
      break;
    case ToleranceRule::max_plus_zero:
      det.tolerance = sorted.empty() ? 0 : sorted.back();
      break;
    case ToleranceRule::fixed:
      det.tolerance = cfg.tolerance;
      break;
  }
  return det;
}

SweepOutcome run_sweep_task(const GridCase&, const SusceptanceMatrix& b,
                            const TunedDetector& det,
                            const std::vector<std::vector<int>>& subsets,
                            double attack_size, int corrupted, int rep,
                            double sigma_p, double noise_sigma,
                            std::uint64_t task_seed) {
  if (subsets.empty()) throw Error("no candidate attack subsets");
  std::mt19937_64 rng(task_seed);
  const std::vector<int>& subset = subsets[rng() % subsets.size()];

  const PrecisionModel model = precision_from_b(b, sigma_p);
  SampleMatrix win = sample_gmrf(model, b, det.window,
                                 derive_seed(task_seed, {1}), noise_sigma);
  SweepOutcome out;
  out.corrupted = corrupted;
  out.rep = rep;
  out.subset = subset;
  out.attack_size = attack_size;
  if (corrupted > 0 && attack_size > 0) {
    const AttackSpec spec = build_attack(b, subset, attack_size, corrupted,
                                         derive_seed(task_seed, {2}));
    win = corrupt_samples(win, spec, b);
  }
  const DetectionReport report = det.evaluate(
      batch_covariance(win.samples), static_cast<int>(win.samples.rows()));
  out.distance = report.distance;
  out.alarm = report.alarm;
  return out;
}

AnomalyOutcome run_anomaly_task(const GridCase&, const SusceptanceMatrix& b,
                                const std::vector<int>& attacked,
                                double attack_size, int window, int corrupted,
                                double sigma_p, double noise_sigma,
                                double threshold, std::uint64_t task_seed) {
  const PrecisionModel model = precision_from_b(b, sigma_p);
  SampleMatrix win = sample_gmrf(model, b, window, derive_seed(task_seed, {1}),
                                 noise_sigma);
  if (corrupted < 0) corrupted = window;
  const AttackSpec spec = build_attack(b, attacked, attack_size, corrupted,
                                       derive_seed(task_seed, {2}));
  win = corrupt_samples(win, spec, b);

  Matrix sigma_att = batch_covariance(win.samples);
  const double ridge = 1e-6 * sigma_att.trace() / sigma_att.rows();
  const Matrix j_att = estimate_precision(sigma_att, ridge);
  sigma_att.diagonal().array() += ridge;

  const AnomalyReport rep = anomaly_scores(model.j, model.covariance(), j_att,
                                           sigma_att, b.var_ids, threshold);

  AnomalyOutcome out;
  out.scores = rep.scores;
  out.flagged = rep.flagged;

  std::vector<int> order(b.var_ids.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(),
            [&](int a, int c) { return rep.scores(a) > rep.scores(c); });
  std::vector<int> top;
  for (size_t i = 0; i < spec.buses.size() && i < order.size(); ++i)
    top.push_back(b.var_ids[order[i]]);
  std::sort(top.begin(), top.end());
  out.top_k_attacked = top == spec.buses;
  out.flagged_exactly = rep.flagged == spec.buses;
  return out;
}

}  // namespace gridwatch
