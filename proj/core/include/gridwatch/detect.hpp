#pragma once

#include <vector>

#include "gridwatch/cct.hpp"
#include "gridwatch/common.hpp"
#include "gridwatch/grid_model.hpp"
#include "gridwatch/stream_cov.hpp"

namespace gridwatch {

struct DetectionReport {
  int area_id = 1;
  EdgeSet learned;
  EdgeSet reference;
  int distance = 0;
  bool alarm = false;
  int n_used = 0;
  CctConfig config;
  int tolerance = 0;  // alarm <=> distance > tolerance
};

DetectionReport detect(const CovAccumulator& acc, const EdgeSet& reference,
                       const CctConfig& cfg, int tolerance = 0, int area_id = 1);
DetectionReport detect(const Matrix& sigma, int n_used,
                       const std::vector<int>& var_ids, const EdgeSet& reference,
                       const CctConfig& cfg, int tolerance = 0, int area_id = 1);

// (Sigma + ridge I)^{-1}; throws NumericError when the result is not PD.
Matrix estimate_precision(const Matrix& sigma, double ridge);

// Per-variable expected KL divergence, under model A, between the two
// models' conditionals of variable i given the rest:
//   d_i = 1/2 [ ln(lA/lB) + lB/lA - 1 + lB u' W_A u ],
// lX = J_X(i,i), u = l_A/lA - l_B/lB (off-diagonal columns), W_A the
// covariance of the non-i variables under A.
Vector conditional_kl_divergences(const Matrix& j_a, const Matrix& sigma_a,
                                  const Matrix& j_b);

struct AnomalyReport {
  std::vector<int> var_ids;
  Vector scores;          // d_i with A = reference, B = attacked estimate
  Vector scores_reverse;  // d_i with the roles swapped, for diagnostics
  double threshold = 0.3;
  std::vector<int> flagged;  // bus ids with scores > threshold
  Matrix j_ref;
  Matrix j_att;
};

// Scores node-by-node how far the estimated (attacked) model's conditionals
// drifted from the reference model's, measured under the reference; attacked
// buses stand out because the injected noise inflates their conditional
// variance. The reverse direction is reported for diagnostics but not used
// for flagging: it mixes the attacked covariance into every neighbor's
// mean-mismatch term and swamps the per-bus signal.
AnomalyReport anomaly_scores(const Matrix& j_ref, const Matrix& sigma_ref,
                             const Matrix& j_att, const Matrix& sigma_att,
                             const std::vector<int>& var_ids,
                             double threshold = 0.3);

std::vector<int> localize(const AnomalyReport& report, double threshold = 0.3);

// Per-area detection over each sub-network's augmented variable set; the
// reference is the induced branch adjacency (slack excluded). Accumulators
// are matched to sub-networks by var_ids and must cover the augmented set.
std::vector<DetectionReport> run_decentralized(
    const std::vector<SubNetwork>& areas,
    const std::vector<CovAccumulator>& accs, const CctConfig& cfg,
    int tolerance = 0, int slack = 0);

}  // namespace gridwatch
