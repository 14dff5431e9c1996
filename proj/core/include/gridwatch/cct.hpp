#pragma once

#include <vector>

#include "gridwatch/common.hpp"
#include "gridwatch/gmrf.hpp"
#include "gridwatch/stream_cov.hpp"

namespace gridwatch {

// Conditional covariance test parameters. The per-pair witness is the
// normalized conditional covariance (a conditional partial correlation)
//   min over |S| <= eta of |C_S(i,j)| / sqrt(C_S(i,i) C_S(j,j)),
// so xi is dimensionless in (0,1) and one threshold serves all pairs
// regardless of the spread in angle variances.
struct CctConfig {
  double xi = 0.05;
  int eta = 2;
  double ridge_rel = 1e-10;
};

struct MarkovGraph {
  EdgeSet edges;     // bus-id pairs
  Matrix witnesses;  // symmetric, diag 0, indexed like var_ids
  std::vector<int> var_ids;
};

// Minimized normalized conditional covariance for every pair. eta must
// satisfy 0 <= eta <= p-3 (p = variable count).
Matrix witness_matrix(const Matrix& sigma, int eta, double ridge_rel = 1e-10);

// Edges where the witness exceeds xi.
MarkovGraph run_cct(const Matrix& sigma, const CctConfig& cfg,
                    const std::vector<int>& var_ids);
MarkovGraph run_cct(const CovAccumulator& acc, const CctConfig& cfg);

// |A symmetric-difference B|.
int edit_distance(const EdgeSet& a, const EdgeSet& b);

struct TuningResult {
  double xi = 0.0;
  int achieved_distance = 0;
  // Widest xi interval achieving the minimum distance; xi is its midpoint.
  double interval_low = 0.0;
  double interval_high = 0.0;
  EdgeSet learned;   // graph at the tuned xi
  Matrix witnesses;
  bool failed = false;  // achieved_distance >= max_distance bound
  int max_distance = 0;
};

// Pick xi by edit distance to a reference graph on clean data: evaluate the
// candidate grid (default: midpoints between consecutive distinct witness
// values), take the widest interval achieving the minimum distance, return
// its midpoint. Tuning fails (failed = true) when no candidate beats
// max_distance; the default bound is |reference|, i.e. learning nothing.
TuningResult tune_threshold(const Matrix& sigma_clean, const EdgeSet& reference,
                            int eta, const std::vector<int>& var_ids,
                            const std::vector<double>& xi_grid = {},
                            int max_distance = -1);
TuningResult tune_threshold(const SampleMatrix& clean, const EdgeSet& reference,
                            int eta, const std::vector<double>& xi_grid = {},
                            int max_distance = -1);

// n = ceil(C * j_min^-2 * ln p); sample-size guidance only, never enforced.
long min_sample_guidance(double j_min, int p, double c = 1.0);

}  // namespace gridwatch
