#pragma once

#include <deque>
#include <vector>

#include "gridwatch/common.hpp"

namespace gridwatch {

enum class WindowMode { growing, sliding };

// Streaming mean/covariance accumulator (Welford update on the centered
// second-moment matrix). In sliding mode the accumulator keeps a FIFO of the
// last `window` samples and recomputes the sufficient statistics exactly when
// a sample is evicted.
class CovAccumulator {
 public:
  explicit CovAccumulator(int dim, WindowMode mode = WindowMode::growing,
                          int window = 0, std::vector<int> var_ids = {});

  void update(const Vector& x);
  int n() const { return n_; }
  int dim() const { return dim_; }
  WindowMode mode() const { return mode_; }
  Vector mean() const;
  // Unbiased estimator (sum xx' - n mean mean') / (n-1); requires n >= 2.
  Matrix covariance() const;
  const std::vector<int>& var_ids() const { return var_ids_; }

 private:
  void recompute_from_window();

  int dim_;
  WindowMode mode_;
  int window_;
  std::vector<int> var_ids_;
  int n_ = 0;
  Vector mean_;
  Matrix m2_;  // sum of (x-mean)(x-mean)'
  std::deque<Vector> fifo_;
};

// Unbiased covariance of a sample matrix (rows = samples).
Matrix batch_covariance(const Matrix& samples);

// Sample conditional covariance Sigma(i,j|S) with a relative ridge on the
// Sigma(S,S) solve (ridge_rel * trace/|S|) as a guard for near-singular
// conditioning blocks. S must not contain i or j.
double conditional_covariance(const Matrix& sigma, int i, int j,
                              const std::vector<int>& s,
                              double ridge_rel = 1e-10);

// All-pairs conditional covariance for one conditioning set: the rank-|S|
// update Sigma - Sigma(:,S) Sigma(S,S)^{-1} Sigma(S,:). Rows/columns in S are
// meaningless for the caller and returned as-is.
Matrix conditional_covariance_all(const Matrix& sigma, const std::vector<int>& s,
                                  double ridge_rel = 1e-10);

}  // namespace gridwatch
