#include "gridwatch/stream_cov.hpp"

namespace gridwatch {

CovAccumulator::CovAccumulator(int dim, WindowMode mode, int window,
                               std::vector<int> var_ids)
    : dim_(dim), mode_(mode), window_(window), var_ids_(std::move(var_ids)) {
  if (dim <= 0) throw Error("accumulator dimension must be positive");
  if (mode == WindowMode::sliding && window < 2)
    throw Error("sliding window needs size >= 2");
  if (!var_ids_.empty() && static_cast<int>(var_ids_.size()) != dim)
    throw Error("var_ids length does not match dimension");
  mean_ = Vector::Zero(dim);
  m2_ = Matrix::Zero(dim, dim);
}

void CovAccumulator::update(const Vector& x) {
  if (x.size() != dim_) throw Error("sample dimension mismatch");
  if (mode_ == WindowMode::sliding) {
    fifo_.push_back(x);
    if (static_cast<int>(fifo_.size()) > window_) {
      fifo_.pop_front();
      recompute_from_window();
      return;
    }
  }
  ++n_;
  const Vector delta = x - mean_;
  mean_ += delta / n_;
  m2_ += delta * (x - mean_).transpose();
}

void CovAccumulator::recompute_from_window() {
  n_ = static_cast<int>(fifo_.size());
  Matrix xs(n_, dim_);
  for (int k = 0; k < n_; ++k) xs.row(k) = fifo_[k].transpose();
  mean_ = xs.colwise().mean().transpose();
  const Matrix centered = xs.rowwise() - mean_.transpose();
  m2_ = centered.transpose() * centered;
}

Vector CovAccumulator::mean() const {
  if (n_ < 1) throw NumericError("no samples");
  return mean_;
}

Matrix CovAccumulator::covariance() const {
  if (n_ < 2) throw NumericError("covariance needs n >= 2");
  // Welford's M2 skews symmetry by roundoff only; report the symmetric part.
  const Matrix c = m2_ / (n_ - 1);
  return 0.5 * (c + c.transpose());
}

Matrix batch_covariance(const Matrix& samples) {
  const int n = static_cast<int>(samples.rows());
  if (n < 2) throw NumericError("covariance needs n >= 2");
  const Eigen::RowVectorXd mean = samples.colwise().mean();
  const Matrix centered = samples.rowwise() - mean;
  return centered.transpose() * centered / (n - 1);
}

double conditional_covariance(const Matrix& sigma, int i, int j,
                              const std::vector<int>& s, double ridge_rel) {
  const int p = static_cast<int>(sigma.rows());
  if (i < 0 || i >= p || j < 0 || j >= p) throw Error("index out of range");
  for (int v : s)
    if (v == i || v == j) throw Error("conditioning set contains i or j");
  if (s.empty()) return sigma(i, j);

  const int k = static_cast<int>(s.size());
  Matrix sss(k, k);
  Vector si(k), sj(k);
  for (int a = 0; a < k; ++a) {
    si(a) = sigma(i, s[a]);
    sj(a) = sigma(j, s[a]);
    for (int c = 0; c < k; ++c) sss(a, c) = sigma(s[a], s[c]);
  }
  sss.diagonal().array() += ridge_rel * sss.trace() / k;
  return sigma(i, j) - si.dot(sss.ldlt().solve(sj));
}

Matrix conditional_covariance_all(const Matrix& sigma, const std::vector<int>& s,
                                  double ridge_rel) {
  if (s.empty()) return sigma;
  const int p = static_cast<int>(sigma.rows());
  const int k = static_cast<int>(s.size());
  Matrix cols(p, k);
  Matrix sss(k, k);
  for (int a = 0; a < k; ++a) {
    cols.col(a) = sigma.col(s[a]);
    for (int c = 0; c < k; ++c) sss(a, c) = sigma(s[a], s[c]);
  }
  sss.diagonal().array() += ridge_rel * sss.trace() / k;
  return sigma - cols * sss.ldlt().solve(cols.transpose());
}

}  // namespace gridwatch
