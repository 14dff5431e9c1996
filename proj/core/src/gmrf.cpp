#include "gridwatch/gmrf.hpp"

#include <cmath>

namespace gridwatch {

Matrix PrecisionModel::covariance() const {
  Eigen::LLT<Matrix> llt(j);
  if (llt.info() != Eigen::Success)
    throw NumericError("precision matrix is not positive definite");
  return llt.solve(Matrix::Identity(j.rows(), j.cols()));
}

PrecisionModel precision_from_b(const SusceptanceMatrix& b, double sigma_p,
                                Channel channel) {
  if (!(sigma_p > 0)) throw Error("sigma_p must be positive");
  PrecisionModel m;
  m.j = (b.reduced.transpose() * b.reduced) / (sigma_p * sigma_p);
  m.sigma_p = sigma_p;
  m.channel = channel;
  m.mode = GraphMode::exact_two_hop;
  m.var_ids = b.var_ids;
  Eigen::LLT<Matrix> llt(m.j);
  if (llt.info() != Eigen::Success)
    throw NumericError("B_r' B_r is not positive definite (disconnected grid?)");
  return m;
}

PrecisionModel first_neighbor_precision(const SusceptanceMatrix& b, double sigma_p,
                                        Channel channel) {
  if (!(sigma_p > 0)) throw Error("sigma_p must be positive");
  PrecisionModel m;
  m.j = b.reduced / (sigma_p * sigma_p);
  m.sigma_p = sigma_p;
  m.channel = channel;
  m.mode = GraphMode::first_neighbor;
  m.var_ids = b.var_ids;
  Eigen::LLT<Matrix> llt(m.j);
  if (llt.info() != Eigen::Success)
    throw NumericError("B_r is not positive definite (disconnected grid?)");
  return m;
}

Matrix partial_correlations(const Matrix& j) {
  const int p = static_cast<int>(j.rows());
  Matrix r = Matrix::Zero(p, p);
  for (int a = 0; a < p; ++a)
    for (int c = a + 1; c < p; ++c) {
      const double v = -j(a, c) / std::sqrt(j(a, a) * j(c, c));
      r(a, c) = v;
      r(c, a) = v;
    }
  return r;
}

double walk_summability_alpha(const Matrix& r) {
  const Matrix abs_r = r.array().abs().matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(abs_r);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  return es.eigenvalues().array().abs().maxCoeff();
}

EdgeSet predicted_markov_graph(const PrecisionModel& model, double tol) {
  EdgeSet edges;
  const int p = static_cast<int>(model.j.rows());
  for (int a = 0; a < p; ++a)
    for (int c = a + 1; c < p; ++c)
      if (std::abs(model.j(a, c)) > tol)
        edges.insert(edge(model.var_ids[a], model.var_ids[c]));
  return edges;
}

EdgeSet predicted_markov_graph(const GridCase& gc, GraphMode mode) {
  const SusceptanceMatrix b = build_susceptance_matrix(gc);
  if (mode == GraphMode::first_neighbor) {
    EdgeSet edges;
    for (const auto& e : branch_adjacency(gc))
      if (e.first != gc.slack && e.second != gc.slack) edges.insert(e);
    return edges;
  }
  return predicted_markov_graph(precision_from_b(b, 1.0), 1e-9);
}

SampleMatrix sample_gmrf(const PrecisionModel& model, const SusceptanceMatrix& b,
                         int n, std::uint64_t seed, double noise_sigma) {
  if (n < 2) throw Error("need at least 2 samples");
  if (noise_sigma < 0) throw Error("noise_sigma must be nonnegative");
  const int p1 = static_cast<int>(b.var_ids.size());

  SampleMatrix out;
  out.var_ids = b.var_ids;
  out.seed = seed;
  out.corrupted.assign(n, 0);
  out.samples.resize(n, p1);

  // X_r = B_r^{-1} P_r sample by sample; one factorization serves all n.
  Eigen::LLT<Matrix> llt(b.reduced);
  if (llt.info() != Eigen::Success)
    throw NumericError("reduced susceptance matrix is not positive definite");

  NormalSampler gauss(seed);
  Vector p_r(p1);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < p1; ++i) p_r(i) = model.sigma_p * gauss();
    out.samples.row(k) = llt.solve(p_r).transpose();
  }
  if (noise_sigma > 0)
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < p1; ++i) out.samples(k, i) += noise_sigma * gauss();
  return out;
}

double conditional_covariance_exact(const Matrix& sigma, int i, int j,
                                    const std::vector<int>& s) {
  const int p = static_cast<int>(sigma.rows());
  if (i < 0 || i >= p || j < 0 || j >= p) throw Error("index out of range");
  for (int v : s) {
    if (v == i || v == j) throw Error("conditioning set contains i or j");
    if (v < 0 || v >= p) throw Error("conditioning index out of range");
  }
  if (s.empty()) return sigma(i, j);

  const int k = static_cast<int>(s.size());
  Matrix sss(k, k);
  Vector si(k), sj(k);
  for (int a = 0; a < k; ++a) {
    si(a) = sigma(i, s[a]);
    sj(a) = sigma(j, s[a]);
    for (int c = 0; c < k; ++c) sss(a, c) = sigma(s[a], s[c]);
  }
  Eigen::FullPivLU<Matrix> lu(sss);
  if (!lu.isInvertible()) throw NumericError("Sigma(S,S) is singular");
  return sigma(i, j) - si.dot(lu.solve(sj));
}

}  // namespace gridwatch
