#include "gridwatch/detect.hpp"

#include <algorithm>
#include <cmath>

namespace gridwatch {

DetectionReport detect(const Matrix& sigma, int n_used,
                       const std::vector<int>& var_ids, const EdgeSet& reference,
                       const CctConfig& cfg, int tolerance, int area_id) {
  DetectionReport rep;
  rep.area_id = area_id;
  rep.reference = reference;
  rep.config = cfg;
  rep.tolerance = tolerance;
  rep.n_used = n_used;
  rep.learned = run_cct(sigma, cfg, var_ids).edges;
  rep.distance = edit_distance(rep.learned, reference);
  rep.alarm = rep.distance > tolerance;
  return rep;
}

DetectionReport detect(const CovAccumulator& acc, const EdgeSet& reference,
                       const CctConfig& cfg, int tolerance, int area_id) {
  return detect(acc.covariance(), acc.n(), acc.var_ids(), reference, cfg,
                tolerance, area_id);
}

Matrix estimate_precision(const Matrix& sigma, double ridge) {
  if (sigma.rows() != sigma.cols()) throw Error("covariance must be square");
  if (ridge < 0) throw Error("ridge must be nonnegative");
  Matrix a = 0.5 * (sigma + sigma.transpose());
  a.diagonal().array() += ridge;
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success)
    throw NumericError("covariance not positive definite after ridge");
  Matrix j = llt.solve(Matrix::Identity(a.rows(), a.cols()));
  return 0.5 * (j + j.transpose());
}

Vector conditional_kl_divergences(const Matrix& j_a, const Matrix& sigma_a,
                                  const Matrix& j_b) {
  const int p = static_cast<int>(j_a.rows());
  if (j_b.rows() != p || sigma_a.rows() != p)
    throw Error("model dimension mismatch");
  Vector d(p);
  Vector u = Vector::Zero(p);
  for (int i = 0; i < p; ++i) {
    const double la = j_a(i, i);
    const double lb = j_b(i, i);
    if (!(la > 0) || !(lb > 0)) throw NumericError("nonpositive conditional precision");
    // u = J_a(:,i)/la - J_b(:,i)/lb with the i-th entry zeroed; then
    // u' Sigma_a u equals the quadratic form over the non-i marginal.
    u = j_a.col(i) / la - j_b.col(i) / lb;
    u(i) = 0.0;
    const double quad = u.dot(sigma_a * u);
    d(i) = 0.5 * (std::log(la / lb) + lb / la - 1.0 + lb * quad);
  }
  return d;
}

AnomalyReport anomaly_scores(const Matrix& j_ref, const Matrix& sigma_ref,
                             const Matrix& j_att, const Matrix& sigma_att,
                             const std::vector<int>& var_ids, double threshold) {
  const int p = static_cast<int>(j_ref.rows());
  if (static_cast<int>(var_ids.size()) != p) throw Error("var_ids length mismatch");
  for (const Matrix* m : {&j_ref, &j_att}) {
    Eigen::LLT<Matrix> llt(*m);
    if (llt.info() != Eigen::Success)
      throw NumericError("precision matrix is not positive definite");
  }
  AnomalyReport rep;
  rep.var_ids = var_ids;
  rep.threshold = threshold;
  rep.j_ref = j_ref;
  rep.j_att = j_att;
  rep.scores = conditional_kl_divergences(j_ref, sigma_ref, j_att);
  rep.scores_reverse = conditional_kl_divergences(j_att, sigma_att, j_ref);
  rep.flagged = localize(rep, threshold);
  return rep;
}

std::vector<int> localize(const AnomalyReport& report, double threshold) {
  std::vector<int> flagged;
  for (int i = 0; i < report.scores.size(); ++i)
    if (report.scores(i) > threshold) flagged.push_back(report.var_ids[i]);
  return flagged;
}

std::vector<DetectionReport> run_decentralized(
    const std::vector<SubNetwork>& areas, const std::vector<CovAccumulator>& accs,
    const CctConfig& cfg, int tolerance, int slack) {
  if (areas.size() != accs.size())
    throw Error("need one accumulator per sub-network");
  std::vector<DetectionReport> reports;
  for (size_t k = 0; k < areas.size(); ++k) {
    const SubNetwork& sn = areas[k];
    std::vector<int> expected;
    for (int bus : sn.augmented)
      if (bus != slack) expected.push_back(bus);
    if (accs[k].var_ids() != expected)
      throw Error("accumulator " + std::to_string(k) +
                  " does not cover the augmented set of area " +
                  std::to_string(sn.area_id));
    EdgeSet reference;
    for (const auto& e : sn.edges)
      if (e.first != slack && e.second != slack) reference.insert(e);
    reports.push_back(detect(accs[k], reference, cfg, tolerance, sn.area_id));
  }
  return reports;
}

}  // namespace gridwatch
