#include "gridwatch/cct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gridwatch/stream_cov.hpp"

namespace gridwatch {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// All index subsets of {0..p-1} with 1 <= |S| <= kmax, smallest sizes first,
// lexicographic within a size.
std::vector<std::vector<int>> index_subsets(int p, int kmax) {
  std::vector<std::vector<int>> out;
  for (int k = 1; k <= kmax; ++k) {
    if (k > p) break;
    std::vector<int> s(k);
    for (int i = 0; i < k; ++i) s[i] = i;
    while (true) {
      out.push_back(s);
      int i = k - 1;
      while (i >= 0 && s[i] == p - k + i) --i;
      if (i < 0) break;
      ++s[i];
      for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
  }
  return out;
}

// Normalized |conditional covariance| of every pair under one conditioning
// set, +inf on pairs that touch S (those pairs cannot use this S).
Matrix normalized_abs(const Matrix& c, const std::vector<int>& s) {
  const int p = static_cast<int>(c.rows());
  Vector d = c.diagonal();
  Matrix w(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      const double den = d(i) * d(j);
      w(i, j) = den > 0 ? std::abs(c(i, j)) / std::sqrt(den) : kInf;
    }
  for (int v : s) {
    w.row(v).setConstant(kInf);
    w.col(v).setConstant(kInf);
  }
  return w;
}

std::vector<double> upper_triangle_sorted(const Matrix& w) {
  std::vector<double> vals;
  const int p = static_cast<int>(w.rows());
  vals.reserve(p * (p - 1) / 2);
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) vals.push_back(w(i, j));
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

EdgeSet edges_at(const Matrix& w, double xi, const std::vector<int>& var_ids) {
  EdgeSet edges;
  const int p = static_cast<int>(w.rows());
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (w(i, j) > xi) edges.insert(edge(var_ids[i], var_ids[j]));
  return edges;
}

std::vector<int> default_ids(int p) {
  std::vector<int> ids(p);
  for (int i = 0; i < p; ++i) ids[i] = i;
  return ids;
}

}  // namespace

Matrix witness_matrix(const Matrix& sigma, int eta, double ridge_rel) {
  const int p = static_cast<int>(sigma.rows());
  if (sigma.cols() != p) throw Error("covariance matrix must be square");
  if (eta < 0) throw ConfigError("eta must be nonnegative");
  if (p < 1) throw Error("need at least one variable");
  if (p == 1) return Matrix::Zero(1, 1);  // no pairs to witness

  Matrix w = normalized_abs(sigma, {});
  const int kmax = std::min(eta, p - 2);
  for (const auto& s : index_subsets(p, kmax)) {
    const Matrix c = conditional_covariance_all(sigma, s, ridge_rel);
    w = w.cwiseMin(normalized_abs(c, s));
  }
  w.diagonal().setZero();
  return w;
}

MarkovGraph run_cct(const Matrix& sigma, const CctConfig& cfg,
                    const std::vector<int>& var_ids) {
  if (!(cfg.xi > 0)) throw ConfigError("xi must be positive");
  MarkovGraph g;
  g.var_ids = var_ids.empty() ? default_ids(static_cast<int>(sigma.rows())) : var_ids;
  if (static_cast<int>(g.var_ids.size()) != sigma.rows())
    throw Error("var_ids length does not match covariance dimension");
  g.witnesses = witness_matrix(sigma, cfg.eta, cfg.ridge_rel);
  g.edges = edges_at(g.witnesses, cfg.xi, g.var_ids);
  return g;
}

MarkovGraph run_cct(const CovAccumulator& acc, const CctConfig& cfg) {
  return run_cct(acc.covariance(), cfg, acc.var_ids());
}

int edit_distance(const EdgeSet& a, const EdgeSet& b) {
  int diff = 0;
  for (const auto& e : a) diff += b.count(e) == 0;
  for (const auto& e : b) diff += a.count(e) == 0;
  return diff;
}

TuningResult tune_threshold(const Matrix& sigma_clean, const EdgeSet& reference,
                            int eta, const std::vector<int>& var_ids,
                            const std::vector<double>& xi_grid, int max_distance) {
  TuningResult r;
  r.witnesses = witness_matrix(sigma_clean, eta, 1e-10);
  const std::vector<int> ids =
      var_ids.empty() ? default_ids(static_cast<int>(sigma_clean.rows())) : var_ids;
  r.max_distance = max_distance >= 0 ? max_distance
                                     : std::max<int>(1, static_cast<int>(reference.size()));

  // Candidate intervals: between consecutive distinct witness values the
  // learned graph is constant, so each gap is one candidate with a width.
  struct Cand {
    double lo, hi;
  };
  std::vector<Cand> cands;
  if (xi_grid.empty()) {
    const std::vector<double> vals = upper_triangle_sorted(r.witnesses);
    for (size_t k = 0; k + 1 < vals.size(); ++k)
      if (std::isfinite(vals[k + 1]))
        cands.push_back({vals[k], vals[k + 1]});
    if (cands.empty()) {
      // degenerate: zero or one distinct witness value; no pair to separate
      const double v = vals.empty() ? 1.0 : std::abs(vals.back()) + 1.0;
      cands.push_back({v, v});
    }
  } else {
    std::vector<double> grid = xi_grid;
    std::sort(grid.begin(), grid.end());
    for (double g : grid) {
      if (!(g > 0)) throw ConfigError("xi grid values must be positive");
      cands.push_back({g, g});
    }
  }

  int best = -1;
  double best_width = -1.0;
  int best_idx = 0;
  std::vector<int> dist(cands.size());
  for (size_t k = 0; k < cands.size(); ++k) {
    const double xi = 0.5 * (cands[k].lo + cands[k].hi);
    dist[k] = edit_distance(edges_at(r.witnesses, xi, ids), reference);
    if (best < 0 || dist[k] < best) best = dist[k];
  }
  // widest maximal run of candidates achieving the minimum
  for (size_t k = 0; k < cands.size();) {
    if (dist[k] != best) {
      ++k;
      continue;
    }
    size_t e = k;
    while (e + 1 < cands.size() && dist[e + 1] == best) ++e;
    const double width = cands[e].hi - cands[k].lo;
    if (width > best_width) {
      best_width = width;
      best_idx = static_cast<int>(k);
      r.interval_low = cands[k].lo;
      r.interval_high = cands[e].hi;
    }
    k = e + 1;
  }
  (void)best_idx;
  r.xi = 0.5 * (r.interval_low + r.interval_high);
  r.achieved_distance = best;
  r.learned = edges_at(r.witnesses, r.xi, ids);
  r.failed = best >= r.max_distance;
  return r;
}

TuningResult tune_threshold(const SampleMatrix& clean, const EdgeSet& reference,
                            int eta, const std::vector<double>& xi_grid,
                            int max_distance) {
  return tune_threshold(batch_covariance(clean.samples), reference, eta,
                        clean.var_ids, xi_grid, max_distance);
}

long min_sample_guidance(double j_min, int p, double c) {
  if (!(j_min > 0)) throw Error("j_min must be positive");
  if (p < 2) throw Error("p must be at least 2");
  return static_cast<long>(std::ceil(c * std::log(static_cast<double>(p)) /
                                     (j_min * j_min)));
}

}  // namespace gridwatch
