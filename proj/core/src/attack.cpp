#include "gridwatch/attack.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace gridwatch {
namespace {

// ESU (Wernicke) enumeration: every connected vertex subset of size <= kmax
// appears exactly once in the recursion tree.
struct Esu {
  const std::map<int, std::vector<int>>& adj;
  int kmin, kmax;
  std::vector<std::vector<int>>& out;

  void extend(std::vector<int>& sub, std::set<int>& ext, int root,
              std::set<int>& seen) {
    if (static_cast<int>(sub.size()) >= kmin) out.push_back(sub);
    if (static_cast<int>(sub.size()) == kmax) return;
    while (!ext.empty()) {
      const int w = *ext.begin();
      ext.erase(ext.begin());
      std::set<int> ext2 = ext;
      std::vector<int> added;
      for (int u : adj.at(w))
        if (u > root && seen.insert(u).second) {
          ext2.insert(u);
          added.push_back(u);
        }
      sub.push_back(w);
      extend(sub, ext2, root, seen);
      sub.pop_back();
      for (int u : added) seen.erase(u);
    }
  }
};

}  // namespace

std::vector<std::vector<int>> enumerate_connected_subsets(const GridCase& gc,
                                                          int kmin, int kmax) {
  if (kmin < 2) throw Error("kmin must be at least 2");
  if (kmax < kmin) throw Error("kmax must be at least kmin");
  const int limit = static_cast<int>(gc.buses.size()) - 1;  // non-slack buses
  kmax = std::min(kmax, limit);
  if (kmax < kmin) return {};

  std::map<int, std::vector<int>> adj;
  for (const auto& b : gc.buses)
    if (b.id != gc.slack) adj[b.id] = {};
  for (const auto& br : gc.branches) {
    if (br.from == gc.slack || br.to == gc.slack) continue;
    adj[br.from].push_back(br.to);
    adj[br.to].push_back(br.from);
  }

  std::vector<std::vector<int>> out;
  Esu esu{adj, kmin, kmax, out};
  for (const auto& [v, _] : adj) {
    std::vector<int> sub = {v};
    std::set<int> ext, seen = {v};
    for (int u : adj.at(v))
      if (u > v) {
        ext.insert(u);
        seen.insert(u);
      }
    esu.extend(sub, ext, v, seen);
  }
  for (auto& s : out) std::sort(s.begin(), s.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

double expected_norm_gaussian(const Vector& lambda) {
  for (int i = 0; i < lambda.size(); ++i)
    if (lambda(i) < -1e-12) throw Error("negative eigenvalue");
  const double total = lambda.sum();
  if (total <= 0) return 0.0;

  // E sqrt(g' diag(lambda) g) = 1/(2 sqrt(pi)) Int_0^inf t^{-3/2}
  //   (1 - prod_i (1+2 lambda_i t)^{-1/2}) dt; substituting t = tan^2(theta)
  // makes the integrand smooth on [0, pi/2], so composite Simpson converges
  // fast.
  auto f = [&](double theta) -> double {
    const double tt = std::tan(theta);
    const double t = tt * tt;
    double prod = 1.0;
    for (int i = 0; i < lambda.size(); ++i)
      prod /= std::sqrt(1.0 + 2.0 * std::max(0.0, lambda(i)) * t);
    const double s = std::sin(theta);
    return 2.0 * (1.0 - prod) / (s * s);
  };
  const int n = 4096;  // panels; even
  const double a = 0.0, b = M_PI / 2.0;
  const double h = (b - a) / n;
  double acc = 2.0 * total        // limit of f at theta -> 0
               + 2.0;             // limit at theta -> pi/2 (all lambda > 0)
  // When some lambda are zero the upper limit is still correct: prod keeps
  // only the zero-lambda factors, which are 1, minus the decaying rest.
  for (int k = 1; k < n; ++k) acc += f(a + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0 / (2.0 * std::sqrt(M_PI));
}

double attack_scale(const SusceptanceMatrix& b, const std::vector<int>& attacked,
                    double attack_size) {
  if (!(attack_size > 0)) throw Error("attack_size must be positive");
  const int k = static_cast<int>(attacked.size());
  if (k == 0) throw Error("attacked set is empty");
  const int p = static_cast<int>(b.bus_ids.size());
  Matrix m(p, k);
  for (int c = 0; c < k; ++c) {
    if (attacked[c] == b.slack) throw Error("cannot attack the slack bus");
    m.col(c) = b.full.col(b.pos(attacked[c]));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  const double unit = expected_norm_gaussian(es.eigenvalues());
  if (!(unit > 0)) throw NumericError("degenerate attack column space");
  return attack_size / unit;
}

AttackSpec build_attack(const SusceptanceMatrix& b, const std::vector<int>& attacked,
                        double attack_size, int duration, std::uint64_t seed) {
  if (attacked.empty()) throw Error("attacked set is empty");
  if (!(attack_size > 0)) throw Error("attack_size must be positive");
  if (duration < 0) throw Error("duration must be nonnegative");

  AttackSpec spec;
  spec.buses = attacked;
  std::sort(spec.buses.begin(), spec.buses.end());
  for (size_t i = 1; i < spec.buses.size(); ++i)
    if (spec.buses[i] == spec.buses[i - 1]) throw Error("duplicate attacked bus");
  for (int v : spec.buses)
    if (v == b.slack) throw Error("cannot attack the slack bus");

  // connectivity of the induced subgraph, read off the B sparsity pattern
  const int k = static_cast<int>(spec.buses.size());
  if (k > 1) {
    std::vector<int> stack = {0};
    std::vector<char> seen(k, 0);
    seen[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int v = 0; v < k; ++v)
        if (!seen[v] &&
            b.full(b.pos(spec.buses[u]), b.pos(spec.buses[v])) != 0.0) {
          seen[v] = 1;
          ++reached;
          stack.push_back(v);
        }
    }
    if (reached != k) throw Error("attacked set is not connected");
  }

  spec.attack_size = attack_size;
  spec.d_scale = attack_scale(b, spec.buses, attack_size);
  spec.duration = duration;
  spec.seed = seed;
  return spec;
}

SampleMatrix corrupt_samples(const SampleMatrix& clean, const AttackSpec& spec,
                             const SusceptanceMatrix& b) {
  SampleMatrix out = clean;
  const int n = static_cast<int>(out.samples.rows());
  const int hit = std::min(spec.duration, n);
  if (hit == 0) return out;

  std::vector<int> cols;
  for (int bus : spec.buses) {
    auto it = std::lower_bound(clean.var_ids.begin(), clean.var_ids.end(), bus);
    if (it == clean.var_ids.end() || *it != bus)
      throw Error("attacked bus " + std::to_string(bus) + " not in sample variables");
    cols.push_back(static_cast<int>(it - clean.var_ids.begin()));
  }
  (void)b;

  NormalSampler gauss(spec.seed);
  for (int r = n - hit; r < n; ++r) {
    for (int c : cols) out.samples(r, c) += spec.d_scale * gauss();
    out.corrupted[r] = 1;
  }
  return out;
}

Matrix attack_vectors(const AttackSpec& spec, const SusceptanceMatrix& b) {
  const int p = static_cast<int>(b.bus_ids.size());
  const int k = static_cast<int>(spec.buses.size());
  Matrix m(p, k);
  for (int c = 0; c < k; ++c) m.col(c) = b.full.col(b.pos(spec.buses[c]));

  NormalSampler gauss(spec.seed);
  Matrix a(spec.duration, p);
  Vector d(k);
  for (int r = 0; r < spec.duration; ++r) {
    for (int c = 0; c < k; ++c) d(c) = spec.d_scale * gauss();
    a.row(r) = (m * d).transpose();
  }
  return a;
}

double dc_residual(const SusceptanceMatrix& b, const Vector& z) {
  if (z.size() != b.full.rows()) throw Error("measurement vector has wrong length");
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(b.full);
  const Vector x = cod.solve(z);
  return (z - b.full * x).norm();
}

double stealthiness_check(const Vector& z_attacked, const Vector& z_clean,
                          const SusceptanceMatrix& b) {
  return std::abs(dc_residual(b, z_attacked) - dc_residual(b, z_clean));
}

}  // namespace gridwatch
