#include "gridwatch/grid_model.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace gridwatch {

int SusceptanceMatrix::pos(int bus_id) const {
  auto it = std::lower_bound(bus_ids.begin(), bus_ids.end(), bus_id);
  if (it == bus_ids.end() || *it != bus_id)
    throw Error("unknown bus id " + std::to_string(bus_id));
  return static_cast<int>(it - bus_ids.begin());
}

int SusceptanceMatrix::var_pos(int bus_id) const {
  auto it = std::lower_bound(var_ids.begin(), var_ids.end(), bus_id);
  if (it == var_ids.end() || *it != bus_id)
    throw Error("bus id " + std::to_string(bus_id) +
                " is not a state variable (slack or unknown)");
  return static_cast<int>(it - var_ids.begin());
}

SusceptanceMatrix build_susceptance_matrix(const GridCase& gc) {
  validate(gc);
  SusceptanceMatrix m;
  const int p = static_cast<int>(gc.buses.size());
  m.bus_ids.reserve(p);
  for (const auto& b : gc.buses) m.bus_ids.push_back(b.id);
  m.slack = gc.slack;
  m.slack_pos = gc.bus_index(gc.slack);
  for (int id : m.bus_ids)
    if (id != gc.slack) m.var_ids.push_back(id);

  m.full = Matrix::Zero(p, p);
  for (const auto& br : gc.branches) {
    const int i = gc.bus_index(br.from);
    const int j = gc.bus_index(br.to);
    m.full(i, j) -= br.b;
    m.full(j, i) -= br.b;
    m.full(i, i) += br.b;
    m.full(j, j) += br.b;
  }

  m.reduced = Matrix::Zero(p - 1, p - 1);
  for (int i = 0, ri = 0; i < p; ++i) {
    if (i == m.slack_pos) continue;
    for (int j = 0, rj = 0; j < p; ++j) {
      if (j == m.slack_pos) continue;
      m.reduced(ri, rj) = m.full(i, j);
      ++rj;
    }
    ++ri;
  }
  return m;
}

Vector solve_angles(const SusceptanceMatrix& b, const Vector& injections) {
  const int p = static_cast<int>(b.bus_ids.size());
  if (injections.size() != p)
    throw Error("injection vector has wrong length");
  const double imbalance = injections.sum();
  if (std::abs(imbalance) > 1e-9)
    throw Error("injections do not balance: sum = " + std::to_string(imbalance));

  Vector p_r(p - 1);
  for (int i = 0, ri = 0; i < p; ++i)
    if (i != b.slack_pos) p_r(ri++) = injections(i);

  Eigen::LLT<Matrix> llt(b.reduced);
  if (llt.info() != Eigen::Success)
    throw NumericError("reduced susceptance matrix is not positive definite");
  const Vector x_r = llt.solve(p_r);

  Vector x = Vector::Zero(p);
  for (int i = 0, ri = 0; i < p; ++i)
    if (i != b.slack_pos) x(i) = x_r(ri++);
  return x;
}

Eigen::MatrixXi hop_distances(const GridCase& gc) {
  const int p = static_cast<int>(gc.buses.size());
  std::vector<std::vector<int>> adj(p);
  for (const auto& br : gc.branches) {
    adj[gc.bus_index(br.from)].push_back(gc.bus_index(br.to));
    adj[gc.bus_index(br.to)].push_back(gc.bus_index(br.from));
  }
  Eigen::MatrixXi d(p, p);
  d.setConstant(-1);
  for (int s = 0; s < p; ++s) {
    d(s, s) = 0;
    std::deque<int> q = {s};
    while (!q.empty()) {
      const int u = q.front();
      q.pop_front();
      for (int v : adj[u])
        if (d(s, v) < 0) {
          d(s, v) = d(s, u) + 1;
          q.push_back(v);
        }
    }
  }
  return d;
}

EdgeSet branch_adjacency(const GridCase& gc) {
  EdgeSet edges;
  for (const auto& br : gc.branches) edges.insert(edge(br.from, br.to));
  return edges;
}

std::vector<SubNetwork> partition_areas(const GridCase& gc) {
  std::map<int, std::vector<int>> by_area;
  std::map<int, int> area_of;
  for (const auto& b : gc.buses) {
    by_area[b.area].push_back(b.id);
    area_of[b.id] = b.area;
  }
  std::map<int, std::vector<int>> neighbors;
  for (const auto& br : gc.branches) {
    neighbors[br.from].push_back(br.to);
    neighbors[br.to].push_back(br.from);
  }
  const EdgeSet all_edges = branch_adjacency(gc);

  std::vector<SubNetwork> out;
  for (const auto& [area, buses] : by_area) {
    SubNetwork sn;
    sn.area_id = area;
    std::set<int> aug(buses.begin(), buses.end());
    for (int u : buses) {
      bool is_border = false;
      for (int v : neighbors[u])
        if (area_of[v] != area) {
          is_border = true;
          aug.insert(v);
        }
      (is_border ? sn.border : sn.interior).push_back(u);
    }
    sn.augmented.assign(aug.begin(), aug.end());
    for (const auto& e : all_edges)
      if (aug.count(e.first) && aug.count(e.second)) sn.edges.insert(e);
    out.push_back(std::move(sn));
  }
  return out;
}

}  // namespace gridwatch
