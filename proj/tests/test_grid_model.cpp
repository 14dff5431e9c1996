#include "gridwatch/grid_model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "gridwatch/case_io.hpp"

using namespace gridwatch;

namespace {

GridCase path3() {
  GridCase gc;
  gc.slack = 1;
  gc.buses = {{1, 1}, {2, 1}, {3, 1}};
  gc.branches = {{1, 2, 4.0}, {2, 3, 2.0}};
  return gc;
}

GridCase load(const std::string& name) {
  return load_case_file(std::string(GRIDWATCH_DATA_DIR) + "/" + name);
}

}  // namespace

TEST_CASE("susceptance matrix is the branch Laplacian") {
  SusceptanceMatrix m = build_susceptance_matrix(path3());
  REQUIRE(m.full.rows() == 3);
  CHECK(m.full(0, 0) == doctest::Approx(4.0));
  CHECK(m.full(1, 1) == doctest::Approx(6.0));
  CHECK(m.full(2, 2) == doctest::Approx(2.0));
  CHECK(m.full(0, 1) == doctest::Approx(-4.0));
  CHECK(m.full(0, 2) == doctest::Approx(0.0));
  CHECK((m.full - m.full.transpose()).norm() == doctest::Approx(0.0));
  for (int i = 0; i < 3; ++i) CHECK(m.full.row(i).sum() == doctest::Approx(0.0));

  CHECK(m.slack == 1);
  CHECK(m.slack_pos == 0);
  REQUIRE(m.var_ids == std::vector<int>{2, 3});
  CHECK(m.reduced(0, 0) == doctest::Approx(6.0));
  CHECK(m.reduced(0, 1) == doctest::Approx(-2.0));
  CHECK(m.reduced(1, 1) == doctest::Approx(2.0));

  CHECK(m.pos(3) == 2);
  CHECK(m.var_pos(3) == 1);
  CHECK_THROWS_AS(m.var_pos(1), Error);
  CHECK_THROWS_AS(m.pos(42), Error);
}

TEST_CASE("DC solve pins the slack and satisfies the full system") {
  SusceptanceMatrix m = build_susceptance_matrix(path3());
  Vector p(3);
  p << -3.0, 1.0, 2.0;
  Vector theta = solve_angles(m, p);
  CHECK(theta(0) == doctest::Approx(0.0));
  CHECK(theta(1) == doctest::Approx(0.75));
  CHECK(theta(2) == doctest::Approx(1.75));
  CHECK((m.full * theta - p).norm() <= 1e-9);
}

TEST_CASE("DC solve validates its input") {
  SusceptanceMatrix m = build_susceptance_matrix(path3());
  Vector bad(3);
  bad << 1.0, 1.0, 1.0;
  CHECK_THROWS_AS(solve_angles(m, bad), Error);
  CHECK_THROWS_AS(solve_angles(m, Vector::Zero(2)), Error);
}

TEST_CASE("DC solve on IEEE-14 balances at every bus") {
  GridCase gc = load("case14.m");
  SusceptanceMatrix m = build_susceptance_matrix(gc);
  Vector p = Vector::Zero(14);
  for (int i = 1; i < 14; ++i) p(i) = (i % 2 == 0) ? 0.5 : -0.3;
  p(0) = -p.tail(13).sum();
  Vector theta = solve_angles(m, p);
  CHECK((m.full * theta - p).norm() <= 1e-8);
}

TEST_CASE("hop distances match a Floyd-Warshall cross-check") {
  GridCase gc = load("case14.m");
  Eigen::MatrixXi d = hop_distances(gc);
  const int p = static_cast<int>(gc.buses.size());

  const int inf = 1 << 20;
  std::vector<std::vector<int>> fw(p, std::vector<int>(p, inf));
  for (int i = 0; i < p; ++i) fw[i][i] = 0;
  for (const auto& br : gc.branches) {
    const int i = gc.bus_index(br.from);
    const int j = gc.bus_index(br.to);
    fw[i][j] = fw[j][i] = 1;
  }
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j)
        fw[i][j] = std::min(fw[i][j], fw[i][k] + fw[k][j]);

  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) CHECK(d(i, j) == fw[i][j]);
}

TEST_CASE("branch adjacency collects undirected bus-id pairs") {
  GridCase gc = load("case14.m");
  EdgeSet e = branch_adjacency(gc);
  CHECK(e.size() == 20);
  CHECK(e.count({1, 2}) == 1);
  CHECK(e.count({2, 1}) == 0);
  CHECK(e.count({13, 14}) == 1);
}

TEST_CASE("two-area partition splits interior, border, and augmented sets") {
  GridCase gc;
  gc.slack = 1;
  gc.buses = {{1, 1}, {2, 1}, {3, 2}, {4, 2}};
  gc.branches = {{1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}};
  auto areas = partition_areas(gc);
  REQUIRE(areas.size() == 2);

  CHECK(areas[0].area_id == 1);
  CHECK(areas[0].interior == std::vector<int>{1});
  CHECK(areas[0].border == std::vector<int>{2});
  CHECK(areas[0].augmented == std::vector<int>{1, 2, 3});
  CHECK(areas[0].edges == EdgeSet{{1, 2}, {2, 3}});

  CHECK(areas[1].area_id == 2);
  CHECK(areas[1].interior == std::vector<int>{4});
  CHECK(areas[1].border == std::vector<int>{3});
  CHECK(areas[1].augmented == std::vector<int>{2, 3, 4});
  CHECK(areas[1].edges == EdgeSet{{2, 3}, {3, 4}});
}

TEST_CASE("single-area case yields one whole-grid sub-network") {
  GridCase gc = load("case14.m");
  auto areas = partition_areas(gc);
  REQUIRE(areas.size() == 1);
  CHECK(areas[0].border.empty());
  CHECK(areas[0].interior.size() == 14);
  CHECK(areas[0].augmented.size() == 14);
  CHECK(areas[0].edges.size() == 20);
}

TEST_CASE("IEEE-30 three-area partition covers the grid consistently") {
  GridCase gc = load("case30.m");
  auto areas = partition_areas(gc);
  REQUIRE(areas.size() == 3);

  std::map<int, int> area_of;
  for (const auto& b : gc.buses) area_of[b.id] = b.area;
  std::map<int, std::set<int>> nbrs;
  for (const auto& br : gc.branches) {
    nbrs[br.from].insert(br.to);
    nbrs[br.to].insert(br.from);
  }

  size_t owned = 0;
  for (const auto& sn : areas) {
    owned += sn.interior.size() + sn.border.size();
    for (int u : sn.interior) {
      CHECK(area_of[u] == sn.area_id);
      for (int v : nbrs[u]) CHECK(area_of[v] == sn.area_id);
    }
    for (int u : sn.border) {
      CHECK(area_of[u] == sn.area_id);
      bool out = false;
      for (int v : nbrs[u]) out = out || area_of[v] != sn.area_id;
      CHECK(out);
    }
    CHECK(std::is_sorted(sn.augmented.begin(), sn.augmented.end()));
    for (const auto& e : sn.edges) {
      CHECK(std::binary_search(sn.augmented.begin(), sn.augmented.end(), e.first));
      CHECK(std::binary_search(sn.augmented.begin(), sn.augmented.end(), e.second));
    }
    CHECK(sn.augmented.size() > sn.interior.size() + sn.border.size());
  }
  CHECK(owned == 30);
}
