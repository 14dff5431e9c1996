#include "gridwatch/cct.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "gridwatch/case_io.hpp"
#include "gridwatch/gmrf.hpp"
#include "gridwatch/grid_model.hpp"
#include "gridwatch/stream_cov.hpp"

using namespace gridwatch;

namespace {

GridCase load(const std::string& name) {
  return load_case_file(std::string(GRIDWATCH_DATA_DIR) + "/" + name);
}

Matrix chain3_sigma() {
  Matrix j(3, 3);
  j << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  return Eigen::LLT<Matrix>(j).solve(Matrix::Identity(3, 3));
}

}  // namespace

TEST_CASE("witness on a 3-chain: separator kills the far pair") {
  Matrix w = witness_matrix(chain3_sigma(), 1);
  CHECK(w(0, 1) == doctest::Approx(0.5));
  CHECK(w(1, 2) == doctest::Approx(0.5));
  CHECK(w(0, 2) <= 1e-9);  // the default ridge leaves a whisper
  CHECK(witness_matrix(chain3_sigma(), 1, 0.0)(0, 2) <= 1e-12);
  CHECK(w(0, 0) == 0.0);
  CHECK((w - w.transpose()).norm() == doctest::Approx(0.0));
}

TEST_CASE("witness with eta 0 is the plain absolute correlation") {
  Matrix sigma = chain3_sigma();
  Matrix w = witness_matrix(sigma, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(w(i, j) ==
            doctest::Approx(std::abs(sigma(i, j)) / std::sqrt(sigma(i, i) * sigma(j, j))));
    }
}

TEST_CASE("witness equals a brute-force minimum over conditioning sets") {
  GridCase gc = load("case14.m");
  SusceptanceMatrix b = build_susceptance_matrix(gc);
  Matrix sigma = precision_from_b(b, 0.03).covariance();
  const int p = 13;
  const int eta = 2;
  Matrix w = witness_matrix(sigma, eta);

  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j) {
      double best = std::abs(sigma(i, j)) / std::sqrt(sigma(i, i) * sigma(j, j));
      std::vector<std::vector<int>> sets;
      for (int a = 0; a < p; ++a) {
        if (a == i || a == j) continue;
        sets.push_back({a});
        for (int c = a + 1; c < p; ++c)
          if (c != i && c != j) sets.push_back({a, c});
      }
      for (const auto& s : sets) {
        const double cij = conditional_covariance_exact(sigma, i, j, s);
        const double di = conditional_covariance_exact(sigma, i, i, s);
        const double dj = conditional_covariance_exact(sigma, j, j, s);
        best = std::min(best, std::abs(cij) / std::sqrt(di * dj));
      }
      CHECK(w(i, j) == doctest::Approx(best).epsilon(1e-7));
    }
}

TEST_CASE("witness matrix is symmetric with values in [0, 1]") {
  GridCase gc = load("case14.m");
  SusceptanceMatrix b = build_susceptance_matrix(gc);
  PrecisionModel m = precision_from_b(b, 0.03);
  Matrix sigma = batch_covariance(sample_gmrf(m, b, 500, 3).samples);
  Matrix w = witness_matrix(sigma, 2);
  CHECK((w - w.transpose()).norm() <= 1e-12);
  CHECK(w.diagonal().norm() == 0.0);
  CHECK(w.minCoeff() >= 0.0);
  CHECK(w.maxCoeff() <= 1.0 + 1e-9);
}

TEST_CASE("run_cct thresholds strictly and maps variable ids") {
  Matrix sigma = chain3_sigma();
  CctConfig cfg;
  cfg.xi = 0.25;
  cfg.eta = 1;
  MarkovGraph g = run_cct(sigma, cfg, {4, 7, 9});
  CHECK(g.edges == EdgeSet{{4, 7}, {7, 9}});
  CHECK(g.var_ids == std::vector<int>{4, 7, 9});

  // A threshold equal to the strongest witness drops everything: strict >.
  Matrix w = witness_matrix(sigma, 1);
  cfg.xi = std::max(w(0, 1), w(1, 2));
  CHECK(run_cct(sigma, cfg, {4, 7, 9}).edges.empty());
}

TEST_CASE("run_cct validates configuration") {
  Matrix sigma = chain3_sigma();
  CctConfig cfg;
  cfg.xi = 0.0;
  CHECK_THROWS_AS(run_cct(sigma, cfg, {}), ConfigError);
  cfg.xi = 0.1;
  cfg.eta = -1;
  CHECK_THROWS_AS(run_cct(sigma, cfg, {}), ConfigError);
  cfg.eta = 1;
  CHECK_THROWS_AS(run_cct(sigma, cfg, {1, 2}), Error);
  CHECK_THROWS_AS(witness_matrix(Matrix(0, 0), 1), Error);
}

TEST_CASE("accumulator and matrix entry points agree") {
  GridCase gc = load("case14.m");
  SusceptanceMatrix b = build_susceptance_matrix(gc);
  PrecisionModel m = precision_from_b(b, 0.03);
  SampleMatrix s = sample_gmrf(m, b, 400, 9);
  CovAccumulator acc(13, WindowMode::growing, 0, b.var_ids);
  for (int k = 0; k < s.samples.rows(); ++k) acc.update(s.samples.row(k).transpose());

  CctConfig cfg;
  cfg.xi = 0.1;
  MarkovGraph g1 = run_cct(acc, cfg);
  MarkovGraph g2 = run_cct(batch_covariance(s.samples), cfg, b.var_ids);
  CHECK(g1.edges == g2.edges);
  CHECK((g1.witnesses - g2.witnesses).norm() <= 1e-9);
}

TEST_CASE("edit distance is the symmetric difference size") {
  CHECK(edit_distance({}, {}) == 0);
  CHECK(edit_distance({{1, 2}}, {{1, 2}}) == 0);
  CHECK(edit_distance({{1, 2}}, {{2, 3}}) == 2);
  CHECK(edit_distance({{1, 2}, {2, 3}}, {{2, 3}}) == 1);
}

TEST_CASE("edit distance is a metric on random edge sets") {
  std::mt19937_64 rng(4);
  auto random_edges = [&] {
    EdgeSet s;
    for (int k = 0; k < 8; ++k) {
      int a = static_cast<int>(rng() % 8);
      int b = static_cast<int>(rng() % 8);
      if (a != b) s.insert(edge(a, b));
    }
    return s;
  };
  for (int t = 0; t < 50; ++t) {
    EdgeSet a = random_edges(), b = random_edges(), c = random_edges();
    CHECK(edit_distance(a, a) == 0);
    CHECK(edit_distance(a, b) == edit_distance(b, a));
    CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
  }
}

TEST_CASE("tuning finds a zero-distance interval on the 3-chain") {
  EdgeSet ref = {{0, 1}, {1, 2}};
  TuningResult tr = tune_threshold(chain3_sigma(), ref, 1, {});
  CHECK(tr.achieved_distance == 0);
  CHECK_FALSE(tr.failed);
  CHECK(tr.learned == ref);
  CHECK(tr.interval_low < tr.interval_high);
  CHECK(tr.xi > tr.interval_low);
  CHECK(tr.xi < tr.interval_high);
  CHECK(tr.interval_high == doctest::Approx(0.5));  // the edge witness value
}

TEST_CASE("tuning on an explicit grid picks the widest optimal run") {
  EdgeSet ref = {{0, 1}, {1, 2}};
  TuningResult tr = tune_threshold(chain3_sigma(), ref, 1, {}, {0.1, 0.4, 0.99});
  CHECK(tr.achieved_distance == 0);
  CHECK(tr.interval_low == doctest::Approx(0.1));
  CHECK(tr.interval_high == doctest::Approx(0.4));
  CHECK(tr.xi == doctest::Approx(0.25));

  CHECK_THROWS_AS(tune_threshold(chain3_sigma(), ref, 1, {}, {-0.5}), ConfigError);
}

TEST_CASE("tuning fails when no threshold approaches the reference") {
  // (0,2) is conditionally independent, so a {(0,2)}-only reference is
  // unreachable: every candidate threshold keeps at least one chain edge
  // while missing the reference edge.
  EdgeSet ref = {{0, 2}};
  TuningResult tr = tune_threshold(chain3_sigma(), ref, 1, {});
  CHECK(tr.achieved_distance >= 2);
  CHECK(tr.max_distance == 1);
  CHECK(tr.failed);

  TuningResult relaxed = tune_threshold(chain3_sigma(), ref, 1, {}, {}, 4);
  CHECK_FALSE(relaxed.failed);
  CHECK(relaxed.achieved_distance == tr.achieved_distance);
}

TEST_CASE("tuning handles a degenerate witness spectrum") {
  Matrix sigma = Matrix::Identity(3, 3);
  TuningResult tr = tune_threshold(sigma, {}, 1, {});
  CHECK(tr.achieved_distance == 0);
  CHECK_FALSE(tr.failed);
  CHECK(tr.learned.empty());
}

TEST_CASE("a single variable has no pairs and tunes trivially") {
  Matrix sigma = Matrix::Constant(1, 1, 0.7);
  CHECK(witness_matrix(sigma, 2) == Matrix::Zero(1, 1));
  TuningResult tr = tune_threshold(sigma, {}, 2, {5});
  CHECK(tr.achieved_distance == 0);
  CHECK_FALSE(tr.failed);
  CHECK(tr.learned.empty());
}

TEST_CASE("sample overload matches the covariance overload") {
  GridCase gc = load("case14.m");
  SusceptanceMatrix b = build_susceptance_matrix(gc);
  PrecisionModel m = precision_from_b(b, 0.03);
  SampleMatrix s = sample_gmrf(m, b, 800, 21);
  EdgeSet ref = predicted_markov_graph(gc, GraphMode::first_neighbor);
  TuningResult t1 = tune_threshold(s, ref, 2);
  TuningResult t2 = tune_threshold(batch_covariance(s.samples), ref, 2, b.var_ids);
  CHECK(t1.xi == doctest::Approx(t2.xi));
  CHECK(t1.achieved_distance == t2.achieved_distance);
  CHECK(t1.learned == t2.learned);
}

TEST_CASE("exact first-neighbor covariance tunes to zero distance") {
  for (const char* name : {"case14.m", "case30.m"}) {
    GridCase gc = load(name);
    SusceptanceMatrix b = build_susceptance_matrix(gc);
    Matrix sigma = first_neighbor_precision(b, 0.03).covariance();
    EdgeSet ref = predicted_markov_graph(gc, GraphMode::first_neighbor);
    TuningResult tr = tune_threshold(sigma, ref, 2, b.var_ids);
    CHECK(tr.achieved_distance == 0);
    CHECK_FALSE(tr.failed);
    CHECK(tr.learned == ref);
  }
}

TEST_CASE("sample-size guidance reproduces the scaling rule") {
  CHECK(min_sample_guidance(0.1, 14) == 264);
  CHECK(min_sample_guidance(0.1, 14, 2.0) == 528);
  CHECK_THROWS_AS(min_sample_guidance(0.0, 14), Error);
  CHECK_THROWS_AS(min_sample_guidance(0.1, 1), Error);
}
