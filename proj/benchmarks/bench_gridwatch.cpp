#include <benchmark/benchmark.h>

#include <cstdint>

#include "gridwatch/attack.hpp"
#include "gridwatch/case_io.hpp"
#include "gridwatch/cct.hpp"
#include "gridwatch/detect.hpp"
#include "gridwatch/gmrf.hpp"
#include "gridwatch/grid_model.hpp"
#include "gridwatch/stream_cov.hpp"

namespace {

using namespace gridwatch;

const GridCase& case14() {
  static const GridCase gc = load_case_file(GRIDWATCH_DATA_DIR "/case14.m");
  return gc;
}

const GridCase& case30() {
  static const GridCase gc = load_case_file(GRIDWATCH_DATA_DIR "/case30.m");
  return gc;
}

Matrix exact_covariance(const GridCase& gc) {
  return precision_from_b(build_susceptance_matrix(gc), 0.03).covariance();
}

void witness_ieee14(benchmark::State& state) {
  const Matrix sigma = exact_covariance(case14());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        witness_matrix(sigma, static_cast<int>(state.range(0))));
}
BENCHMARK(witness_ieee14)->Arg(1)->Arg(2);

void witness_ieee30(benchmark::State& state) {
  const Matrix sigma = exact_covariance(case30());
  for (auto _ : state)
    benchmark::DoNotOptimize(
        witness_matrix(sigma, static_cast<int>(state.range(0))));
}
BENCHMARK(witness_ieee30)->Arg(2);

void accumulator_update(benchmark::State& state) {
  const SusceptanceMatrix b = build_susceptance_matrix(case14());
  const PrecisionModel model = precision_from_b(b, 0.03);
  const SampleMatrix s = sample_gmrf(model, b, 1024, 7);
  CovAccumulator acc(static_cast<int>(b.var_ids.size()), WindowMode::sliding,
                     500);
  std::size_t i = 0;
  for (auto _ : state) {
    acc.update(s.samples.row(static_cast<Eigen::Index>(i++ % 1024)).transpose());
    benchmark::DoNotOptimize(acc.n());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(accumulator_update);

void sample_window_ieee14(benchmark::State& state) {
  const SusceptanceMatrix b = build_susceptance_matrix(case14());
  const PrecisionModel model = precision_from_b(b, 0.03);
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_gmrf(model, b, 500, ++seed));
  state.SetItemsProcessed(state.iterations() * 500);
}
BENCHMARK(sample_window_ieee14);

void build_attack_ieee14(benchmark::State& state) {
  const SusceptanceMatrix b = build_susceptance_matrix(case14());
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(build_attack(b, {4, 5, 6}, 0.7, 130, ++seed));
}
BENCHMARK(build_attack_ieee14);

void anomaly_scores_ieee14(benchmark::State& state) {
  const SusceptanceMatrix b = build_susceptance_matrix(case14());
  const PrecisionModel model = precision_from_b(b, 0.03);
  SampleMatrix win = sample_gmrf(model, b, 500, 11);
  const AttackSpec spec = build_attack(b, {4, 5, 6}, 0.7, 500, 13);
  win = corrupt_samples(win, spec, b);
  Matrix sigma_att = batch_covariance(win.samples);
  const double ridge = 1e-6 * sigma_att.trace() / sigma_att.rows();
  const Matrix j_att = estimate_precision(sigma_att, ridge);
  sigma_att.diagonal().array() += ridge;
  const Matrix sigma_ref = model.covariance();
  for (auto _ : state)
    benchmark::DoNotOptimize(
        anomaly_scores(model.j, sigma_ref, j_att, sigma_att, b.var_ids, 0.3));
}
BENCHMARK(anomaly_scores_ieee14);

}  // namespace

BENCHMARK_MAIN();
