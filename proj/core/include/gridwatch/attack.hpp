#pragma once

#include <cstdint>
#include <vector>

#include "gridwatch/case_io.hpp"
#include "gridwatch/common.hpp"
#include "gridwatch/gmrf.hpp"
#include "gridwatch/grid_model.hpp"

namespace gridwatch {

// A stealthy injection attack: per corrupted sample the attacker draws
// d ~ N(0, d_scale^2) i.i.d. on the attacked (non-slack) coordinates and
// shifts the state by d, which moves the measurements by a = B d inside
// Im(B). d_scale is calibrated so E||a||_2 = attack_size.
struct AttackSpec {
  std::vector<int> buses;  // sorted, connected in the grid graph, no slack
  double attack_size = 0.0;
  double d_scale = 0.0;
  int duration = 0;  // number of corrupted samples
  std::uint64_t seed = 0;
};

// All connected vertex subsets with size in [kmin, kmax], slack excluded,
// in deterministic (sorted) order. kmax is clamped to the number of
// non-slack buses.
std::vector<std::vector<int>> enumerate_connected_subsets(const GridCase& gc,
                                                          int kmin, int kmax);

// E sqrt(g' diag(lambda) g) for g ~ N(0, I); closed-form reduction of the
// expected norm to a 1-D integral, evaluated by quadrature.
double expected_norm_gaussian(const Vector& lambda);

// Per-coordinate std s with E||B(:,A) d||_2 = attack_size for d ~ N(0, s^2 I).
double attack_scale(const SusceptanceMatrix& b, const std::vector<int>& attacked,
                    double attack_size);

AttackSpec build_attack(const SusceptanceMatrix& b, const std::vector<int>& attacked,
                        double attack_size, int duration, std::uint64_t seed);

// Shift the trailing `spec.duration` samples by fresh d draws and flag them
// corrupted. The clean matrix is not modified.
SampleMatrix corrupt_samples(const SampleMatrix& clean, const AttackSpec& spec,
                             const SusceptanceMatrix& b);

// One measurement-space attack vector a = B(:,A) d per corrupted sample,
// rows indexed like bus_ids; the exact draws corrupt_samples applies.
Matrix attack_vectors(const AttackSpec& spec, const SusceptanceMatrix& b);

// DC least-squares residual min_X ||z - B X||_2 (rank-revealing solve).
double dc_residual(const SusceptanceMatrix& b, const Vector& z);

// Residual change caused by an attacked measurement vector; <= 1e-9 for any
// a in Im(B).
double stealthiness_check(const Vector& z_attacked, const Vector& z_clean,
                          const SusceptanceMatrix& b);

}  // namespace gridwatch
