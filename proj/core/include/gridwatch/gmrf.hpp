#pragma once

#include <cstdint>
#include <vector>

#include "gridwatch/common.hpp"
#include "gridwatch/grid_model.hpp"

namespace gridwatch {

enum class Channel { angle_active, voltage_reactive };
enum class GraphMode { first_neighbor, exact_two_hop };

// Gaussian model of the non-slack bus angles. The physical (exact) precision
// for i.i.d. injection fluctuations of std sigma_p is J = B_r' B_r / sigma_p^2,
// whose Markov graph adds two-hop fill-in edges to the branch adjacency. The
// first-neighbor approximation J = B_r / sigma_p^2 keeps the Markov graph
// equal to the branch adjacency and is the reference model for tuning.
struct PrecisionModel {
  Matrix j;                 // (p-1) x (p-1), positive definite
  double sigma_p = 0.03;
  Channel channel = Channel::angle_active;
  GraphMode mode = GraphMode::exact_two_hop;
  std::vector<int> var_ids;

  Matrix covariance() const;  // J^{-1}
};

PrecisionModel precision_from_b(const SusceptanceMatrix& b, double sigma_p,
                                Channel channel = Channel::angle_active);

PrecisionModel first_neighbor_precision(const SusceptanceMatrix& b, double sigma_p,
                                        Channel channel = Channel::angle_active);

// r_ij = -J_ij / sqrt(J_ii J_jj), zero diagonal.
Matrix partial_correlations(const Matrix& j);

// Spectral norm of the entrywise-absolute partial-correlation matrix.
// alpha < 1 means the model is walk-summable; larger values are reported,
// not rejected.
double walk_summability_alpha(const Matrix& r);

// Markov graph of a precision model: pairs with |J_ij| above tol, as bus ids.
EdgeSet predicted_markov_graph(const PrecisionModel& model, double tol = 1e-9);

// Graph predicted from topology alone: branch adjacency over non-slack buses
// (first_neighbor) or the zero pattern of B_r' B_r (exact_two_hop).
EdgeSet predicted_markov_graph(const GridCase& gc, GraphMode mode);

struct SampleMatrix {
  Matrix samples;  // n x (p-1), one sample per row
  std::vector<int> var_ids;
  std::vector<std::uint8_t> corrupted;  // per-sample provenance flag
  std::uint64_t seed = 0;
};

// Draw n angle samples: injections i.i.d. N(0, sigma_p^2) per non-slack bus
// (slack absorbs the balance), angles from the reduced DC solve, plus
// optional i.i.d. N(0, noise_sigma^2) measurement noise per entry.
SampleMatrix sample_gmrf(const PrecisionModel& model, const SusceptanceMatrix& b,
                         int n, std::uint64_t seed, double noise_sigma = 0.0);

// Schur complement Sigma(i,j) - Sigma(i,S) Sigma(S,S)^{-1} Sigma(S,j) with an
// exact (unregularized) solve; the oracle for the streaming estimator.
double conditional_covariance_exact(const Matrix& sigma, int i, int j,
                                    const std::vector<int>& s);

}  // namespace gridwatch
