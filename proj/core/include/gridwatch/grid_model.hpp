#pragma once

#include <vector>

#include "gridwatch/case_io.hpp"
#include "gridwatch/common.hpp"

namespace gridwatch {

// Weighted graph Laplacian of the branch susceptances: B_ii = sum_j b_ij,
// B_ij = -b_ij. Row sums are zero; for a connected grid the slack-reduced
// matrix is positive definite and fixes the angle reference.
struct SusceptanceMatrix {
  Matrix full;      // p x p
  Matrix reduced;   // (p-1) x (p-1), slack row/column removed
  std::vector<int> bus_ids;  // full row i <-> bus_ids[i]
  std::vector<int> var_ids;  // reduced row i <-> var_ids[i] (non-slack)
  int slack = 0;     // bus id
  int slack_pos = 0; // row of `full`

  int pos(int bus_id) const;      // index into full
  int var_pos(int bus_id) const;  // index into reduced; throws for slack
};

SusceptanceMatrix build_susceptance_matrix(const GridCase& gc);

// DC power flow: solve B X = P with the slack angle pinned at 0. Injections
// must balance to zero (tolerance 1e-9) and are indexed like bus_ids.
// Returns the full p-vector of angles.
Vector solve_angles(const SusceptanceMatrix& b, const Vector& injections);

// BFS hop distances over the branch graph, indexed like GridCase.buses.
Eigen::MatrixXi hop_distances(const GridCase& gc);

// Branch adjacency as an undirected bus-id edge set.
EdgeSet branch_adjacency(const GridCase& gc);

// One detection area: the buses it owns, split into interior and border
// (border = adjacent to another area), plus the augmented set that adds the
// out-of-area one-hop neighbors of the border buses.
struct SubNetwork {
  int area_id = 0;
  std::vector<int> interior;
  std::vector<int> border;
  std::vector<int> augmented;
  EdgeSet edges;  // induced branch edges over the augmented set
};

std::vector<SubNetwork> partition_areas(const GridCase& gc);

}  // namespace gridwatch
