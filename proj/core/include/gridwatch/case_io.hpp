#pragma once

#include <string>
#include <vector>

#include "gridwatch/common.hpp"

namespace gridwatch {

struct Bus {
  int id = 0;
  int area = 1;
};

// One network branch with susceptance b = 1/x; parallel branches are merged
// at parse time by summing susceptances.
struct Branch {
  int from = 0;
  int to = 0;
  double b = 0.0;
};

struct GridCase {
  double base_mva = 100.0;
  int slack = 0;
  std::vector<Bus> buses;      // sorted by id
  std::vector<Branch> branches;  // sorted by (min,max) endpoint pair

  int bus_index(int bus_id) const;  // position in buses, -1 if absent
  bool has_bus(int bus_id) const { return bus_index(bus_id) >= 0; }
};

// Throws ValidationError on duplicate ids, dangling branch endpoints,
// self-loops, nonpositive susceptance, missing slack, or a disconnected
// branch graph.
void validate(const GridCase& gc);

// Parse the MATPOWER matrix subset: `mpc.baseMVA = <num>;` plus
// `mpc.bus = [rows];` (cols 1 id, 2 type, 7 area) and `mpc.branch = [rows];`
// (cols 1 from, 2 to, 4 x, 11 status). `%` comments are stripped, unknown
// blocks are skipped, out-of-service branches are dropped. The slack is the
// unique type-3 bus.
GridCase parse_matpower_case(const std::string& text);

GridCase load_case_file(const std::string& path);

// Canonical JSON round trip; key order is fixed and buses/branches are
// sorted, so equal cases serialize to identical bytes.
std::string to_canonical_json(const GridCase& gc);
GridCase from_canonical_json(const std::string& text);

}  // namespace gridwatch
