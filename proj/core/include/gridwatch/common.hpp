#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gridwatch {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Undirected edge set over bus ids; pairs stored as (min, max).
using EdgeSet = std::set<std::pair<int, int>>;

inline std::pair<int, int> edge(int a, int b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input text; carries the 1-based line number when known.
struct ParseError : Error {
  explicit ParseError(const std::string& msg, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line(line) {}
  int line;
};

struct ValidationError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

// No threshold in the candidate grid meets the tuning bound.
struct TuningError : Error {
  using Error::Error;
};

// --- deterministic RNG plumbing -------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stable per-task seed: hash the master seed with a path of task indices so
// parallel replicas draw disjoint, reproducible streams.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = master;
  splitmix64(s);
  for (std::uint64_t part : path) {
    s ^= part + 0x9e3779b97f4a7c15ULL;
    splitmix64(s);
  }
  return splitmix64(s);
}

// N(0,1) sampler over mt19937_64 that does not depend on the standard
// library's unspecified normal_distribution algorithm.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    // Box-Muller on uniforms built from the top 53 bits.
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  Vector vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = (*this)();
    return v;
  }

  std::uint64_t raw() { return rng_(); }

 private:
  double uniform01() { return (rng_() >> 11) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gridwatch
