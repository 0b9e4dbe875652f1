#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace fbl {

// SplitMix64 finalizer; derives independent stream seeds from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic generator. The distributions are implemented here rather than
// taken from <random> so that streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();                  // [0, 1)
  double uniform(double lo, double hi);
  double normal();                   // standard Gaussian (Box-Muller)
  int below(int bound);              // [0, bound)
  Eigen::VectorXd gaussian_vector(int dim);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fbl
