#ifndef METAGAMES_COMMON_H_
#define METAGAMES_COMMON_H_

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace metagames {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Error taxonomy. The CLI maps ConfigError to exit code 2 and NumericError to
// exit code 3; everything else is a programming or input error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class BoundsError : public Error {
 public:
  using Error::Error;
};

// xoshiro256** seeded through splitmix64. Uniforms and normals are derived by
// hand because the std:: distributions are implementation-defined, and run
// outputs must be byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);   // [lo, hi)
  double normal();
  int index(int n);                       // uniform in [0, n)
  int categorical(const Vec& p);

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Mixes a base seed with a stream label so that per-task and per-arm
// generators never share a sequence.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

bool all_finite(const Vec& v);

}  // namespace metagames

#endif  // METAGAMES_COMMON_H_
