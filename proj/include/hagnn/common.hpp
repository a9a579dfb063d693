#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hagnn {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

// Error hierarchy. The CLI maps ConfigError/usage problems to exit 2 and
// runtime failures (NumericError, CheckpointError, IngestError, IoError) to 1.
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

uint64_t fnv1a(const void* data, size_t len, uint64_t seed = 0xcbf29ce484222325ull);
uint64_t fnv1a(std::string_view s);
// Digest of a file's raw bytes, hex-encoded. Throws IoError if unreadable.
std::string file_digest_hex(const std::string& path);
std::string to_hex(uint64_t v);

// Deterministic RNG. All draws go through explicit bit manipulation so a
// given seed produces the same stream on any compiler (std::*_distribution
// is implementation-defined, which would break the byte-reproducibility
// contract).
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), eng_(seed) {}

  // Labeled sub-stream: one root seed fans out to independent generators.
  // Forking depends only on (seed, label), never on draws already made.
  Rng fork(std::string_view label) const {
    return Rng(fnv1a(label.data(), label.size(), seed_ ^ 0x9e3779b97f4a7c15ull));
  }
  Rng fork(std::string_view label, uint64_t index) const {
    uint64_t h = fnv1a(label.data(), label.size(), seed_ ^ 0x9e3779b97f4a7c15ull);
    return Rng(fnv1a(&index, sizeof(index), h));
  }

  uint64_t seed() const { return seed_; }
  uint64_t bits() { return eng_(); }

  // in [0, 1)
  double uniform() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  // in [0, n)
  uint64_t below(uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  uint64_t seed_;
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Shortest round-trippable decimal form (%.17g); used for every CSV/JSON
// float so identical runs emit identical bytes.
std::string fmt_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace hagnn
