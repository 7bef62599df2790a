#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace heatlayer {

/// Global worker count used by parallel_for. 0 means "use all hardware threads".
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Work is split into contiguous blocks, one per
/// worker; every index is processed exactly once and each body call must only
/// write to state owned by its index, so results do not depend on the worker
/// count (bit-stable outputs).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Deterministic seeded generator. The uniform draw uses the top 53 bits of the
/// mt19937_64 stream directly, so sequences are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double a, double b) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return a + (b - a) * u;
  }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(eng_() % span);
  }

 private:
  std::mt19937_64 eng_;
};

/// Formats a double with enough digits to round-trip (used by all CSV output
/// so identical runs produce byte-identical files).
std::string format_double(double v);

/// Minimal CSV assembly: header row then data rows, '\n' line endings,
/// '.' decimal separator.
class CsvBuilder {
 public:
  explicit CsvBuilder(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  void add_row_mixed(const std::vector<std::string>& values);

  const std::string& str() const { return text_; }
  void write(const std::string& path) const;

 private:
  std::string text_;
  std::size_t columns_;
};

/// Creates the directory (and parents) if missing.
void ensure_directory(const std::string& path);

}  // namespace heatlayer
