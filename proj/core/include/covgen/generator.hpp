#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace covgen {

/// SplitMix64 (Steele, Lea, Flood 2014):
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
/// Bounded draws use `lo + next() % (hi - lo + 1)`.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);
  /// True with probability percent/100.
  bool chance(unsigned percent) { return uniform(0, 99) < static_cast<std::int64_t>(percent); }

 private:
  std::uint64_t state_;
};

struct GenConfig {
  unsigned diamonds = 2;
  unsigned nesting_depth = 2;
  unsigned stmts_per_block = 3;
  std::optional<unsigned> num_vars;  // drawn from [10, 20] when unset
  std::uint64_t seed = 1;
  unsigned extra_assume_percent = 20;  // branches with an extra assume
  unsigned const_assign_percent = 30;  // assignments of a constant
  unsigned loops = 0;  // the first `loops` diamonds get a back-edge
  int const_min = -10, const_max = 10;
  int coef_min = -1, coef_max = 1;
};

/// Random unstructured program: a chain of diamonds, each a nested
/// if-then-else built from complementary assume-guarded gotos. Identical
/// configs produce identical text.
std::string gen_program(const GenConfig& config);

}  // namespace covgen
