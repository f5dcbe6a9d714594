#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace seqident {

struct GeneralImpliesSimpleSummary {
  std::uint64_t seed = 0;
  int iterations = 0;
  int general_passed = 0;
  int simple_passed = 0;
  // Full-history specs whose assumptions failed after normalisation; the
  // generator should never produce these.
  int skipped = 0;
  // Serialized diagrams where the general check passed and simple stability
  // failed.
  std::vector<std::string> counterexamples;
};

// Random staged diagrams (N <= 3, at most 8 nodes) with A_N -> Y forced, a
// full-history spec and normalised parents.
GeneralImpliesSimpleSummary fuzz_general_implies_simple(std::uint64_t seed, int iterations);

}  // namespace seqident
