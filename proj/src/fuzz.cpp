#include "seqident/fuzz.hpp"

#include "seqident/model_file.hpp"
#include "seqident/random.hpp"
#include "seqident/stability.hpp"

namespace seqident {

GeneralImpliesSimpleSummary fuzz_general_implies_simple(std::uint64_t seed, int iterations) {
  GeneralImpliesSimpleSummary summary;
  summary.seed = seed;
  summary.iterations = iterations;
  Rng rng(seed);
  RandomDiagramOptions options;
  options.last_action_to_outcome = true;
  for (int it = 0; it < iterations; ++it) {
    const StagedDiagram raw = random_staged_diagram(rng, options);
    const auto spec = StrategyParentSpec::full_history(raw);
    const StagedDiagram d = normalize_parents(raw, spec);
    if (!check_assumptions(d, spec).overall) {
      ++summary.skipped;
      continue;
    }
    const bool general = check_general(d, spec).overall;
    const bool simple = check_simple_stability(d).overall;
    summary.general_passed += general;
    summary.simple_passed += simple;
    if (general && !simple) summary.counterexamples.push_back(serialize(d));
  }
  return summary;
}

}  // namespace seqident
