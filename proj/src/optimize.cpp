#include "seqident/optimize.hpp"

#include <limits>

#include "seqident/error.hpp"

namespace seqident {

namespace {

using Step = ObservationalConditionals::Step;
using StepKind = ObservationalConditionals::StepKind;

}  // namespace

OptimizationResult optimize_backward(const ObservationalConditionals& oc, const StagedDiagram& d,
                                     const LossFunction& k, const StrategyParentSpec& spec) {
  require_valid(d);
  if (!is_full_history(d, spec)) {
    throw Error(Errc::invalid_spec, "backward induction needs every action to see its full observed history");
  }
  const auto& steps = oc.steps();
  const int y_card = oc.cards()[oc.outcome()];
  if (static_cast<int>(k.values.size()) != y_card) throw Error(Errc::shape_mismatch, "loss does not match the outcome");

  // Reachable under some strategy: positive covariate transitions, any action.
  std::vector<std::vector<char>> reach{{1}};
  for (std::size_t t = 0; t < steps.size(); ++t) {
    const Step& step = steps[t];
    std::vector<char> next(step.histories * step.width, 0);
    for (std::size_t h = 0; h < step.histories; ++h) {
      if (!reach[t][h]) continue;
      if (step.kind == StepKind::action) {
        const Step& after = steps[t + 1];
        for (std::size_t a = 0; a < step.width; ++a) {
          if (!after.defined[h * step.width + a]) {
            throw Error(Errc::positivity_violation,
                        "action " + std::to_string(a) + " of '" + d.label(d.action(step.stage)) +
                            "' has no observational support at a reachable history");
          }
          next[h * step.width + a] = 1;
        }
        continue;
      }
      if (!step.defined[h]) throw Error(Errc::masked_history_reachable, "reachable history without conditionals");
      for (std::size_t l = 0; l < step.width; ++l) {
        if (step.table[h * step.width + l] > 0.0) next[h * step.width + l] = 1;
      }
    }
    reach.push_back(std::move(next));
  }

  OptimizationResult result;
  std::vector<std::vector<double>> kernels(static_cast<std::size_t>(d.n_stages));
  std::vector<double> f(reach.back().size());
  for (std::size_t h = 0; h < f.size(); ++h) f[h] = k.values[h % static_cast<std::size_t>(y_card)];

  for (std::size_t t = steps.size(); t-- > 0;) {
    const Step& step = steps[t];
    std::vector<double> g(step.histories, 0.0);
    if (step.kind == StepKind::action) {
      auto& kernel = kernels[static_cast<std::size_t>(step.stage - 1)];
      kernel.assign(step.histories * step.width, 0.0);
      for (std::size_t h = 0; h < step.histories; ++h) {
        HistoryDecision decision;
        decision.stage = step.stage;
        decision.history = oc.decode_history(step.prefix_length, h);
        decision.unreachable = !reach[t][h];
        decision.action_values.assign(f.begin() + static_cast<std::ptrdiff_t>(h * step.width),
                                      f.begin() + static_cast<std::ptrdiff_t>((h + 1) * step.width));
        std::size_t best = 0;
        if (!decision.unreachable) {
          for (std::size_t a = 1; a < step.width; ++a) {
            if (decision.action_values[a] > decision.action_values[best]) best = a;
          }
        }
        decision.action = static_cast<int>(best);
        kernel[h * step.width + best] = 1.0;
        // Same arithmetic as G-recursion on an indicator kernel.
        g[h] = 0.0 + 1.0 * decision.action_values[best];
        result.decisions.push_back(std::move(decision));
      }
    } else {
      for (std::size_t h = 0; h < step.histories; ++h) {
        if (!step.defined[h]) {
          g[h] = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        double acc = 0.0;
        for (std::size_t l = 0; l < step.width; ++l) {
          const double p = step.table[h * step.width + l];
          if (p > 0.0) acc += p * f[h * step.width + l];
        }
        g[h] = acc;
      }
    }
    f = std::move(g);
  }
  result.value = f[0];
  // Full-history kernels are indexed by the history itself.
  result.strategy = make_stochastic(d, oc.cards(), spec, std::move(kernels));
  return result;
}

OptimizationResult optimize_bruteforce(const ObservationalConditionals& oc, const StagedDiagram& d,
                                       const LossFunction& k, const StrategyParentSpec& spec, std::uint64_t cap) {
  const auto all = enumerate_deterministic(d, oc.cards(), spec, cap);
  OptimizationResult result;
  result.value = -std::numeric_limits<double>::infinity();
  for (std::uint64_t index = 0; index < all.count(); ++index) {
    const double value = evaluate_g_recursion(oc, all.at(index), k).value;
    if (value > result.value) {
      result.value = value;
      result.argmax.clear();
    }
    if (value == result.value) result.argmax.push_back(index);
  }
  result.evaluated = all.count();
  result.strategy = all.at(result.argmax.front());
  return result;
}

}  // namespace seqident
