#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "errors.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"
#include "seqident/optimize.hpp"
#include "seqident/random.hpp"
#include "seqident/stability.hpp"

using namespace seqident;

namespace {

const LossFunction kIdentity{{0, 1}};

StagedDiagram single_action() {
  return {1, {{"A", VarKind::action, 1}, {"Y", VarKind::outcome, 2}}, {{0, 1}}};
}

DiscreteModel single_action_model() {
  return {{2, 2}, {Cpt{{}, 2, {0.5, 0.5}}, Cpt{{0}, 2, {0.8, 0.2, 0.3, 0.7}}}};
}

bool in_argmax(const OptimizationResult& bf, std::uint64_t index) {
  return std::find(bf.argmax.begin(), bf.argmax.end(), index) != bf.argmax.end();
}

long double strategy_count(const StagedDiagram& d, const std::vector<int>& cards, const StrategyParentSpec& spec) {
  long double count = 1;
  for (int i = 1; i <= d.n_stages; ++i) {
    long double rows = 1;
    for (int p : spec.of(i)) rows *= cards[static_cast<std::size_t>(p)];
    count *= std::pow(static_cast<long double>(cards[static_cast<std::size_t>(d.action(i))]), rows);
  }
  return count;
}

}  // namespace

TEST_CASE("one-step argmax") {
  const StagedDiagram d = single_action();
  const auto oc = observational_conditionals(single_action_model(), d);
  const auto full = StrategyParentSpec::full_history(d);
  const auto dp = optimize_backward(oc, d, kIdentity, full);
  CHECK(dp.value == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(dp.strategy.kernel_table(1).probs == std::vector<double>{0, 1});
  REQUIRE(dp.decisions.size() == 1);
  CHECK(dp.decisions[0].action == 1);
  CHECK(dp.decisions[0].action_values[0] == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_FALSE(dp.decisions[0].unreachable);

  const auto bf = optimize_bruteforce(oc, d, kIdentity, full);
  CHECK(bf.value == dp.value);
  CHECK(bf.argmax == std::vector<std::uint64_t>{1});
  CHECK(bf.evaluated == 2);
  CHECK(bf.strategy == dp.strategy);
}

TEST_CASE("constant loss ties resolve to the lowest actions") {
  const StagedDiagram d = fixtures::observed_confounder();
  const auto oc = observational_conditionals(fixtures::observed_confounder_model(), d);
  const LossFunction flat{{0.25, 0.25}};
  const auto full = StrategyParentSpec::full_history(d);
  const auto dp = optimize_backward(oc, d, flat, full);
  CHECK(dp.value == doctest::Approx(0.25).epsilon(1e-12));
  for (int i = 1; i <= 2; ++i) {
    const auto& probs = dp.strategy.kernel_table(i).probs;
    for (std::size_t r = 0; r < probs.size(); r += 2) CHECK(probs[r] == 1.0);
  }
  const auto bf = optimize_bruteforce(oc, d, flat, full);
  CHECK(bf.argmax.size() == 1024);
  CHECK(bf.argmax.front() == 0);
}

TEST_CASE("observed confounder optimum") {
  const StagedDiagram d = fixtures::observed_confounder();
  const DiscreteModel m = fixtures::observed_confounder_model();
  const auto oc = observational_conditionals(m, d);
  const auto full = StrategyParentSpec::full_history(d);
  const auto dp = optimize_backward(oc, d, kIdentity, full);
  const auto bf = optimize_bruteforce(oc, d, kIdentity, full);
  CHECK(bf.evaluated == 1024);
  CHECK(dp.value == bf.value);
  const auto all = enumerate_deterministic(d, m.cards, full);
  CHECK(in_argmax(bf, all.index_of(dp.strategy)));

  // Y depends on A1, A2 only: best cell of p(Y=1 | a1, a2) is 0.8 at (1, 1)
  CHECK(dp.value == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(dp.strategy.kernel_table(1).probs == std::vector<double>{0, 1, 0, 1});
  CHECK(dp.decisions.size() == 2 + 8);
  for (const auto& dec : dp.decisions) {
    CHECK(dec.action == 1);
    CHECK(dec.history.size() == (dec.stage == 1 ? 1u : 3u));
  }

  const StrategyParentSpec blind{{{0}, {}}};
  const auto restricted = optimize_bruteforce(oc, d, kIdentity, blind);
  CHECK(restricted.value <= dp.value);

  const StrategyParentSpec follow{{{}, {2}}};
  const auto eight = optimize_bruteforce(oc, d, kIdentity, follow);
  CHECK(eight.evaluated == 8);
  const auto follow_all = enumerate_deterministic(d, m.cards, follow);
  const Strategy same_rule = make_deterministic(d, m.cards, follow, [](int, std::span<const int>) { return 1; });
  CHECK(in_argmax(eight, follow_all.index_of(same_rule)));
  CHECK(eight.value == dp.value);
}

TEST_CASE("backward induction matches enumeration exactly") {
  Rng rng(61);
  int instances = 0;
  int tries = 0;
  while (instances < 120) {
    REQUIRE(++tries < 5000);
    RandomDiagramOptions options;
    options.max_stages = 2;
    options.max_nodes = 6;
    const StagedDiagram d = random_staged_diagram(rng, options);
    const auto full = StrategyParentSpec::full_history(d);
    if (!check_general(d, full).overall) continue;
    const DiscreteModel m = random_model(rng, d, 2, 0.05);
    if (strategy_count(d, m.cards, full) > 70000) continue;
    ++instances;
    const LossFunction k = random_loss(rng, 2);
    const auto oc = observational_conditionals(m, d);
    const auto dp = optimize_backward(oc, d, k, full);
    const auto bf = optimize_bruteforce(oc, d, k, full);
    CHECK(dp.value == bf.value);
    const auto all = enumerate_deterministic(d, m.cards, full);
    CHECK(in_argmax(bf, all.index_of(dp.strategy)));
    CHECK(evaluate_g_recursion(oc, dp.strategy, k).value == dp.value);
  }
}

TEST_CASE("more information never lowers the optimum") {
  Rng rng(62);
  for (int it = 0; it < 150; ++it) {
    RandomDiagramOptions options;
    options.max_stages = 2;
    options.max_nodes = 6;
    const StagedDiagram d = random_staged_diagram(rng, options);
    const DiscreteModel m = random_model(rng, d, 2, 0.05);
    const auto spec = random_spec(rng, d);
    if (strategy_count(d, m.cards, spec) > 70000) continue;
    const LossFunction k = random_loss(rng, 2);
    const auto oc = observational_conditionals(m, d);
    const double full = optimize_backward(oc, d, k, StrategyParentSpec::full_history(d)).value;
    CHECK(optimize_bruteforce(oc, d, k, spec).value <= full);
    CHECK(optimize_bruteforce(oc, d, k, StrategyParentSpec::unconditional(d)).value <= full);
  }
}

TEST_CASE("under simple stability the optimum is the true best value") {
  Rng rng(63);
  int tested = 0;
  for (int it = 0; it < 400 && tested < 60; ++it) {
    RandomDiagramOptions options;
    options.max_stages = 2;
    options.max_nodes = 6;
    const StagedDiagram d = random_staged_diagram(rng, options);
    if (!check_simple_stability(d).overall) continue;
    const DiscreteModel m = random_model(rng, d, 2, 0.05);
    const auto full = StrategyParentSpec::full_history(d);
    if (strategy_count(d, m.cards, full) > 5000) continue;
    ++tested;
    const LossFunction k = random_loss(rng, 2);
    const double dp = optimize_backward(observational_conditionals(m, d), d, k, full).value;
    double best = -1e300;
    const auto all = enumerate_deterministic(d, m.cards, full);
    for (const Strategy& s : all.strategies()) {
      best = std::max(best, oracle::expected_loss(m, d, s, k));
    }
    CHECK(std::abs(dp - best) <= 1e-9);
  }
  CHECK(tested >= 40);
}

TEST_CASE("conditional strategies strictly beat unconditional ones") {
  const ModelFile f = fixtures::load("observed_confounder_outcome_link.model");
  const StagedDiagram& d = f.diagram;
  const DiscreteModel& m = *f.model;
  REQUIRE(check_simple_stability(d).overall);
  const auto oc = observational_conditionals(m, d);
  const auto dp = optimize_backward(oc, d, *f.loss, StrategyParentSpec::full_history(d));
  const auto unconditional = optimize_bruteforce(oc, d, *f.loss, StrategyParentSpec::unconditional(d));
  CHECK(unconditional.evaluated == 4);
  CHECK(dp.value - unconditional.value >= 0.05);
  CHECK(dp.strategy == *f.strategy("optimal"));
  CHECK(unconditional.strategy == *f.strategy("best_unconditional"));

  // the gap is real, not an artifact of the recursion
  const double truth_gap = oracle::expected_loss(m, d, dp.strategy, *f.loss) -
                           oracle::expected_loss(m, d, unconditional.strategy, *f.loss);
  CHECK(truth_gap >= 0.05);
}

TEST_CASE("unreachable histories are flagged") {
  const StagedDiagram d = fixtures::observed_confounder();
  DiscreteModel m = fixtures::observed_confounder_model();
  // L2 = 0 whenever A1 = 0
  m.cpts[2].probs = {1, 0, 0.5, 0.5, 1, 0, 0.1, 0.9};
  const auto dp = optimize_backward(observational_conditionals(m, d), d, kIdentity, StrategyParentSpec::full_history(d));
  int flagged = 0;
  for (const auto& dec : dp.decisions) {
    const bool expect = dec.stage == 2 && dec.history[1] == 0 && dec.history[2] == 1;
    CHECK(dec.unreachable == expect);
    if (dec.unreachable) {
      CHECK(dec.action == 0);
      ++flagged;
    }
  }
  CHECK(flagged == 2);
}

TEST_CASE("optimizer errors") {
  const StagedDiagram d = fixtures::observed_confounder();
  DiscreteModel m = fixtures::observed_confounder_model();
  const auto oc = observational_conditionals(m, d);
  CHECK(error_code([&] { optimize_backward(oc, d, kIdentity, StrategyParentSpec::unconditional(d)); }) ==
        Errc::invalid_spec);
  CHECK(error_code([&] { optimize_bruteforce(oc, d, kIdentity, StrategyParentSpec::full_history(d), 100); }) ==
        Errc::enumeration_too_large);
  CHECK(error_code([&] { optimize_backward(oc, d, LossFunction{{1}}, StrategyParentSpec::full_history(d)); }) ==
        Errc::shape_mismatch);

  m.cpts[1].probs = {1, 0, 0.2, 0.8};
  const auto gap = observational_conditionals(m, d);
  CHECK(error_code([&] { optimize_backward(gap, d, kIdentity, StrategyParentSpec::full_history(d)); }) ==
        Errc::positivity_violation);
  CHECK(error_code([&] { optimize_bruteforce(gap, d, kIdentity, StrategyParentSpec::unconditional(d)); }) ==
        Errc::positivity_violation);
}
