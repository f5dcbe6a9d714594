#include <doctest.h>

#include <algorithm>

#include "errors.hpp"
#include "fixtures.hpp"
#include "seqident/diagram.hpp"
#include "seqident/random.hpp"

using namespace seqident;

namespace {

bool has_violation(const StagedDiagram& d, ViolationKind kind) {
  const auto v = validate_diagram(d);
  return std::any_of(v.begin(), v.end(), [&](const DiagramViolation& x) { return x.kind == kind; });
}

NodeSet labels(const Dag& g, std::initializer_list<std::string_view> names) { return g.set_of(names); }

bool separated(const Dag& g, std::initializer_list<std::string_view> x, std::initializer_list<std::string_view> y,
               std::initializer_list<std::string_view> z) {
  return d_separated(g, g.set_of(x), g.set_of(y), g.set_of(z)).separated;
}

}  // namespace

TEST_CASE("validation") {
  const StagedDiagram d = fixtures::hidden_confounder();
  CHECK(validate_diagram(d).empty());
  CHECK_NOTHROW(require_valid(d));

  StagedDiagram backward = d;
  backward.edges.push_back({d.index_of("Y"), d.index_of("A1")});
  CHECK(has_violation(backward, ViolationKind::edge_against_order));
  CHECK(error_code([&] { require_valid(backward); }) == Errc::invalid_diagram);

  StagedDiagram two_outcomes = d;
  two_outcomes.vars.push_back({"Y2", VarKind::outcome, 3});
  CHECK(has_violation(two_outcomes, ViolationKind::multiple_outcomes));

  StagedDiagram late_hidden = d;
  late_hidden.vars.insert(late_hidden.vars.end() - 1, {"U3", VarKind::hidden, 3});
  CHECK(has_violation(late_hidden, ViolationKind::hidden_after_outcome));

  StagedDiagram disordered = d;
  std::swap(disordered.vars[1], disordered.vars[2]);  // L2 before A1
  CHECK(has_violation(disordered, ViolationKind::bad_stage_order));

  StagedDiagram missing_action = d;
  missing_action.n_stages = 3;
  missing_action.vars.back().stage = 4;
  CHECK(has_violation(missing_action, ViolationKind::action_count));

  StagedDiagram reserved = d;
  reserved.vars[0].label = "sigma";
  CHECK(has_violation(reserved, ViolationKind::reserved_label));

  StagedDiagram no_outcome = d;
  no_outcome.vars.pop_back();
  no_outcome.edges.erase(std::remove_if(no_outcome.edges.begin(), no_outcome.edges.end(),
                                        [](const Edge& e) { return e.to == 4; }),
                         no_outcome.edges.end());
  CHECK(has_violation(no_outcome, ViolationKind::missing_outcome));

  StagedDiagram doubled = d;
  doubled.edges.push_back(doubled.edges.front());
  CHECK(has_violation(doubled, ViolationKind::duplicate_edge));
}

TEST_CASE("blocks and parents") {
  const StagedDiagram d = fixtures::hidden_confounder();
  CHECK(d.covariate_block(1).empty());
  CHECK(d.covariate_block(2) == std::vector<int>{2});
  CHECK(d.covariate_block(3) == std::vector<int>{4});
  CHECK(d.hidden_block(1) == std::vector<int>{0});
  CHECK(d.parents(d.index_of("L2")) == std::vector<int>{0, 1});
  CHECK(d.observed_before(d.index_of("A2")) == std::vector<int>{1, 2});
  CHECK(StrategyParentSpec::full_history(d) == fixtures::adaptive_spec(d));
  CHECK(is_full_history(d, fixtures::adaptive_spec(d)));
}

TEST_CASE("strategy spec validation") {
  const StagedDiagram d = fixtures::hidden_confounder();
  StrategyParentSpec hidden_parent{{{0}, {}}};
  CHECK(error_code([&] { require_valid(d, hidden_parent); }) == Errc::invalid_spec);
  StrategyParentSpec later_parent{{{2}, {}}};
  CHECK(error_code([&] { require_valid(d, later_parent); }) == Errc::invalid_spec);
  StrategyParentSpec wrong_length{{{}}};
  CHECK(error_code([&] { require_valid(d, wrong_length); }) == Errc::invalid_spec);
}

TEST_CASE("regime augmentation and stripping") {
  const StagedDiagram d = fixtures::hidden_confounder();
  const Dag g = augment_with_regime(d);
  const int sigma = g.index_of("sigma");
  CHECK(sigma == d.size());
  CHECK(g.parents(sigma).empty());
  CHECK(g.children(sigma) == labels(g, {"A1", "A2"}));

  StagedDiagram single;
  single.n_stages = 1;
  single.vars = {{"A1", VarKind::action, 1}, {"Y", VarKind::outcome, 2}};
  single.edges = {{0, 1}};
  CHECK(augment_with_regime(single).children(2).size() == 1);

  CHECK(error_code([&] { augment_with_regime(g, d); }) == Errc::regime_already_present);
  CHECK(augment_with_regime(d.to_dag(), d) == g);

  const Dag stripped = strip_regime(g);
  CHECK(stripped == d.to_dag());
  CHECK(stripped.size() == 5);
  CHECK(error_code([&] { strip_regime(stripped); }) == Errc::no_regime_node);
}

TEST_CASE("normalize_parents") {
  const StagedDiagram d = fixtures::hidden_confounder();
  CHECK(normalize_parents(d, StrategyParentSpec::unconditional(d)) == d);

  const StagedDiagram n = normalize_parents(d, fixtures::adaptive_spec(d));
  const int a1 = d.index_of("A1"), l2 = d.index_of("L2"), a2 = d.index_of("A2");
  CHECK(n.parents(a2) == std::vector<int>{a1, l2});
  const auto it = std::find_if(n.edges.begin(), n.edges.end(), [&](const Edge& e) { return e.from == a1 && e.to == a2; });
  REQUIRE(it != n.edges.end());
  CHECK(it->inert);
  CHECK(std::count_if(n.edges.begin(), n.edges.end(), [](const Edge& e) { return e.inert; }) == 1);
}

TEST_CASE("check graphs on the hidden-confounder diagram") {
  const StagedDiagram d = fixtures::hidden_confounder();
  const auto none = StrategyParentSpec::unconditional(d);
  const auto adaptive = fixtures::adaptive_spec(d);

  const Dag d1 = build_check_graph(d, none, 1);
  CHECK(d1.parents(d1.index_of("A1")) == labels(d1, {"sigma", "U1"}));
  CHECK(d1.parents(d1.index_of("A2")).empty());
  CHECK(separated(d1, {"Y"}, {"sigma"}, {"A1"}));

  const Dag d1_adaptive = build_check_graph(d, adaptive, 1);
  CHECK_FALSE(separated(d1_adaptive, {"Y"}, {"sigma"}, {"A1"}));

  const Dag d2 = build_check_graph(d, none, 2);
  CHECK(d2.parents(d2.index_of("A2")) == labels(d2, {"sigma", "L2"}));
  CHECK(separated(d2, {"Y"}, {"sigma"}, {"A1", "A2", "L2"}));

  const Dag d0 = build_check_graph(d, adaptive, 0);
  CHECK_FALSE(d0.find("sigma").has_value());
  CHECK(d0.parents(d0.index_of("A1")).empty());
  CHECK(d0.parents(d0.index_of("A2")) == labels(d0, {"A1", "L2"}));

  CHECK(error_code([&] { build_check_graph(d, none, 3); }) == Errc::stage_out_of_range);
  CHECK(error_code([&] { build_check_graph(d, none, -1); }) == Errc::stage_out_of_range);
}

TEST_CASE("Pearl-Robins graphs on the hidden-confounder diagram") {
  const StagedDiagram d = normalize_parents(fixtures::hidden_confounder(), fixtures::adaptive_spec(fixtures::hidden_confounder()));
  const auto spec = fixtures::adaptive_spec(d);
  const Dag dprime = d.to_dag();

  const Dag g1 = build_pearl_robins_graph(dprime, d, spec, 1);
  const auto v1 = d_separated(g1, g1.set_of({"Y"}), g1.set_of({"A1"}), {});
  CHECK_FALSE(v1.separated);
  CHECK(render_path(g1, v1.witness) == "A1 - U1 - L2 - A2 - Y");

  const Dag g2 = build_pearl_robins_graph(dprime, d, spec, 2);
  CHECK(separated(g2, {"Y"}, {"A2"}, {"A1", "L2"}));

  const auto none = StrategyParentSpec::unconditional(d);
  const Dag plain = fixtures::hidden_confounder().to_dag();
  const Dag last = build_pearl_robins_graph(plain, fixtures::hidden_confounder(), none, 2);
  std::vector<Arc> expected;
  for (const auto& a : plain.arcs()) {
    if (a.first != plain.index_of("A2")) expected.push_back(a);
  }
  CHECK(last.arcs() == expected);

  CHECK(error_code([&] { build_pearl_robins_graph(dprime, d, spec, 0); }) == Errc::stage_out_of_range);
  CHECK(error_code([&] { build_pearl_robins_graph(dprime, d, spec, 3); }) == Errc::stage_out_of_range);
}

TEST_CASE("all seven quoted separation verdicts hold on the fixtures") {
  const StagedDiagram hidden = fixtures::hidden_confounder();
  const StagedDiagram observed = fixtures::observed_confounder();

  // simple stability violated through the hidden confounder
  const Dag dh = augment_with_regime(hidden);
  CHECK_FALSE(separated(dh, {"L2"}, {"sigma"}, {"A1"}));

  // observed confounder: every block stable
  const Dag dobs = augment_with_regime(observed);
  CHECK(separated(dobs, {"L1"}, {"sigma"}, {}));
  CHECK(separated(dobs, {"L2"}, {"sigma"}, {"A1", "L1"}));
  CHECK(separated(dobs, {"Y"}, {"sigma"}, {"A1", "A2", "L1", "L2"}));

  // unconditional second action
  const auto none = StrategyParentSpec::unconditional(hidden);
  CHECK(separated(build_check_graph(hidden, none, 1), {"Y"}, {"sigma"}, {"A1"}));
  CHECK(separated(build_check_graph(hidden, none, 2), {"Y"}, {"sigma"}, {"A1", "A2", "L2"}));

  // second action adapts to A1, L2
  const auto adaptive = fixtures::adaptive_spec(hidden);
  CHECK_FALSE(separated(build_check_graph(hidden, adaptive, 1), {"Y"}, {"sigma"}, {"A1"}));

  const StagedDiagram normalized = normalize_parents(hidden, adaptive);
  const Dag dprime = normalized.to_dag();
  CHECK_FALSE(separated(build_pearl_robins_graph(dprime, normalized, adaptive, 1), {"Y"}, {"A1"}, {}));
  CHECK(separated(build_pearl_robins_graph(dprime, normalized, adaptive, 2), {"Y"}, {"A2"}, {"A1", "L2"}));
}

TEST_CASE("check graph laws on random diagrams") {
  Rng rng(21);
  for (int it = 0; it < 300; ++it) {
    const StagedDiagram raw = random_staged_diagram(rng);
    REQUIRE(validate_diagram(raw).empty());
    const auto spec = random_spec(rng, raw);
    const StagedDiagram d = normalize_parents(raw, spec);
    const Dag dprime = d.to_dag();

    for (int i = 0; i <= d.n_stages; ++i) {
      const Dag g = build_check_graph(d, spec, i);
      const auto sigma = g.find("sigma");
      CHECK(sigma.has_value() == (i > 0));
      if (sigma) {
        CHECK(g.parents(*sigma).empty());
        CHECK(g.children(*sigma) == NodeSet{d.action(i)});
      }
      for (int j = 1; j <= d.n_stages; ++j) {
        const int a = d.action(j);
        NodeSet want;
        if (j <= i) {
          for (int p : d.parents(a)) want.insert(p);
        }
        if (j >= i) {
          for (int p : spec.of(j)) want.insert(p);
        }
        if (j == i) want.insert(*sigma);
        CHECK(g.parents(a) == want);
      }
      // non-action nodes keep their parents
      for (int v = 0; v < d.size(); ++v) {
        if (d.kind(v) == VarKind::action) continue;
        NodeSet want;
        for (int p : d.parents(v)) want.insert(p);
        CHECK(g.parents(v) == want);
      }
    }

    // D_N carries observational parents everywhere once pa_s is folded in
    const Dag dn = build_check_graph(d, spec, d.n_stages);
    CHECK(strip_regime(dn).arcs() == dprime.arcs());

    // literal deletion for unconditional specs
    const auto none = StrategyParentSpec::unconditional(raw);
    const Dag plain = raw.to_dag();
    for (int i = 1; i <= raw.n_stages; ++i) {
      std::vector<Arc> expected;
      for (const auto& [from, to] : plain.arcs()) {
        if (from == raw.action(i)) continue;
        const bool into_future_action = raw.kind(to) == VarKind::action && raw.vars[static_cast<std::size_t>(to)].stage > i;
        if (into_future_action) continue;
        expected.emplace_back(from, to);
      }
      CHECK(build_pearl_robins_graph(plain, raw, none, i).arcs() == expected);
    }
  }
}
