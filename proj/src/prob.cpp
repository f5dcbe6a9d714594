#include "seqident/prob.hpp"

#include <algorithm>
#include <cmath>

#include "seqident/error.hpp"

namespace seqident {

namespace {

constexpr double kRowTolerance = 1e-12;

std::size_t checked_cells(std::span<const int> cards) {
  std::size_t cells = 1;
  for (int c : cards) {
    if (c < 1) throw Error(Errc::shape_mismatch, "state count must be positive");
    cells *= static_cast<std::size_t>(c);
    if (cells > kMaxJointCells) {
      throw Error(Errc::state_space_too_large, "joint table exceeds " + std::to_string(kMaxJointCells) + " cells");
    }
  }
  return cells;
}

// Advances a row-major configuration; returns false after the last one.
bool next_config(std::vector<int>& digits, std::span<const int> cards) {
  for (std::size_t k = digits.size(); k-- > 0;) {
    if (++digits[k] < cards[k]) return true;
    digits[k] = 0;
  }
  return false;
}

std::vector<int> parents_without_inert(const StagedDiagram& d, int v) {
  std::vector<int> out;
  for (const auto& e : d.edges) {
    if (e.to == v && !e.inert) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_strategy_fits(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s) {
  if (s.n_stages() != d.n_stages) throw Error(Errc::shape_mismatch, "strategy and diagram stage counts differ");
  for (int i = 1; i <= d.n_stages; ++i) {
    const Cpt& k = s.kernel_table(i);
    const int a = d.action(i);
    if (s.action_var(i) != a || k.card != m.cards[a] || k.rows() != row_count(k, m.cards)) {
      throw Error(Errc::shape_mismatch, "strategy kernel for '" + d.label(a) + "' does not match the model");
    }
  }
}

JointTable spliced_joint(const DiscreteModel& m, const StagedDiagram& d, const Strategy* s, int last_observed) {
  require_valid(m, d);
  if (s) check_strategy_fits(m, d, *s);
  std::vector<const Cpt*> factors;
  for (int v = 0; v < d.size(); ++v) {
    const auto& var = d.vars[v];
    if (var.kind == VarKind::action && var.stage > last_observed) {
      factors.push_back(&s->kernel_table(var.stage));
    } else {
      factors.push_back(&m.cpts[v]);
    }
  }
  JointTable raw = product_joint(m.cards, factors);
  return JointTable(raw.vars(), raw.cards(), raw.probs(), d.outcome());
}

}  // namespace

std::string_view to_string(ModelViolationKind kind) noexcept {
  switch (kind) {
    case ModelViolationKind::shape_mismatch: return "ShapeMismatch";
    case ModelViolationKind::row_not_normalized: return "RowNotNormalized";
    case ModelViolationKind::inert_parent_influence: return "InertParentInfluence";
  }
  return "?";
}

std::vector<ModelViolation> validate_model(const DiscreteModel& m, const StagedDiagram& d) {
  std::vector<ModelViolation> out;
  const int n = d.size();
  if (static_cast<int>(m.cards.size()) != n || static_cast<int>(m.cpts.size()) != n) {
    out.push_back({ModelViolationKind::shape_mismatch, -1, 0, 0.0,
                   "model covers " + std::to_string(m.cpts.size()) + " variables, diagram has " + std::to_string(n)});
    return out;
  }
  for (int v = 0; v < n; ++v) {
    if (m.cards[v] < 1) {
      out.push_back({ModelViolationKind::shape_mismatch, v, 0, 0.0, "'" + d.label(v) + "' has no states"});
    }
  }
  if (!out.empty()) return out;

  for (int v = 0; v < n; ++v) {
    const Cpt& cpt = m.cpts[v];
    const std::string& name = d.label(v);
    std::vector<int> given = cpt.parents;
    std::sort(given.begin(), given.end());
    const auto all = d.parents(v);
    const auto active = parents_without_inert(d, v);
    if (given != all && given != active) {
      out.push_back({ModelViolationKind::shape_mismatch, v, 0, 0.0, "CPT parents of '" + name + "' do not match the diagram"});
      continue;
    }
    if (cpt.card != m.cards[v]) {
      out.push_back({ModelViolationKind::shape_mismatch, v, 0, 0.0, "CPT of '" + name + "' has the wrong state count"});
      continue;
    }
    const std::size_t rows = row_count(cpt, m.cards);
    if (cpt.probs.size() != rows * static_cast<std::size_t>(cpt.card)) {
      out.push_back({ModelViolationKind::shape_mismatch, v, 0, 0.0,
                     "CPT of '" + name + "' has " + std::to_string(cpt.probs.size() / cpt.card) + " rows, expected " +
                         std::to_string(rows)});
      continue;
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      bool negative = false;
      for (double p : cpt.row(r)) {
        if (!(p >= 0.0) || !std::isfinite(p)) negative = true;
        sum += p;
      }
      if (negative || std::abs(sum - 1.0) > kRowTolerance) {
        out.push_back({ModelViolationKind::row_not_normalized, v, r, sum,
                       "CPT of '" + name + "' row " + std::to_string(r) + " sums to " + std::to_string(sum)});
      }
    }
    // Inert parents listed explicitly must not change the row.
    if (given == all && all != active) {
      std::vector<int> digits(cpt.parents.size(), 0);
      std::vector<int> pcards;
      for (int p : cpt.parents) pcards.push_back(m.cards[p]);
      // Compare each row with the row obtained by zeroing every inert parent.
      std::size_t r = 0;
      do {
        std::size_t base = 0;
        for (std::size_t k = 0; k < digits.size(); ++k) {
          const int p = cpt.parents[k];
          const bool inert = !std::binary_search(active.begin(), active.end(), p);
          base = base * static_cast<std::size_t>(pcards[k]) + (inert ? 0 : static_cast<std::size_t>(digits[k]));
        }
        auto lhs = cpt.row(r);
        auto rhs = cpt.row(base);
        if (!std::equal(lhs.begin(), lhs.end(), rhs.begin())) {
          out.push_back({ModelViolationKind::inert_parent_influence, v, r, 0.0,
                         "CPT of '" + name + "' depends on an inert parent at row " + std::to_string(r)});
          break;
        }
        ++r;
      } while (next_config(digits, pcards));
    }
  }
  return out;
}

void require_valid(const DiscreteModel& m, const StagedDiagram& d) {
  auto violations = validate_model(m, d);
  if (violations.empty()) return;
  const auto& v = violations.front();
  throw Error(v.kind == ModelViolationKind::row_not_normalized ? Errc::row_not_normalized : Errc::shape_mismatch,
              v.message);
}

DiscreteModel lift_to_parents(const DiscreteModel& m, const StagedDiagram& d) {
  require_valid(m, d);
  DiscreteModel out = m;
  for (int v = 0; v < d.size(); ++v) {
    const Cpt& old = m.cpts[v];
    Cpt lifted{d.parents(v), old.card, {}};
    std::vector<int> pcards;
    for (int p : lifted.parents) pcards.push_back(m.cards[p]);
    std::vector<int> digits(lifted.parents.size(), 0);
    std::vector<int> assignment(static_cast<std::size_t>(d.size()), 0);
    do {
      for (std::size_t k = 0; k < digits.size(); ++k) assignment[lifted.parents[k]] = digits[k];
      auto row = old.row(row_of(old, m.cards, assignment));
      lifted.probs.insert(lifted.probs.end(), row.begin(), row.end());
    } while (next_config(digits, pcards));
    out.cpts[v] = std::move(lifted);
  }
  return out;
}

JointTable::JointTable(std::vector<int> vars, std::vector<int> cards, std::vector<double> probs,
                       std::optional<int> outcome)
    : vars_(std::move(vars)), cards_(std::move(cards)), probs_(std::move(probs)), outcome_(outcome) {
  if (vars_.size() != cards_.size() || checked_cells(cards_) != probs_.size()) {
    throw Error(Errc::shape_mismatch, "joint table dimensions are inconsistent");
  }
  if (outcome_ && !position(*outcome_)) outcome_.reset();
}

double JointTable::at(std::span<const int> config) const {
  std::size_t index = 0;
  for (std::size_t k = 0; k < cards_.size(); ++k) {
    index = index * static_cast<std::size_t>(cards_[k]) + static_cast<std::size_t>(config[k]);
  }
  return probs_[index];
}

std::optional<std::size_t> JointTable::position(int var) const {
  auto it = std::find(vars_.begin(), vars_.end(), var);
  if (it == vars_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vars_.begin());
}

std::vector<int> JointTable::decode(std::size_t index) const {
  std::vector<int> config(cards_.size());
  for (std::size_t k = cards_.size(); k-- > 0;) {
    const auto c = static_cast<std::size_t>(cards_[k]);
    config[k] = static_cast<int>(index % c);
    index /= c;
  }
  return config;
}

JointTable product_joint(std::span<const int> cards, std::span<const Cpt* const> factors) {
  const std::size_t cells = checked_cells(cards);
  const auto n = cards.size();
  std::vector<double> probs(cells, 0.0);
  std::vector<int> digits(n, 0);
  for (std::size_t index = 0; index < cells; ++index) {
    double p = 1.0;
    for (std::size_t v = 0; v < n && p != 0.0; ++v) {
      const Cpt& f = *factors[v];
      p *= f.probs[row_of(f, cards, digits) * static_cast<std::size_t>(f.card) + static_cast<std::size_t>(digits[v])];
    }
    probs[index] = p;
    next_config(digits, cards);
  }
  std::vector<int> vars(n);
  for (std::size_t v = 0; v < n; ++v) vars[v] = static_cast<int>(v);
  return JointTable(std::move(vars), std::vector<int>(cards.begin(), cards.end()), std::move(probs));
}

JointTable joint(const DiscreteModel& m, const StagedDiagram& d) {
  return spliced_joint(m, d, nullptr, d.n_stages);
}

JointTable joint(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s) {
  return spliced_joint(m, d, &s, 0);
}

JointTable mixed_joint_pi(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s, int stage) {
  if (stage < 0 || stage > d.n_stages) {
    throw Error(Errc::stage_out_of_range, "p_i index " + std::to_string(stage) + " outside 0.." +
                                              std::to_string(d.n_stages));
  }
  return spliced_joint(m, d, &s, stage);
}

JointTable regime_mixture_joint(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s,
                                double strategy_weight) {
  const JointTable obs = joint(m, d);
  const JointTable strat = joint(m, d, s);
  std::vector<int> vars = obs.vars();
  std::vector<int> cards = obs.cards();
  vars.push_back(d.size());
  cards.push_back(2);
  std::vector<double> probs(obs.size() * 2);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    probs[2 * i] = (1.0 - strategy_weight) * obs[i];
    probs[2 * i + 1] = strategy_weight * strat[i];
  }
  return JointTable(std::move(vars), std::move(cards), std::move(probs), obs.outcome());
}

JointTable marginalize(const JointTable& j, std::span<const int> keep) {
  std::vector<std::size_t> pos;
  std::vector<int> cards;
  for (int v : keep) {
    auto p = j.position(v);
    if (!p) throw Error(Errc::unknown_node, "variable " + std::to_string(v) + " not in table");
    pos.push_back(*p);
    cards.push_back(j.cards()[*p]);
  }
  std::vector<double> probs(checked_cells(cards), 0.0);
  std::vector<int> digits(j.cards().size(), 0);
  for (std::size_t index = 0; index < j.size(); ++index) {
    std::size_t target = 0;
    for (std::size_t k = 0; k < pos.size(); ++k) {
      target = target * static_cast<std::size_t>(cards[k]) + static_cast<std::size_t>(digits[pos[k]]);
    }
    probs[target] += j[index];
    next_config(digits, j.cards());
  }
  return JointTable(std::vector<int>(keep.begin(), keep.end()), std::move(cards), std::move(probs), j.outcome());
}

JointTable condition(const JointTable& j, std::span<const int> targets, const Evidence& evidence) {
  for (const auto& [var, value] : evidence) {
    if (std::find(targets.begin(), targets.end(), var) != targets.end()) {
      throw Error(Errc::overlapping_sets, "target variable also appears in the evidence");
    }
  }
  std::vector<int> all(targets.begin(), targets.end());
  for (const auto& [var, value] : evidence) all.push_back(var);
  const JointTable m = marginalize(j, all);

  std::vector<int> tcards(m.cards().begin(), m.cards().begin() + static_cast<std::ptrdiff_t>(targets.size()));
  std::size_t evidence_index = 0;
  std::size_t evidence_cells = 1;
  for (std::size_t k = targets.size(); k < all.size(); ++k) {
    const int value = evidence[k - targets.size()].second;
    if (value < 0 || value >= m.cards()[k]) throw Error(Errc::state_out_of_range, "evidence value out of range");
    evidence_index = evidence_index * static_cast<std::size_t>(m.cards()[k]) + static_cast<std::size_t>(value);
    evidence_cells *= static_cast<std::size_t>(m.cards()[k]);
  }
  const std::size_t tcells = checked_cells(tcards);
  std::vector<double> probs(tcells);
  double total = 0.0;
  for (std::size_t t = 0; t < tcells; ++t) {
    probs[t] = m[t * evidence_cells + evidence_index];
    total += probs[t];
  }
  if (total <= 0.0) {
    std::string text;
    for (const auto& [var, value] : evidence) {
      text += (text.empty() ? "" : ", ") + std::to_string(var) + "=" + std::to_string(value);
    }
    throw Error(Errc::zero_probability_evidence, "evidence (" + text + ") has probability zero");
  }
  for (double& p : probs) p /= total;
  return JointTable(std::vector<int>(targets.begin(), targets.end()), std::move(tcards), std::move(probs),
                    j.outcome());
}

double expectation(const JointTable& j, const LossFunction& k) {
  if (!j.outcome()) throw Error(Errc::missing_outcome, "table has no outcome variable");
  const int y = *j.outcome();
  const JointTable marginal = marginalize(j, std::span<const int>(&y, 1));
  if (k.values.size() != marginal.size()) {
    throw Error(Errc::shape_mismatch, "loss has " + std::to_string(k.values.size()) + " values, outcome has " +
                                          std::to_string(marginal.size()) + " states");
  }
  double value = 0.0;
  for (std::size_t s = 0; s < marginal.size(); ++s) value += k.values[s] * marginal[s];
  return value;
}

double ci_deviation(const JointTable& j, std::span<const int> x, std::span<const int> y, std::span<const int> z) {
  std::vector<int> all(x.begin(), x.end());
  all.insert(all.end(), y.begin(), y.end());
  all.insert(all.end(), z.begin(), z.end());
  const JointTable m = marginalize(j, all);

  auto cells = [&](std::size_t from, std::size_t to) {
    std::size_t c = 1;
    for (std::size_t k = from; k < to; ++k) c *= static_cast<std::size_t>(m.cards()[k]);
    return c;
  };
  const std::size_t nx = cells(0, x.size());
  const std::size_t ny = cells(x.size(), x.size() + y.size());
  const std::size_t nz = cells(x.size() + y.size(), all.size());

  double worst = 0.0;
  std::vector<double> px(nx), py(ny);
  for (std::size_t zi = 0; zi < nz; ++zi) {
    double pz = 0.0;
    std::fill(px.begin(), px.end(), 0.0);
    std::fill(py.begin(), py.end(), 0.0);
    for (std::size_t xi = 0; xi < nx; ++xi) {
      for (std::size_t yi = 0; yi < ny; ++yi) {
        const double p = m[(xi * ny + yi) * nz + zi];
        pz += p;
        px[xi] += p;
        py[yi] += p;
      }
    }
    if (pz <= 0.0) continue;
    for (std::size_t xi = 0; xi < nx; ++xi) {
      for (std::size_t yi = 0; yi < ny; ++yi) {
        const double pxy = m[(xi * ny + yi) * nz + zi] / pz;
        worst = std::max(worst, std::abs(pxy - (px[xi] / pz) * (py[yi] / pz)));
      }
    }
  }
  return worst;
}

bool ci_holds(const JointTable& j, std::span<const int> x, std::span<const int> y, std::span<const int> z,
              double tol) {
  return ci_deviation(j, x, y, z) <= tol;
}

PositivityReport check_positivity(const DiscreteModel& m, const StagedDiagram& d, const Strategy& s) {
  PositivityReport report;
  report.note =
      "support inclusion: actions prescribed at histories reachable under the strategy must have positive "
      "observational probability";
  const JointTable obs = joint(m, d);
  const JointTable strat = joint(m, d, s);
  for (int i = 1; i <= d.n_stages; ++i) {
    const int a = d.action(i);
    std::vector<int> vars = d.observed_before(a);
    vars.push_back(a);
    const JointTable po = marginalize(obs, vars);
    const JointTable ps = marginalize(strat, vars);
    for (std::size_t index = 0; index < ps.size(); ++index) {
      if (ps[index] > 0.0 && po[index] <= 0.0) {
        const auto config = ps.decode(index);
        PositivityIssue issue{i, {}, config.back()};
        for (std::size_t k = 0; k + 1 < vars.size(); ++k) issue.history.emplace_back(vars[k], config[k]);
        report.violations.push_back(std::move(issue));
      }
    }
  }
  return report;
}

}  // namespace seqident
