#include "seqident/strategy.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "seqident/error.hpp"

namespace seqident {

namespace {

constexpr double kRowTolerance = 1e-12;

int card_of(const StagedDiagram& d, std::span<const int> cards, int v) {
  if (v >= static_cast<int>(cards.size()) || cards[v] < 1) {
    throw Error(Errc::shape_mismatch, "no state count for '" + d.label(v) + "'");
  }
  return cards[v];
}

std::size_t rows_for(const StagedDiagram& d, std::span<const int> cards, const std::vector<int>& parents) {
  std::size_t rows = 1;
  for (int p : parents) rows *= static_cast<std::size_t>(card_of(d, cards, p));
  return rows;
}

// Decodes row r of a lexicographic parent configuration space.
std::vector<int> decode_row(std::size_t r, std::span<const int> cards, const std::vector<int>& parents) {
  std::vector<int> config(parents.size());
  for (std::size_t k = parents.size(); k-- > 0;) {
    const auto c = static_cast<std::size_t>(cards[parents[k]]);
    config[k] = static_cast<int>(r % c);
    r /= c;
  }
  return config;
}

std::vector<double> indicator(int card, int state) {
  std::vector<double> row(static_cast<std::size_t>(card), 0.0);
  row[static_cast<std::size_t>(state)] = 1.0;
  return row;
}

void check_state(const StagedDiagram& d, int var, int card, int state) {
  if (state < 0 || state >= card) {
    throw Error(Errc::state_out_of_range, "state " + std::to_string(state) + " for '" + d.label(var) + "' with " +
                                              std::to_string(card) + " states");
  }
}

}  // namespace

Strategy make_stochastic(const StagedDiagram& d, std::span<const int> cards, const StrategyParentSpec& spec,
                         std::vector<std::vector<double>> kernels) {
  require_valid(d, spec);
  if (static_cast<int>(kernels.size()) != d.n_stages) {
    throw Error(Errc::shape_mismatch, "expected " + std::to_string(d.n_stages) + " kernels, got " +
                                          std::to_string(kernels.size()));
  }
  Strategy s;
  s.spec_ = spec;
  s.deterministic_ = true;
  for (int i = 1; i <= d.n_stages; ++i) {
    const int a = d.action(i);
    const int card = card_of(d, cards, a);
    const std::size_t rows = rows_for(d, cards, spec.of(i));
    auto& probs = kernels[static_cast<std::size_t>(i - 1)];
    if (probs.size() != rows * static_cast<std::size_t>(card)) {
      throw Error(Errc::shape_mismatch, "kernel for '" + d.label(a) + "' has " + std::to_string(probs.size()) +
                                            " entries, expected " + std::to_string(rows * card));
    }
    Cpt cpt{spec.of(i), card, std::move(probs)};
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (double p : cpt.row(r)) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
          throw Error(Errc::row_not_normalized, "kernel for '" + d.label(a) + "' row " + std::to_string(r) +
                                                    " has an invalid entry");
        }
        if (p != 0.0 && p != 1.0) s.deterministic_ = false;
        sum += p;
      }
      if (std::abs(sum - 1.0) > kRowTolerance) {
        throw Error(Errc::row_not_normalized, "kernel for '" + d.label(a) + "' row " + std::to_string(r) +
                                                  " sums to " + std::to_string(sum));
      }
    }
    s.actions_.push_back(a);
    s.kernels_.push_back(std::move(cpt));
  }
  return s;
}

Strategy make_unconditional(const StagedDiagram& d, std::span<const int> cards, std::span<const int> values) {
  require_valid(d);
  if (static_cast<int>(values.size()) != d.n_stages) {
    throw Error(Errc::shape_mismatch, "expected one value per action");
  }
  std::vector<std::vector<double>> kernels;
  for (int i = 1; i <= d.n_stages; ++i) {
    const int a = d.action(i);
    const int card = card_of(d, cards, a);
    check_state(d, a, card, values[static_cast<std::size_t>(i - 1)]);
    kernels.push_back(indicator(card, values[static_cast<std::size_t>(i - 1)]));
  }
  return make_stochastic(d, cards, StrategyParentSpec::unconditional(d), std::move(kernels));
}

Strategy make_deterministic(const StagedDiagram& d, std::span<const int> cards, const StrategyParentSpec& spec,
                            const DecisionRule& rule) {
  require_valid(d, spec);
  std::vector<std::vector<double>> kernels;
  for (int i = 1; i <= d.n_stages; ++i) {
    const int a = d.action(i);
    const int card = card_of(d, cards, a);
    const std::size_t rows = rows_for(d, cards, spec.of(i));
    std::vector<double> probs;
    probs.reserve(rows * static_cast<std::size_t>(card));
    for (std::size_t r = 0; r < rows; ++r) {
      const int state = rule(i, decode_row(r, cards, spec.of(i)));
      check_state(d, a, card, state);
      auto row = indicator(card, state);
      probs.insert(probs.end(), row.begin(), row.end());
    }
    kernels.push_back(std::move(probs));
  }
  return make_stochastic(d, cards, spec, std::move(kernels));
}

Strategy make_deterministic(const StagedDiagram& d, std::span<const int> cards, const StrategyParentSpec& spec,
                            const std::vector<std::map<std::vector<int>, int>>& tables) {
  if (static_cast<int>(tables.size()) != d.n_stages) {
    throw Error(Errc::shape_mismatch, "expected one table per action");
  }
  return make_deterministic(d, cards, spec, [&](int stage, std::span<const int> history) {
    const auto& table = tables[static_cast<std::size_t>(stage - 1)];
    auto it = table.find(std::vector<int>(history.begin(), history.end()));
    if (it == table.end()) {
      std::string text;
      for (int v : history) text += (text.empty() ? "" : ",") + std::to_string(v);
      throw Error(Errc::missing_configuration,
                  "no decision for '" + d.label(d.action(stage)) + "' at history (" + text + ")");
    }
    return it->second;
  });
}

std::span<const double> kernel(const Strategy& s, std::span<const int> cards, int stage,
                               std::span<const int> history) {
  if (stage < 1 || stage > s.n_stages()) {
    throw Error(Errc::stage_out_of_range, "stage " + std::to_string(stage));
  }
  const Cpt& cpt = s.kernel_table(stage);
  if (history.size() != cpt.parents.size()) {
    throw Error(Errc::missing_configuration, "history has " + std::to_string(history.size()) + " values, expected " +
                                                 std::to_string(cpt.parents.size()));
  }
  std::size_t r = 0;
  for (std::size_t k = 0; k < history.size(); ++k) {
    const int c = cards[cpt.parents[k]];
    if (history[k] < 0 || history[k] >= c) {
      throw Error(Errc::missing_configuration, "history value out of range");
    }
    r = r * static_cast<std::size_t>(c) + static_cast<std::size_t>(history[k]);
  }
  return cpt.row(r);
}

DeterministicStrategies enumerate_deterministic(const StagedDiagram& d, std::span<const int> cards,
                                                const StrategyParentSpec& spec, std::uint64_t cap) {
  require_valid(d, spec);
  DeterministicStrategies e;
  e.diagram_ = &d;
  e.cards_.assign(cards.begin(), cards.end());
  e.spec_ = spec;

  long double approx = 1.0L;
  std::uint64_t exact = 1;
  bool overflow = false;
  for (int i = 1; i <= d.n_stages; ++i) {
    const int card = card_of(d, cards, d.action(i));
    const std::size_t rows = rows_for(d, cards, spec.of(i));
    e.stage_offset_.push_back(e.radix_.size());
    for (std::size_t r = 0; r < rows; ++r) {
      e.radix_.push_back(card);
      approx *= card;
      if (!overflow && exact > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(card)) {
        overflow = true;
      }
      if (!overflow) exact *= static_cast<std::uint64_t>(card);
    }
  }
  e.stage_offset_.push_back(e.radix_.size());
  if (overflow || exact > cap) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6Lg", approx);
    throw Error(Errc::enumeration_too_large, std::string(buf) + " deterministic strategies exceed the cap of " +
                                                 std::to_string(cap));
  }
  e.count_ = exact;
  return e;
}

Strategy DeterministicStrategies::at(std::uint64_t index) const {
  if (index >= count_) throw Error(Errc::state_out_of_range, "strategy index " + std::to_string(index));
  std::vector<int> digits(radix_.size());
  for (std::size_t k = radix_.size(); k-- > 0;) {
    const auto base = static_cast<std::uint64_t>(radix_[k]);
    digits[k] = static_cast<int>(index % base);
    index /= base;
  }
  std::vector<std::vector<double>> kernels;
  for (std::size_t i = 0; i + 1 < stage_offset_.size(); ++i) {
    std::vector<double> probs;
    for (std::size_t k = stage_offset_[i]; k < stage_offset_[i + 1]; ++k) {
      auto row = indicator(radix_[k], digits[k]);
      probs.insert(probs.end(), row.begin(), row.end());
    }
    kernels.push_back(std::move(probs));
  }
  return make_stochastic(*diagram_, cards_, spec_, std::move(kernels));
}

std::uint64_t DeterministicStrategies::index_of(const Strategy& s) const {
  if (!s.deterministic() || !(s.spec() == spec_)) {
    throw Error(Errc::not_deterministic, "strategy is not a member of this enumeration");
  }
  std::uint64_t index = 0;
  for (std::size_t i = 0; i + 1 < stage_offset_.size(); ++i) {
    const Cpt& cpt = s.kernel_table(static_cast<int>(i) + 1);
    for (std::size_t r = 0; r < cpt.rows(); ++r) {
      const auto row = cpt.row(r);
      int choice = 0;
      while (row[static_cast<std::size_t>(choice)] != 1.0) ++choice;
      index = index * static_cast<std::uint64_t>(cpt.card) + static_cast<std::uint64_t>(choice);
    }
  }
  return index;
}

}  // namespace seqident
