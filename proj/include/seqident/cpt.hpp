#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace seqident {

// Conditional distribution of one variable given an ordered parent list.
// Rows follow the parent configurations in lexicographic order (first parent
// varies slowest); each row holds `card` probabilities.
struct Cpt {
  std::vector<int> parents;
  int card = 0;
  std::vector<double> probs;

  std::size_t rows() const noexcept { return card > 0 ? probs.size() / static_cast<std::size_t>(card) : 0; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(probs).subspan(r * static_cast<std::size_t>(card), static_cast<std::size_t>(card));
  }

  bool operator==(const Cpt&) const = default;
};

// Number of parent configurations, given per-variable state counts.
std::size_t row_count(const Cpt& cpt, std::span<const int> cards);

// Row selected by a full assignment (indexed by variable).
std::size_t row_of(const Cpt& cpt, std::span<const int> cards, std::span<const int> assignment);

}  // namespace seqident
