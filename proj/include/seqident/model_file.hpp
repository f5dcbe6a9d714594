#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seqident/diagram.hpp"
#include "seqident/prob.hpp"
#include "seqident/strategy.hpp"

namespace seqident {

// Line-oriented text format, `#` starts a comment:
//
//   stages <N>
//   var <name> <action|covariate|hidden|outcome> stage=<i>
//   edge <from> -> <to>
//   cpt <var> | <parents or -> : <p p ...>        one line per parent row
//   strategy <name> <action> | <parents or -> : <p p ...>
//   loss : <k(y0) k(y1) ...>
//
// State counts come from CPT row widths.

struct NamedStrategy {
  std::string name;
  Strategy strategy;

  bool operator==(const NamedStrategy&) const = default;
};

struct ModelFile {
  StagedDiagram diagram;
  std::optional<DiscreteModel> model;
  std::vector<NamedStrategy> strategies;
  std::optional<LossFunction> loss;

  const Strategy* strategy(std::string_view name) const;

  bool operator==(const ModelFile&) const = default;
};

struct ParseError {
  int line = 0;
  int column = 0;
  std::string message;
};

std::string to_string(const ParseError& e);

struct ParseResult {
  std::optional<ModelFile> file;
  std::vector<ParseError> errors;

  bool ok() const noexcept { return file.has_value(); }
};

ParseResult parse_model_file(std::string_view text);
std::string serialize(const ModelFile& f);
// Diagram section only.
std::string serialize(const StagedDiagram& d);

}  // namespace seqident
