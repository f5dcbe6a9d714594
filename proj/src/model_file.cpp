#include "seqident/model_file.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "seqident/error.hpp"

namespace seqident {

namespace {

struct Token {
  std::string_view text;
  int column = 0;
};

std::vector<Token> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::optional<double> parse_number(std::string_view text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<int> parse_int(std::string_view text) {
  int value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string format_number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

// `<head> | <parents or -> : <numbers>` starting at token `from`.
struct RowLine {
  int line = 0;
  Token head;
  std::vector<Token> parents;
  std::vector<double> values;
};

struct StrategyLine {
  std::string name;
  RowLine row;
};

class Parser {
 public:
  ParseResult run(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto next = text.find('\n', pos);
      if (next == std::string_view::npos) next = text.size();
      ++line_no;
      parse_line(line_no, tokenize(text.substr(pos, next - pos)));
      pos = next + 1;
    }
    if (!stages_) error(1, 1, "missing 'stages' line");
    if (!errors_.empty()) return {std::nullopt, std::move(errors_)};
    assemble();
    if (!errors_.empty()) return {std::nullopt, std::move(errors_)};
    return {std::move(file_), {}};
  }

 private:
  void error(int line, int column, std::string message) { errors_.push_back({line, column, std::move(message)}); }

  std::optional<int> lookup(int line, const Token& t) {
    auto it = index_.find(std::string(t.text));
    if (it == index_.end()) {
      error(line, t.column, "unknown variable '" + std::string(t.text) + "'");
      return std::nullopt;
    }
    return it->second;
  }

  void parse_line(int line, const std::vector<Token>& t) {
    if (t.empty()) return;
    const auto key = t[0].text;
    if (key == "stages") {
      if (t.size() != 2) return error(line, t[0].column, "expected 'stages <N>'");
      auto n = parse_int(t[1].text);
      if (!n || *n < 1) return error(line, t[1].column, "stage count must be a positive integer");
      if (stages_) return error(line, t[0].column, "'stages' given twice");
      stages_ = *n;
    } else if (key == "var") {
      if (t.size() != 4) return error(line, t[0].column, "expected 'var <name> <kind> stage=<i>'");
      auto kind = parse_var_kind(t[2].text);
      if (!kind) return error(line, t[2].column, "unknown kind '" + std::string(t[2].text) + "'");
      if (!t[3].text.starts_with("stage=")) return error(line, t[3].column, "expected 'stage=<i>'");
      auto stage = parse_int(t[3].text.substr(6));
      if (!stage) return error(line, t[3].column + 6, "stage must be an integer");
      index_.emplace(std::string(t[1].text), file_.diagram.size());
      var_line_.push_back(line);
      file_.diagram.vars.push_back({std::string(t[1].text), *kind, *stage});
    } else if (key == "edge") {
      if (t.size() != 4 || t[2].text != "->") return error(line, t[0].column, "expected 'edge <from> -> <to>'");
      auto from = lookup(line, t[1]);
      auto to = lookup(line, t[3]);
      if (from && to) file_.diagram.edges.push_back({*from, *to, false});
    } else if (key == "cpt") {
      if (auto row = parse_row(line, t, 1)) cpt_lines_.push_back(std::move(*row));
    } else if (key == "strategy") {
      if (t.size() < 2) return error(line, t[0].column, "expected 'strategy <name> <action> | ...'");
      if (auto row = parse_row(line, t, 2)) strategy_lines_.push_back({std::string(t[1].text), std::move(*row)});
    } else if (key == "loss") {
      if (t.size() < 3 || t[1].text != ":") return error(line, t[0].column, "expected 'loss : <values>'");
      if (loss_line_) return error(line, t[0].column, "'loss' given twice");
      LossFunction k;
      for (std::size_t i = 2; i < t.size(); ++i) {
        auto x = parse_number(t[i].text);
        if (!x) return error(line, t[i].column, "not a number: '" + std::string(t[i].text) + "'");
        k.values.push_back(*x);
      }
      loss_line_ = line;
      file_.loss = std::move(k);
    } else {
      error(line, t[0].column, "unknown directive '" + std::string(key) + "'");
    }
  }

  std::optional<RowLine> parse_row(int line, const std::vector<Token>& t, std::size_t head) {
    if (t.size() <= head + 1 || t[head + 1].text != "|") {
      error(line, t[0].column, "expected '<var> | <parents or -> : <probabilities>'");
      return std::nullopt;
    }
    RowLine row{line, t[head], {}, {}};
    std::size_t i = head + 2;
    for (; i < t.size() && t[i].text != ":"; ++i) row.parents.push_back(t[i]);
    if (i == t.size()) {
      error(line, t.back().column, "missing ':' before the probabilities");
      return std::nullopt;
    }
    if (row.parents.size() == 1 && row.parents[0].text == "-") row.parents.clear();
    if (row.parents.empty() && i == head + 2) {
      error(line, t[i].column, "parent list is empty; write '-' for no parents");
      return std::nullopt;
    }
    if (i + 1 == t.size()) {
      error(line, t[i].column, "no probabilities after ':'");
      return std::nullopt;
    }
    for (++i; i < t.size(); ++i) {
      auto x = parse_number(t[i].text);
      if (!x) {
        error(line, t[i].column, "not a number: '" + std::string(t[i].text) + "'");
        return std::nullopt;
      }
      row.values.push_back(*x);
    }
    return row;
  }

  std::optional<std::vector<int>> resolve(const RowLine& row) {
    std::vector<int> out;
    for (const auto& p : row.parents) {
      auto v = lookup(row.line, p);
      if (!v) return std::nullopt;
      out.push_back(*v);
    }
    return out;
  }

  void assemble() {
    auto& d = file_.diagram;
    d.n_stages = *stages_;
    const auto n = static_cast<std::size_t>(d.size());

    std::vector<int> cards(n, 0);
    std::vector<std::optional<Cpt>> cpts(n);
    for (const auto& row : cpt_lines_) {
      auto v = lookup(row.line, row.head);
      auto parents = resolve(row);
      if (!v || !parents) continue;
      auto& cpt = cpts[static_cast<std::size_t>(*v)];
      const int width = static_cast<int>(row.values.size());
      if (!cpt) {
        cpt = Cpt{*parents, width, {}};
        cards[static_cast<std::size_t>(*v)] = width;
      } else if (cpt->parents != *parents) {
        error(row.line, row.parents.empty() ? row.head.column : row.parents[0].column,
              "parents differ from the earlier rows of '" + d.label(*v) + "'");
        continue;
      } else if (cpt->card != width) {
        error(row.line, row.head.column,
              "row has " + std::to_string(width) + " entries, earlier rows have " + std::to_string(cpt->card));
        continue;
      }
      cpt->probs.insert(cpt->probs.end(), row.values.begin(), row.values.end());
    }
    if (!cpt_lines_.empty()) {
      DiscreteModel m;
      m.cards = cards;
      for (std::size_t v = 0; v < n; ++v) {
        if (!cpts[v]) {
          error(var_line_[v], 1, "no cpt rows for '" + d.vars[v].label + "'");
          continue;
        }
        m.cpts.push_back(std::move(*cpts[v]));
      }
      if (errors_.empty()) file_.model = std::move(m);
    }
    if (!errors_.empty() || strategy_lines_.empty()) return;

    const auto& first = strategy_lines_.front().row;
    if (!file_.model) return error(first.line, 1, "strategies need cpt rows for every variable");
    if (auto violations = validate_diagram(d); !violations.empty()) {
      return error(first.line, 1, "strategies need a valid diagram: " + violations.front().message);
    }

    std::vector<std::string> names;
    for (const auto& s : strategy_lines_) {
      if (std::find(names.begin(), names.end(), s.name) == names.end()) names.push_back(s.name);
    }
    for (const auto& name : names) build_strategy(name, cards);
  }

  void build_strategy(const std::string& name, const std::vector<int>& cards) {
    const auto& d = file_.diagram;
    StrategyParentSpec spec;
    spec.parents.resize(static_cast<std::size_t>(d.n_stages));
    std::vector<std::vector<double>> kernels(static_cast<std::size_t>(d.n_stages));
    std::vector<int> seen(static_cast<std::size_t>(d.n_stages), 0);
    int first_line = 0;
    for (const auto& s : strategy_lines_) {
      if (s.name != name) continue;
      const auto& row = s.row;
      if (!first_line) first_line = row.line;
      auto a = lookup(row.line, row.head);
      auto parents = resolve(row);
      if (!a || !parents) continue;
      if (d.kind(*a) != VarKind::action) {
        error(row.line, row.head.column, "'" + d.label(*a) + "' is not an action");
        continue;
      }
      const auto stage = static_cast<std::size_t>(d.vars[static_cast<std::size_t>(*a)].stage - 1);
      if (!std::is_sorted(parents->begin(), parents->end())) {
        error(row.line, row.parents[0].column, "strategy parents must follow the variable order");
        continue;
      }
      if (seen[stage] && spec.parents[stage] != *parents) {
        error(row.line, row.parents.empty() ? row.head.column : row.parents[0].column,
              "parents differ from the earlier rows of '" + d.label(*a) + "'");
        continue;
      }
      seen[stage] = row.line;
      spec.parents[stage] = *parents;
      kernels[stage].insert(kernels[stage].end(), row.values.begin(), row.values.end());
    }
    for (int i = 1; i <= d.n_stages; ++i) {
      if (!seen[static_cast<std::size_t>(i - 1)]) {
        return error(first_line, 1, "strategy '" + name + "' has no rows for '" + d.label(d.action(i)) + "'");
      }
    }
    if (!errors_.empty()) return;
    try {
      file_.strategies.push_back({name, make_stochastic(d, cards, spec, std::move(kernels))});
    } catch (const Error& e) {
      error(first_line, 1, "strategy '" + name + "': " + e.what());
    }
  }

  ModelFile file_;
  std::optional<int> stages_;
  std::map<std::string, int> index_;
  std::vector<int> var_line_;
  std::vector<RowLine> cpt_lines_;
  std::vector<StrategyLine> strategy_lines_;
  std::optional<int> loss_line_;
  std::vector<ParseError> errors_;
};

std::string row_prefix(const StagedDiagram& d, std::span<const int> parents) {
  if (parents.empty()) return " | - :";
  std::string text = " |";
  for (int p : parents) text += " " + d.label(p);
  return text + " :";
}

void write_rows(std::string& out, const std::string& head, const Cpt& cpt) {
  for (std::size_t r = 0; r < cpt.rows(); ++r) {
    out += head;
    for (double p : cpt.row(r)) out += " " + format_number(p);
    out += "\n";
  }
}

}  // namespace

const Strategy* ModelFile::strategy(std::string_view name) const {
  for (const auto& s : strategies) {
    if (s.name == name) return &s.strategy;
  }
  return nullptr;
}

std::string to_string(const ParseError& e) {
  return std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + e.message;
}

ParseResult parse_model_file(std::string_view text) { return Parser{}.run(text); }

std::string serialize(const StagedDiagram& d) {
  std::string out = "stages " + std::to_string(d.n_stages) + "\n";
  for (const auto& v : d.vars) {
    out += "var " + v.label + " " + std::string(to_string(v.kind)) + " stage=" + std::to_string(v.stage) + "\n";
  }
  for (const auto& e : d.edges) {
    if (!e.inert) out += "edge " + d.label(e.from) + " -> " + d.label(e.to) + "\n";
  }
  return out;
}

std::string serialize(const ModelFile& f) {
  const auto& d = f.diagram;
  std::string out = serialize(d);
  if (f.model) {
    for (int v = 0; v < d.size(); ++v) {
      const Cpt& cpt = f.model->cpts[static_cast<std::size_t>(v)];
      write_rows(out, "cpt " + d.label(v) + row_prefix(d, cpt.parents), cpt);
    }
  }
  for (const auto& [name, s] : f.strategies) {
    for (int i = 1; i <= s.n_stages(); ++i) {
      const Cpt& k = s.kernel_table(i);
      write_rows(out, "strategy " + name + " " + d.label(s.action_var(i)) + row_prefix(d, k.parents), k);
    }
  }
  if (f.loss) {
    out += "loss :";
    for (double x : f.loss->values) out += " " + format_number(x);
    out += "\n";
  }
  return out;
}

}  // namespace seqident
