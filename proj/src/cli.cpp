#include "seqident/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>

#include "seqident/error.hpp"
#include "seqident/evaluate.hpp"
#include "seqident/fuzz.hpp"
#include "seqident/model_file.hpp"
#include "seqident/optimize.hpp"
#include "seqident/stability.hpp"

namespace seqident::cli {

namespace {

using json = nlohmann::ordered_json;

struct Settings {
  double tol = kEqualityTolerance;
  double dep_tol = kDependenceTolerance;
  std::uint64_t max_enum = kDefaultEnumerationCap;
};

// Thrown to unwind with an exit code after the message has been written.
struct Exit {
  int code;
};

std::string number(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string read_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "cannot read '" << path << "'\n";
    throw Exit{kExitUsage};
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ModelFile load(const std::string& path, std::ostream& err) {
  auto result = parse_model_file(read_file(path, err));
  if (!result.ok()) {
    for (const auto& e : result.errors) err << path << ":" << to_string(e) << "\n";
    throw Exit{kExitUsage};
  }
  return std::move(*result.file);
}

void require_diagram(const ModelFile& f, const std::string& path, std::ostream& err) {
  const auto violations = validate_diagram(f.diagram);
  if (violations.empty()) return;
  for (const auto& v : violations) err << path << ": " << to_string(v.kind) << ": " << v.message << "\n";
  throw Exit{kExitUsage};
}

const DiscreteModel& require_model(const ModelFile& f, const std::string& path, std::ostream& err) {
  if (!f.model) {
    err << path << ": no cpt section\n";
    throw Exit{kExitUsage};
  }
  const auto violations = validate_model(*f.model, f.diagram);
  if (!violations.empty()) {
    for (const auto& v : violations) err << path << ": " << to_string(v.kind) << ": " << v.message << "\n";
    throw Exit{kExitUsage};
  }
  return *f.model;
}

const LossFunction& require_loss(const ModelFile& f, const std::string& path, std::ostream& err) {
  if (!f.loss) {
    err << path << ": no loss line\n";
    throw Exit{kExitUsage};
  }
  return *f.loss;
}

const Strategy& require_strategy(const ModelFile& f, const std::string& name, std::ostream& err) {
  if (name.empty() && f.strategies.size() == 1) return f.strategies.front().strategy;
  if (const Strategy* s = f.strategy(name)) return *s;
  err << (name.empty() ? "pick a strategy with --strategy" : "no strategy named '" + name + "'") << "\n";
  throw Exit{kExitUsage};
}

// `full`, `none`, or a file of `spec <action> | <parents or ->` lines.
StrategyParentSpec load_spec(const std::string& choice, const StagedDiagram& d, std::ostream& err) {
  if (choice == "full") return StrategyParentSpec::full_history(d);
  if (choice == "none") return StrategyParentSpec::unconditional(d);
  const std::string text = read_file(choice, err);
  StrategyParentSpec spec = StrategyParentSpec::unconditional(d);
  std::istringstream lines(text);
  std::string line;
  int line_no = 0;
  bool failed = false;
  auto fail = [&](const std::string& message) {
    err << choice << ":" << line_no << ": " << message << "\n";
    failed = true;
  };
  while (std::getline(lines, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::vector<std::string> t{std::istream_iterator<std::string>(words), {}};
    if (t.empty()) continue;
    if (t.size() < 4 || t[0] != "spec" || t[2] != "|") {
      fail("expected 'spec <action> | <parents or ->'");
      continue;
    }
    const auto a = d.find(t[1]);
    if (!a || d.kind(*a) != VarKind::action) {
      fail("'" + t[1] + "' is not an action");
      continue;
    }
    std::vector<int> parents;
    if (!(t.size() == 4 && t[3] == "-")) {
      for (std::size_t k = 3; k < t.size(); ++k) {
        const auto p = d.find(t[k]);
        if (!p) {
          fail("unknown variable '" + t[k] + "'");
          continue;
        }
        parents.push_back(*p);
      }
    }
    std::sort(parents.begin(), parents.end());
    spec.parents[static_cast<std::size_t>(d.vars[static_cast<std::size_t>(*a)].stage - 1)] = parents;
  }
  if (!failed) {
    for (const auto& v : spec_violations(d, spec)) fail(v);
  }
  if (failed) throw Exit{kExitUsage};
  return spec;
}

bool is_separation(const IdentificationReport& r) { return r.check != "assumptions" && r.check != "theorem1_numeric"; }

void print_report(std::ostream& out, const IdentificationReport& r, double dep_tol) {
  out << r.check << ": " << (r.overall ? "pass" : "fail") << "\n";
  for (const auto& e : r.entries) {
    out << "  [" << e.index << "] " << e.query << ": ";
    if (e.informational) out << "info ";
    out << (e.passed ? "pass" : "fail");
    if (e.deviation) {
      out << " (max deviation " << number(*e.deviation);
      if (*e.deviation > dep_tol) out << ", dependent";
      out << ")";
    }
    out << "\n";
    if (!e.witness.empty()) {
      std::string joined;
      for (const auto& w : e.witness) joined += (joined.empty() ? "" : (is_separation(r) ? " - " : ", ")) + w;
      out << "      witness: " << joined << "\n";
    }
  }
  for (const auto& n : r.notes) out << "  note: " << n << "\n";
}

json report_json(const IdentificationReport& r) {
  json entries = json::array();
  const bool separation = is_separation(r);
  for (const auto& e : r.entries) {
    json entry;
    entry["index"] = e.index;
    entry["query"] = e.query;
    entry[separation ? "separated" : "passed"] = e.passed;
    entry["witness"] = e.witness;
    if (e.deviation) entry["deviation"] = *e.deviation;
    if (e.informational) entry["informational"] = true;
    entries.push_back(std::move(entry));
  }
  return json{{"check", r.check}, {"overall", r.overall}, {"entries", std::move(entries)}, {"notes", r.notes}};
}

struct TableRow {
  std::string action;
  std::vector<std::pair<std::string, int>> history;
  std::vector<double> kernel;
  bool unreachable = false;
};

std::vector<TableRow> strategy_table(const StagedDiagram& d, std::span<const int> cards, const Strategy& s,
                                     const std::vector<HistoryDecision>& decisions) {
  std::set<std::pair<int, std::vector<int>>> unreachable;
  for (const auto& h : decisions) {
    if (h.unreachable) unreachable.emplace(h.stage, h.history);
  }
  std::vector<TableRow> rows;
  for (int i = 1; i <= s.n_stages(); ++i) {
    const Cpt& k = s.kernel_table(i);
    for (std::size_t r = 0; r < k.rows(); ++r) {
      std::vector<int> values(k.parents.size());
      std::size_t rest = r;
      for (std::size_t p = values.size(); p-- > 0;) {
        const auto c = static_cast<std::size_t>(cards[static_cast<std::size_t>(k.parents[p])]);
        values[p] = static_cast<int>(rest % c);
        rest /= c;
      }
      TableRow row;
      row.action = d.label(s.action_var(i));
      for (std::size_t p = 0; p < values.size(); ++p) row.history.emplace_back(d.label(k.parents[p]), values[p]);
      const auto kr = k.row(r);
      row.kernel.assign(kr.begin(), kr.end());
      row.unreachable = unreachable.count({i, values}) > 0;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

int point_mass(const std::vector<double>& kernel) {
  for (std::size_t a = 0; a < kernel.size(); ++a) {
    if (kernel[a] == 1.0) return static_cast<int>(a);
  }
  return -1;
}

void print_table(std::ostream& out, const std::vector<TableRow>& rows) {
  for (const auto& row : rows) {
    out << "  " << row.action;
    if (!row.history.empty()) {
      out << " |";
      for (std::size_t k = 0; k < row.history.size(); ++k) {
        out << (k ? ", " : " ") << row.history[k].first << "=" << row.history[k].second;
      }
    }
    out << " -> ";
    if (const int a = point_mass(row.kernel); a >= 0) {
      out << a;
    } else {
      for (std::size_t a = 0; a < row.kernel.size(); ++a) out << (a ? " " : "") << number(row.kernel[a]);
    }
    if (row.unreachable) out << "  (unreachable)";
    out << "\n";
  }
}

json table_json(const std::vector<TableRow>& rows) {
  json out = json::array();
  for (const auto& row : rows) {
    json history = json::object();
    for (const auto& [label, value] : row.history) history[label] = value;
    json entry{{"action", row.action}, {"history", std::move(history)}};
    if (const int a = point_mass(row.kernel); a >= 0) {
      entry["choice"] = a;
    } else {
      entry["kernel"] = row.kernel;
    }
    entry["unreachable"] = row.unreachable;
    out.push_back(std::move(entry));
  }
  return out;
}

NodeSet split_labels(const std::vector<std::string>& words, const Dag& g, std::size_t& pos, std::ostream& err) {
  NodeSet out;
  for (; pos < words.size() && words[pos] != "/"; ++pos) {
    const auto v = g.find(words[pos]);
    if (!v) {
      err << "unknown variable '" << words[pos] << "'\n";
      throw Exit{kExitUsage};
    }
    out.insert(*v);
  }
  if (pos < words.size()) ++pos;
  return out;
}

struct OptimizeOutcome {
  OptimizationResult result;
  std::string method;
};

OptimizeOutcome optimize(const ModelFile& f, const StrategyParentSpec& spec, const LossFunction& k,
                         const Settings& settings) {
  const auto oc = observational_conditionals(*f.model, f.diagram);
  if (is_full_history(f.diagram, spec)) return {optimize_backward(oc, f.diagram, k, spec), "backward induction"};
  return {optimize_bruteforce(oc, f.diagram, k, spec, settings.max_enum), "brute force"};
}

LossFunction negated(LossFunction k) {
  for (auto& x : k.values) x = -x;
  return k;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Identifiability checks, evaluation and optimisation of sequential strategies", "seqident"};
  app.require_subcommand(1);
  app.fallthrough();
  Settings settings;
  app.add_option("--tol", settings.tol, "equality tolerance")->capture_default_str();
  app.add_option("--dep-tol", settings.dep_tol, "dependence tolerance")->capture_default_str();
  app.add_option("--max-enum", settings.max_enum, "cap on enumerated strategies")->capture_default_str();

  std::string path;
  std::string spec_choice = "full";
  std::string strategy_name;

  auto* validate = app.add_subcommand("validate", "parse and validate a model file");
  validate->add_option("file", path)->required();

  std::vector<std::string> dsep_terms;
  auto* dsep = app.add_subcommand("dsep", "d-separation query: x.. / y.. / z..");
  dsep->add_option("file", path)->required();
  dsep->add_option("terms", dsep_terms)->required();

  bool simple = false, extended = false, general = false, pearl_robins = false, all = false, numeric = false;
  auto* check = app.add_subcommand("check", "identifiability checks");
  check->add_option("file", path)->required();
  check->add_flag("--simple", simple);
  check->add_flag("--extended", extended);
  check->add_flag("--general", general);
  check->add_flag("--pearl-robins", pearl_robins);
  check->add_flag("--all", all);
  check->add_flag("--numeric", numeric, "compare mixed distributions for --strategy");
  check->add_option("--spec", spec_choice, "full, none, or a spec file")->capture_default_str();
  check->add_option("--strategy", strategy_name);

  auto* positivity = app.add_subcommand("positivity", "support of a strategy against the observational regime");
  positivity->add_option("file", path)->required();
  positivity->add_option("--strategy", strategy_name);

  std::string method = "grecursion";
  auto* evaluate = app.add_subcommand("evaluate", "expected loss of a strategy");
  evaluate->add_option("file", path)->required();
  evaluate->add_option("--strategy", strategy_name);
  evaluate->add_option("--method", method)
      ->check(CLI::IsMember({"grecursion", "oracle", "decomposition"}))
      ->capture_default_str();

  bool minimize = false;
  auto* optimize_cmd = app.add_subcommand("optimize", "best deterministic strategy");
  optimize_cmd->add_option("file", path)->required();
  optimize_cmd->add_option("--spec", spec_choice, "full, none, or a spec file")->capture_default_str();
  optimize_cmd->add_flag("--minimize", minimize);

  bool theorem2 = false;
  std::uint64_t seed = 0;
  if (const char* env = std::getenv("SEQIDENT_SEED")) {
    std::from_chars(env, env + std::char_traits<char>::length(env), seed);
  }
  int iters = 1000;
  auto* fuzz = app.add_subcommand("fuzz", "randomised property checks");
  fuzz->add_flag("--theorem2", theorem2, "general check pass implies simple stability")->required();
  fuzz->add_option("--seed", seed)->capture_default_str();
  fuzz->add_option("--iters", iters)->check(CLI::PositiveNumber)->capture_default_str();

  std::string format = "text";
  auto* report = app.add_subcommand("report", "every check and computation the file supports");
  report->add_option("file", path)->required();
  report->add_option("--format", format)->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  report->add_option("--spec", spec_choice, "full, none, or a spec file")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) {
      const ModelFile f = load(path, err);
      bool ok = true;
      for (const auto& v : validate_diagram(f.diagram)) {
        out << "diagram: " << to_string(v.kind) << ": " << v.message << "\n";
        ok = false;
      }
      if (ok && f.model) {
        for (const auto& v : validate_model(*f.model, f.diagram)) {
          out << "model: " << to_string(v.kind) << ": " << v.message << "\n";
          ok = false;
        }
        if (ok && f.loss && f.loss->values.size() != static_cast<std::size_t>(f.model->cards[f.diagram.outcome()])) {
          out << "loss: expected " << f.model->cards[f.diagram.outcome()] << " values\n";
          ok = false;
        }
      }
      out << (ok ? "valid" : "invalid") << "\n";
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*fuzz) {
      const auto summary = fuzz_general_implies_simple(seed, iters);
      out << "seed " << summary.seed << ", " << summary.iterations << " diagrams\n";
      out << "general check passed: " << summary.general_passed << "\n";
      out << "simple stability passed: " << summary.simple_passed << "\n";
      if (summary.skipped) out << "skipped (assumptions failed): " << summary.skipped << "\n";
      out << "counterexamples: " << summary.counterexamples.size() << "\n";
      for (const auto& c : summary.counterexamples) out << "---\n" << c;
      return summary.counterexamples.empty() ? kExitOk : kExitInternal;
    }

    const ModelFile f = load(path, err);
    require_diagram(f, path, err);
    const StagedDiagram& d = f.diagram;

    if (*dsep) {
      bool uses_regime = std::find(dsep_terms.begin(), dsep_terms.end(), std::string(kRegimeLabel)) != dsep_terms.end();
      const Dag g = uses_regime ? augment_with_regime(d) : d.to_dag();
      std::size_t pos = 0;
      const auto x = split_labels(dsep_terms, g, pos, err);
      const auto y = split_labels(dsep_terms, g, pos, err);
      const auto z = split_labels(dsep_terms, g, pos, err);
      if (pos < dsep_terms.size()) {
        err << "expected 'x.. / y.. / z..'\n";
        return kExitUsage;
      }
      const auto verdict = d_separated(g, x, y, z);
      out << (verdict.separated ? "separated" : "not separated") << "\n";
      if (!verdict.separated) out << "witness: " << render_path(g, verdict.witness) << "\n";
      return verdict.separated ? kExitOk : kExitCheckFailed;
    }

    if (*check) {
      const StrategyParentSpec spec = load_spec(spec_choice, d, err);
      bool ok = true;
      const bool any = simple || extended || general || pearl_robins || numeric;
      auto show = [&](const IdentificationReport& r) {
        print_report(out, r, settings.dep_tol);
        ok = ok && r.overall;
      };
      if (all || !any) {
        if (all) {
          show(check_simple_stability(d));
          show(check_extended_stability(d));
          show(check_general(d, spec));
          show(check_pearl_robins(d, spec));
          print_report(out, check_assumptions(normalize_parents(d, spec), spec), settings.dep_tol);
        }
        const auto decision = decide_identifiability(d, spec);
        if (!all) {
          for (const auto& r : decision.reports) print_report(out, r, settings.dep_tol);
        }
        out << "verdict: " << to_string(decision.verdict) << "\n";
        ok = decision.verdict != Verdict::not_guaranteed;
      } else {
        if (simple) show(check_simple_stability(d));
        if (extended) show(check_extended_stability(d));
        if (general) show(check_general(d, spec));
        if (pearl_robins) show(check_pearl_robins(d, spec));
      }
      if (numeric) {
        const auto& m = require_model(f, path, err);
        show(check_theorem1_numeric(m, d, require_strategy(f, strategy_name, err), settings.tol));
      }
      return ok ? kExitOk : kExitCheckFailed;
    }

    if (*positivity) {
      const auto& m = require_model(f, path, err);
      const auto r = check_positivity(m, d, require_strategy(f, strategy_name, err));
      for (const auto& issue : r.violations) {
        out << "A" << issue.stage << "=" << issue.action_state << " unsupported at";
        for (const auto& [v, value] : issue.history) out << " " << d.label(v) << "=" << value;
        out << "\n";
      }
      if (!r.note.empty()) out << "note: " << r.note << "\n";
      out << (r.ok() ? "positivity holds" : "positivity fails") << "\n";
      return r.ok() ? kExitOk : kExitCheckFailed;
    }

    if (*evaluate) {
      const auto& m = require_model(f, path, err);
      const auto& k = require_loss(f, path, err);
      const Strategy& s = require_strategy(f, strategy_name, err);
      EvaluationResult result;
      if (method == "grecursion") {
        if (!check_general(d, s.spec()).overall) {
          err << "note: the general check fails for this strategy's parents; the value may not be identified\n";
        }
        result = evaluate_g_recursion(observational_conditionals(m, d), s, k);
      } else if (method == "oracle") {
        result = evaluate_oracle(m, d, s, k);
      } else {
        result = evaluate_decomposition(m, d, s, k);
      }
      out << "value: " << number(result.value) << "\n";
      return kExitOk;
    }

    if (*optimize_cmd) {
      const auto& m = require_model(f, path, err);
      const LossFunction k = minimize ? negated(require_loss(f, path, err)) : require_loss(f, path, err);
      const StrategyParentSpec spec = load_spec(spec_choice, d, err);
      const auto [result, how] = optimize(f, spec, k, settings);
      out << "method: " << how << "\n";
      out << "value: " << number(minimize ? -result.value : result.value) << "\n";
      out << "strategy:\n";
      print_table(out, strategy_table(d, m.cards, result.strategy, result.decisions));
      return kExitOk;
    }

    if (*report) {
      const StrategyParentSpec spec = load_spec(spec_choice, d, err);
      std::vector<IdentificationReport> reports{check_simple_stability(d), check_extended_stability(d),
                                                check_general(d, spec), check_pearl_robins(d, spec),
                                                check_assumptions(normalize_parents(d, spec), spec)};
      const auto decision = decide_identifiability(d, spec);
      json doc;
      doc["verdict"] = std::string(to_string(decision.verdict));
      doc["checks"] = json::array();
      for (const auto& r : reports) doc["checks"].push_back(report_json(r));

      std::vector<std::pair<std::string, std::string>> text_values;
      if (f.model && f.loss) {
        const auto& m = require_model(f, path, err);
        const auto& k = *f.loss;
        const auto oc = observational_conditionals(m, d);
        doc["evaluations"] = json::array();
        for (const auto& [name, s] : f.strategies) {
          json e{{"strategy", name}, {"identified", check_general(d, s.spec()).overall}};
          try {
            e["value"] = evaluate_g_recursion(oc, s, k).value;
          } catch (const Error& ex) {
            e["value"] = nullptr;
            e["error"] = ex.what();
          }
          e["oracle"] = evaluate_oracle(m, d, s, k).value;
          doc["evaluations"].push_back(std::move(e));
        }
        try {
          const auto [result, how] = optimize(f, spec, k, settings);
          doc["optimum"] = {{"method", how},
                            {"value", result.value},
                            {"strategy_table", table_json(strategy_table(d, m.cards, result.strategy, result.decisions))}};
        } catch (const Error& ex) {
          doc["optimum"] = {{"error", ex.what()}};
        }
      }
      doc["overall"] = decision.verdict != Verdict::not_guaranteed;

      if (format == "json") {
        out << doc.dump(2) << "\n";
        return kExitOk;
      }
      for (const auto& r : reports) print_report(out, r, settings.dep_tol);
      out << "verdict: " << doc["verdict"].get<std::string>() << "\n";
      if (doc.contains("evaluations")) {
        for (const auto& e : doc["evaluations"]) {
          out << "strategy " << e["strategy"].get<std::string>() << ": value "
              << (e["value"].is_null() ? std::string("undefined") : number(e["value"].get<double>())) << ", oracle "
              << number(e["oracle"].get<double>()) << (e["identified"].get<bool>() ? "" : " (not guaranteed)")
              << "\n";
        }
      }
      if (doc.contains("optimum")) {
        const auto& o = doc["optimum"];
        if (o.contains("error")) {
          out << "optimum: " << o["error"].get<std::string>() << "\n";
        } else {
          out << "optimum (" << o["method"].get<std::string>() << "): " << number(o["value"].get<double>()) << "\n";
          const auto& m = *f.model;
          const auto result = optimize(f, spec, *f.loss, settings).result;
          print_table(out, strategy_table(d, m.cards, result.strategy, result.decisions));
        }
      }
      return kExitOk;
    }
  } catch (const Exit& e) {
    return e.code;
  } catch (const Error& e) {
    err << e.what() << "\n";
    switch (e.code()) {
      case Errc::internal_theorem2_violation: return kExitInternal;
      case Errc::positivity_violation:
      case Errc::masked_history_reachable: return kExitCheckFailed;
      default: return kExitUsage;
    }
  }
  return kExitUsage;
}

}  // namespace seqident::cli
