#include "seqident/graph.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "seqident/error.hpp"

namespace seqident {

namespace {

void check_members(const Dag& g, NodeSet s) {
  if (s.extent() > g.size()) {
    throw Error(Errc::unknown_node, "node index " + std::to_string(s.extent() - 1) +
                                        " outside graph of size " + std::to_string(g.size()));
  }
}

// Returns the node sequence of some directed cycle, closed (first == last).
std::vector<int> find_cycle(int n, const std::vector<NodeSet>& children) {
  enum class Mark { fresh, open, done };
  std::vector<Mark> mark(static_cast<std::size_t>(n), Mark::fresh);
  std::vector<int> stack;
  std::vector<int> cycle;

  auto visit = [&](auto&& self, int v) -> bool {
    mark[v] = Mark::open;
    stack.push_back(v);
    for (int w : children[v]) {
      if (mark[w] == Mark::open) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        cycle.push_back(w);
        return true;
      }
      if (mark[w] == Mark::fresh && self(self, w)) return true;
    }
    stack.pop_back();
    mark[v] = Mark::done;
    return false;
  };
  for (int v = 0; v < n; ++v) {
    if (mark[v] == Mark::fresh && visit(visit, v)) break;
  }
  return cycle;
}

}  // namespace

Dag Dag::build(std::vector<std::string> labels,
               const std::vector<std::pair<std::string, std::string>>& edges) {
  std::unordered_map<std::string, int> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!index.emplace(labels[i], static_cast<int>(i)).second) {
      throw Error(Errc::duplicate_label, "label '" + labels[i] + "' appears twice");
    }
  }
  std::vector<Arc> arcs;
  arcs.reserve(edges.size());
  for (const auto& [from, to] : edges) {
    auto f = index.find(from);
    if (f == index.end()) throw Error(Errc::unknown_label, "edge endpoint '" + from + "'");
    auto t = index.find(to);
    if (t == index.end()) throw Error(Errc::unknown_label, "edge endpoint '" + to + "'");
    arcs.emplace_back(f->second, t->second);
  }
  return from_arcs(std::move(labels), std::move(arcs));
}

Dag Dag::from_arcs(std::vector<std::string> labels, std::vector<Arc> arcs) {
  const int n = static_cast<int>(labels.size());
  if (n > kMaxNodes) {
    throw Error(Errc::too_many_nodes,
                std::to_string(n) + " nodes exceeds the limit of " + std::to_string(kMaxNodes));
  }
  {
    std::vector<std::string> sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) throw Error(Errc::duplicate_label, "label '" + *dup + "' appears twice");
  }

  Dag g;
  g.labels_ = std::move(labels);
  g.parents_.assign(static_cast<std::size_t>(n), NodeSet{});
  g.children_.assign(static_cast<std::size_t>(n), NodeSet{});
  for (const auto& [from, to] : arcs) {
    if (from < 0 || from >= n || to < 0 || to >= n) {
      throw Error(Errc::unknown_node, "arc (" + std::to_string(from) + ", " + std::to_string(to) + ")");
    }
    if (g.children_[from].contains(to)) {
      throw Error(Errc::duplicate_edge, g.labels_[from] + " -> " + g.labels_[to]);
    }
    g.children_[from].insert(to);
    g.parents_[to].insert(from);
  }
  std::sort(arcs.begin(), arcs.end());
  g.arcs_ = std::move(arcs);

  // Kahn's algorithm, smallest ready index first.
  std::vector<int> indegree(static_cast<std::size_t>(n));
  NodeSet ready;
  for (int v = 0; v < n; ++v) {
    indegree[v] = g.parents_[v].size();
    if (indegree[v] == 0) ready.insert(v);
  }
  while (!ready.empty()) {
    int v = *ready.begin();
    ready.erase(v);
    g.topo_.push_back(v);
    for (int w : g.children_[v]) {
      if (--indegree[w] == 0) ready.insert(w);
    }
  }
  if (static_cast<int>(g.topo_.size()) != n) {
    auto cycle = find_cycle(n, g.children_);
    std::string text;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i) text += " -> ";
      text += g.labels_[cycle[i]];
    }
    throw Error(Errc::cycle_detected, text);
  }
  return g;
}

std::optional<int> Dag::find(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<int>(it - labels_.begin());
}

int Dag::index_of(std::string_view label) const {
  if (auto v = find(label)) return *v;
  throw Error(Errc::unknown_label, "'" + std::string(label) + "'");
}

NodeSet Dag::set_of(std::initializer_list<std::string_view> labels) const {
  NodeSet s;
  for (auto l : labels) s.insert(index_of(l));
  return s;
}

NodeSet Dag::set_of(std::span<const std::string> labels) const {
  NodeSet s;
  for (const auto& l : labels) s.insert(index_of(l));
  return s;
}

std::vector<Arc> MoralGraph::edges() const {
  std::vector<Arc> out;
  for (int a : nodes) {
    for (int b : adjacency[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

NodeSet ancestors(const Dag& g, NodeSet seed) {
  check_members(g, seed);
  NodeSet result = seed;
  std::vector<int> frontier = seed.to_vector();
  while (!frontier.empty()) {
    int v = frontier.back();
    frontier.pop_back();
    for (int p : g.parents(v)) {
      if (!result.contains(p)) {
        result.insert(p);
        frontier.push_back(p);
      }
    }
  }
  return result;
}

MoralGraph ancestral_moral_graph(const Dag& g, NodeSet seed) {
  MoralGraph m;
  m.nodes = ancestors(g, seed);
  m.adjacency.assign(static_cast<std::size_t>(g.size()), NodeSet{});
  for (int v : m.nodes) {
    // Parents of an ancestral node are ancestral, so no filtering is needed.
    NodeSet pa = g.parents(v);
    for (int p : pa) {
      m.adjacency[v].insert(p);
      m.adjacency[p].insert(v);
      m.adjacency[p] |= pa - NodeSet{p};
    }
  }
  return m;
}

SeparationVerdict d_separated(const Dag& g, NodeSet x, NodeSet y, NodeSet z) {
  check_members(g, x | y | z);
  if (x.empty() || y.empty()) throw Error(Errc::empty_query, "both query sets must be nonempty");
  if (x.intersects(y) || x.intersects(z) || y.intersects(z)) {
    throw Error(Errc::overlapping_sets, "query and conditioning sets must be pairwise disjoint");
  }

  const MoralGraph m = ancestral_moral_graph(g, x | y | z);
  std::vector<int> previous(static_cast<std::size_t>(g.size()), -1);
  NodeSet seen = y;
  std::deque<int> queue(y.begin(), y.end());
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int w : m.adjacency[v] - seen - z) {
      seen.insert(w);
      previous[w] = v;
      if (x.contains(w)) {
        SeparationVerdict verdict{false, {}};
        for (int u = w; u != -1; u = previous[u]) verdict.witness.push_back(u);
        std::reverse(verdict.witness.begin(), verdict.witness.end());
        return verdict;
      }
      queue.push_back(w);
    }
  }
  return {};
}

std::string render_path(const Dag& g, std::span<const int> path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += " - ";
    out += g.label(path[i]);
  }
  return out;
}

std::string render_set(const Dag& g, NodeSet s) {
  std::string out;
  for (int v : s) {
    if (!out.empty()) out += ", ";
    out += g.label(v);
  }
  return out;
}

}  // namespace seqident
