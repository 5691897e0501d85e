#pragma once

// Per-student social metrics on an InteractionGraph. All mappings are keyed by
// node id and cover exactly the graph's node set.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "attrition/forum_graph.hpp"

namespace attrition {

// Integer-indexed adjacency view of an InteractionGraph. Node i is
// graph.nodes[i]; adjacency lists are sorted by neighbour index.
struct IndexedGraph {
  struct Arc {
    std::size_t to;
    double weight;
  };
  std::vector<std::string> nodes;
  std::vector<std::vector<Arc>> out;
  std::vector<std::vector<Arc>> in;

  explicit IndexedGraph(const InteractionGraph& g);
  std::size_t size() const noexcept { return nodes.size(); }
};

// Directed, unweighted, unnormalised shortest-path betweenness (Brandes).
std::map<std::string, double> betweenness(const InteractionGraph& g);

struct HitsResult {
  std::map<std::string, double> hub;
  std::map<std::string, double> authority;
  int iterations = 0;
  bool converged = false;
};

struct HitsOptions {
  double tol = 1e-8;
  int max_iter = 1000;
};

// Power iteration on the weighted adjacency W from the uniform 1/√n start:
// a ← Wᵀh, h ← W a, each L2-normalised, until both vectors move by less than
// tol in max norm. Throws UsageError for tol <= 0 or max_iter < 1.
HitsResult hits(const InteractionGraph& g, const HitsOptions& options = {});

struct Degree {
  std::int64_t in = 0;
  std::int64_t out = 0;

  friend bool operator==(const Degree&, const Degree&) = default;
};

// Weighted degrees (reply volume).
std::map<std::string, Degree> degrees(const InteractionGraph& g);

// Share of a node's neighbours (either direction) whose last active week is
// before eval_week. Throws DataError when a node has no last-active entry.
std::map<std::string, double> dropped_out_neighbors(const InteractionGraph& g,
                                                    const std::map<std::string, int>& last_active_week,
                                                    int eval_week);

}  // namespace attrition
