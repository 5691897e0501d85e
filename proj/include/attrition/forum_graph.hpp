#pragma once

// Student interaction graphs built from threaded forum discussions.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attrition/ingest.hpp"

namespace attrition {

// type1: each contribution links to the authors of every earlier contribution
//        in its thread.
// type2: each reply links to the thread originator only.
enum class GraphKind { type1, type2 };

std::string_view to_string(GraphKind k) noexcept;
GraphKind parse_graph_kind(std::string_view s);  // throws UsageError

using EdgeKey = std::pair<std::string, std::string>;  // (src, dst)

// Directed multigraph collapsed to integer weights. Nodes are kept sorted; no
// self-edges, no staff, no isolated nodes.
struct InteractionGraph {
  std::vector<std::string> nodes;
  std::map<EdgeKey, std::int64_t> edges;
  GraphKind kind = GraphKind::type1;
  int cutoff_week = 0;

  bool has_node(const std::string& id) const;
  std::int64_t weight(const std::string& src, const std::string& dst) const;

  friend bool operator==(const InteractionGraph&, const InteractionGraph&) = default;
};

// Raw edge multiset before staff/isolate pruning, for the posts of `threads`
// created before the end of `cutoff_week`.
std::map<EdgeKey, std::int64_t> collect_edges(const std::vector<Thread>& threads, GraphKind kind, int cutoff_week,
                                              const CourseConfig& config);

// Builds the pruned graph. Throws UsageError if cutoff_week is outside 1..W.
InteractionGraph build_graph(const std::vector<Thread>& threads, GraphKind kind, int cutoff_week,
                             const CourseConfig& config);

struct GraphStats {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::int64_t total_weight = 0;
  std::size_t weak_components = 0;

  friend bool operator==(const GraphStats&, const GraphStats&) = default;
};

GraphStats graph_stats(const InteractionGraph& g);

// Edge list CSV (src,dst,weight) plus "<path>.meta" with kind and cutoff_week.
void export_graph_csv(const InteractionGraph& g, const std::filesystem::path& path);

}  // namespace attrition
