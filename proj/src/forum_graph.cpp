#include "attrition/forum_graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

#include "attrition/csv.hpp"
#include "attrition/error.hpp"

namespace attrition {

std::string_view to_string(GraphKind k) noexcept { return k == GraphKind::type1 ? "type1" : "type2"; }

GraphKind parse_graph_kind(std::string_view s) {
  if (s == "type1") return GraphKind::type1;
  if (s == "type2") return GraphKind::type2;
  throw UsageError("unknown graph kind '" + std::string(s) + "' (expected type1 or type2)");
}

bool InteractionGraph::has_node(const std::string& id) const {
  return std::binary_search(nodes.begin(), nodes.end(), id);
}

std::int64_t InteractionGraph::weight(const std::string& src, const std::string& dst) const {
  auto it = edges.find({src, dst});
  return it == edges.end() ? 0 : it->second;
}

std::map<EdgeKey, std::int64_t> collect_edges(const std::vector<Thread>& threads, GraphKind kind, int cutoff_week,
                                              const CourseConfig& config) {
  const Timestamp cutoff = week_end(cutoff_week, config);
  std::map<EdgeKey, std::int64_t> edges;
  std::vector<const ForumPost*> seen;
  for (const auto& thread : threads) {
    seen.clear();
    const std::string& originator = thread.root_post().author_id;
    for (const auto& post : thread.posts) {
      if (post.timestamp >= cutoff) continue;
      if (kind == GraphKind::type1) {
        for (const ForumPost* earlier : seen) {
          if (earlier->author_id != post.author_id) ++edges[{post.author_id, earlier->author_id}];
        }
      } else if (!post.is_root() && post.author_id != originator) {
        ++edges[{post.author_id, originator}];
      }
      seen.push_back(&post);
    }
  }
  return edges;
}

InteractionGraph build_graph(const std::vector<Thread>& threads, GraphKind kind, int cutoff_week,
                             const CourseConfig& config) {
  if (cutoff_week < 1 || cutoff_week > config.num_weeks) {
    throw UsageError("cutoff week " + std::to_string(cutoff_week) + " outside 1.." +
                     std::to_string(config.num_weeks));
  }
  InteractionGraph g;
  g.kind = kind;
  g.cutoff_week = cutoff_week;
  // Staff removal takes their incident edges with them; whatever is left with
  // no edge is isolated and never enters the node set.
  std::set<std::string> nodes;
  for (auto& [key, w] : collect_edges(threads, kind, cutoff_week, config)) {
    if (config.is_staff(key.first) || config.is_staff(key.second)) continue;
    nodes.insert(key.first);
    nodes.insert(key.second);
    g.edges.emplace(key, w);
  }
  g.nodes.assign(nodes.begin(), nodes.end());
  return g;
}

GraphStats graph_stats(const InteractionGraph& g) {
  GraphStats s;
  s.nodes = g.nodes.size();
  s.edges = g.edges.size();
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < g.nodes.size(); ++i) index.emplace(g.nodes[i], i);
  std::vector<std::vector<std::size_t>> undirected(g.nodes.size());
  for (const auto& [key, w] : g.edges) {
    s.total_weight += w;
    const std::size_t a = index.at(key.first), b = index.at(key.second);
    undirected[a].push_back(b);
    undirected[b].push_back(a);
  }
  std::vector<bool> visited(g.nodes.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < g.nodes.size(); ++start) {
    if (visited[start]) continue;
    ++s.weak_components;
    visited[start] = true;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      for (std::size_t u : undirected[v]) {
        if (!visited[u]) {
          visited[u] = true;
          stack.push_back(u);
        }
      }
    }
  }
  return s;
}

void export_graph_csv(const InteractionGraph& g, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "src,dst,weight\n";
  for (const auto& [key, w] : g.edges) out << csv::escape(key.first) << ',' << csv::escape(key.second) << ',' << w << '\n';
  csv::write_text(path, out.str());
  std::ostringstream meta;
  meta << "kind=" << to_string(g.kind) << "\ncutoff_week=" << g.cutoff_week << '\n';
  auto meta_path = path;
  meta_path += ".meta";
  csv::write_text(meta_path, meta.str());
}

}  // namespace attrition
