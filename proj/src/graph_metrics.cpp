#include "attrition/graph_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "attrition/error.hpp"

namespace attrition {

IndexedGraph::IndexedGraph(const InteractionGraph& g) : nodes(g.nodes), out(g.nodes.size()), in(g.nodes.size()) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);
  // std::map iteration is ordered by (src, dst), which with sorted node ids
  // yields sorted out-lists; in-lists are sorted explicitly.
  for (const auto& [key, w] : g.edges) {
    const std::size_t s = index.at(key.first), d = index.at(key.second);
    out[s].push_back({d, static_cast<double>(w)});
    in[d].push_back({s, static_cast<double>(w)});
  }
  for (auto& list : in) {
    std::sort(list.begin(), list.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
  }
}

std::map<std::string, double> betweenness(const InteractionGraph& g) {
  const IndexedGraph ig(g);
  const std::size_t n = ig.size();
  std::vector<double> centrality(n, 0.0);

  std::vector<std::vector<std::size_t>> preds(n);
  std::vector<double> sigma(n), delta(n);
  std::vector<long> dist(n);
  std::vector<std::size_t> order;  // vertices in non-decreasing distance
  order.reserve(n);

  for (std::size_t s = 0; s < n; ++s) {
    for (auto& p : preds) p.clear();
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();

    sigma[s] = 1.0;
    dist[s] = 0;
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
      const std::size_t v = order[head];
      for (const auto& arc : ig.out[v]) {
        const std::size_t w = arc.to;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1) {
          sigma[w] += sigma[v];
          preds[w].push_back(v);
        }
      }
    }
    for (std::size_t k = order.size(); k-- > 1;) {
      const std::size_t w = order[k];
      for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      centrality[w] += delta[w];
    }
  }

  std::map<std::string, double> result;
  for (std::size_t i = 0; i < n; ++i) result.emplace(ig.nodes[i], centrality[i]);
  return result;
}

namespace {

// Returns the max-norm change while normalising `v` in place. A zero vector is
// left untouched.
double normalise(std::vector<double>& v, const std::vector<double>& previous) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  const double norm = std::sqrt(sq);
  double change = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (norm > 0.0) v[i] /= norm;
    change = std::max(change, std::abs(v[i] - previous[i]));
  }
  return change;
}

}  // namespace

HitsResult hits(const InteractionGraph& g, const HitsOptions& options) {
  if (!(options.tol > 0.0)) throw UsageError("HITS tolerance must be positive");
  if (options.max_iter < 1) throw UsageError("HITS max_iter must be at least 1");

  HitsResult result;
  const IndexedGraph ig(g);
  const std::size_t n = ig.size();
  if (g.edges.empty()) {
    for (const auto& id : ig.nodes) {
      result.hub.emplace(id, 0.0);
      result.authority.emplace(id, 0.0);
    }
    result.converged = true;
    return result;
  }

  const double init = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> hub(n, init), auth(n, init), next_hub(n), next_auth(n);
  for (int it = 1; it <= options.max_iter; ++it) {
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (const auto& arc : ig.in[v]) acc += arc.weight * hub[arc.to];
      next_auth[v] = acc;
    }
    const double da = normalise(next_auth, auth);
    for (std::size_t v = 0; v < n; ++v) {
      double acc = 0.0;
      for (const auto& arc : ig.out[v]) acc += arc.weight * next_auth[arc.to];
      next_hub[v] = acc;
    }
    const double dh = normalise(next_hub, hub);
    auth.swap(next_auth);
    hub.swap(next_hub);
    result.iterations = it;
    if (std::max(da, dh) < options.tol) {
      result.converged = true;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    result.hub.emplace(ig.nodes[i], hub[i]);
    result.authority.emplace(ig.nodes[i], auth[i]);
  }
  return result;
}

std::map<std::string, Degree> degrees(const InteractionGraph& g) {
  std::map<std::string, Degree> result;
  for (const auto& id : g.nodes) result.emplace(id, Degree{});
  for (const auto& [key, w] : g.edges) {
    result[key.first].out += w;
    result[key.second].in += w;
  }
  return result;
}

std::map<std::string, double> dropped_out_neighbors(const InteractionGraph& g,
                                                    const std::map<std::string, int>& last_active_week,
                                                    int eval_week) {
  std::map<std::string, std::set<std::string>> neighbours;
  for (const auto& id : g.nodes) {
    if (!last_active_week.count(id)) throw DataError("no last active week for graph node " + id);
    neighbours[id];
  }
  for (const auto& [key, w] : g.edges) {
    neighbours[key.first].insert(key.second);
    neighbours[key.second].insert(key.first);
  }
  std::map<std::string, double> result;
  for (const auto& [id, adj] : neighbours) {
    if (adj.empty()) {
      result.emplace(id, 0.0);
      continue;
    }
    std::size_t dropped = 0;
    for (const auto& u : adj) {
      if (last_active_week.at(u) < eval_week) ++dropped;
    }
    result.emplace(id, static_cast<double>(dropped) / static_cast<double>(adj.size()));
  }
  return result;
}

}  // namespace attrition
