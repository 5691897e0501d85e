#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace oracle {

Graph brute_force_graph(const std::vector<ForumPost>& posts, bool type1, int cutoff_week, const CourseConfig& config) {
  const attrition::Timestamp cutoff = config.start_time + attrition::kSecondsPerWeek * cutoff_week;
  std::map<std::string, std::vector<const ForumPost*>> threads;
  for (const auto& p : posts) {
    if (p.timestamp < cutoff) threads[p.thread_id].push_back(&p);
  }
  std::map<std::pair<std::string, std::string>, std::int64_t> raw;
  for (auto& [id, list] : threads) {
    std::sort(list.begin(), list.end(), [](const ForumPost* a, const ForumPost* b) {
      return std::make_pair(a->timestamp, a->post_id) < std::make_pair(b->timestamp, b->post_id);
    });
    const ForumPost* root = nullptr;
    for (const ForumPost* p : list) {
      if (!p->parent_post_id) root = p;
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string& from = list[i]->author_id;
      if (type1) {
        for (std::size_t j = 0; j < i; ++j) {
          if (list[j]->author_id != from) ++raw[{from, list[j]->author_id}];
        }
      } else if (list[i]->parent_post_id && root && root->author_id != from) {
        ++raw[{from, root->author_id}];
      }
    }
  }
  Graph g;
  for (const auto& [edge, w] : raw) {
    if (config.staff_ids.count(edge.first) || config.staff_ids.count(edge.second)) continue;
    g.edges[edge] = w;
    g.nodes.insert(edge.first);
    g.nodes.insert(edge.second);
  }
  return g;
}

std::vector<double> enumerate_betweenness(const std::vector<std::vector<int>>& adj) {
  const std::size_t n = adj.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    // Every simple path from s, grouped by endpoint.
    std::vector<std::vector<std::vector<std::size_t>>> paths(n);
    std::vector<std::size_t> path{s};
    std::vector<bool> used(n, false);
    used[s] = true;
    std::function<void()> walk = [&] {
      const std::size_t u = path.back();
      for (std::size_t v = 0; v < n; ++v) {
        if (!adj[u][v] || used[v]) continue;
        path.push_back(v);
        used[v] = true;
        paths[v].push_back(path);
        walk();
        used[v] = false;
        path.pop_back();
      }
    };
    walk();
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s || paths[t].empty()) continue;
      std::size_t shortest = SIZE_MAX;
      for (const auto& p : paths[t]) shortest = std::min(shortest, p.size());
      double total = 0.0;
      std::vector<double> through(n, 0.0);
      for (const auto& p : paths[t]) {
        if (p.size() != shortest) continue;
        total += 1.0;
        for (std::size_t k = 1; k + 1 < p.size(); ++k) through[p[k]] += 1.0;
      }
      for (std::size_t v = 0; v < n; ++v) out[v] += through[v] / total;
    }
  }
  return out;
}

HitsLimit hits_limit(const Eigen::MatrixXd& W) {
  const auto n = W.rows();
  HitsLimit r;
  r.hub = Eigen::VectorXd::Zero(n);
  r.authority = Eigen::VectorXd::Zero(n);
  if (n == 0 || W.isZero()) return r;
  Eigen::VectorXd a1 = W.transpose() * Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  a1.normalize();
  const Eigen::MatrixXd M = W.transpose() * W;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::VectorXd& lambda = es.eigenvalues();  // ascending
  const double top = lambda(n - 1);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  double second = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (lambda(k) >= top * (1.0 - 1e-9)) {
      const Eigen::VectorXd v = es.eigenvectors().col(k);
      a += v.dot(a1) * v;
    } else {
      second = std::max(second, lambda(k));
    }
  }
  r.authority = a.normalized();
  r.hub = (W * r.authority).normalized();
  r.eigengap_ratio = second / top;
  return r;
}

std::size_t union_find_components(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    return parent[x] == x ? x : parent[x] = find(parent[x]);
  };
  std::size_t components = n;
  for (auto [a, b] : edges) {
    const std::size_t ra = find(a), rb = find(b);
    if (ra != rb) {
      parent[ra] = rb;
      --components;
    }
  }
  return components;
}

std::map<std::string, attrition::LabelSet> labels_by_scan(const CourseData& data, const CourseConfig& config,
                                                          int week) {
  const int W = config.num_weeks;
  std::map<std::string, std::vector<bool>> active;
  for (const auto& e : data.events) {
    auto& weeks = active[e.student_id];
    weeks.resize(static_cast<std::size_t>(W) + 2, false);
    const auto offset = (e.timestamp - config.start_time) / attrition::kSecondsPerWeek;
    weeks[static_cast<std::size_t>(offset) + 1] = true;
  }
  std::map<std::string, attrition::LabelSet> out;
  for (const auto& [id, weeks] : active) {
    attrition::LabelSet l;
    // Dropout in week k (k = last active week + 1) for some k < W.
    bool any_from_w_minus_1 = weeks[static_cast<std::size_t>(W - 1)] || weeks[static_cast<std::size_t>(W)];
    l.semester_dropout = !any_from_w_minus_1;
    bool later = false;
    for (int k = week + 1; k <= W; ++k) later = later || weeks[static_cast<std::size_t>(k)];
    l.week_dropout = !later;
    l.inactive_next_week = week < W && !weeks[static_cast<std::size_t>(week + 1)];
    for (const auto& o : data.outcomes) {
      if (o.student_id == id) l.certificate = o.certificate;
    }
    out[id] = l;
  }
  return out;
}

double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

double efron_loglik(const std::vector<int>& duration, const std::vector<int>& event,
                    const std::vector<std::vector<double>>& x, const std::vector<double>& beta) {
  const std::size_t n = duration.size();
  std::vector<double> eta(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < beta.size(); ++k) eta[i] += beta[k] * x[i][k];
  }
  std::set<int> times;
  for (std::size_t i = 0; i < n; ++i) {
    if (event[i]) times.insert(duration[i]);
  }
  double ll = 0.0;
  for (int t : times) {
    double risk = 0.0, tied = 0.0, d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (duration[i] >= t) risk += std::exp(eta[i]);
      if (duration[i] == t && event[i]) {
        tied += std::exp(eta[i]);
        ll += eta[i];
        d += 1.0;
      }
    }
    for (int l = 0; l < static_cast<int>(d); ++l) ll -= std::log(risk - (l / d) * tied);
  }
  return ll;
}

std::vector<ForumPost> random_forum(std::mt19937_64& rng, const CourseConfig& config, int threads, int authors,
                                    int max_posts) {
  std::vector<ForumPost> posts;
  std::uniform_int_distribution<int> author(0, authors - 1);
  std::uniform_int_distribution<int> length(1, max_posts);
  // Coarse timestamps (hourly) so ties in contribution order happen.
  const attrition::Timestamp hours = config.num_weeks * 7 * 24;
  std::uniform_int_distribution<attrition::Timestamp> hour(0, hours - 1);
  std::vector<std::string> ids;
  for (int i = 0; i < threads * max_posts; ++i) ids.push_back("p" + std::to_string(i));
  std::shuffle(ids.begin(), ids.end(), rng);
  std::size_t next = 0;
  for (int t = 0; t < threads; ++t) {
    const int len = length(rng);
    std::vector<std::size_t> members;
    for (int k = 0; k < len; ++k) {
      ForumPost p;
      p.post_id = ids[next++];
      p.thread_id = "t" + std::to_string(t);
      p.author_id = "u" + std::to_string(author(rng));
      if (members.empty()) {
        p.timestamp = config.start_time + 3600 * hour(rng);
      } else {
        const ForumPost& parent =
            posts[members[std::uniform_int_distribution<std::size_t>(0, members.size() - 1)(rng)]];
        p.parent_post_id = parent.post_id;
        const attrition::Timestamp room = (config.end_time() - 1 - parent.timestamp) / 3600;
        p.timestamp = parent.timestamp + 3600 * std::uniform_int_distribution<attrition::Timestamp>(0, std::min<attrition::Timestamp>(room, 48))(rng);
      }
      p.upvotes = std::uniform_int_distribution<int>(0, 3)(rng);
      p.downvotes = std::uniform_int_distribution<int>(0, 2)(rng);
      members.push_back(posts.size());
      posts.push_back(std::move(p));
    }
  }
  return posts;
}

}  // namespace oracle
