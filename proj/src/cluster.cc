#include "blogsim/cluster.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

namespace blogsim::cluster {
namespace {

using simnet::Edge;
using simnet::SimilarityGraph;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

double Choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

std::vector<int> Partition::Sizes() const {
  std::vector<int> sizes(static_cast<std::size_t>(n_clusters), 0);
  for (int l : label) {
    if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
  }
  return sizes;
}

Partition Canonicalize(std::span<const int> labels) {
  Partition out;
  out.label.resize(labels.size());
  std::unordered_map<int, int> remap;
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] == kUnclustered) {
      out.label[v] = kUnclustered;
      continue;
    }
    auto [it, inserted] = remap.try_emplace(labels[v], out.n_clusters);
    if (inserted) ++out.n_clusters;
    out.label[v] = it->second;
  }
  return out;
}

absl::StatusOr<ClusterStats> ComputeStats(const SimilarityGraph& graph,
                                          std::span<const int> labels) {
  if (graph.num_edges() == 0) {
    return absl::FailedPreconditionError("modularity undefined: no edges");
  }
  if (labels.size() != graph.num_vertices()) {
    return absl::InvalidArgumentError(
        absl::StrCat("partition covers ", labels.size(), " vertices, graph has ",
                     graph.num_vertices()));
  }
  std::vector<bool> has_edge(graph.num_vertices(), false);
  for (const Edge& e : graph.edges()) has_edge[e.u] = has_edge[e.v] = true;

  // Labels may be any non-negative integers; compact them.
  std::unordered_map<int, std::size_t> slot;
  std::vector<std::size_t> cluster_of(labels.size(), 0);
  for (std::size_t v = 0; v < labels.size(); ++v) {
    if (labels[v] < 0) {
      if (has_edge[v]) {
        return absl::InvalidArgumentError(
            absl::StrCat("vertex ", graph.vertices()[v], " is not covered"));
      }
      continue;
    }
    auto [it, inserted] = slot.try_emplace(labels[v], slot.size());
    cluster_of[v] = it->second;
  }

  const std::size_t k = slot.size();
  std::vector<CompensatedSum> internal(k), incident(k);
  CompensatedSum total;
  for (const Edge& e : graph.edges()) {
    total.Add(e.s);
    const std::size_t cu = cluster_of[e.u], cv = cluster_of[e.v];
    incident[cu].Add(e.s);
    incident[cv].Add(e.s);
    if (cu == cv) internal[cu].Add(e.s);
  }
  const double w = total.Value();
  ClusterStats stats;
  stats.internal.resize(k);
  stats.incident.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    stats.internal[c] = internal[c].Value() / w;
    stats.incident[c] = incident[c].Value() / (2.0 * w);
  }
  return stats;
}

absl::StatusOr<double> Modularity(const SimilarityGraph& graph,
                                  std::span<const int> labels) {
  auto stats = ComputeStats(graph, labels);
  if (!stats.ok()) return stats.status();
  CompensatedSum q;
  for (std::size_t c = 0; c < stats->internal.size(); ++c) {
    q.Add(stats->internal[c]);
    q.Add(-stats->incident[c] * stats->incident[c]);
  }
  return q.Value();
}

namespace {

struct MergeCandidate {
  double gain;
  int a;  // a < b
  int b;
};

// Max-heap on gain; ties prefer the smaller (a, b).
struct CandidateOrder {
  bool operator()(const MergeCandidate& x, const MergeCandidate& y) const {
    if (x.gain != y.gain) return x.gain < y.gain;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

}  // namespace

absl::StatusOr<Partition> GreedyCluster(const SimilarityGraph& graph) {
  if (graph.num_edges() == 0) {
    return absl::FailedPreconditionError("cannot cluster an edgeless graph");
  }
  const std::size_t n = graph.num_vertices();
  double total = 0.0;
  for (const Edge& e : graph.edges()) total += e.s;
  const double norm = 2.0 * total;

  // e_ab: half the weight fraction between clusters a and b. a_i: incident
  // weight fraction of cluster i.
  std::vector<std::map<int, double>> between(n);
  std::vector<double> incident(n, 0.0);
  for (const Edge& e : graph.edges()) {
    const double half = e.s / norm;
    between[e.u][static_cast<int>(e.v)] += half;
    between[e.v][static_cast<int>(e.u)] += half;
    incident[e.u] += half;
    incident[e.v] += half;
  }
  auto gain = [&](int a, int b) {
    return 2.0 * (between[a].at(b) - incident[a] * incident[b]);
  };

  std::priority_queue<MergeCandidate, std::vector<MergeCandidate>,
                      CandidateOrder>
      heap;
  for (const Edge& e : graph.edges()) {
    const int a = static_cast<int>(e.u), b = static_cast<int>(e.v);
    heap.push({gain(a, b), a, b});
  }

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<bool> alive(n, true);

  while (!heap.empty()) {
    const MergeCandidate top = heap.top();
    heap.pop();
    if (!alive[top.a] || !alive[top.b]) continue;
    if (!between[top.a].contains(top.b)) continue;
    // Entries are re-pushed whenever a pair's gain changes; an entry whose
    // gain no longer matches is stale.
    if (gain(top.a, top.b) != top.gain) continue;
    if (top.gain <= 0.0) break;

    int keep = top.a, gone = top.b;
    if (between[gone].size() > between[keep].size()) std::swap(keep, gone);
    for (const auto& [k, weight] : between[gone]) {
      if (k == keep) continue;
      between[keep][k] += weight;
      between[k][keep] += weight;
      between[k].erase(gone);
    }
    between[keep].erase(gone);
    between[gone].clear();
    incident[keep] += incident[gone];
    alive[gone] = false;
    parent[gone] = keep;

    for (const auto& [k, weight] : between[keep]) {
      heap.push({gain(keep, k), std::min(keep, k), std::max(keep, k)});
    }
  }

  auto root = [&parent](int v) {
    while (parent[v] != v) v = parent[v];
    return v;
  };
  std::vector<bool> has_edge(n, false);
  for (const Edge& e : graph.edges()) has_edge[e.u] = has_edge[e.v] = true;
  std::vector<int> labels(n, kUnclustered);
  for (std::size_t v = 0; v < n; ++v) {
    if (has_edge[v]) labels[v] = root(static_cast<int>(v));
  }
  Partition partition = Canonicalize(labels);
  auto q = Modularity(graph, partition.label);
  if (!q.ok()) return q.status();
  partition.q = *q;
  return partition;
}

absl::StatusOr<ExhaustiveResult> BruteForceBestPartition(
    const SimilarityGraph& graph) {
  const std::size_t n = graph.num_vertices();
  if (n > kOracleMaxVertices) {
    return absl::InvalidArgumentError(absl::StrCat(
        "oracle limit: ", n, " vertices > ", kOracleMaxVertices));
  }
  if (graph.num_edges() == 0) {
    return absl::FailedPreconditionError("modularity undefined: no edges");
  }

  // Restricted growth strings: rgs[0] = 0, rgs[i] <= 1 + max(rgs[0..i-1]),
  // visited in lexicographic order.
  std::vector<int> rgs(n, 0), prefix_max(n, 0);
  ExhaustiveResult result;
  bool have_best = false;
  constexpr double kTie = 1e-12;
  while (true) {
    ++result.partitions_enumerated;
    auto q = Modularity(graph, rgs);
    if (!q.ok()) return q.status();
    const int clusters = (n == 0 ? 0 : prefix_max[n - 1] + 1);
    bool better = !have_best || *q > result.best.q + kTie ||
                  (std::abs(*q - result.best.q) <= kTie &&
                   clusters < result.best.n_clusters);
    if (better) {
      result.best.label = rgs;
      result.best.n_clusters = clusters;
      result.best.q = *q;
      have_best = true;
    }

    // Next string: bump the rightmost position that can grow.
    std::size_t i = n;
    while (i > 1 && rgs[i - 1] > prefix_max[i - 2]) --i;
    if (i <= 1) break;
    --i;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t t = i + 1; t < n; ++t) {
      rgs[t] = 0;
      prefix_max[t] = prefix_max[t - 1];
    }
  }
  return result;
}

double AdjustedRandIndex(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, count] : joint) index += Choose2(count);
  for (const auto& [key, count] : rows) sum_rows += Choose2(count);
  for (const auto& [key, count] : cols) sum_cols += Choose2(count);
  const double pairs = Choose2(static_cast<double>(n));
  if (pairs == 0.0) return 1.0;
  const double expected = sum_rows * sum_cols / pairs;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

std::string PartitionCsv(const SimilarityGraph& graph,
                         const Partition& partition) {
  std::string out = "doc_id,cluster\n";
  for (std::size_t v = 0; v < graph.num_vertices(); ++v) {
    if (partition.label[v] == kUnclustered) continue;
    absl::StrAppend(&out, graph.vertices()[v], ",", partition.label[v], "\n");
  }
  return out;
}

std::string PartitionSummaryJson(const Partition& partition) {
  const auto unclustered = std::count(
      partition.label.begin(), partition.label.end(), kUnclustered);
  nlohmann::json summary = {{"n_clusters", partition.n_clusters},
                            {"Q", partition.q},
                            {"sizes", partition.Sizes()},
                            {"unclustered", unclustered}};
  return summary.dump() + "\n";
}

}  // namespace blogsim::cluster
