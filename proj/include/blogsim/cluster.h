// Weighted modularity and greedy agglomerative cluster inference.

#ifndef BLOGSIM_CLUSTER_H_
#define BLOGSIM_CLUSTER_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "blogsim/simnet.h"

namespace blogsim::cluster {

// Label for vertices with no incident edge; they take no part in clustering.
inline constexpr int kUnclustered = -1;

// Cluster labels per vertex of the graph the partition was computed on.
// Labels are dense, 0..n_clusters-1, numbered by first appearance in vertex
// order.
struct Partition {
  std::vector<int> label;
  int n_clusters = 0;
  double q = 0.0;

  std::vector<int> Sizes() const;
};

// Renumbers labels by first appearance; kUnclustered stays as is.
Partition Canonicalize(std::span<const int> labels);

struct ClusterStats {
  std::vector<double> internal;  // r_i: internal weight / total weight
  std::vector<double> incident;  // s_i: endpoint weight / (2 * total weight)
};

// Fails on an edgeless graph, a size mismatch, or a vertex with edges left
// unlabelled.
absl::StatusOr<ClusterStats> ComputeStats(const simnet::SimilarityGraph& graph,
                                          std::span<const int> labels);

// Q = sum_i (r_i - s_i^2), accumulated with compensated summation.
absl::StatusOr<double> Modularity(const simnet::SimilarityGraph& graph,
                                  std::span<const int> labels);

// Agglomerative best-merge search: starts from singletons, merges the
// connected pair with the largest modularity gain until no gain is positive.
// Ties go to the lexicographically smallest label pair. Isolated vertices are
// labelled kUnclustered.
absl::StatusOr<Partition> GreedyCluster(const simnet::SimilarityGraph& graph);

struct ExhaustiveResult {
  Partition best;
  uint64_t partitions_enumerated = 0;
};

inline constexpr std::size_t kOracleMaxVertices = 10;

// Enumerates every set partition of the vertices and keeps a Q maximizer;
// ties go to fewer clusters, then to the smallest restricted-growth string.
absl::StatusOr<ExhaustiveResult> BruteForceBestPartition(
    const simnet::SimilarityGraph& graph);

// Chance-corrected agreement of two labelings of the same items.
double AdjustedRandIndex(std::span<const int> a, std::span<const int> b);

// `doc_id,cluster` rows sorted by id; unclustered vertices are omitted.
std::string PartitionCsv(const simnet::SimilarityGraph& graph,
                         const Partition& partition);
// {"n_clusters", "Q", "sizes", "unclustered"} as one JSON line.
std::string PartitionSummaryJson(const Partition& partition);

}  // namespace blogsim::cluster

#endif  // BLOGSIM_CLUSTER_H_
