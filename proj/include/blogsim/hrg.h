// Hierarchical random graph inference.
//
// A dendrogram is a rooted binary tree whose leaves are the graph vertices.
// Every internal node r carries the number of graph edges E_r whose endpoints
// have r as lowest common ancestor, and the leaf counts L_r, R_r of its two
// subtrees. At the maximum-likelihood connection probability
// theta_r = E_r / (L_r R_r) the log-likelihood of the tree is
//
//   sum_r E_r log theta_r + (L_r R_r - E_r) log(1 - theta_r),  0 log 0 = 0.
//
// Trees are sampled by Metropolis moves that rearrange an internal node, its
// children and its sibling; only the two nodes involved change counts.

#ifndef BLOGSIM_HRG_H_
#define BLOGSIM_HRG_H_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "blogsim/simnet.h"

namespace blogsim::hrg {

// Simple undirected unweighted graph.
class SimpleGraph {
 public:
  SimpleGraph() = default;
  // Pairs are vertex indices; duplicates and orientation are normalized.
  SimpleGraph(std::vector<DocumentId> ids,
              std::span<const std::pair<uint32_t, uint32_t>> edges);

  const std::vector<DocumentId>& ids() const { return ids_; }
  std::size_t num_vertices() const { return ids_.size(); }
  std::size_t num_edges() const { return num_edges_; }
  const std::vector<uint32_t>& Neighbors(uint32_t v) const { return adj_[v]; }
  bool HasEdge(uint32_t u, uint32_t v) const;

  // Vertex sets of the connected components, each sorted, ordered by their
  // smallest vertex.
  std::vector<std::vector<uint32_t>> Components() const;
  SimpleGraph Subgraph(std::span<const uint32_t> vertices) const;

 private:
  std::vector<DocumentId> ids_;
  std::vector<std::vector<uint32_t>> adj_;
  std::size_t num_edges_ = 0;
};

// Edge present iff s >= gamma; keeps only vertices with such an edge.
absl::StatusOr<SimpleGraph> Binarize(const simnet::SimilarityGraph& graph,
                                     double gamma);

struct Child {
  uint32_t index = 0;
  bool is_leaf = true;

  friend bool operator==(const Child&, const Child&) = default;
};

struct InternalNode {
  Child left;
  Child right;
  int32_t parent = -1;  // internal index, -1 at the root
  uint32_t leaves_left = 0;
  uint32_t leaves_right = 0;
  uint64_t edges_between = 0;  // E_r

  uint64_t Pairs() const {
    return uint64_t{leaves_left} * uint64_t{leaves_right};
  }
  double Theta() const;
};

// Contribution of one internal node at its MLE theta.
double NodeLogLikelihood(uint64_t edges, uint64_t pairs);

class Dendrogram {
 public:
  Dendrogram() = default;

  // Balanced tree over the leaves in the given order (a permutation of
  // 0..n-1), n >= 2. Counts are filled in from `graph`.
  static Dendrogram Balanced(const SimpleGraph& graph,
                             std::span<const uint32_t> order);

  std::size_t num_leaves() const { return leaf_parent_.size(); }
  std::size_t num_internal() const { return nodes_.size(); }
  uint32_t root() const { return root_; }
  const InternalNode& node(uint32_t r) const { return nodes_[r]; }
  int32_t leaf_parent(uint32_t leaf) const { return leaf_parent_[leaf]; }

  // Recomputes every E_r, L_r, R_r from scratch (LCA of every edge).
  void RecountAll(const SimpleGraph& graph);

  // Sum of node contributions from the stored counts.
  double LogLikelihood() const;

  // Structural check: every leaf exactly once, n-1 internal nodes, parent
  // links consistent, single root, leaf counts consistent.
  absl::Status Validate() const;

  std::vector<uint32_t> LeavesUnder(Child c) const;
  uint32_t LeafCount(Child c) const;

  // Nested, child-sorted rendering of leaf indices; equal strings mean equal
  // unordered topologies.
  std::string CanonicalForm() const;

  // Builds from explicit nodes (index layout is the caller's); counts come
  // from `graph`.
  static absl::StatusOr<Dendrogram> FromNodes(const SimpleGraph& graph,
                                              std::vector<InternalNode> nodes,
                                              uint32_t root);

 private:
  friend struct MoveAccess;

  std::vector<InternalNode> nodes_;
  std::vector<int32_t> leaf_parent_;
  uint32_t root_ = 0;
};

// Full recomputation: counts E_r from scratch for `d`'s topology.
absl::StatusOr<double> LogLikelihood(const SimpleGraph& graph,
                                     const Dendrogram& d);

// One rearrangement at internal node `node` (not the root): with children A,
// B and sibling C, variant 0 makes the node (A, C) and variant 1 (B, C); the
// leftover subtree becomes the sibling.
struct Move {
  uint32_t node = 0;
  int variant = 0;
};

struct Proposal {
  Move move;
  uint64_t node_edges = 0;    // new E at the moved node
  uint64_t parent_edges = 0;  // new E at its parent
  double delta = 0.0;         // change in log-likelihood
};

Proposal Propose(const SimpleGraph& graph, const Dendrogram& d, Move move);
void Commit(Dendrogram& d, const Proposal& proposal);

struct StepResult {
  bool accepted = false;
  double delta = 0.0;
};

// Picks a non-root internal node and one of its two alternative
// arrangements uniformly, accepting with probability min(1, exp(delta)).
StepResult McmcStep(const SimpleGraph& graph, Dendrogram& d,
                    std::mt19937_64& rng);

struct FitOptions {
  std::optional<int64_t> steps;    // default 100 n^2
  std::optional<int64_t> burn_in;  // default 10 n^2
  uint64_t seed = 1;
  std::size_t trace_points = 1000;
};

struct FitResult {
  Dendrogram best;
  double best_loglik = 0.0;
  std::vector<std::pair<int64_t, double>> trace;  // (step, log-likelihood)
  uint64_t seed = 0;
  int64_t steps = 0;
  int64_t burn_in = 0;
  int64_t accepted = 0;
};

// Runs burn_in + steps transitions from a seeded random balanced tree and
// keeps the best tree visited. Requires a connected graph with n >= 3.
absl::StatusOr<FitResult> Fit(const SimpleGraph& graph,
                              const FitOptions& options);

// --- Newick -----------------------------------------------------------------

// Leaves are labelled with their ids, internal nodes with theta; the child
// holding the lexicographically least leaf id is written first.
std::string ExportNewick(const Dendrogram& d,
                         std::span<const DocumentId> ids);

struct NewickNode {
  std::string label;
  std::optional<double> support;
  std::vector<NewickNode> children;
};

absl::StatusOr<NewickNode> ParseNewick(std::string_view text);

// Rebuilds a dendrogram over `graph` from a parsed binary Newick tree whose
// leaf labels are graph ids.
absl::StatusOr<Dendrogram> FromNewick(const SimpleGraph& graph,
                                      const NewickNode& tree);

std::string TraceCsv(const FitResult& result);

}  // namespace blogsim::hrg

#endif  // BLOGSIM_HRG_H_
