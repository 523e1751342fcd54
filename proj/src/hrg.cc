#include "blogsim/hrg.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace blogsim::hrg {

SimpleGraph::SimpleGraph(std::vector<DocumentId> ids,
                         std::span<const std::pair<uint32_t, uint32_t>> edges)
    : ids_(std::move(ids)), adj_(ids_.size()) {
  for (auto [u, v] : edges) {
    if (u == v) continue;
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  for (auto& row : adj_) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    num_edges_ += row.size();
  }
  num_edges_ /= 2;
}

bool SimpleGraph::HasEdge(uint32_t u, uint32_t v) const {
  return std::binary_search(adj_[u].begin(), adj_[u].end(), v);
}

std::vector<std::vector<uint32_t>> SimpleGraph::Components() const {
  std::vector<std::vector<uint32_t>> components;
  std::vector<bool> seen(ids_.size(), false);
  std::vector<uint32_t> stack;
  for (uint32_t start = 0; start < ids_.size(); ++start) {
    if (seen[start]) continue;
    std::vector<uint32_t> members;
    seen[start] = true;
    stack.push_back(start);
    while (!stack.empty()) {
      const uint32_t v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (uint32_t w : adj_[v]) {
        if (!seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  return components;
}

SimpleGraph SimpleGraph::Subgraph(std::span<const uint32_t> vertices) const {
  constexpr uint32_t kAbsent = ~uint32_t{0};
  std::vector<uint32_t> remap(ids_.size(), kAbsent);
  std::vector<DocumentId> ids;
  for (uint32_t v : vertices) {
    remap[v] = static_cast<uint32_t>(ids.size());
    ids.push_back(ids_[v]);
  }
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t v : vertices) {
    for (uint32_t w : adj_[v]) {
      if (v < w && remap[w] != kAbsent) edges.emplace_back(remap[v], remap[w]);
    }
  }
  return SimpleGraph(std::move(ids), edges);
}

absl::StatusOr<SimpleGraph> Binarize(const simnet::SimilarityGraph& graph,
                                     double gamma) {
  auto view = simnet::ThresholdView(graph, gamma);
  if (!view.ok()) return view.status();
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.reserve(view->num_edges());
  for (const simnet::Edge& e : view->edges()) edges.emplace_back(e.u, e.v);
  return SimpleGraph(view->vertices(), edges);
}

double InternalNode::Theta() const {
  const uint64_t pairs = Pairs();
  return pairs == 0 ? 0.0
                    : static_cast<double>(edges_between) /
                          static_cast<double>(pairs);
}

double NodeLogLikelihood(uint64_t edges, uint64_t pairs) {
  if (edges == 0 || edges >= pairs) return 0.0;
  const double e = static_cast<double>(edges);
  const double m = static_cast<double>(pairs);
  const double theta = e / m;
  return e * std::log(theta) + (m - e) * std::log1p(-theta);
}

// Mutating access for moves and builders.
struct MoveAccess {
  static void SetParent(Dendrogram& d, Child c, int32_t parent) {
    if (c.is_leaf) {
      d.leaf_parent_[c.index] = parent;
    } else {
      d.nodes_[c.index].parent = parent;
    }
  }

  static void Apply(Dendrogram& d, const Proposal& p) {
    const uint32_t r = p.move.node;
    InternalNode& node = d.nodes_[r];
    const uint32_t parent_index = static_cast<uint32_t>(node.parent);
    InternalNode& parent = d.nodes_[parent_index];
    const bool node_is_left =
        parent.left == Child{r, /*is_leaf=*/false};
    const Child a = node.left, b = node.right;
    const Child c = node_is_left ? parent.right : parent.left;
    const uint32_t na = node.leaves_left, nb = node.leaves_right;
    const uint32_t nc = node_is_left ? parent.leaves_right : parent.leaves_left;

    const Child kept = p.move.variant == 0 ? a : b;
    const Child leftover = p.move.variant == 0 ? b : a;
    const uint32_t n_kept = p.move.variant == 0 ? na : nb;
    const uint32_t n_leftover = p.move.variant == 0 ? nb : na;

    node.left = kept;
    node.right = c;
    node.leaves_left = n_kept;
    node.leaves_right = nc;
    node.edges_between = p.node_edges;
    SetParent(d, c, static_cast<int32_t>(r));

    if (node_is_left) {
      parent.right = leftover;
      parent.leaves_left = n_kept + nc;
      parent.leaves_right = n_leftover;
    } else {
      parent.left = leftover;
      parent.leaves_right = n_kept + nc;
      parent.leaves_left = n_leftover;
    }
    parent.edges_between = p.parent_edges;
    SetParent(d, leftover, static_cast<int32_t>(parent_index));
  }
};

namespace {

Child BuildBalanced(std::span<const uint32_t> leaves,
                    std::vector<InternalNode>& nodes) {
  if (leaves.size() == 1) return Child{leaves[0], true};
  const std::size_t mid = leaves.size() / 2;
  InternalNode node;
  node.left = BuildBalanced(leaves.first(mid), nodes);
  node.right = BuildBalanced(leaves.subspan(mid), nodes);
  nodes.push_back(node);
  return Child{static_cast<uint32_t>(nodes.size() - 1), false};
}

// Scratch marks for subtree membership tests, reused across calls.
class LeafMarks {
 public:
  void Reset(std::size_t n) {
    if (stamp_.size() < n) stamp_.resize(n, 0);
    if (++generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      generation_ = 1;
    }
  }
  void Mark(uint32_t leaf) { stamp_[leaf] = generation_; }
  bool Marked(uint32_t leaf) const { return stamp_[leaf] == generation_; }

 private:
  std::vector<uint32_t> stamp_;
  uint32_t generation_ = 0;
};

uint64_t CountBetween(const SimpleGraph& graph, const Dendrogram& d, Child x,
                      Child y) {
  thread_local LeafMarks marks;
  std::vector<uint32_t> x_leaves = d.LeavesUnder(x);
  std::vector<uint32_t> y_leaves = d.LeavesUnder(y);
  if (x_leaves.size() > y_leaves.size()) std::swap(x_leaves, y_leaves);
  marks.Reset(graph.num_vertices());
  for (uint32_t leaf : y_leaves) marks.Mark(leaf);
  uint64_t count = 0;
  for (uint32_t leaf : x_leaves) {
    for (uint32_t w : graph.Neighbors(leaf)) {
      if (marks.Marked(w)) ++count;
    }
  }
  return count;
}

}  // namespace

Dendrogram Dendrogram::Balanced(const SimpleGraph& graph,
                                std::span<const uint32_t> order) {
  Dendrogram d;
  d.leaf_parent_.assign(order.size(), -1);
  const Child top = BuildBalanced(order, d.nodes_);
  d.root_ = top.index;
  for (uint32_t r = 0; r < d.nodes_.size(); ++r) {
    MoveAccess::SetParent(d, d.nodes_[r].left, static_cast<int32_t>(r));
    MoveAccess::SetParent(d, d.nodes_[r].right, static_cast<int32_t>(r));
  }
  d.nodes_[d.root_].parent = -1;
  d.RecountAll(graph);
  return d;
}

void Dendrogram::RecountAll(const SimpleGraph& graph) {
  const std::size_t m = nodes_.size();
  std::vector<uint32_t> depth(m, 0);
  // Pre-order from the root gives parents before children.
  std::vector<uint32_t> order;
  order.reserve(m);
  std::vector<uint32_t> stack{root_};
  while (!stack.empty()) {
    const uint32_t r = stack.back();
    stack.pop_back();
    order.push_back(r);
    for (Child c : {nodes_[r].left, nodes_[r].right}) {
      if (!c.is_leaf) {
        depth[c.index] = depth[r] + 1;
        stack.push_back(c.index);
      }
    }
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    InternalNode& node = nodes_[*it];
    node.leaves_left = LeafCount(node.left);
    node.leaves_right = LeafCount(node.right);
    node.edges_between = 0;
  }
  for (uint32_t u = 0; u < graph.num_vertices(); ++u) {
    for (uint32_t v : graph.Neighbors(u)) {
      if (v < u) continue;
      uint32_t a = static_cast<uint32_t>(leaf_parent_[u]);
      uint32_t b = static_cast<uint32_t>(leaf_parent_[v]);
      while (a != b) {
        if (depth[a] >= depth[b]) {
          a = static_cast<uint32_t>(nodes_[a].parent);
        } else {
          b = static_cast<uint32_t>(nodes_[b].parent);
        }
      }
      ++nodes_[a].edges_between;
    }
  }
}

uint32_t Dendrogram::LeafCount(Child c) const {
  if (c.is_leaf) return 1;
  const InternalNode& node = nodes_[c.index];
  return node.leaves_left + node.leaves_right;
}

double Dendrogram::LogLikelihood() const {
  double total = 0.0;
  for (const InternalNode& node : nodes_) {
    total += NodeLogLikelihood(node.edges_between, node.Pairs());
  }
  return total;
}

std::vector<uint32_t> Dendrogram::LeavesUnder(Child c) const {
  std::vector<uint32_t> leaves;
  std::vector<Child> stack{c};
  while (!stack.empty()) {
    const Child top = stack.back();
    stack.pop_back();
    if (top.is_leaf) {
      leaves.push_back(top.index);
    } else {
      stack.push_back(nodes_[top.index].right);
      stack.push_back(nodes_[top.index].left);
    }
  }
  return leaves;
}

absl::Status Dendrogram::Validate() const {
  const std::size_t n = leaf_parent_.size();
  if (n < 2 || nodes_.size() != n - 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dendrogram over ", n, " leaves has ", nodes_.size(), " internal nodes"));
  }
  if (root_ >= nodes_.size() || nodes_[root_].parent != -1) {
    return absl::InvalidArgumentError("root is missing or has a parent");
  }
  std::vector<int> leaf_seen(n, 0), node_seen(nodes_.size(), 0);
  std::vector<uint32_t> stack{root_};
  node_seen[root_] = 1;
  while (!stack.empty()) {
    const uint32_t r = stack.back();
    stack.pop_back();
    for (Child c : {nodes_[r].left, nodes_[r].right}) {
      if (c.is_leaf) {
        if (c.index >= n || leaf_seen[c.index]++ ||
            leaf_parent_[c.index] != static_cast<int32_t>(r)) {
          return absl::InvalidArgumentError(
              absl::StrCat("leaf ", c.index, " misplaced"));
        }
      } else {
        if (c.index >= nodes_.size() || node_seen[c.index]++ ||
            nodes_[c.index].parent != static_cast<int32_t>(r)) {
          return absl::InvalidArgumentError(
              absl::StrCat("internal node ", c.index, " misplaced"));
        }
        stack.push_back(c.index);
      }
    }
  }
  if (std::count(leaf_seen.begin(), leaf_seen.end(), 1) !=
          static_cast<std::ptrdiff_t>(n) ||
      std::count(node_seen.begin(), node_seen.end(), 1) !=
          static_cast<std::ptrdiff_t>(nodes_.size())) {
    return absl::InvalidArgumentError("dendrogram is not connected");
  }
  for (const InternalNode& node : nodes_) {
    if (node.leaves_left != LeafCount(node.left) ||
        node.leaves_right != LeafCount(node.right) ||
        node.edges_between > node.Pairs()) {
      return absl::InvalidArgumentError("inconsistent subtree counts");
    }
  }
  return absl::OkStatus();
}

std::string Dendrogram::CanonicalForm() const {
  auto render = [this](auto&& self, Child c) -> std::string {
    if (c.is_leaf) return absl::StrCat(c.index);
    std::string a = self(self, nodes_[c.index].left);
    std::string b = self(self, nodes_[c.index].right);
    if (b < a) std::swap(a, b);
    return absl::StrCat("(", a, ",", b, ")");
  };
  return render(render, Child{root_, false});
}

absl::StatusOr<Dendrogram> Dendrogram::FromNodes(const SimpleGraph& graph,
                                                 std::vector<InternalNode> nodes,
                                                 uint32_t root) {
  Dendrogram d;
  d.nodes_ = std::move(nodes);
  d.root_ = root;
  d.leaf_parent_.assign(graph.num_vertices(), -1);
  for (uint32_t r = 0; r < d.nodes_.size(); ++r) {
    for (Child c : {d.nodes_[r].left, d.nodes_[r].right}) {
      if (c.is_leaf && c.index >= d.leaf_parent_.size()) {
        return absl::InvalidArgumentError("leaf index out of range");
      }
      if (!c.is_leaf && c.index >= d.nodes_.size()) {
        return absl::InvalidArgumentError("node index out of range");
      }
      MoveAccess::SetParent(d, c, static_cast<int32_t>(r));
    }
  }
  if (root >= d.nodes_.size() || d.nodes_.size() + 1 != graph.num_vertices()) {
    return absl::InvalidArgumentError("leaf set does not match the graph");
  }
  d.nodes_[root].parent = -1;

  // Post-order fill of leaf counts; a node reached twice means a cycle or a
  // shared subtree.
  std::vector<std::pair<uint32_t, bool>> stack{{root, false}};
  std::vector<int> visits(d.nodes_.size(), 0);
  while (!stack.empty()) {
    auto [r, expanded] = stack.back();
    stack.pop_back();
    if (expanded) {
      d.nodes_[r].leaves_left = d.LeafCount(d.nodes_[r].left);
      d.nodes_[r].leaves_right = d.LeafCount(d.nodes_[r].right);
      continue;
    }
    if (visits[r]++ > 0) {
      return absl::InvalidArgumentError("dendrogram is not a tree");
    }
    stack.push_back({r, true});
    for (Child c : {d.nodes_[r].left, d.nodes_[r].right}) {
      if (!c.is_leaf) stack.push_back({c.index, false});
    }
  }
  absl::Status status = d.Validate();
  if (!status.ok()) return status;
  d.RecountAll(graph);
  return d;
}

absl::StatusOr<double> LogLikelihood(const SimpleGraph& graph,
                                     const Dendrogram& d) {
  if (d.num_leaves() != graph.num_vertices()) {
    return absl::InvalidArgumentError(
        absl::StrCat("dendrogram has ", d.num_leaves(), " leaves, graph has ",
                     graph.num_vertices(), " vertices"));
  }
  absl::Status status = d.Validate();
  if (!status.ok()) return status;
  Dendrogram fresh = d;
  fresh.RecountAll(graph);
  return fresh.LogLikelihood();
}

Proposal Propose(const SimpleGraph& graph, const Dendrogram& d, Move move) {
  const InternalNode& node = d.node(move.node);
  const InternalNode& parent = d.node(static_cast<uint32_t>(node.parent));
  const bool node_is_left = parent.left == Child{move.node, false};
  const Child c = node_is_left ? parent.right : parent.left;
  const uint64_t na = node.leaves_left, nb = node.leaves_right;
  const uint64_t nc = node_is_left ? parent.leaves_right : parent.leaves_left;

  const Child kept = move.variant == 0 ? node.left : node.right;
  const uint64_t n_kept = move.variant == 0 ? na : nb;
  const uint64_t n_leftover = move.variant == 0 ? nb : na;

  // Edges among the three subtrees are conserved across the two nodes.
  const uint64_t kept_c = CountBetween(graph, d, kept, c);
  Proposal p;
  p.move = move;
  p.node_edges = kept_c;
  p.parent_edges = node.edges_between + (parent.edges_between - kept_c);

  const double before =
      NodeLogLikelihood(node.edges_between, na * nb) +
      NodeLogLikelihood(parent.edges_between, (na + nb) * nc);
  const double after =
      NodeLogLikelihood(p.node_edges, n_kept * nc) +
      NodeLogLikelihood(p.parent_edges, (n_kept + nc) * n_leftover);
  p.delta = after - before;
  return p;
}

void Commit(Dendrogram& d, const Proposal& proposal) {
  MoveAccess::Apply(d, proposal);
}

StepResult McmcStep(const SimpleGraph& graph, Dendrogram& d,
                    std::mt19937_64& rng) {
  StepResult result;
  const std::size_t m = d.num_internal();
  if (m < 2) return result;
  std::uniform_int_distribution<uint32_t> pick_node(
      0, static_cast<uint32_t>(m - 2));
  std::uniform_int_distribution<int> pick_variant(0, 1);
  uint32_t node = pick_node(rng);
  if (node >= d.root()) ++node;
  const Proposal proposal = Propose(graph, d, Move{node, pick_variant(rng)});
  result.delta = proposal.delta;
  if (proposal.delta >= 0.0) {
    result.accepted = true;
  } else {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    result.accepted = unit(rng) < std::exp(proposal.delta);
  }
  if (result.accepted) Commit(d, proposal);
  return result;
}

absl::StatusOr<FitResult> Fit(const SimpleGraph& graph,
                              const FitOptions& options) {
  const std::size_t n = graph.num_vertices();
  if (n < 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("hierarchy fit needs >= 3 vertices, got ", n));
  }
  const auto components = graph.Components();
  if (components.size() != 1) {
    return absl::FailedPreconditionError(absl::StrCat(
        "graph is disconnected (", components.size(),
        " components); fit each connected component separately"));
  }
  const int64_t n2 = static_cast<int64_t>(n) * static_cast<int64_t>(n);
  FitResult result;
  result.seed = options.seed;
  result.steps = options.steps.value_or(100 * n2);
  result.burn_in = options.burn_in.value_or(10 * n2);
  if (result.steps < 0 || result.burn_in < 0) {
    return absl::InvalidArgumentError("steps and burn_in must be >= 0");
  }

  std::mt19937_64 rng(options.seed);
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Dendrogram current = Dendrogram::Balanced(graph, order);

  double loglik = current.LogLikelihood();
  result.best = current;
  double best = loglik;

  const int64_t total = result.steps + result.burn_in;
  const int64_t every = std::max<int64_t>(
      1, total / static_cast<int64_t>(std::max<std::size_t>(1, options.trace_points)));
  result.trace.emplace_back(0, loglik);
  for (int64_t t = 1; t <= total; ++t) {
    const StepResult step = McmcStep(graph, current, rng);
    if (step.accepted) {
      ++result.accepted;
      loglik += step.delta;
      if (loglik > best + 1e-12) {
        loglik = current.LogLikelihood();  // drop accumulated rounding
        if (loglik > best) {
          best = loglik;
          result.best = current;
        }
      }
    }
    if (t % every == 0) result.trace.emplace_back(t, loglik);
  }
  auto exact = LogLikelihood(graph, result.best);
  if (!exact.ok()) return exact.status();
  result.best_loglik = *exact;
  return result;
}

std::string TraceCsv(const FitResult& result) {
  std::string out = "step,loglik\n";
  for (const auto& [step, loglik] : result.trace) {
    absl::StrAppendFormat(&out, "%d,%.17g\n", step, loglik);
  }
  return out;
}

}  // namespace blogsim::hrg
