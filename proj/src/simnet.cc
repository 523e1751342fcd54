#include "blogsim/simnet.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "blogsim/kernels/kernels.h"

namespace blogsim::simnet {

absl::StatusOr<double> Jaccard(std::span<const uint32_t> a,
                               std::span<const uint32_t> b) {
  if (a.empty() && b.empty()) {
    return absl::InvalidArgumentError("undefined similarity: both sets empty");
  }
  const double shared = static_cast<double>(kernels::IntersectCount(a, b));
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  return shared / (na + nb - shared);
}

SimilarityGraph::SimilarityGraph(std::vector<DocumentId> vertices,
                                 std::vector<Edge> edges,
                                 double store_threshold)
    : vertices_(std::move(vertices)),
      edges_(std::move(edges)),
      store_threshold_(store_threshold) {}

absl::StatusOr<SimilarityGraph> SimilarityGraph::FromTriples(
    std::vector<std::tuple<DocumentId, DocumentId, double>> triples,
    double store_threshold, std::vector<DocumentId> extra_vertices) {
  std::vector<DocumentId> ids = std::move(extra_vertices);
  for (const auto& [a, b, s] : triples) {
    ids.push_back(a);
    ids.push_back(b);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto index_of = [&ids](const DocumentId& id) {
    return static_cast<uint32_t>(
        std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  std::vector<Edge> edges;
  edges.reserve(triples.size());
  for (const auto& [a, b, s] : triples) {
    if (a == b) {
      return absl::InvalidArgumentError(absl::StrCat("self-loop on ", a));
    }
    if (!(s > 0.0 && s <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("weight out of (0, 1] on ", a, " - ", b));
    }
    uint32_t u = index_of(a), v = index_of(b);
    if (u > v) std::swap(u, v);
    edges.push_back(Edge{u, v, s});
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.u, x.v) < std::tie(y.u, y.v);
  });
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k].u == edges[k - 1].u && edges[k].v == edges[k - 1].v) {
      return absl::InvalidArgumentError(absl::StrCat(
          "repeated pair ", ids[edges[k].u], " - ", ids[edges[k].v]));
    }
  }
  return SimilarityGraph(std::move(ids), std::move(edges), store_threshold);
}

std::vector<double> SimilarityGraph::Strengths() const {
  std::vector<double> strength(vertices_.size(), 0.0);
  for (const Edge& e : edges_) {
    strength[e.u] += e.s;
    strength[e.v] += e.s;
  }
  return strength;
}

std::vector<std::vector<std::pair<uint32_t, double>>>
SimilarityGraph::Adjacency() const {
  std::vector<std::vector<std::pair<uint32_t, double>>> adj(vertices_.size());
  for (const Edge& e : edges_) {
    adj[e.u].emplace_back(e.v, e.s);
    adj[e.v].emplace_back(e.u, e.s);
  }
  for (auto& row : adj) std::sort(row.begin(), row.end());
  return adj;
}

SimilarityGraph SimilarityGraph::InducedSubgraph(
    std::span<const uint32_t> keep) const {
  constexpr uint32_t kAbsent = ~uint32_t{0};
  std::vector<uint32_t> remap(vertices_.size(), kAbsent);
  std::vector<DocumentId> ids;
  ids.reserve(keep.size());
  for (uint32_t v : keep) {
    remap[v] = static_cast<uint32_t>(ids.size());
    ids.push_back(vertices_[v]);
  }
  std::vector<Edge> edges;
  for (const Edge& e : edges_) {
    if (remap[e.u] != kAbsent && remap[e.v] != kAbsent) {
      edges.push_back(Edge{remap[e.u], remap[e.v], e.s});
    }
  }
  return SimilarityGraph(std::move(ids), std::move(edges), store_threshold_);
}

absl::StatusOr<SimilarityGraph> BuildGraph(const corpus::Corpus& corpus,
                                           double store_threshold) {
  if (!(store_threshold > 0.0 && store_threshold <= 1.0)) {
    return absl::InvalidArgumentError("store_threshold must be in (0, 1]");
  }
  const std::size_t n = corpus.size();
  std::vector<DocumentId> ids;
  ids.reserve(n);
  std::vector<uint32_t> sizes(n);
  for (std::size_t d = 0; d < n; ++d) {
    ids.push_back(corpus.word_sets[d].doc);
    sizes[d] = static_cast<uint32_t>(corpus.word_sets[d].size());
  }

  // Posting lists are ascending in document index because documents are
  // visited in order.
  std::vector<std::vector<uint32_t>> postings(corpus.vocabulary.size());
  for (std::size_t d = 0; d < n; ++d) {
    for (uint32_t w : corpus.word_sets[d].words) {
      postings[w].push_back(static_cast<uint32_t>(d));
    }
  }
  std::vector<std::size_t> cursor(postings.size(), 0);

  std::vector<uint32_t> shared(n, 0);
  std::vector<uint32_t> touched;
  std::vector<uint32_t> shared_buf, size_buf;
  std::vector<double> sim_buf;
  std::vector<Edge> edges;

  for (std::size_t i = 0; i < n; ++i) {
    touched.clear();
    for (uint32_t w : corpus.word_sets[i].words) {
      const std::vector<uint32_t>& list = postings[w];
      // list[cursor[w]] == i; later entries are the documents j > i.
      for (std::size_t p = ++cursor[w]; p < list.size(); ++p) {
        const uint32_t j = list[p];
        if (shared[j]++ == 0) touched.push_back(j);
      }
    }
    if (touched.empty()) continue;
    std::sort(touched.begin(), touched.end());

    shared_buf.resize(touched.size());
    size_buf.resize(touched.size());
    sim_buf.resize(touched.size());
    for (std::size_t k = 0; k < touched.size(); ++k) {
      shared_buf[k] = shared[touched[k]];
      size_buf[k] = sizes[touched[k]];
      shared[touched[k]] = 0;
    }
    kernels::JaccardFromCounts(sizes[i], shared_buf, size_buf, sim_buf);
    for (std::size_t k = 0; k < touched.size(); ++k) {
      if (sim_buf[k] >= store_threshold) {
        edges.push_back(Edge{static_cast<uint32_t>(i), touched[k], sim_buf[k]});
      }
    }
  }
  return SimilarityGraph(std::move(ids), std::move(edges), store_threshold);
}

double SimilarityHistogram::Center(std::size_t bin) const {
  return std::sqrt(bin_edges[bin] * bin_edges[bin + 1]);
}

double SimilarityHistogram::Density(std::size_t bin) const {
  return static_cast<double>(counts[bin]) / Width(bin);
}

uint64_t SimilarityHistogram::Total() const {
  return std::accumulate(counts.begin(), counts.end(), uint64_t{0});
}

std::size_t BinOf(const SimilarityHistogram& hist, double value) {
  const auto& edges = hist.bin_edges;
  auto it = std::upper_bound(edges.begin(), edges.end(), value);
  if (it == edges.begin()) return 0;
  const std::size_t bin = static_cast<std::size_t>(it - edges.begin()) - 1;
  return std::min(bin, hist.num_bins() - 1);
}

absl::StatusOr<SimilarityHistogram> HistogramOf(std::span<const double> values,
                                                double lo, double hi,
                                                int n_bins) {
  if (n_bins < 2) return absl::InvalidArgumentError("n_bins must be >= 2");
  if (!(lo > 0.0 && lo < hi)) {
    return absl::InvalidArgumentError("histogram range must satisfy 0 < lo < hi");
  }
  if (values.empty()) return absl::FailedPreconditionError("no edges to bin");

  SimilarityHistogram hist;
  hist.bin_edges.resize(static_cast<std::size_t>(n_bins) + 1);
  const double log_ratio = std::log(hi / lo);
  for (int k = 0; k <= n_bins; ++k) {
    hist.bin_edges[k] = lo * std::exp(log_ratio * k / n_bins);
  }
  hist.bin_edges.front() = lo;
  hist.bin_edges.back() = hi;
  hist.counts.assign(static_cast<std::size_t>(n_bins), 0);
  for (double v : values) {
    if (v < lo || v > hi) {
      return absl::OutOfRangeError(
          absl::StrCat("value ", v, " outside histogram range"));
    }
    ++hist.counts[BinOf(hist, v)];
  }
  return hist;
}

absl::StatusOr<SimilarityHistogram> Histogram(const SimilarityGraph& graph,
                                              int n_bins) {
  std::vector<double> weights;
  weights.reserve(graph.num_edges());
  for (const Edge& e : graph.edges()) weights.push_back(e.s);
  return HistogramOf(weights, graph.store_threshold(), 1.0, n_bins);
}

double PowerLawFit::PredictLog10Density(double s) const {
  return intercept + slope * std::log10(s);
}

absl::StatusOr<LineFit> FitLine(std::span<const double> x,
                                std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) {
    return absl::InvalidArgumentError("line fit needs >= 2 paired points");
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) {
    return absl::InvalidArgumentError("line fit needs two distinct x values");
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

absl::StatusOr<PowerLawFit> FitPowerLaw(const SimilarityHistogram& hist,
                                        double lo, double hi) {
  std::vector<double> x, y;
  for (std::size_t b = 0; b < hist.num_bins(); ++b) {
    const double center = hist.Center(b);
    if (hist.counts[b] == 0 || center < lo || center > hi) continue;
    x.push_back(std::log10(center));
    y.push_back(std::log10(hist.Density(b)));
  }
  if (x.size() < 3) {
    return absl::FailedPreconditionError(
        absl::StrCat("insufficient support for fit: ", x.size(),
                     " non-empty bins in [", lo, ", ", hi, "]"));
  }
  auto line = FitLine(x, y);
  if (!line.ok()) return line.status();

  PowerLawFit fit;
  fit.slope = line->slope;
  fit.intercept = line->intercept;
  fit.r_squared = line->r_squared;
  fit.lo = lo;
  fit.hi = hi;
  fit.points = x.size();
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ss_res += r * r;
  }
  fit.residual_sd = std::sqrt(ss_res / static_cast<double>(x.size() - 2));
  return fit;
}

AnomalyReport DetectOutliers(const SimilarityGraph& graph,
                             const SimilarityHistogram& hist,
                             const PowerLawFit& fit,
                             const OutlierPolicy& policy) {
  AnomalyReport report;
  const double spread = std::max(fit.residual_sd, policy.min_residual_sd);
  std::vector<bool> flagged(hist.num_bins(), false);
  for (std::size_t b = 0; b < hist.num_bins(); ++b) {
    const double center = hist.Center(b);
    if (hist.counts[b] == 0 || center <= fit.hi) continue;
    const double residual =
        std::log10(hist.Density(b)) - fit.PredictLog10Density(center);
    if (residual > policy.k * spread) {
      flagged[b] = true;
      report.outlier_bins.push_back(b);
    }
  }
  if (report.outlier_bins.empty()) return report;

  std::map<uint32_t, uint32_t> per_vertex;
  for (const Edge& e : graph.edges()) {
    if (e.s < hist.bin_edges.front() || e.s > hist.bin_edges.back()) continue;
    if (!flagged[BinOf(hist, e.s)]) continue;
    report.outlier_edges.push_back(e);
    ++per_vertex[e.u];
    ++per_vertex[e.v];
  }
  // Vertex indices follow id order, so the map yields ids sorted.
  for (const auto& [v, count] : per_vertex) {
    report.outlier_vertices.push_back(OutlierVertex{graph.vertices()[v], count});
  }
  return report;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  uint32_t Find(uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void Union(uint32_t a, uint32_t b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<uint32_t> parent_;
};

}  // namespace

absl::StatusOr<std::vector<DuplicateGroup>> DetectDuplicates(
    const SimilarityGraph& graph, double dup_threshold) {
  if (!(dup_threshold > 0.0 && dup_threshold <= 1.0)) {
    return absl::InvalidArgumentError("dup_threshold must be in (0, 1]");
  }
  DisjointSets sets(graph.num_vertices());
  std::vector<bool> touched(graph.num_vertices(), false);
  for (const Edge& e : graph.edges()) {
    if (e.s < dup_threshold) continue;
    sets.Union(e.u, e.v);
    touched[e.u] = touched[e.v] = true;
  }
  // Roots are the smallest index in each set, i.e. the least id.
  std::map<uint32_t, std::vector<DocumentId>> components;
  for (uint32_t v = 0; v < graph.num_vertices(); ++v) {
    if (touched[v]) components[sets.Find(v)].push_back(graph.vertices()[v]);
  }
  std::vector<DuplicateGroup> groups;
  for (auto& [root, members] : components) {
    if (members.size() < 2) continue;
    groups.push_back(DuplicateGroup{members.front(), std::move(members)});
  }
  return groups;
}

absl::StatusOr<SimilarityGraph> ThresholdView(const SimilarityGraph& graph,
                                              double gamma) {
  if (gamma < graph.store_threshold()) {
    return absl::InvalidArgumentError(
        absl::StrCat("view below stored resolution: gamma ", gamma, " < ",
                     graph.store_threshold()));
  }
  std::vector<bool> used(graph.num_vertices(), false);
  for (const Edge& e : graph.edges()) {
    if (e.s >= gamma) used[e.u] = used[e.v] = true;
  }
  std::vector<uint32_t> keep;
  for (uint32_t v = 0; v < graph.num_vertices(); ++v) {
    if (used[v]) keep.push_back(v);
  }
  SimilarityGraph induced = graph.InducedSubgraph(keep);
  std::vector<Edge> edges;
  for (const Edge& e : induced.edges()) {
    if (e.s >= gamma) edges.push_back(e);
  }
  return SimilarityGraph(induced.vertices(), std::move(edges),
                         graph.store_threshold());
}

}  // namespace blogsim::simnet
