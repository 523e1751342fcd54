// Word-overlap similarity network: exact Jaccard similarities through an
// inverted index, the similarity distribution and its power-law fit, and the
// spam / duplicate signals read off that distribution.

#ifndef BLOGSIM_SIMNET_H_
#define BLOGSIM_SIMNET_H_

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "blogsim/corpus.h"

namespace blogsim::simnet {

inline constexpr double kDefaultStoreThreshold = 0.025;

// |a ∩ b| / |a ∪ b| over sorted, duplicate-free id lists. One empty side gives
// 0; both empty is undefined.
absl::StatusOr<double> Jaccard(std::span<const uint32_t> a,
                               std::span<const uint32_t> b);

struct Edge {
  uint32_t u = 0;  // u < v; vertex order is lexicographic id order
  uint32_t v = 0;
  double s = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected weighted graph. Vertices are sorted by id; edges are stored once
// with u < v, sorted by (u, v).
class SimilarityGraph {
 public:
  SimilarityGraph() = default;
  SimilarityGraph(std::vector<DocumentId> vertices, std::vector<Edge> edges,
                  double store_threshold);

  // Builds from id-labelled triples. Ids need not be sorted or canonical.
  // Fails on self-loops, repeated pairs or weights outside (0, 1].
  static absl::StatusOr<SimilarityGraph> FromTriples(
      std::vector<std::tuple<DocumentId, DocumentId, double>> triples,
      double store_threshold, std::vector<DocumentId> extra_vertices = {});

  const std::vector<DocumentId>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }
  double store_threshold() const { return store_threshold_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  // Weighted degree of every vertex.
  std::vector<double> Strengths() const;
  std::vector<std::vector<std::pair<uint32_t, double>>> Adjacency() const;

  // Keeps `keep` vertices (a sorted list of vertex indices) and the edges
  // among them.
  SimilarityGraph InducedSubgraph(std::span<const uint32_t> keep) const;

 private:
  std::vector<DocumentId> vertices_;
  std::vector<Edge> edges_;
  double store_threshold_ = kDefaultStoreThreshold;
};

// All pairs with similarity >= store_threshold, enumerated through an
// inverted index so that pairs sharing no word are never visited.
absl::StatusOr<SimilarityGraph> BuildGraph(const corpus::Corpus& corpus,
                                           double store_threshold);

struct SimilarityHistogram {
  std::vector<double> bin_edges;  // n_bins + 1 ascending edges
  std::vector<uint64_t> counts;   // n_bins

  std::size_t num_bins() const { return counts.size(); }
  double Width(std::size_t bin) const {
    return bin_edges[bin + 1] - bin_edges[bin];
  }
  // Geometric bin center (log bins are symmetric in log space).
  double Center(std::size_t bin) const;
  double Density(std::size_t bin) const;
  uint64_t Total() const;
};

// Logarithmically spaced bins over [lo, hi]; [e_k, e_k+1) intervals with the
// last bin closed.
absl::StatusOr<SimilarityHistogram> HistogramOf(std::span<const double> values,
                                                double lo, double hi,
                                                int n_bins);
absl::StatusOr<SimilarityHistogram> Histogram(const SimilarityGraph& graph,
                                              int n_bins);
// Bin index of `value` (which must lie in [edges.front(), edges.back()]).
std::size_t BinOf(const SimilarityHistogram& hist, double value);

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // log10 density at log10 s = 0
  double lo = 0.025;
  double hi = 0.2;
  double r_squared = 0.0;
  double residual_sd = 0.0;  // of log10 density about the line, in region
  std::size_t points = 0;

  double PredictLog10Density(double s) const;
};

// Ordinary least squares on (log10 center, log10 density) over the non-empty
// bins whose centers lie in [lo, hi].
absl::StatusOr<PowerLawFit> FitPowerLaw(const SimilarityHistogram& hist,
                                        double lo, double hi);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};
// Plain least-squares line through (x, y); needs at least two distinct x.
absl::StatusOr<LineFit> FitLine(std::span<const double> x,
                                std::span<const double> y);

struct OutlierPolicy {
  double k = 2.0;
  // Lower bound on the residual spread, so a perfect fit is not read as
  // infinitely tight.
  double min_residual_sd = 1e-6;
};

struct OutlierVertex {
  DocumentId id;
  uint32_t flagged_edges = 0;
};

struct DuplicateGroup {
  DocumentId representative;  // lexicographically least member
  std::vector<DocumentId> members;
};

struct AnomalyReport {
  std::vector<Edge> outlier_edges;
  std::vector<std::size_t> outlier_bins;
  std::vector<OutlierVertex> outlier_vertices;  // sorted by id
  std::vector<DuplicateGroup> duplicate_groups;  // sorted by representative
};

// Flags bins above the fit region whose log10 density exceeds the fitted
// line by more than k residual standard deviations, and every edge in them.
AnomalyReport DetectOutliers(const SimilarityGraph& graph,
                             const SimilarityHistogram& hist,
                             const PowerLawFit& fit,
                             const OutlierPolicy& policy = {});

// Connected components (size >= 2) of the edges with s >= dup_threshold.
absl::StatusOr<std::vector<DuplicateGroup>> DetectDuplicates(
    const SimilarityGraph& graph, double dup_threshold);

// Edges with s >= gamma and the vertices they touch.
absl::StatusOr<SimilarityGraph> ThresholdView(const SimilarityGraph& graph,
                                              double gamma);

// --- Serialization --------------------------------------------------------

// `i<TAB>j<TAB>s`, s at 6 significant digits, sorted by (i, j).
std::string EdgeListTsv(const SimilarityGraph& graph);
absl::StatusOr<SimilarityGraph> ParseEdgeListTsv(std::string_view tsv,
                                                 double store_threshold);
std::string GraphMl(const SimilarityGraph& graph);
// `bin_lo,bin_hi,count,density`.
std::string HistogramCsv(const SimilarityHistogram& hist);
// One JSON object per outlier vertex, then one per duplicate group.
std::string AnomalyJsonLines(const AnomalyReport& report);

}  // namespace blogsim::simnet

#endif  // BLOGSIM_SIMNET_H_
