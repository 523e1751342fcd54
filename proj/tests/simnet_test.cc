#include "blogsim/simnet.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>

#include "blogsim/kernels/kernels.h"
#include "blogsim/synth.h"
#include "oracles.h"

namespace blogsim::simnet {
namespace {

corpus::Corpus CorpusOf(const std::vector<RawDocument>& docs,
                        std::size_t min_wordset_size = 1) {
  auto table = corpus::Index(docs);
  EXPECT_TRUE(table.ok());
  auto vocab = corpus::SelectVocabulary(*table, {1, 100.0});
  EXPECT_TRUE(vocab.ok());
  return corpus::BuildCorpus(docs, *std::move(vocab), min_wordset_size);
}

SimilarityGraph GraphOf(
    std::vector<std::tuple<DocumentId, DocumentId, double>> triples) {
  auto g = SimilarityGraph::FromTriples(std::move(triples),
                                        kDefaultStoreThreshold);
  EXPECT_TRUE(g.ok()) << g.status();
  return *std::move(g);
}

// Power-of-two bins over [2^-10, 1]; bin k spans [2^(k-10), 2^(k-9)).
SimilarityHistogram DyadicHistogram(const std::vector<uint64_t>& counts) {
  SimilarityHistogram h;
  for (std::size_t k = 0; k <= counts.size(); ++k) {
    h.bin_edges.push_back(std::ldexp(1.0, static_cast<int>(k) - 10));
  }
  h.counts = counts;
  return h;
}

// Density proportional to s^-4: count_k = 8^(9-k) over widths 2^(k-10).
std::vector<uint64_t> SlopeMinusFourCounts() {
  std::vector<uint64_t> c;
  for (int k = 0; k < 10; ++k) c.push_back(uint64_t{1} << (3 * (9 - k)));
  return c;
}

TEST(JaccardTest, Examples) {
  const std::vector<uint32_t> abc = {0, 1, 2}, bcd = {1, 2, 3}, xy = {7, 8};
  EXPECT_EQ(*Jaccard(abc, abc), 1.0);
  EXPECT_EQ(*Jaccard(abc, xy), 0.0);
  EXPECT_EQ(*Jaccard(abc, bcd), 0.5);
  EXPECT_EQ(*Jaccard(abc, {}), 0.0);
  EXPECT_FALSE(Jaccard({}, {}).ok());
}

TEST(JaccardTest, SymmetricAndOneMinusIsMetric) {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.4);
  std::vector<std::vector<uint32_t>> sets;
  for (int i = 0; i < 25; ++i) {
    std::vector<uint32_t> s;
    for (uint32_t w = 0; w < 12; ++w) {
      if (coin(rng)) s.push_back(w);
    }
    if (s.empty()) s.push_back(i % 12);
    sets.push_back(s);
  }
  for (const auto& a : sets) {
    for (const auto& b : sets) {
      EXPECT_EQ(*Jaccard(a, b), *Jaccard(b, a));
      for (const auto& c : sets) {
        const double ab = 1 - *Jaccard(a, b), bc = 1 - *Jaccard(b, c),
                     ac = 1 - *Jaccard(a, c);
        EXPECT_LE(ac, ab + bc + 1e-12);
      }
    }
  }
}

TEST(SimilarityGraphTest, FromTriplesValidates) {
  EXPECT_FALSE(SimilarityGraph::FromTriples({{"a", "a", 0.5}}, 0.025).ok());
  EXPECT_FALSE(SimilarityGraph::FromTriples({{"a", "b", 1.5}}, 0.025).ok());
  EXPECT_FALSE(SimilarityGraph::FromTriples({{"a", "b", 0.0}}, 0.025).ok());
  EXPECT_FALSE(
      SimilarityGraph::FromTriples({{"a", "b", 0.5}, {"b", "a", 0.4}}, 0.025)
          .ok());
  auto g = SimilarityGraph::FromTriples({{"c", "a", 0.5}, {"b", "a", 0.25}},
                                        0.025, {"z"});
  ASSERT_TRUE(g.ok());
  EXPECT_THAT(g->vertices(), ::testing::ElementsAre("a", "b", "c", "z"));
  EXPECT_THAT(g->edges(), ::testing::ElementsAre(Edge{0, 1, 0.25},
                                                 Edge{0, 2, 0.5}));
  EXPECT_THAT(g->Strengths(), ::testing::ElementsAre(0.75, 0.25, 0.5, 0.0));
}

TEST(BuildGraphTest, SingleDocumentHasNoEdges) {
  auto g = BuildGraph(CorpusOf({{"a", "x y z"}}), kDefaultStoreThreshold);
  ASSERT_TRUE(g.ok());
  EXPECT_EQ(g->num_vertices(), 1u);
  EXPECT_EQ(g->num_edges(), 0u);
}

TEST(BuildGraphTest, IdenticalDocumentsGiveUnitEdge) {
  auto g = BuildGraph(CorpusOf({{"a", "x y z"}, {"b", "z y x"}}),
                      kDefaultStoreThreshold);
  ASSERT_TRUE(g.ok());
  EXPECT_THAT(g->edges(), ::testing::ElementsAre(Edge{0, 1, 1.0}));
}

TEST(BuildGraphTest, RejectsBadThreshold) {
  const auto c = CorpusOf({{"a", "x"}});
  EXPECT_FALSE(BuildGraph(c, 0.0).ok());
  EXPECT_FALSE(BuildGraph(c, 1.5).ok());
}

class BuildGraphOracleTest : public ::testing::TestWithParam<kernels::Isa> {};

TEST_P(BuildGraphOracleTest, MatchesAllPairsBruteForce) {
  const kernels::Isa saved = kernels::ActiveIsa();
  if (!kernels::SetActiveIsa(GetParam())) GTEST_SKIP() << "ISA unavailable";
  for (uint64_t seed = 1; seed <= 4; ++seed) {
    const auto docs = oracle::RandomDocs(200, 400, 20, 80, seed);
    const corpus::Corpus c = CorpusOf(docs);
    for (double thr : {kDefaultStoreThreshold, 0.08}) {
      auto g = BuildGraph(c, thr);
      ASSERT_TRUE(g.ok());
      const auto got = oracle::TriplesOf(*g);
      const auto want = oracle::AllPairsJaccard(oracle::WordSetsById(c), thr);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_EQ(std::get<0>(got[i]), std::get<0>(want[i]));
        EXPECT_EQ(std::get<1>(got[i]), std::get<1>(want[i]));
        EXPECT_NEAR(std::get<2>(got[i]), std::get<2>(want[i]), 1e-12);
      }
    }
  }
  kernels::SetActiveIsa(saved);
}

INSTANTIATE_TEST_SUITE_P(
    Isas, BuildGraphOracleTest,
    ::testing::Values(kernels::Isa::kScalar, kernels::Isa::kAvx2),
    [](const auto& info) { return std::string(kernels::IsaName(info.param)); });

TEST(HistogramTest, SingleUnitEdgeInLastBin) {
  auto h = Histogram(GraphOf({{"a", "b", 1.0}}), 50);
  ASSERT_TRUE(h.ok());
  EXPECT_EQ(h->counts.back(), 1u);
  EXPECT_EQ(h->Total(), 1u);
}

TEST(HistogramTest, TwoBinsByHand) {
  // Bin edges 0.025, sqrt(0.025) ~ 0.158, 1.
  auto h = Histogram(
      GraphOf({{"a", "b", 0.03}, {"a", "c", 0.03}, {"b", "c", 0.5}}), 2);
  ASSERT_TRUE(h.ok());
  EXPECT_THAT(h->counts, ::testing::ElementsAre(2, 1));
  EXPECT_NEAR(h->bin_edges[1], std::sqrt(0.025), 1e-15);
  EXPECT_NEAR(h->Center(0), std::sqrt(0.025 * h->bin_edges[1]), 1e-15);
  EXPECT_DOUBLE_EQ(h->Density(1), 1.0 / (1.0 - h->bin_edges[1]));
}

TEST(HistogramTest, LeftClosedBins) {
  const std::vector<double> values = {0.025, 0.5, 1.0};
  auto h = HistogramOf(values, 0.025, 1.0, 10);
  ASSERT_TRUE(h.ok());
  EXPECT_EQ(h->counts.front(), 1u);
  EXPECT_EQ(h->counts.back(), 1u);
  const double edge = h->bin_edges[5];
  auto at_edge = HistogramOf(std::vector<double>{edge}, 0.025, 1.0, 10);
  EXPECT_EQ(at_edge->counts[5], 1u);
}

TEST(HistogramTest, EmptyGraphErrors) {
  SimilarityGraph empty({"a"}, {}, kDefaultStoreThreshold);
  auto h = Histogram(empty, 50);
  ASSERT_FALSE(h.ok());
  EXPECT_EQ(h.status().message(), "no edges to bin");
}

TEST(HistogramTest, ConservesEdgeCount) {
  const auto values = synth::SamplePowerLaw(5000, -2.5, 0.025, 1.0, 3);
  auto h = HistogramOf(values, 0.025, 1.0, 50);
  ASSERT_TRUE(h.ok());
  EXPECT_EQ(h->Total(), values.size());
}

TEST(FitPowerLawTest, ExactLineSlopeMinusFour) {
  const auto h = DyadicHistogram(SlopeMinusFourCounts());
  auto fit = FitPowerLaw(h, 0.0, 1.0);
  ASSERT_TRUE(fit.ok());
  EXPECT_NEAR(fit->slope, -4.0, 1e-9);
  EXPECT_EQ(fit->points, 10u);
  EXPECT_NEAR(fit->r_squared, 1.0, 1e-12);
}

TEST(FitPowerLawTest, FlatDensity) {
  std::vector<uint64_t> counts;
  for (int k = 0; k < 10; ++k) counts.push_back(uint64_t{1} << k);
  auto fit = FitPowerLaw(DyadicHistogram(counts), 0.0, 1.0);
  ASSERT_TRUE(fit.ok());
  EXPECT_NEAR(fit->slope, 0.0, 1e-9);
}

TEST(FitPowerLawTest, InsufficientSupport) {
  auto fit = FitPowerLaw(DyadicHistogram({5, 0, 0, 0, 0, 0, 0, 0, 0, 3}), 0.0,
                         1.0);
  ASSERT_FALSE(fit.ok());
  EXPECT_THAT(std::string(fit.status().message()),
              ::testing::HasSubstr("insufficient support for fit"));
}

TEST(FitPowerLawTest, ParetoExponentMinusThree) {
  for (uint64_t seed = 1; seed <= 5; ++seed) {
    const auto values = synth::SamplePowerLaw(100000, -3.0, 0.025, 1.0, seed);
    auto h = HistogramOf(values, 0.025, 1.0, 50);
    ASSERT_TRUE(h.ok());
    auto fit = FitPowerLaw(*h, 0.025, 0.2);
    ASSERT_TRUE(fit.ok());
    EXPECT_NEAR(fit->slope, -3.0, 0.15) << "seed " << seed;
  }
}

TEST(DetectOutliersTest, DataOnLineGivesNone) {
  const auto h = DyadicHistogram(SlopeMinusFourCounts());
  auto fit = FitPowerLaw(h, 0.0, 0.02);  // bins 0..4
  ASSERT_TRUE(fit.ok());
  const auto report = DetectOutliers(GraphOf({{"a", "b", 0.5}}), h, *fit);
  EXPECT_TRUE(report.outlier_bins.empty());
  EXPECT_TRUE(report.outlier_edges.empty());
}

TEST(DetectOutliersTest, BumpAboveRegionFlagged) {
  auto counts = SlopeMinusFourCounts();
  counts[8] *= 100;  // [0.25, 0.5)
  const auto h = DyadicHistogram(counts);
  auto fit = FitPowerLaw(h, 0.0, 0.02);
  ASSERT_TRUE(fit.ok());
  const auto g = GraphOf({{"a", "b", 0.3}, {"a", "c", 0.3}, {"b", "c", 0.9}});
  const auto report = DetectOutliers(g, h, *fit);
  EXPECT_THAT(report.outlier_bins, ::testing::ElementsAre(8));
  EXPECT_EQ(report.outlier_edges.size(), 2u);
  ASSERT_EQ(report.outlier_vertices.size(), 3u);
  EXPECT_EQ(report.outlier_vertices[0].id, "a");
  EXPECT_EQ(report.outlier_vertices[0].flagged_edges, 2u);
  EXPECT_EQ(report.outlier_vertices[1].flagged_edges, 1u);

  OutlierPolicy never;
  never.k = std::numeric_limits<double>::infinity();
  EXPECT_TRUE(DetectOutliers(g, h, *fit, never).outlier_edges.empty());
}

TEST(DetectOutliersTest, PlantedCliqueFlagged) {
  for (uint64_t seed = 1; seed <= 3; ++seed) {
    synth::OutlierGraphSpec spec;
    spec.seed = seed;
    const auto planted = synth::GenerateOutlierGraph(spec);
    auto h = Histogram(planted.graph, 50);
    ASSERT_TRUE(h.ok());
    auto fit = FitPowerLaw(*h, 0.025, 0.2);
    ASSERT_TRUE(fit.ok());
    EXPECT_NEAR(fit->slope, -4.0, 0.3);
    const auto report = DetectOutliers(planted.graph, *h, *fit);
    const std::set<DocumentId> spam(planted.truth.planted_splogs.begin(),
                                    planted.truth.planted_splogs.end());
    int clique_edges = 0;
    for (const Edge& e : report.outlier_edges) {
      if (spam.count(planted.graph.vertices()[e.u]) &&
          spam.count(planted.graph.vertices()[e.v])) {
        ++clique_edges;
      }
    }
    EXPECT_EQ(clique_edges, 45) << "seed " << seed;
  }
}

TEST(DetectDuplicatesTest, IdenticalTriple) {
  auto g = BuildGraph(
      CorpusOf({{"a", "x y z"}, {"b", "x y z"}, {"c", "z x y"}, {"d", "q"}}),
      kDefaultStoreThreshold);
  ASSERT_TRUE(g.ok());
  auto groups = DetectDuplicates(*g, 0.8);
  ASSERT_TRUE(groups.ok());
  ASSERT_EQ(groups->size(), 1u);
  EXPECT_EQ((*groups)[0].representative, "a");
  EXPECT_THAT((*groups)[0].members, ::testing::ElementsAre("a", "b", "c"));
}

TEST(DetectDuplicatesTest, NoneAboveThreshold) {
  auto groups = DetectDuplicates(GraphOf({{"a", "b", 0.5}}), 0.8);
  ASSERT_TRUE(groups.ok());
  EXPECT_TRUE(groups->empty());
}

TEST(DetectDuplicatesTest, ChainClosure) {
  auto groups = DetectDuplicates(
      GraphOf({{"a", "b", 0.9}, {"b", "c", 0.9}, {"a", "c", 0.3}}), 0.8);
  ASSERT_TRUE(groups.ok());
  ASSERT_EQ(groups->size(), 1u);
  EXPECT_THAT((*groups)[0].members, ::testing::ElementsAre("a", "b", "c"));
}

TEST(DetectDuplicatesTest, MatchesTransitiveClosure) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> weight(0.03, 1.0);
  std::bernoulli_distribution present(0.08);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 30;
    std::vector<std::tuple<DocumentId, DocumentId, double>> triples;
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) {
      reach[i][i] = true;
      for (int j = i + 1; j < n; ++j) {
        if (!present(rng)) continue;
        const double s = weight(rng);
        triples.emplace_back("v" + std::to_string(100 + i),
                             "v" + std::to_string(100 + j), s);
        if (s >= 0.8) reach[i][j] = reach[j][i] = true;
      }
    }
    for (int k = 0; k < n; ++k) {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (reach[i][k] && reach[k][j]) reach[i][j] = true;
        }
      }
    }
    std::set<std::vector<DocumentId>> want;
    for (int i = 0; i < n; ++i) {
      std::vector<DocumentId> group;
      for (int j = 0; j < n; ++j) {
        if (reach[i][j]) group.push_back("v" + std::to_string(100 + j));
      }
      if (group.size() >= 2) want.insert(group);
    }
    auto groups = DetectDuplicates(GraphOf(triples), 0.8);
    ASSERT_TRUE(groups.ok());
    std::set<std::vector<DocumentId>> got;
    std::set<DocumentId> seen;
    for (const auto& g : *groups) {
      EXPECT_EQ(g.representative, g.members.front());
      for (const auto& m : g.members) EXPECT_TRUE(seen.insert(m).second);
      got.insert(g.members);
    }
    EXPECT_EQ(got, want);
  }
}

TEST(ThresholdViewTest, IdentityAtStoreThreshold) {
  const auto g = GraphOf({{"a", "b", 0.025}, {"b", "c", 0.5}});
  auto v = ThresholdView(g, kDefaultStoreThreshold);
  ASSERT_TRUE(v.ok());
  EXPECT_EQ(oracle::TriplesOf(*v), oracle::TriplesOf(g));
}

TEST(ThresholdViewTest, BelowResolutionErrors) {
  auto v = ThresholdView(GraphOf({{"a", "b", 0.5}}), 0.01);
  ASSERT_FALSE(v.ok());
  EXPECT_THAT(std::string(v.status().message()),
              ::testing::HasSubstr("view below stored resolution"));
}

TEST(ThresholdViewTest, NestedAndDropsIsolates) {
  const auto docs = oracle::RandomDocs(80, 300, 20, 60, 5);
  auto g = BuildGraph(CorpusOf(docs), kDefaultStoreThreshold);
  ASSERT_TRUE(g.ok());
  std::vector<std::vector<oracle::Triple>> views;
  for (double gamma : {0.04, 0.045, 0.055, 0.07}) {
    auto v = ThresholdView(*g, gamma);
    ASSERT_TRUE(v.ok());
    for (const Edge& e : v->edges()) EXPECT_GE(e.s, gamma);
    std::vector<bool> touched(v->num_vertices(), false);
    for (const Edge& e : v->edges()) touched[e.u] = touched[e.v] = true;
    EXPECT_TRUE(std::all_of(touched.begin(), touched.end(),
                            [](bool t) { return t; }));
    views.push_back(oracle::TriplesOf(*v));
  }
  for (std::size_t i = 1; i < views.size(); ++i) {
    EXPECT_TRUE(std::includes(views[i - 1].begin(), views[i - 1].end(),
                              views[i].begin(), views[i].end()));
    EXPECT_LT(views[i].size(), views[i - 1].size());
  }
}

TEST(SerializationTest, EdgeListRoundTrip) {
  const auto docs = oracle::RandomDocs(40, 200, 10, 40, 6);
  auto g = BuildGraph(CorpusOf(docs), kDefaultStoreThreshold);
  ASSERT_TRUE(g.ok());
  auto parsed = ParseEdgeListTsv(EdgeListTsv(*g), kDefaultStoreThreshold);
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  ASSERT_EQ(parsed->num_edges(), g->num_edges());
  for (std::size_t i = 0; i < g->num_edges(); ++i) {
    EXPECT_EQ(parsed->vertices()[parsed->edges()[i].u],
              g->vertices()[g->edges()[i].u]);
    EXPECT_NEAR(parsed->edges()[i].s, g->edges()[i].s, 5e-6 * g->edges()[i].s);
  }
  EXPECT_EQ(EdgeListTsv(*parsed), EdgeListTsv(*g));
}

TEST(SerializationTest, EdgeListRejectsMalformed) {
  EXPECT_FALSE(ParseEdgeListTsv("a\tb\n", 0.025).ok());
  EXPECT_FALSE(ParseEdgeListTsv("a\tb\tx\n", 0.025).ok());
}

TEST(SerializationTest, GraphMlAndCsvShape) {
  const auto g = GraphOf({{"a&b", "c", 0.5}});
  const std::string xml = GraphMl(g);
  EXPECT_THAT(xml, ::testing::HasSubstr("a&amp;b"));
  EXPECT_THAT(xml, ::testing::HasSubstr("<edge"));
  auto h = Histogram(g, 4);
  ASSERT_TRUE(h.ok());
  const std::string csv = HistogramCsv(*h);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "bin_lo,bin_hi,count,density");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

}  // namespace
}  // namespace blogsim::simnet
