#include "blogsim/hrg.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>

#include "blogsim/synth.h"
#include "oracles.h"

namespace blogsim::hrg {
namespace {

using Pairs = std::vector<std::pair<uint32_t, uint32_t>>;

SimpleGraph Make(int n, const Pairs& edges) {
  std::vector<DocumentId> ids;
  for (int i = 0; i < n; ++i) ids.push_back(std::string(1, 'a' + i));
  return SimpleGraph(ids, edges);
}

std::vector<uint32_t> Identity(std::size_t n) {
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  return order;
}

SimpleGraph RandomConnected(std::mt19937_64& rng, int n, double p) {
  Pairs edges;
  // A random spanning path keeps the graph connected.
  std::vector<uint32_t> perm = Identity(n);
  std::shuffle(perm.begin(), perm.end(), rng);
  for (int i = 1; i < n; ++i) edges.emplace_back(perm[i - 1], perm[i]);
  std::bernoulli_distribution extra(p);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (extra(rng)) edges.emplace_back(u, v);
    }
  }
  return Make(n, edges);
}

uint64_t SumEdges(const Dendrogram& d) {
  uint64_t total = 0;
  for (uint32_t r = 0; r < d.num_internal(); ++r) total += d.node(r).edges_between;
  return total;
}

// Every topology reachable from `start` by single moves, keyed by canonical
// form.
std::map<std::string, Dendrogram> Reachable(const SimpleGraph& g,
                                            const Dendrogram& start) {
  std::map<std::string, Dendrogram> seen = {{start.CanonicalForm(), start}};
  std::queue<Dendrogram> frontier;
  frontier.push(start);
  while (!frontier.empty()) {
    const Dendrogram d = frontier.front();
    frontier.pop();
    for (uint32_t r = 0; r < d.num_internal(); ++r) {
      if (r == d.root()) continue;
      for (int variant : {0, 1}) {
        Dendrogram next = d;
        Commit(next, Propose(g, d, Move{r, variant}));
        if (seen.emplace(next.CanonicalForm(), next).second) frontier.push(next);
      }
    }
  }
  return seen;
}

const SimpleGraph& FourCycle() {
  static const SimpleGraph g = Make(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  return g;
}

TEST(LogLikelihoodTest, TwoVertices) {
  const SimpleGraph edge = Make(2, {{0, 1}});
  const Dendrogram d = Dendrogram::Balanced(edge, Identity(2));
  EXPECT_EQ(*LogLikelihood(edge, d), 0.0);
  EXPECT_EQ(d.node(d.root()).Theta(), 1.0);

  const SimpleGraph none = Make(2, {});
  const Dendrogram e = Dendrogram::Balanced(none, Identity(2));
  EXPECT_EQ(*LogLikelihood(none, e), 0.0);
  EXPECT_EQ(e.node(e.root()).Theta(), 0.0);
}

TEST(LogLikelihoodTest, TriangleAnyShape) {
  const SimpleGraph tri = Make(3, {{0, 1}, {1, 2}, {0, 2}});
  for (const auto& [form, d] :
       Reachable(tri, Dendrogram::Balanced(tri, Identity(3)))) {
    EXPECT_EQ(*LogLikelihood(tri, d), 0.0) << form;
  }
}

TEST(LogLikelihoodTest, FourCycleHandValue) {
  const Dendrogram d = Dendrogram::Balanced(FourCycle(), Identity(4));
  ASSERT_EQ(d.CanonicalForm(), "((0,1),(2,3))");
  EXPECT_EQ(d.node(d.root()).edges_between, 2u);
  EXPECT_EQ(d.node(d.root()).Pairs(), 4u);
  EXPECT_NEAR(*LogLikelihood(FourCycle(), d), 4 * std::log(0.5), 1e-9);
  EXPECT_NEAR(d.LogLikelihood(), -2.772588722239781, 1e-9);
}

TEST(LogLikelihoodTest, NonPositiveAndZeroOnlyForPureNodes) {
  std::mt19937_64 rng(3);
  for (int n = 3; n <= 6; ++n) {
    const SimpleGraph g = RandomConnected(rng, n, 0.4);
    for (const auto& [form, d] :
         Reachable(g, Dendrogram::Balanced(g, Identity(n)))) {
      const double ll = *LogLikelihood(g, d);
      EXPECT_LE(ll, 0.0);
      bool pure = true;
      for (uint32_t r = 0; r < d.num_internal(); ++r) {
        const double t = d.node(r).Theta();
        pure = pure && (t == 0.0 || t == 1.0);
      }
      EXPECT_EQ(ll == 0.0, pure) << form;
      EXPECT_NEAR(ll, oracle::NaiveLogLikelihood(g, d), 1e-9);
    }
  }
}

TEST(DendrogramTest, BalancedIsValid) {
  std::mt19937_64 rng(4);
  const SimpleGraph g = RandomConnected(rng, 17, 0.2);
  auto order = Identity(17);
  std::shuffle(order.begin(), order.end(), rng);
  const Dendrogram d = Dendrogram::Balanced(g, order);
  EXPECT_TRUE(d.Validate().ok());
  EXPECT_EQ(d.num_internal(), 16u);
  EXPECT_EQ(SumEdges(d), g.num_edges());
}

TEST(McmcTest, IncrementalCountsMatchFullRecount) {
  std::mt19937_64 rng(5);
  for (int n = 3; n <= 6; ++n) {
    for (int graph = 0; graph < 5; ++graph) {
      const SimpleGraph g = RandomConnected(rng, n, 0.3 + 0.1 * graph);
      Dendrogram d = Dendrogram::Balanced(g, Identity(n));
      double tracked = d.LogLikelihood();
      for (int step = 0; step < 400; ++step) {
        const StepResult s = McmcStep(g, d, rng);
        if (s.delta >= 0) EXPECT_TRUE(s.accepted);
        if (s.accepted) tracked += s.delta;
        ASSERT_TRUE(d.Validate().ok());
        Dendrogram full = d;
        full.RecountAll(g);
        for (uint32_t r = 0; r < d.num_internal(); ++r) {
          ASSERT_EQ(d.node(r).edges_between, full.node(r).edges_between);
          ASSERT_EQ(d.node(r).leaves_left, full.node(r).leaves_left);
          ASSERT_EQ(d.node(r).leaves_right, full.node(r).leaves_right);
        }
        ASSERT_EQ(SumEdges(d), g.num_edges());
        ASSERT_NEAR(tracked, *LogLikelihood(g, d), 1e-9);
      }
    }
  }
}

TEST(McmcTest, ProposalDeltaMatchesRecomputation) {
  std::mt19937_64 rng(6);
  const SimpleGraph g = RandomConnected(rng, 9, 0.3);
  auto order = Identity(9);
  std::shuffle(order.begin(), order.end(), rng);
  const Dendrogram d = Dendrogram::Balanced(g, order);
  for (uint32_t r = 0; r < d.num_internal(); ++r) {
    if (r == d.root()) continue;
    for (int variant : {0, 1}) {
      const Proposal p = Propose(g, d, Move{r, variant});
      Dendrogram next = d;
      Commit(next, p);
      EXPECT_NEAR(p.delta, *LogLikelihood(g, next) - *LogLikelihood(g, d),
                  1e-9);
    }
  }
}

TEST(McmcTest, ReachesEveryTopology) {
  const std::size_t want[] = {0, 0, 1, 3, 15, 105};
  for (int n = 2; n <= 5; ++n) {
    const SimpleGraph g = Make(n, {});
    const auto reached = Reachable(g, Dendrogram::Balanced(g, Identity(n)));
    std::set<std::string> forms;
    for (const auto& [form, d] : reached) forms.insert(form);
    EXPECT_EQ(forms.size(), want[n]);
    EXPECT_EQ(forms, oracle::AllTopologies(n));
  }
}

TEST(McmcTest, FourCycleStationaryDistribution) {
  const SimpleGraph& g = FourCycle();
  const auto all = Reachable(g, Dendrogram::Balanced(g, Identity(4)));
  ASSERT_EQ(all.size(), 15u);
  std::map<std::string, double> target;
  double z = 0.0;
  for (const auto& [form, d] : all) {
    target[form] = std::exp(oracle::NaiveLogLikelihood(g, d));
    z += target[form];
  }
  for (auto& [form, p] : target) p /= z;

  std::mt19937_64 rng(7);
  Dendrogram d = Dendrogram::Balanced(g, Identity(4));
  std::map<std::string, double> visits;
  const int steps = 300000;
  for (int t = 0; t < steps; ++t) {
    McmcStep(g, d, rng);
    visits[d.CanonicalForm()] += 1.0 / steps;
  }
  for (const auto& [form, p] : target) {
    EXPECT_NEAR(visits[form], p, 0.01) << form;
  }
}

TEST(FitTest, TrianglePerfect) {
  const SimpleGraph tri = Make(3, {{0, 1}, {1, 2}, {0, 2}});
  auto fit = Fit(tri, {});
  ASSERT_TRUE(fit.ok());
  EXPECT_EQ(fit->best_loglik, 0.0);
  EXPECT_EQ(fit->steps, 900);
  EXPECT_EQ(fit->burn_in, 90);
}

TEST(FitTest, ZeroStepsKeepsInitialTree) {
  std::mt19937_64 rng(8);
  const SimpleGraph g = RandomConnected(rng, 10, 0.3);
  FitOptions options;
  options.steps = 0;
  options.burn_in = 0;
  options.seed = 42;
  auto fit = Fit(g, options);
  ASSERT_TRUE(fit.ok());
  std::mt19937_64 same(42);
  auto order = Identity(10);
  std::shuffle(order.begin(), order.end(), same);
  const Dendrogram initial = Dendrogram::Balanced(g, order);
  EXPECT_EQ(fit->best.CanonicalForm(), initial.CanonicalForm());
  EXPECT_EQ(fit->best_loglik, *LogLikelihood(g, initial));
  EXPECT_EQ(fit->accepted, 0);
}

TEST(FitTest, Reproducible) {
  std::mt19937_64 rng(9);
  const SimpleGraph g = RandomConnected(rng, 14, 0.25);
  FitOptions options;
  options.seed = 5;
  auto a = Fit(g, options);
  auto b = Fit(g, options);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(ExportNewick(a->best, g.ids()), ExportNewick(b->best, g.ids()));
  EXPECT_EQ(a->best_loglik, b->best_loglik);
  EXPECT_EQ(a->trace, b->trace);
  EXPECT_EQ(a->accepted, b->accepted);
  EXPECT_EQ(TraceCsv(*a), TraceCsv(*b));
  EXPECT_GE(a->best_loglik, a->trace.front().second);
}

TEST(FitTest, Errors) {
  EXPECT_FALSE(Fit(Make(2, {{0, 1}}), {}).ok());
  auto split = Fit(Make(4, {{0, 1}, {2, 3}}), {});
  ASSERT_FALSE(split.ok());
  EXPECT_THAT(std::string(split.status().message()),
              ::testing::HasSubstr("fit each connected component separately"));
}

TEST(FitTest, BeatsPlantedTreeUnderUniformProbabilities) {
  synth::HierarchySpec spec;
  spec.probabilities = {0.4, 0.4, 0.4};
  spec.group_size = 4;
  spec.seed = 3;
  auto planted = synth::GeneratePlantedHierarchyGraph(spec);
  ASSERT_TRUE(planted.ok());
  auto simple = Binarize(planted->graph, 0.5);
  ASSERT_TRUE(simple.ok());
  ASSERT_EQ(simple->num_vertices(), 16u);
  auto tree = ParseNewick(planted->truth.planted_newick);
  ASSERT_TRUE(tree.ok());
  auto planted_tree = FromNewick(*simple, *tree);
  ASSERT_TRUE(planted_tree.ok());
  auto fit = Fit(*simple, {});
  ASSERT_TRUE(fit.ok());
  EXPECT_GE(fit->best_loglik, *LogLikelihood(*simple, *planted_tree));
}

TEST(BinarizeTest, Thresholds) {
  auto g = simnet::SimilarityGraph::FromTriples(
      {{"a", "b", 1.0}, {"b", "c", 0.5}, {"c", "d", 0.2}, {"a", "d", 0.05}},
      0.025);
  ASSERT_TRUE(g.ok());
  auto top = Binarize(*g, 1.0);
  ASSERT_TRUE(top.ok());
  EXPECT_THAT(top->ids(), ::testing::ElementsAre("a", "b"));
  EXPECT_EQ(top->num_edges(), 1u);
  auto all = Binarize(*g, 0.05);
  ASSERT_TRUE(all.ok());
  EXPECT_EQ(all->num_edges(), 4u);
  auto mid = Binarize(*g, 0.2);
  ASSERT_TRUE(mid.ok());
  EXPECT_EQ(mid->num_edges(), 3u);
  for (const auto& e : g->edges()) {
    const auto& u = g->vertices()[e.u];
    const auto& v = g->vertices()[e.v];
    const auto& ids = mid->ids();
    const auto iu = std::find(ids.begin(), ids.end(), u) - ids.begin();
    const auto iv = std::find(ids.begin(), ids.end(), v) - ids.begin();
    const bool present = iu < static_cast<long>(ids.size()) &&
                         iv < static_cast<long>(ids.size()) &&
                         mid->HasEdge(iu, iv);
    EXPECT_EQ(present, e.s >= 0.2);
  }
}

TEST(SimpleGraphTest, ComponentsAndSubgraph) {
  const SimpleGraph g = Make(6, {{0, 1}, {1, 0}, {2, 2}, {3, 4}, {4, 5}});
  EXPECT_EQ(g.num_edges(), 3u);
  const auto comps = g.Components();
  ASSERT_EQ(comps.size(), 3u);
  EXPECT_THAT(comps[2], ::testing::ElementsAre(3, 4, 5));
  const SimpleGraph sub = g.Subgraph(comps[2]);
  EXPECT_THAT(sub.ids(), ::testing::ElementsAre("d", "e", "f"));
  EXPECT_EQ(sub.num_edges(), 2u);
}

TEST(NewickTest, Cherry) {
  const SimpleGraph g = Make(2, {{0, 1}});
  EXPECT_EQ(ExportNewick(Dendrogram::Balanced(g, Identity(2)), g.ids()),
            "(a,b)1;");
}

TEST(NewickTest, FourCycle) {
  const Dendrogram d = Dendrogram::Balanced(FourCycle(), std::vector<uint32_t>{3, 2, 1, 0});
  EXPECT_EQ(ExportNewick(d, FourCycle().ids()), "((a,b)1,(c,d)1)0.5;");
}

TEST(NewickTest, RoundTrip) {
  std::mt19937_64 rng(10);
  const SimpleGraph g = RandomConnected(rng, 12, 0.3);
  FitOptions options;
  options.steps = 2000;
  auto fit = Fit(g, options);
  ASSERT_TRUE(fit.ok());
  const std::string text = ExportNewick(fit->best, g.ids());
  auto tree = ParseNewick(text);
  ASSERT_TRUE(tree.ok()) << tree.status();
  auto back = FromNewick(g, *tree);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->CanonicalForm(), fit->best.CanonicalForm());
  EXPECT_NEAR(back->LogLikelihood(), fit->best_loglik, 1e-9);
  EXPECT_EQ(ExportNewick(*back, g.ids()), text);
}

TEST(NewickTest, QuotedLabels) {
  const SimpleGraph g(std::vector<DocumentId>{"x y", "it's", "p_q"},
                      Pairs{{0, 1}, {1, 2}});
  const Dendrogram d = Dendrogram::Balanced(g, Identity(3));
  const std::string text = ExportNewick(d, g.ids());
  EXPECT_THAT(text, ::testing::HasSubstr("'it''s'"));
  EXPECT_THAT(text, ::testing::HasSubstr("'p_q'"));
  auto tree = ParseNewick(text);
  ASSERT_TRUE(tree.ok());
  auto back = FromNewick(g, *tree);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->CanonicalForm(), d.CanonicalForm());
}

TEST(NewickTest, ParserToleratesLengthsAndComments) {
  auto tree = ParseNewick("((a:0.1,b:2)[note]0.75:1, c_d);");
  ASSERT_TRUE(tree.ok()) << tree.status();
  ASSERT_EQ(tree->children.size(), 2u);
  EXPECT_EQ(tree->children[0].support, 0.75);
  EXPECT_EQ(tree->children[1].label, "c d");
}

TEST(NewickTest, ParserErrors) {
  EXPECT_FALSE(ParseNewick("(a,b)").ok());
  EXPECT_FALSE(ParseNewick("(a,b;").ok());
  EXPECT_FALSE(ParseNewick("(a,'b);").ok());
  EXPECT_FALSE(ParseNewick("(a,b); x").ok());
  const SimpleGraph g = Make(3, {{0, 1}, {1, 2}});
  EXPECT_FALSE(FromNewick(g, *ParseNewick("(a,b,c);")).ok());
  EXPECT_FALSE(FromNewick(g, *ParseNewick("((a,b),z);")).ok());
  EXPECT_FALSE(FromNewick(g, *ParseNewick("(a,b);")).ok());
}

}  // namespace
}  // namespace blogsim::hrg
