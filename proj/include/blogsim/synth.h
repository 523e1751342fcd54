// Synthetic corpora and graphs with known ground truth, used as oracles.
//
// Synthetic words are pure-letter strings so they survive tokenization
// unchanged: shared-pool words start with 's', topic-pool words with 't'
// followed by a two-letter topic code, then a four-letter rank code.

#ifndef BLOGSIM_SYNTH_H_
#define BLOGSIM_SYNTH_H_

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "blogsim/corpus.h"
#include "blogsim/simnet.h"

namespace blogsim::synth {

struct TopicModelSpec {
  int n_topics = 4;
  int blogs_per_topic = 250;
  int shared_vocab_size = 4000;
  int topic_vocab_size = 4000;
  double zipf_exponent = 0.5;
  int words_per_blog = 2000;
  double topic_purity = 0.7;
  uint64_t seed = 1;
};

absl::Status Validate(const TopicModelSpec& spec);

// Word for `rank` (0-based) in a pool; pool -1 is the shared pool.
std::string PoolWord(int pool, int rank);

// Rank sampler with P(rank r) proportional to 1 / (r + 1)^a.
class ZipfTable {
 public:
  ZipfTable(int size, double exponent);
  int Sample(std::mt19937_64& rng) const;
  double Probability(int rank) const;
  int size() const { return static_cast<int>(cdf_.size()); }

 private:
  std::vector<double> cdf_;
};

struct GroundTruth {
  std::map<DocumentId, int> topic_of;
  std::vector<std::vector<DocumentId>> planted_duplicates;  // each sorted
  std::vector<DocumentId> planted_splogs;                   // sorted
  // Survivors of the default filtering pipeline, from the naive oracle below.
  std::optional<std::size_t> expected_survivors;
  // Group path (top level first) for hierarchy graphs.
  std::map<DocumentId, std::vector<int>> group_path;
  // Planted dendrogram of a hierarchy graph, as Newick over vertex ids.
  std::string planted_newick;
};

struct SynthCorpus {
  std::vector<RawDocument> docs;  // sorted by id
  GroundTruth truth;
};

// Topic-mixture corpus: each token comes from the blog's topic pool with
// probability topic_purity, otherwise from the shared pool; ranks within a
// pool are Zipf-distributed. Ids are `t<topic>-<index>`, zero padded.
SynthCorpus GenerateCorpus(const TopicModelSpec& spec);

// Adds, per requested group size g >= 2, g - 1 copies of a distinct source
// document. Each copy has floor(mutation_rate * tokens) positions replaced by
// shared-pool words. Copies are named `<source>-dupNN`.
void InjectDuplicates(SynthCorpus& corpus, const TopicModelSpec& spec,
                      const std::vector<int>& group_sizes,
                      double mutation_rate, uint64_t seed);

// Adds `count` spam blogs built from one shared template: each repeats a
// fixed block of template words and adds a few random words of its own, so
// spam blogs are near-duplicates of each other. Ids are `spam-NNNN`.
void InjectSplogs(SynthCorpus& corpus, int count, uint64_t seed);

// Naive reference for the filtering pipeline on whitespace-separated
// lowercase text: count, drop below min_count, keep the rarest
// ceil(p% of survivors) by (count, word), count documents with at least
// min_wordset_size distinct kept words.
std::size_t ExpectedSurvivors(const std::vector<RawDocument>& docs,
                              const corpus::VocabularyPolicy& policy,
                              std::size_t min_wordset_size);

struct CorpusSpec {
  TopicModelSpec topics;
  std::vector<int> duplicate_group_sizes;
  double mutation_rate = 0.0;
  int n_splogs = 0;
};

absl::StatusOr<CorpusSpec> ParseCorpusSpec(std::string_view json_text);
// Topic corpus plus planted duplicates and spam, with the default-pipeline
// survivor count filled in.
SynthCorpus GenerateFromSpec(const CorpusSpec& spec);

std::string GroundTruthJson(const GroundTruth& truth);

struct SynthGraph {
  simnet::SimilarityGraph graph;
  GroundTruth truth;
};

// Unit-weight planted partition graph; ids are `b<block>-v<index>`.
SynthGraph GeneratePlantedPartitionGraph(const std::vector<int>& block_sizes,
                                         double p_in, double p_out,
                                         uint64_t seed);

struct HierarchySpec {
  std::vector<int> branching = {2, 2};  // top level first
  int group_size = 8;
  // probabilities[0] inside a group, probabilities[k] for pairs whose groups
  // split k levels up.
  std::vector<double> probabilities = {0.9, 0.3, 0.05};
  uint64_t seed = 1;
};

// Nested block model with unit weights; records each vertex's group path
// and the planted dendrogram.
absl::StatusOr<SynthGraph> GeneratePlantedHierarchyGraph(
    const HierarchySpec& spec);

// Samples with density proportional to s^exponent on [lo, hi].
std::vector<double> SamplePowerLaw(std::size_t n, double exponent, double lo,
                                   double hi, uint64_t seed);

struct OutlierGraphSpec {
  int background_vertices = 2000;
  int background_edges = 20000;
  double exponent = -4.0;
  double lo = simnet::kDefaultStoreThreshold;
  int clique_size = 10;
  double clique_lo = 0.55;
  double clique_hi = 0.65;
  uint64_t seed = 1;
};

// Background edges with power-law similarities between random vertex pairs,
// plus a clique of near-duplicates (uniform weights in [clique_lo,
// clique_hi]) recorded as planted_splogs.
SynthGraph GenerateOutlierGraph(const OutlierGraphSpec& spec);

}  // namespace blogsim::synth

#endif  // BLOGSIM_SYNTH_H_
