#include "blogsim/synth.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "blogsim/strings.h"
#include "nlohmann/json.hpp"

namespace blogsim::synth {
namespace {

using nlohmann::json;

std::string LetterCode(int value, int width) {
  std::string code(static_cast<std::size_t>(width), 'a');
  for (int i = width - 1; i >= 0; --i) {
    code[static_cast<std::size_t>(i)] = static_cast<char>('a' + value % 26);
    value /= 26;
  }
  return code;
}

std::vector<std::string_view> SplitWords(std::string_view text) {
  return Split(text, ' ', /*skip_empty=*/true);
}

void SortDocs(std::vector<RawDocument>& docs) {
  std::sort(docs.begin(), docs.end(),
            [](const RawDocument& a, const RawDocument& b) {
              return a.id < b.id;
            });
}

}  // namespace

absl::Status Validate(const TopicModelSpec& spec) {
  auto positive = [](int v, std::string_view name) -> absl::Status {
    if (v < 1) {
      return absl::InvalidArgumentError(absl::StrCat(AsAbsl(name), " must be >= 1"));
    }
    return absl::OkStatus();
  };
  for (auto [value, name] :
       {std::pair{spec.n_topics, "n_topics"},
        std::pair{spec.blogs_per_topic, "blogs_per_topic"},
        std::pair{spec.shared_vocab_size, "shared_vocab_size"},
        std::pair{spec.topic_vocab_size, "topic_vocab_size"},
        std::pair{spec.words_per_blog, "words_per_blog"}}) {
    absl::Status status = positive(value, name);
    if (!status.ok()) return status;
  }
  if (spec.n_topics > 26 * 26) {
    return absl::InvalidArgumentError("n_topics must be <= 676");
  }
  if (spec.shared_vocab_size > 456976 || spec.topic_vocab_size > 456976) {
    return absl::InvalidArgumentError("vocabulary sizes must be <= 26^4");
  }
  if (!(spec.zipf_exponent > 0.0)) {
    return absl::InvalidArgumentError("zipf_exponent must be > 0");
  }
  if (!(spec.topic_purity >= 0.0 && spec.topic_purity <= 1.0)) {
    return absl::InvalidArgumentError("topic_purity must be in [0, 1]");
  }
  return absl::OkStatus();
}

std::string PoolWord(int pool, int rank) {
  if (pool < 0) return absl::StrCat("s", LetterCode(rank, 4));
  return absl::StrCat("t", LetterCode(pool, 2), LetterCode(rank, 4));
}

ZipfTable::ZipfTable(int size, double exponent)
    : cdf_(static_cast<std::size_t>(size)) {
  double total = 0.0;
  for (int r = 0; r < size; ++r) {
    total += std::pow(static_cast<double>(r + 1), -exponent);
    cdf_[static_cast<std::size_t>(r)] = total;
  }
  for (double& c : cdf_) c /= total;
  cdf_.back() = 1.0;
}

int ZipfTable::Sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return static_cast<int>(
      std::min<std::ptrdiff_t>(it - cdf_.begin(), size() - 1));
}

double ZipfTable::Probability(int rank) const {
  const auto r = static_cast<std::size_t>(rank);
  return r == 0 ? cdf_[0] : cdf_[r] - cdf_[r - 1];
}

SynthCorpus GenerateCorpus(const TopicModelSpec& spec) {
  SynthCorpus out;
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const ZipfTable shared(spec.shared_vocab_size, spec.zipf_exponent);
  const ZipfTable topical(spec.topic_vocab_size, spec.zipf_exponent);

  for (int t = 0; t < spec.n_topics; ++t) {
    for (int i = 0; i < spec.blogs_per_topic; ++i) {
      RawDocument doc;
      doc.id = absl::StrFormat("t%02d-%05d", t, i);
      for (int k = 0; k < spec.words_per_blog; ++k) {
        if (k > 0) doc.text += ' ';
        if (unit(rng) < spec.topic_purity) {
          doc.text += PoolWord(t, topical.Sample(rng));
        } else {
          doc.text += PoolWord(-1, shared.Sample(rng));
        }
      }
      out.truth.topic_of[doc.id] = t;
      out.docs.push_back(std::move(doc));
    }
  }
  SortDocs(out.docs);
  return out;
}

void InjectDuplicates(SynthCorpus& corpus, const TopicModelSpec& spec,
                      const std::vector<int>& group_sizes,
                      double mutation_rate, uint64_t seed) {
  if (group_sizes.empty()) return;
  std::mt19937_64 rng(seed);
  const ZipfTable shared(spec.shared_vocab_size, spec.zipf_exponent);

  std::vector<std::size_t> sources(corpus.docs.size());
  std::iota(sources.begin(), sources.end(), 0);
  std::shuffle(sources.begin(), sources.end(), rng);

  std::vector<RawDocument> added;
  std::size_t next = 0;
  for (int size : group_sizes) {
    if (size < 2 || next >= sources.size()) continue;
    const RawDocument& source = corpus.docs[sources[next++]];
    std::vector<DocumentId> group{source.id};
    const std::vector<std::string_view> words = SplitWords(source.text);
    for (int copy = 1; copy < size; ++copy) {
      std::vector<std::string> tokens(words.begin(), words.end());
      std::vector<std::size_t> positions(tokens.size());
      std::iota(positions.begin(), positions.end(), 0);
      std::shuffle(positions.begin(), positions.end(), rng);
      const auto mutated = static_cast<std::size_t>(
          std::floor(mutation_rate * static_cast<double>(tokens.size())));
      for (std::size_t m = 0; m < mutated; ++m) {
        tokens[positions[m]] = PoolWord(-1, shared.Sample(rng));
      }
      RawDocument doc{absl::StrFormat("%s-dup%02d", source.id, copy),
                      absl::StrJoin(tokens, " ")};
      if (auto it = corpus.truth.topic_of.find(source.id);
          it != corpus.truth.topic_of.end()) {
        corpus.truth.topic_of[doc.id] = it->second;
      }
      group.push_back(doc.id);
      added.push_back(std::move(doc));
    }
    std::sort(group.begin(), group.end());
    corpus.truth.planted_duplicates.push_back(std::move(group));
  }
  for (RawDocument& doc : added) corpus.docs.push_back(std::move(doc));
  SortDocs(corpus.docs);
}

void InjectSplogs(SynthCorpus& corpus, int count, uint64_t seed) {
  if (count <= 0) return;
  constexpr int kSpamPool = 5000;
  constexpr int kTemplateWords = 60;
  constexpr int kOwnWords = 15;
  constexpr int kRepeats = 2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> any_word(kTemplateWords, kSpamPool - 1);
  auto spam_word = [](int rank) { return absl::StrCat("x", LetterCode(rank, 4)); };

  for (int k = 0; k < count; ++k) {
    std::vector<std::string> words;
    for (int w = 0; w < kTemplateWords; ++w) {
      if (unit(rng) < 0.85) words.push_back(spam_word(w));
    }
    for (int w = 0; w < kOwnWords; ++w) words.push_back(spam_word(any_word(rng)));
    std::vector<std::string> tokens;
    for (int rep = 0; rep < kRepeats; ++rep) {
      tokens.insert(tokens.end(), words.begin(), words.end());
    }
    RawDocument doc{absl::StrFormat("spam-%04d", k), absl::StrJoin(tokens, " ")};
    corpus.truth.planted_splogs.push_back(doc.id);
    corpus.docs.push_back(std::move(doc));
  }
  std::sort(corpus.truth.planted_splogs.begin(),
            corpus.truth.planted_splogs.end());
  SortDocs(corpus.docs);
}

std::size_t ExpectedSurvivors(const std::vector<RawDocument>& docs,
                              const corpus::VocabularyPolicy& policy,
                              std::size_t min_wordset_size) {
  std::map<std::string, long long> counts;
  for (const RawDocument& doc : docs) {
    for (std::string_view w : SplitWords(doc.text)) ++counts[std::string(w)];
  }
  std::vector<std::pair<long long, std::string>> survivors;
  for (const auto& [word, count] : counts) {
    if (count >= policy.min_count) survivors.emplace_back(count, word);
  }
  if (survivors.empty()) return 0;
  std::sort(survivors.begin(), survivors.end());
  const auto keep = static_cast<std::size_t>(std::ceil(
      policy.keep_percentile * static_cast<double>(survivors.size()) / 100.0));
  std::set<std::string> kept;
  for (std::size_t i = 0; i < keep && i < survivors.size(); ++i) {
    kept.insert(survivors[i].second);
  }
  std::size_t survivors_docs = 0;
  for (const RawDocument& doc : docs) {
    std::set<std::string> present;
    for (std::string_view w : SplitWords(doc.text)) {
      if (kept.contains(std::string(w))) present.insert(std::string(w));
    }
    if (!present.empty() && present.size() >= min_wordset_size) {
      ++survivors_docs;
    }
  }
  return survivors_docs;
}

absl::StatusOr<CorpusSpec> ParseCorpusSpec(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("synth spec must be a JSON object");
  }
  CorpusSpec spec;
  TopicModelSpec& t = spec.topics;
  for (const auto& [key, value] : doc.items()) {
    auto bad = [&key = key](std::string_view want) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid spec field '", key, "': expected ", AsAbsl(want)));
    };
    auto read_int = [&](int& out) -> absl::Status {
      if (!value.is_number_integer()) return bad("integer");
      out = value.get<int>();
      return absl::OkStatus();
    };
    auto read_real = [&](double& out) -> absl::Status {
      if (!value.is_number()) return bad("number");
      out = value.get<double>();
      return absl::OkStatus();
    };
    absl::Status status;
    if (key == "n_topics") {
      status = read_int(t.n_topics);
    } else if (key == "blogs_per_topic") {
      status = read_int(t.blogs_per_topic);
    } else if (key == "shared_vocab_size") {
      status = read_int(t.shared_vocab_size);
    } else if (key == "topic_vocab_size") {
      status = read_int(t.topic_vocab_size);
    } else if (key == "zipf_exponent") {
      status = read_real(t.zipf_exponent);
    } else if (key == "words_per_blog") {
      status = read_int(t.words_per_blog);
    } else if (key == "topic_purity") {
      status = read_real(t.topic_purity);
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) return bad("non-negative integer");
      t.seed = value.get<uint64_t>();
    } else if (key == "duplicate_group_sizes") {
      if (!value.is_array()) return bad("array of integers");
      for (const json& g : value) {
        if (!g.is_number_integer() || g.get<int>() < 2) {
          return bad("array of integers >= 2");
        }
        spec.duplicate_group_sizes.push_back(g.get<int>());
      }
    } else if (key == "mutation_rate") {
      status = read_real(spec.mutation_rate);
      if (status.ok() && !(spec.mutation_rate >= 0.0 && spec.mutation_rate < 1.0)) {
        return bad("number in [0, 1)");
      }
    } else if (key == "n_splogs") {
      status = read_int(spec.n_splogs);
      if (status.ok() && spec.n_splogs < 0) return bad("integer >= 0");
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown spec field '", key, "'"));
    }
    if (!status.ok()) return status;
  }
  absl::Status status = Validate(t);
  if (!status.ok()) return status;
  return spec;
}

SynthCorpus GenerateFromSpec(const CorpusSpec& spec) {
  SynthCorpus corpus = GenerateCorpus(spec.topics);
  InjectDuplicates(corpus, spec.topics, spec.duplicate_group_sizes,
                   spec.mutation_rate, spec.topics.seed + 1);
  InjectSplogs(corpus, spec.n_splogs, spec.topics.seed + 2);
  corpus.truth.expected_survivors =
      ExpectedSurvivors(corpus.docs, corpus::VocabularyPolicy{}, 25);
  return corpus;
}

std::string GroundTruthJson(const GroundTruth& truth) {
  json out = json::object();
  out["topic_of"] = truth.topic_of;
  out["planted_duplicates"] = truth.planted_duplicates;
  out["planted_splogs"] = truth.planted_splogs;
  out["expected_survivors"] =
      truth.expected_survivors ? json(*truth.expected_survivors) : json(nullptr);
  out["group_path"] = truth.group_path;
  out["planted_newick"] = truth.planted_newick;
  return out.dump(2) + "\n";
}

SynthGraph GeneratePlantedPartitionGraph(const std::vector<int>& block_sizes,
                                         double p_in, double p_out,
                                         uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SynthGraph out;
  std::vector<DocumentId> ids;
  std::vector<int> block;
  for (int b = 0; b < static_cast<int>(block_sizes.size()); ++b) {
    for (int i = 0; i < block_sizes[static_cast<std::size_t>(b)]; ++i) {
      ids.push_back(absl::StrFormat("b%02d-v%03d", b, i));
      block.push_back(b);
      out.truth.topic_of[ids.back()] = b;
    }
  }
  std::vector<simnet::Edge> edges;
  for (uint32_t u = 0; u < ids.size(); ++u) {
    for (uint32_t v = u + 1; v < ids.size(); ++v) {
      const double p = block[u] == block[v] ? p_in : p_out;
      if (unit(rng) < p) edges.push_back(simnet::Edge{u, v, 1.0});
    }
  }
  out.graph = simnet::SimilarityGraph(std::move(ids), std::move(edges),
                                      simnet::kDefaultStoreThreshold);
  return out;
}

absl::StatusOr<SynthGraph> GeneratePlantedHierarchyGraph(
    const HierarchySpec& spec) {
  const std::size_t depth = spec.branching.size();
  if (depth == 0 || spec.probabilities.size() != depth + 1) {
    return absl::InvalidArgumentError(
        "need one probability per level plus one for within-group pairs");
  }
  for (int b : spec.branching) {
    if (b < 1) return absl::InvalidArgumentError("branching must be >= 1");
  }
  if (spec.group_size < 1) {
    return absl::InvalidArgumentError("group_size must be >= 1");
  }
  for (std::size_t k = 0; k < spec.probabilities.size(); ++k) {
    const double p = spec.probabilities[k];
    if (!(p >= 0.0 && p <= 1.0) ||
        (k > 0 && p > spec.probabilities[k - 1])) {
      return absl::InvalidArgumentError(
          "probabilities must lie in [0, 1] and not increase with level");
    }
  }

  int n_groups = 1;
  for (int b : spec.branching) n_groups *= b;

  SynthGraph out;
  std::vector<DocumentId> ids;
  std::vector<std::vector<int>> paths;
  for (int g = 0; g < n_groups; ++g) {
    std::vector<int> path(depth);
    int rest = g;
    for (std::size_t level = depth; level-- > 0;) {
      path[level] = rest % spec.branching[level];
      rest /= spec.branching[level];
    }
    for (int i = 0; i < spec.group_size; ++i) {
      ids.push_back(absl::StrFormat("g%03d-v%03d", g, i));
      paths.push_back(path);
      out.truth.group_path[ids.back()] = path;
      out.truth.topic_of[ids.back()] = g;
    }
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<simnet::Edge> edges;
  for (uint32_t u = 0; u < ids.size(); ++u) {
    for (uint32_t v = u + 1; v < ids.size(); ++v) {
      std::size_t common = 0;
      while (common < depth && paths[u][common] == paths[v][common]) ++common;
      const double p = spec.probabilities[depth - common];
      if (unit(rng) < p) edges.push_back(simnet::Edge{u, v, 1.0});
    }
  }

  // Planted dendrogram: balanced within each group, then groups joined level
  // by level.
  auto join = [](auto&& self, std::span<const std::string> parts)
      -> std::string {
    if (parts.size() == 1) return parts[0];
    const std::size_t mid = parts.size() / 2;
    return absl::StrCat("(", self(self, parts.first(mid)), ",",
                        self(self, parts.subspan(mid)), ")");
  };
  std::vector<std::string> level_parts;
  for (int g = 0; g < n_groups; ++g) {
    std::vector<std::string> members(
        ids.begin() + g * spec.group_size,
        ids.begin() + (g + 1) * spec.group_size);
    level_parts.push_back(join(join, members));
  }
  for (std::size_t level = depth; level-- > 0;) {
    const auto width = static_cast<std::size_t>(spec.branching[level]);
    std::vector<std::string> next;
    for (std::size_t start = 0; start < level_parts.size(); start += width) {
      next.push_back(join(join, std::span<const std::string>(
                                    level_parts.data() + start, width)));
    }
    level_parts = std::move(next);
  }
  out.truth.planted_newick = level_parts.front() + ";";

  out.graph = simnet::SimilarityGraph(std::move(ids), std::move(edges),
                                      simnet::kDefaultStoreThreshold);
  return out;
}

std::vector<double> SamplePowerLaw(std::size_t n, double exponent, double lo,
                                   double hi, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> out(n);
  const double k = exponent + 1.0;
  for (double& x : out) {
    const double u = unit(rng);
    if (std::abs(k) < 1e-12) {
      x = lo * std::pow(hi / lo, u);
    } else {
      const double a = std::pow(lo, k), b = std::pow(hi, k);
      x = std::pow(a + u * (b - a), 1.0 / k);
    }
    x = std::clamp(x, lo, hi);
  }
  return out;
}

SynthGraph GenerateOutlierGraph(const OutlierGraphSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> pick(0, spec.background_vertices - 1);
  const std::vector<double> weights =
      SamplePowerLaw(static_cast<std::size_t>(spec.background_edges),
                     spec.exponent, spec.lo, 1.0, spec.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<std::tuple<DocumentId, DocumentId, double>> triples;
  std::set<std::pair<int, int>> used;
  for (double w : weights) {
    int a = 0, b = 0;
    do {
      a = pick(rng);
      b = pick(rng);
      if (a > b) std::swap(a, b);
    } while (a == b || used.contains({a, b}));
    used.insert({a, b});
    triples.emplace_back(absl::StrFormat("bg-%05d", a),
                         absl::StrFormat("bg-%05d", b), w);
  }

  SynthGraph out;
  std::uniform_real_distribution<double> clique_weight(spec.clique_lo,
                                                       spec.clique_hi);
  for (int i = 0; i < spec.clique_size; ++i) {
    out.truth.planted_splogs.push_back(absl::StrFormat("spam-%02d", i));
  }
  for (int i = 0; i < spec.clique_size; ++i) {
    for (int j = i + 1; j < spec.clique_size; ++j) {
      triples.emplace_back(out.truth.planted_splogs[i],
                           out.truth.planted_splogs[j], clique_weight(rng));
    }
  }
  std::vector<DocumentId> all_background;
  for (int v = 0; v < spec.background_vertices; ++v) {
    all_background.push_back(absl::StrFormat("bg-%05d", v));
  }
  // Inputs are valid by construction.
  out.graph = *simnet::SimilarityGraph::FromTriples(
      std::move(triples), spec.lo, std::move(all_background));
  return out;
}

}  // namespace blogsim::synth
