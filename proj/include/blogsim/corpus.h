// Corpus ingestion: tokenization, corpus-wide word frequencies, rare-word
// vocabulary selection and per-document word sets.

#ifndef BLOGSIM_CORPUS_H_
#define BLOGSIM_CORPUS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "absl/status/statusor.h"

namespace blogsim {

// Stable document identifier (a blog URL, or a synthetic label).
using DocumentId = std::string;

struct RawDocument {
  DocumentId id;
  std::string text;  // UTF-8; may be empty
};

}  // namespace blogsim

namespace blogsim::corpus {

// Lowercases the text, splits it at Unicode word boundaries and keeps the
// segments that contain at least one letter. No stemming, no stop words.
std::vector<std::string> Tokenize(std::string_view text);

// Corpus-wide token counts.
struct FrequencyTable {
  std::unordered_map<std::string, int64_t> counts;
  int64_t total_tokens = 0;
  int64_t documents = 0;

  bool empty() const { return counts.empty(); }
};

// Single pass over the documents. Fails on a repeated DocumentId.
absl::StatusOr<FrequencyTable> Index(std::span<const RawDocument> docs);

// Merges `other` into `into`; counting is commutative so shard order does
// not matter.
void MergeInto(FrequencyTable& into, const FrequencyTable& other);

struct VocabularyPolicy {
  int64_t min_count = 10;
  double keep_percentile = 5.0;  // in (0, 100]; the rarest fraction is kept
};

class Vocabulary {
 public:
  Vocabulary() = default;

  // `words` must be sorted by (count ascending, word ascending).
  Vocabulary(std::vector<std::string> words,
             std::unordered_map<std::string, int64_t> counts);

  // Retained words, sorted by (count ascending, word ascending). A word's
  // position in this list is its word id.
  const std::vector<std::string>& words() const { return words_; }
  const std::unordered_map<std::string, int64_t>& counts() const {
    return counts_;
  }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  // Word id or -1.
  int64_t Find(std::string_view word) const;
  bool Contains(std::string_view word) const { return Find(word) >= 0; }
  int64_t Count(std::string_view word) const;

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int64_t> counts_;
  std::unordered_map<std::string, uint32_t> ids_;
};

// Drops words below min_count, sorts the survivors by (count, word) and keeps
// the first ceil(keep_percentile / 100 * survivors).
absl::StatusOr<Vocabulary> SelectVocabulary(const FrequencyTable& table,
                                            const VocabularyPolicy& policy);

// W_i: the vocabulary words of one document, as sorted word ids.
struct WordSet {
  DocumentId doc;
  std::vector<uint32_t> words;

  std::size_t size() const { return words.size(); }
};

struct Corpus {
  Vocabulary vocabulary;
  std::size_t min_wordset_size = 25;
  // Kept documents, sorted by id.
  std::vector<WordSet> word_sets;
  std::size_t dropped = 0;

  std::size_t size() const { return word_sets.size(); }
  std::vector<std::string> WordsOf(std::size_t doc) const;
};

Corpus BuildCorpus(std::span<const RawDocument> docs, Vocabulary vocabulary,
                   std::size_t min_wordset_size);

// Vocabulary report: `word<TAB>count`, ascending by count then word.
std::string VocabularyTsv(const Vocabulary& vocabulary);
// Same layout for a full frequency table.
std::string FrequencyTsv(const FrequencyTable& table);
absl::StatusOr<FrequencyTable> ParseFrequencyTsv(std::string_view tsv);

}  // namespace blogsim::corpus

#endif  // BLOGSIM_CORPUS_H_
