#include "blogsim/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <unordered_set>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "blogsim/strings.h"
#include "unicode/brkiter.h"
#include "unicode/locid.h"
#include "unicode/uchar.h"
#include "unicode/unistr.h"
#include "unicode/utf16.h"

namespace blogsim::corpus {
namespace {

bool HasLetter(const icu::UnicodeString& s, int32_t start, int32_t end) {
  for (int32_t i = start; i < end;) {
    const UChar32 c = s.char32At(i);
    if (u_isalpha(c)) return true;
    i += U16_LENGTH(c);
  }
  return false;
}

bool CountThenWord(const std::pair<std::string, int64_t>& a,
                   const std::pair<std::string, int64_t>& b) {
  if (a.second != b.second) return a.second < b.second;
  return a.first < b.first;
}

std::vector<std::pair<std::string, int64_t>> SortedEntries(
    const std::unordered_map<std::string, int64_t>& counts) {
  std::vector<std::pair<std::string, int64_t>> entries(counts.begin(),
                                                       counts.end());
  std::sort(entries.begin(), entries.end(), CountThenWord);
  return entries;
}

std::string EntriesTsv(
    const std::vector<std::pair<std::string, int64_t>>& entries) {
  std::string out;
  for (const auto& [word, count] : entries) {
    absl::StrAppend(&out, word, "\t", count, "\n");
  }
  return out;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  if (text.empty()) return tokens;

  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u.toLower(icu::Locale::getRoot());

  UErrorCode status = U_ZERO_ERROR;
  std::unique_ptr<icu::BreakIterator> words(
      icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
  if (U_FAILURE(status)) return tokens;
  words->setText(u);

  int32_t start = words->first();
  for (int32_t end = words->next(); end != icu::BreakIterator::DONE;
       start = end, end = words->next()) {
    if (!HasLetter(u, start, end)) continue;
    std::string token;
    u.tempSubStringBetween(start, end).toUTF8String(token);
    tokens.push_back(std::move(token));
  }
  return tokens;
}

absl::StatusOr<FrequencyTable> Index(std::span<const RawDocument> docs) {
  FrequencyTable table;
  std::unordered_set<std::string_view> seen;
  seen.reserve(docs.size());
  for (const RawDocument& doc : docs) {
    if (!seen.insert(doc.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate document id: ", doc.id));
    }
    for (std::string& token : Tokenize(doc.text)) {
      ++table.counts[std::move(token)];
      ++table.total_tokens;
    }
    ++table.documents;
  }
  return table;
}

void MergeInto(FrequencyTable& into, const FrequencyTable& other) {
  for (const auto& [word, count] : other.counts) into.counts[word] += count;
  into.total_tokens += other.total_tokens;
  into.documents += other.documents;
}

Vocabulary::Vocabulary(std::vector<std::string> words,
                       std::unordered_map<std::string, int64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  ids_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    ids_.emplace(words_[i], static_cast<uint32_t>(i));
  }
}

int64_t Vocabulary::Find(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? -1 : static_cast<int64_t>(it->second);
}

int64_t Vocabulary::Count(std::string_view word) const {
  auto it = counts_.find(std::string(word));
  return it == counts_.end() ? 0 : it->second;
}

absl::StatusOr<Vocabulary> SelectVocabulary(const FrequencyTable& table,
                                            const VocabularyPolicy& policy) {
  if (table.empty()) {
    return absl::InvalidArgumentError("frequency table is empty");
  }
  if (policy.min_count < 1) {
    return absl::InvalidArgumentError("min_count must be >= 1");
  }
  if (!(policy.keep_percentile > 0.0 && policy.keep_percentile <= 100.0)) {
    return absl::InvalidArgumentError("keep_percentile must be in (0, 100]");
  }

  std::vector<std::pair<std::string, int64_t>> survivors;
  for (const auto& [word, count] : table.counts) {
    if (count >= policy.min_count) survivors.emplace_back(word, count);
  }
  if (survivors.empty()) {
    return absl::FailedPreconditionError("vocabulary empty under policy");
  }
  std::sort(survivors.begin(), survivors.end(), CountThenWord);

  // ceil() of a product that should be an exact integer must not round up
  // from representation error (5% of 200 is 10, not 11).
  const double exact =
      policy.keep_percentile / 100.0 * static_cast<double>(survivors.size());
  std::size_t keep = static_cast<std::size_t>(std::ceil(exact - 1e-9));
  keep = std::clamp<std::size_t>(keep, 1, survivors.size());
  survivors.resize(keep);

  std::vector<std::string> words;
  std::unordered_map<std::string, int64_t> counts;
  words.reserve(keep);
  for (auto& [word, count] : survivors) {
    counts.emplace(word, count);
    words.push_back(std::move(word));
  }
  return Vocabulary(std::move(words), std::move(counts));
}

std::vector<std::string> Corpus::WordsOf(std::size_t doc) const {
  std::vector<std::string> out;
  out.reserve(word_sets[doc].size());
  for (uint32_t id : word_sets[doc].words) {
    out.push_back(vocabulary.words()[id]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Corpus BuildCorpus(std::span<const RawDocument> docs, Vocabulary vocabulary,
                   std::size_t min_wordset_size) {
  Corpus corpus;
  corpus.min_wordset_size = min_wordset_size;
  for (const RawDocument& doc : docs) {
    std::vector<uint32_t> ids;
    for (const std::string& token : Tokenize(doc.text)) {
      const int64_t id = vocabulary.Find(token);
      if (id >= 0) ids.push_back(static_cast<uint32_t>(id));
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty() || ids.size() < min_wordset_size) {
      ++corpus.dropped;
      continue;
    }
    corpus.word_sets.push_back(WordSet{doc.id, std::move(ids)});
  }
  std::sort(corpus.word_sets.begin(), corpus.word_sets.end(),
            [](const WordSet& a, const WordSet& b) { return a.doc < b.doc; });
  corpus.vocabulary = std::move(vocabulary);
  return corpus;
}

std::string VocabularyTsv(const Vocabulary& vocabulary) {
  std::vector<std::pair<std::string, int64_t>> entries;
  entries.reserve(vocabulary.size());
  for (const std::string& word : vocabulary.words()) {
    entries.emplace_back(word, vocabulary.Count(word));
  }
  return EntriesTsv(entries);
}

std::string FrequencyTsv(const FrequencyTable& table) {
  return EntriesTsv(SortedEntries(table.counts));
}

absl::StatusOr<FrequencyTable> ParseFrequencyTsv(std::string_view tsv) {
  FrequencyTable table;
  int line_no = 0;
  for (std::string_view line : Split(tsv, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields = Split(line, '\t');
    int64_t count = 0;
    if (fields.size() != 2 || fields[0].empty() ||
        std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(),
                        count)
                .ec != std::errc() ||
        count < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed frequency row at line ", line_no));
    }
    table.counts[std::string(fields[0])] += count;
    table.total_tokens += count;
  }
  return table;
}

}  // namespace blogsim::corpus
