// Reading raw documents from disk.
//
//   Format A: a directory of plain-text files; the filename stem is the id.
//   Format B: a JSON-lines file of {"id": ..., "text": ...} post records.
//             Records sharing an id are joined with one space, in file order.

#ifndef BLOGSIM_INGEST_H_
#define BLOGSIM_INGEST_H_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "blogsim/corpus.h"

namespace blogsim::ingest {

struct PostRecord {
  DocumentId id;
  std::string text;
};

struct LoadedDocuments {
  std::vector<RawDocument> docs;  // sorted by id
  std::size_t dropped_empty = 0;  // documents whose text was empty
};

// Groups post-level records into blogs, preserving record order within each
// blog, and drops blogs whose concatenated text is empty.
LoadedDocuments AggregatePosts(std::span<const PostRecord> posts);

absl::StatusOr<std::vector<PostRecord>> ParseJsonLines(std::string_view text);
std::string ToJsonLines(std::span<const RawDocument> docs);

// Detects the format from the path: directories are format A, anything else
// is read as format B. An input with no documents at all is an error.
absl::StatusOr<LoadedDocuments> LoadDocuments(const std::filesystem::path& path);

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path);
absl::Status WriteFile(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace blogsim::ingest

#endif  // BLOGSIM_INGEST_H_
