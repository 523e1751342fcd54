#include "blogsim/ingest.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "blogsim/status_macros.h"
#include "blogsim/strings.h"
#include "nlohmann/json.hpp"

namespace blogsim::ingest {

namespace fs = std::filesystem;
using nlohmann::json;

LoadedDocuments AggregatePosts(std::span<const PostRecord> posts) {
  std::map<DocumentId, std::string> blogs;
  for (const PostRecord& post : posts) {
    auto [it, inserted] = blogs.try_emplace(post.id, post.text);
    if (!inserted) absl::StrAppend(&it->second, " ", post.text);
  }
  LoadedDocuments out;
  for (auto& [id, text] : blogs) {
    const bool blank = std::all_of(text.begin(), text.end(), [](char c) {
      return c == ' ' || c == '\t' || c == '\n' || c == '\r';
    });
    if (blank) {
      ++out.dropped_empty;
      continue;
    }
    out.docs.push_back(RawDocument{id, std::move(text)});
  }
  return out;
}

absl::StatusOr<std::vector<PostRecord>> ParseJsonLines(std::string_view text) {
  std::vector<PostRecord> records;
  int line_no = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object() ||
        !record.contains("id") || !record["id"].is_string() ||
        !record.contains("text")) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed JSON-lines record at line ", line_no));
    }
    std::string id = record["id"].get<std::string>();
    if (id.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("empty document id at line ", line_no));
    }
    // Non-text payloads are treated as empty documents.
    std::string body =
        record["text"].is_string() ? record["text"].get<std::string>() : "";
    records.push_back(PostRecord{std::move(id), std::move(body)});
  }
  return records;
}

std::string ToJsonLines(std::span<const RawDocument> docs) {
  std::string out;
  for (const RawDocument& doc : docs) {
    json record = {{"id", doc.id}, {"text", doc.text}};
    absl::StrAppend(&out, record.dump(), "\n");
  }
  return out;
}

absl::StatusOr<std::string> ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrCat("cannot read ", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

absl::Status WriteFile(const fs::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write ", path.string()));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  return out ? absl::OkStatus()
             : absl::InternalError(absl::StrCat("short write ", path.string()));
}

absl::StatusOr<LoadedDocuments> LoadDocuments(const fs::path& path) {
  std::error_code ec;
  std::vector<PostRecord> posts;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path, ec)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, fs::path> stems;
    for (const fs::path& file : files) {
      const std::string stem = file.stem().string();
      auto [it, inserted] = stems.emplace(stem, file);
      if (!inserted) {
        return absl::InvalidArgumentError(
            absl::StrCat("duplicate document id: ", stem, " (",
                         it->second.filename().string(), ", ",
                         file.filename().string(), ")"));
      }
      ASSIGN_OR_RETURN(std::string text, ReadFile(file));
      posts.push_back(PostRecord{stem, std::move(text)});
    }
  } else {
    ASSIGN_OR_RETURN(std::string text, ReadFile(path));
    ASSIGN_OR_RETURN(posts, ParseJsonLines(text));
  }
  if (posts.empty()) return absl::InvalidArgumentError("no input documents");
  return AggregatePosts(posts);
}

}  // namespace blogsim::ingest
