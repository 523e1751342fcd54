#include "blogsim/ingest.h"

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <filesystem>

namespace blogsim::ingest {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("blogsim_ingest_" + std::to_string(::testing::UnitTest::GetInstance()
                                                    ->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(AggregatePostsTest, JoinsInRecordOrderAndDropsBlank) {
  const std::vector<PostRecord> posts = {
      {"b", "first"}, {"a", "x"}, {"b", "second"}, {"c", "  "}, {"d", ""}};
  const LoadedDocuments out = AggregatePosts(posts);
  ASSERT_EQ(out.docs.size(), 2u);
  EXPECT_EQ(out.docs[0].id, "a");
  EXPECT_EQ(out.docs[1].text, "first second");
  EXPECT_EQ(out.dropped_empty, 2u);
}

TEST(ParseJsonLinesTest, ReportsLineNumber) {
  auto ok = ParseJsonLines("{\"id\":\"a\",\"text\":\"hi\"}\n\n"
                           "{\"id\":\"b\",\"text\":null}\r\n");
  ASSERT_TRUE(ok.ok()) << ok.status();
  ASSERT_EQ(ok->size(), 2u);
  EXPECT_EQ((*ok)[1].text, "");

  auto bad = ParseJsonLines("{\"id\":\"a\",\"text\":\"hi\"}\n{oops\n");
  ASSERT_FALSE(bad.ok());
  EXPECT_EQ(bad.status().message(), "malformed JSON-lines record at line 2");
  EXPECT_FALSE(ParseJsonLines("{\"text\":\"no id\"}").ok());
}

TEST(JsonLinesTest, RoundTrip) {
  const std::vector<RawDocument> docs = {{"a", "Öl \"quoted\"\nnext"},
                                         {"b", "plain"}};
  auto parsed = ParseJsonLines(ToJsonLines(docs));
  ASSERT_TRUE(parsed.ok());
  ASSERT_EQ(parsed->size(), 2u);
  EXPECT_EQ((*parsed)[0].text, docs[0].text);
}

TEST(LoadDocumentsTest, DirectoryFormat) {
  TempDir dir;
  ASSERT_TRUE(WriteFile(dir.path() / "blog1.txt", "hello world").ok());
  ASSERT_TRUE(WriteFile(dir.path() / "blog2.txt", "").ok());
  auto loaded = LoadDocuments(dir.path());
  ASSERT_TRUE(loaded.ok()) << loaded.status();
  ASSERT_EQ(loaded->docs.size(), 1u);
  EXPECT_EQ(loaded->docs[0].id, "blog1");
  EXPECT_EQ(loaded->dropped_empty, 1u);

  ASSERT_TRUE(WriteFile(dir.path() / "blog1.md", "again").ok());
  auto dup = LoadDocuments(dir.path());
  ASSERT_FALSE(dup.ok());
  EXPECT_THAT(std::string(dup.status().message()),
              ::testing::HasSubstr("duplicate document id: blog1"));
}

TEST(LoadDocumentsTest, EmptyDirectoryAndMissingFile) {
  TempDir dir;
  auto empty = LoadDocuments(dir.path());
  ASSERT_FALSE(empty.ok());
  EXPECT_EQ(empty.status().message(), "no input documents");
  EXPECT_FALSE(LoadDocuments(dir.path() / "missing.jsonl").ok());
}

TEST(LoadDocumentsTest, JsonLinesFormat) {
  TempDir dir;
  const fs::path file = dir.path() / "posts.jsonl";
  ASSERT_TRUE(WriteFile(file,
                        "{\"id\":\"x\",\"text\":\"one\"}\n"
                        "{\"id\":\"y\",\"text\":\"two\"}\n"
                        "{\"id\":\"x\",\"text\":\"three\"}\n")
                  .ok());
  auto loaded = LoadDocuments(file);
  ASSERT_TRUE(loaded.ok());
  ASSERT_EQ(loaded->docs.size(), 2u);
  EXPECT_EQ(loaded->docs[0].text, "one three");
}

}  // namespace
}  // namespace blogsim::ingest
