// Pipeline stages behind the command-line tool. Each stage reads files,
// writes artifact files plus a run manifest, and returns a one-line summary.

#ifndef BLOGSIM_PIPELINE_H_
#define BLOGSIM_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace blogsim::pipeline {

inline constexpr std::string_view kToolVersion = "0.1.0";

struct PipelineConfig {
  // Vocabulary and corpus filtering.
  int64_t min_count = 10;
  double keep_percentile = 5.0;
  int64_t min_wordset_size = 25;
  // Similarity network.
  double store_threshold = 0.025;
  double gamma = 0.05;
  double dup_threshold = 0.8;
  double outlier_k = 2.0;
  std::pair<double, double> fit_region = {0.025, 0.2};
  int histogram_bins = 50;
  std::vector<double> views = {0.04, 0.045, 0.055, 0.07};
  // Hierarchy sampling; unset budgets scale with the vertex count.
  std::optional<int64_t> hrg_steps;
  std::optional<int64_t> hrg_burn_in;
  uint64_t hrg_seed = 1;
  // Paths.
  std::string input;       // raw documents (directory or JSON lines)
  std::string index;       // frequencies.tsv from a previous `index` run
  std::string graph;       // edges.tsv from a previous `graph` run
  std::string partition;   // partition.csv from a previous `cluster` run
  std::optional<int> cluster_id;
  std::optional<int> component;
  std::string spec;        // synth spec
  std::string output_dir = "out";
};

// Overlays the keys of a flat JSON object onto `config`. Unknown keys and
// ill-typed values are errors naming the key.
absl::Status ApplyConfigJson(PipelineConfig& config, std::string_view json_text);
nlohmann::json ConfigToJson(const PipelineConfig& config);

std::string Sha256Hex(std::string_view data);

// Stage entry points; each returns its stdout summary.
absl::StatusOr<nlohmann::json> RunIndex(const PipelineConfig& config);
absl::StatusOr<nlohmann::json> RunGraph(const PipelineConfig& config);
absl::StatusOr<nlohmann::json> RunCluster(const PipelineConfig& config);
absl::StatusOr<nlohmann::json> RunHierarchy(const PipelineConfig& config);
absl::StatusOr<nlohmann::json> RunSynth(const PipelineConfig& config);

}  // namespace blogsim::pipeline

#endif  // BLOGSIM_PIPELINE_H_
