// Command-line front end: one subcommand per pipeline stage.
//
// Effective configuration is defaults, then --config file, then flags.

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "blogsim/ingest.h"
#include "blogsim/pipeline.h"

namespace {

using blogsim::pipeline::PipelineConfig;
using Setter = std::function<void(PipelineConfig&)>;

struct Invocation {
  std::string config_path;
  std::vector<Setter> overrides;
};

template <typename T, typename Field>
void Override(CLI::App* app, Invocation& inv, const std::string& name,
              Field field, const std::string& help) {
  app->add_option_function<T>(
      "--" + name,
      [&inv, field](const T& value) {
        inv.overrides.push_back(
            [field, value](PipelineConfig& c) { c.*field = value; });
      },
      help);
}

void AddCommonFlags(CLI::App* app, Invocation& inv) {
  app->add_option("--config", inv.config_path,
                  "flat JSON object keyed by config field names");
  Override<std::string>(app, inv, "output_dir", &PipelineConfig::output_dir,
                        "artifact directory");
}

void AddFilterFlags(CLI::App* app, Invocation& inv) {
  Override<std::string>(app, inv, "input", &PipelineConfig::input,
                        "directory of <id>.txt files or a JSON-lines file");
  Override<int64_t>(app, inv, "min_count", &PipelineConfig::min_count,
                    "drop words seen fewer times");
  Override<double>(app, inv, "keep_percentile",
                   &PipelineConfig::keep_percentile,
                   "keep this percentage of the rarest surviving words");
  Override<int64_t>(app, inv, "min_wordset_size",
                    &PipelineConfig::min_wordset_size,
                    "minimum distinct kept words per document");
}

void AddGraphFlags(CLI::App* app, Invocation& inv) {
  Override<std::string>(app, inv, "index", &PipelineConfig::index,
                        "frequencies.tsv from an earlier index run");
  Override<double>(app, inv, "store_threshold",
                   &PipelineConfig::store_threshold,
                   "minimum stored similarity");
  Override<double>(app, inv, "dup_threshold", &PipelineConfig::dup_threshold,
                   "similarity for duplicate grouping");
  Override<double>(app, inv, "outlier_k", &PipelineConfig::outlier_k,
                   "outlier residual multiple");
  Override<int>(app, inv, "histogram_bins", &PipelineConfig::histogram_bins,
                "log-spaced histogram bins");
  app->add_option_function<std::vector<double>>(
      "--fit_region",
      [&inv](const std::vector<double>& v) {
        std::pair<double, double> region{v[0], v[1]};
        inv.overrides.push_back(
            [region](PipelineConfig& c) { c.fit_region = region; });
      },
      "power-law fit interval: LO HI")
      ->expected(2);
  app->add_option_function<std::vector<double>>(
      "--views",
      [&inv](const std::vector<double>& v) {
        inv.overrides.push_back([v](PipelineConfig& c) { c.views = v; });
      },
      "gamma values for exported threshold views")
      ->expected(0, CLI::detail::expected_max_vector_size);
}

void AddGraphInput(CLI::App* app, Invocation& inv) {
  Override<std::string>(app, inv, "graph", &PipelineConfig::graph,
                        "edges.tsv (default: <output_dir>/edges.tsv)");
  Override<double>(app, inv, "store_threshold",
                   &PipelineConfig::store_threshold,
                   "threshold the edge list was stored at");
  Override<double>(app, inv, "gamma", &PipelineConfig::gamma,
                   "similarity view threshold");
}

void AddHierarchyFlags(CLI::App* app, Invocation& inv) {
  Override<std::string>(app, inv, "partition", &PipelineConfig::partition,
                        "partition.csv from a cluster run");
  app->add_option_function<int>(
      "--cluster_id",
      [&inv](const int& id) {
        inv.overrides.push_back([id](PipelineConfig& c) { c.cluster_id = id; });
      },
      "restrict to one cluster of --partition");
  app->add_option_function<int>(
      "--component",
      [&inv](const int& k) {
        inv.overrides.push_back([k](PipelineConfig& c) { c.component = k; });
      },
      "connected component index to fit");
  app->add_option_function<int64_t>(
      "--hrg_steps",
      [&inv](const int64_t& n) {
        inv.overrides.push_back([n](PipelineConfig& c) { c.hrg_steps = n; });
      },
      "sampling steps after burn-in (default 100 n^2)");
  app->add_option_function<int64_t>(
      "--hrg_burn_in",
      [&inv](const int64_t& n) {
        inv.overrides.push_back([n](PipelineConfig& c) { c.hrg_burn_in = n; });
      },
      "burn-in steps (default 10 n^2)");
  Override<uint64_t>(app, inv, "hrg_seed", &PipelineConfig::hrg_seed,
                     "sampler seed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Blog similarity networks: index, graph, cluster, hierarchy"};
  app.require_subcommand(1);
  Invocation inv;

  CLI::App* index = app.add_subcommand("index", "count word frequencies");
  AddCommonFlags(index, inv);
  AddFilterFlags(index, inv);

  CLI::App* graph =
      app.add_subcommand("graph", "similarity network, histogram, anomalies");
  AddCommonFlags(graph, inv);
  AddFilterFlags(graph, inv);
  AddGraphFlags(graph, inv);

  CLI::App* cluster = app.add_subcommand("cluster", "modularity clustering");
  AddCommonFlags(cluster, inv);
  AddGraphInput(cluster, inv);

  CLI::App* hierarchy =
      app.add_subcommand("hierarchy", "hierarchical random graph fit");
  AddCommonFlags(hierarchy, inv);
  AddGraphInput(hierarchy, inv);
  AddHierarchyFlags(hierarchy, inv);

  CLI::App* synth = app.add_subcommand("synth", "synthetic corpus");
  AddCommonFlags(synth, inv);
  Override<std::string>(synth, inv, "spec", &PipelineConfig::spec,
                        "synth spec (JSON)");

  CLI11_PARSE(app, argc, argv);

  PipelineConfig config;
  if (!inv.config_path.empty()) {
    auto text = blogsim::ingest::ReadFile(inv.config_path);
    absl::Status status = text.status();
    if (status.ok()) {
      status = blogsim::pipeline::ApplyConfigJson(config, *text);
    }
    if (!status.ok()) {
      std::cerr << "error: " << status.message() << '\n';
      return 2;
    }
  }
  for (const Setter& set : inv.overrides) set(config);

  absl::StatusOr<nlohmann::json> summary;
  if (index->parsed()) {
    summary = blogsim::pipeline::RunIndex(config);
  } else if (graph->parsed()) {
    summary = blogsim::pipeline::RunGraph(config);
  } else if (cluster->parsed()) {
    summary = blogsim::pipeline::RunCluster(config);
  } else if (hierarchy->parsed()) {
    summary = blogsim::pipeline::RunHierarchy(config);
  } else {
    summary = blogsim::pipeline::RunSynth(config);
  }
  if (!summary.ok()) {
    std::cerr << "error: " << summary.status().message() << '\n';
    return 1;
  }
  std::cout << summary->dump() << '\n';
  return 0;
}
