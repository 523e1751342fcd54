#include "blogsim/pipeline.h"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <iostream>
#include <map>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "blogsim/cluster.h"
#include "blogsim/corpus.h"
#include "blogsim/hrg.h"
#include "blogsim/ingest.h"
#include "blogsim/simnet.h"
#include "blogsim/status_macros.h"
#include "blogsim/strings.h"
#include "blogsim/synth.h"

namespace blogsim::pipeline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void Log(std::string_view message) { std::cerr << message << '\n'; }

// Collects input digests, artifact digests and stage timings, then writes
// them as manifest-<stage>.json.
class RunRecorder {
 public:
  RunRecorder(std::string stage, const PipelineConfig& config)
      : stage_(std::move(stage)), config_(config), out_(config.output_dir) {
    std::error_code ec;
    fs::create_directories(out_, ec);
  }

  absl::StatusOr<std::string> ReadInput(const fs::path& path) {
    ASSIGN_OR_RETURN(std::string contents, ingest::ReadFile(path));
    inputs_[path.string()] = Sha256Hex(contents);
    return contents;
  }

  void RecordInputDigest(const std::string& name, const std::string& digest) {
    inputs_[name] = digest;
  }

  absl::Status Write(const std::string& name, const fs::path& relative,
                     std::string_view contents) {
    const fs::path path = out_ / relative;
    RETURN_IF_ERROR(ingest::WriteFile(path, contents));
    artifacts_[name] = {{"path", relative.generic_string()},
                        {"sha256", Sha256Hex(contents)}};
    return absl::OkStatus();
  }

  template <typename F>
  auto Time(const std::string& name, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    auto result = body();
    const auto end = std::chrono::steady_clock::now();
    timings_[name] =
        std::chrono::duration<double, std::milli>(end - start).count();
    return result;
  }

  absl::Status Finish() {
    json manifest = {{"tool", "blogsim"},
                     {"version", kToolVersion},
                     {"stage", stage_},
                     {"config", ConfigToJson(config_)},
                     {"inputs", inputs_},
                     {"artifacts", artifacts_},
                     {"timings_ms", timings_}};
    return ingest::WriteFile(out_ / absl::StrCat("manifest-", stage_, ".json"),
                             manifest.dump(2) + "\n");
  }

  const fs::path& out() const { return out_; }

 private:
  std::string stage_;
  const PipelineConfig& config_;
  fs::path out_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, json> artifacts_;
  std::map<std::string, double> timings_;
};

std::string GammaTag(double gamma) { return absl::StrFormat("%g", gamma); }

absl::StatusOr<ingest::LoadedDocuments> LoadInput(const PipelineConfig& config,
                                                  RunRecorder& run) {
  if (config.input.empty()) {
    return absl::InvalidArgumentError("no input given (set `input`)");
  }
  ASSIGN_OR_RETURN(ingest::LoadedDocuments loaded,
                   ingest::LoadDocuments(config.input));
  // Digest over the aggregated documents covers both input formats.
  run.RecordInputDigest(config.input,
                        Sha256Hex(ingest::ToJsonLines(loaded.docs)));
  if (loaded.dropped_empty > 0) {
    Log(absl::StrCat("dropped ", loaded.dropped_empty, " empty documents"));
  }
  if (loaded.docs.empty()) {
    return absl::InvalidArgumentError("no input documents");
  }
  return loaded;
}

fs::path GraphPath(const PipelineConfig& config) {
  return config.graph.empty() ? fs::path(config.output_dir) / "edges.tsv"
                              : fs::path(config.graph);
}

absl::StatusOr<simnet::SimilarityGraph> LoadGraph(const PipelineConfig& config,
                                                  RunRecorder& run) {
  ASSIGN_OR_RETURN(std::string tsv, run.ReadInput(GraphPath(config)));
  return simnet::ParseEdgeListTsv(tsv, config.store_threshold);
}

json FitJson(const simnet::PowerLawFit& fit) {
  return {{"slope", fit.slope},
          {"intercept", fit.intercept},
          {"fit_region", {fit.lo, fit.hi}},
          {"r_squared", fit.r_squared},
          {"residual_sd", fit.residual_sd},
          {"points", fit.points}};
}

}  // namespace

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) {
    absl::StrAppendFormat(&hex, "%02x", digest[i]);
  }
  return hex;
}

absl::Status ApplyConfigJson(PipelineConfig& config,
                             std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("config must be a flat JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    auto bad = [&key = key](std::string_view want) {
      return absl::InvalidArgumentError(
          absl::StrCat("config key '", key, "': expected ", AsAbsl(want)));
    };
    auto real = [&](double& out) -> absl::Status {
      if (!value.is_number()) return bad("number");
      out = value.get<double>();
      return absl::OkStatus();
    };
    auto integer = [&](int64_t& out) -> absl::Status {
      if (!value.is_number_integer()) return bad("integer");
      out = value.get<int64_t>();
      return absl::OkStatus();
    };
    auto text = [&](std::string& out) -> absl::Status {
      if (!value.is_string()) return bad("string");
      out = value.get<std::string>();
      return absl::OkStatus();
    };
    // Optional settings accept null to fall back to their default.
    auto optional = [&](auto& out) -> absl::Status {
      if (value.is_null()) {
        out.reset();
        return absl::OkStatus();
      }
      int64_t v = 0;
      absl::Status s = integer(v);
      if (s.ok()) out = static_cast<typename std::decay_t<decltype(out)>::value_type>(v);
      return s;
    };
    absl::Status status;
    int64_t scratch = 0;
    if (key == "min_count") {
      status = integer(config.min_count);
    } else if (key == "keep_percentile") {
      status = real(config.keep_percentile);
    } else if (key == "min_wordset_size") {
      status = integer(config.min_wordset_size);
    } else if (key == "store_threshold") {
      status = real(config.store_threshold);
    } else if (key == "gamma") {
      status = real(config.gamma);
    } else if (key == "dup_threshold") {
      status = real(config.dup_threshold);
    } else if (key == "outlier_k") {
      status = real(config.outlier_k);
    } else if (key == "fit_region") {
      if (!value.is_array() || value.size() != 2 || !value[0].is_number() ||
          !value[1].is_number()) {
        return bad("[lo, hi]");
      }
      config.fit_region = {value[0].get<double>(), value[1].get<double>()};
    } else if (key == "histogram_bins") {
      status = integer(scratch);
      config.histogram_bins = static_cast<int>(scratch);
    } else if (key == "views") {
      if (!value.is_array()) return bad("array of numbers");
      config.views.clear();
      for (const json& g : value) {
        if (!g.is_number()) return bad("array of numbers");
        config.views.push_back(g.get<double>());
      }
    } else if (key == "hrg_steps") {
      status = optional(config.hrg_steps);
    } else if (key == "hrg_burn_in") {
      status = optional(config.hrg_burn_in);
    } else if (key == "hrg_seed") {
      if (!value.is_number_unsigned()) return bad("non-negative integer");
      config.hrg_seed = value.get<uint64_t>();
    } else if (key == "input") {
      status = text(config.input);
    } else if (key == "index") {
      status = text(config.index);
    } else if (key == "graph") {
      status = text(config.graph);
    } else if (key == "partition") {
      status = text(config.partition);
    } else if (key == "cluster_id") {
      status = optional(config.cluster_id);
    } else if (key == "component") {
      status = optional(config.component);
    } else if (key == "spec") {
      status = text(config.spec);
    } else if (key == "output_dir") {
      status = text(config.output_dir);
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
    if (!status.ok()) return status;
  }
  return absl::OkStatus();
}

json ConfigToJson(const PipelineConfig& config) {
  json out = {{"min_count", config.min_count},
              {"keep_percentile", config.keep_percentile},
              {"min_wordset_size", config.min_wordset_size},
              {"store_threshold", config.store_threshold},
              {"gamma", config.gamma},
              {"dup_threshold", config.dup_threshold},
              {"outlier_k", config.outlier_k},
              {"fit_region", {config.fit_region.first, config.fit_region.second}},
              {"histogram_bins", config.histogram_bins},
              {"views", config.views},
              {"hrg_seed", config.hrg_seed},
              {"input", config.input},
              {"index", config.index},
              {"graph", config.graph},
              {"partition", config.partition},
              {"spec", config.spec},
              {"output_dir", config.output_dir}};
  out["hrg_steps"] = config.hrg_steps ? json(*config.hrg_steps) : json(nullptr);
  out["hrg_burn_in"] =
      config.hrg_burn_in ? json(*config.hrg_burn_in) : json(nullptr);
  out["cluster_id"] =
      config.cluster_id ? json(*config.cluster_id) : json(nullptr);
  out["component"] = config.component ? json(*config.component) : json(nullptr);
  return out;
}

absl::StatusOr<json> RunIndex(const PipelineConfig& config) {
  RunRecorder run("index", config);
  ASSIGN_OR_RETURN(ingest::LoadedDocuments loaded, LoadInput(config, run));
  ASSIGN_OR_RETURN(corpus::FrequencyTable table,
                   run.Time("index", [&] { return corpus::Index(loaded.docs); }));
  RETURN_IF_ERROR(
      run.Write("frequencies", "frequencies.tsv", corpus::FrequencyTsv(table)));
  RETURN_IF_ERROR(run.Finish());
  return json{{"documents", table.documents},
              {"tokens", table.total_tokens},
              {"distinct_words", table.counts.size()},
              {"dropped_empty", loaded.dropped_empty}};
}

absl::StatusOr<json> RunGraph(const PipelineConfig& config) {
  RunRecorder run("graph", config);
  ASSIGN_OR_RETURN(ingest::LoadedDocuments loaded, LoadInput(config, run));

  corpus::FrequencyTable table;
  if (!config.index.empty()) {
    ASSIGN_OR_RETURN(std::string tsv, run.ReadInput(config.index));
    ASSIGN_OR_RETURN(table, corpus::ParseFrequencyTsv(tsv));
  } else {
    ASSIGN_OR_RETURN(table, run.Time("index", [&] {
      return corpus::Index(loaded.docs);
    }));
    RETURN_IF_ERROR(run.Write("frequencies", "frequencies.tsv",
                              corpus::FrequencyTsv(table)));
  }

  const corpus::VocabularyPolicy policy{config.min_count,
                                        config.keep_percentile};
  ASSIGN_OR_RETURN(corpus::Vocabulary vocabulary,
                   corpus::SelectVocabulary(table, policy));
  RETURN_IF_ERROR(run.Write("vocabulary", "vocabulary.tsv",
                            corpus::VocabularyTsv(vocabulary)));
  const std::size_t vocabulary_size = vocabulary.size();

  if (config.min_wordset_size < 1) {
    return absl::InvalidArgumentError("min_wordset_size must be >= 1");
  }
  const corpus::Corpus corpus = run.Time("corpus", [&] {
    return corpus::BuildCorpus(loaded.docs, std::move(vocabulary),
                               static_cast<std::size_t>(config.min_wordset_size));
  });
  std::string kept_ids;
  for (const corpus::WordSet& ws : corpus.word_sets) {
    absl::StrAppend(&kept_ids, ws.doc, "\t", ws.size(), "\n");
  }
  RETURN_IF_ERROR(run.Write("corpus", "corpus.tsv", kept_ids));
  Log(absl::StrCat(corpus.size(), " documents kept, ", corpus.dropped,
                   " dropped (word set < ", config.min_wordset_size, ")"));

  ASSIGN_OR_RETURN(simnet::SimilarityGraph graph, run.Time("graph", [&] {
    return simnet::BuildGraph(corpus, config.store_threshold);
  }));
  if (graph.num_edges() == 0) {
    return absl::FailedPreconditionError(absl::StrCat(
        "no edges above threshold ", config.store_threshold));
  }
  RETURN_IF_ERROR(run.Write("edges", "edges.tsv", simnet::EdgeListTsv(graph)));
  RETURN_IF_ERROR(run.Write("graphml", "graph.graphml", simnet::GraphMl(graph)));

  ASSIGN_OR_RETURN(simnet::SimilarityHistogram hist,
                   simnet::Histogram(graph, config.histogram_bins));
  RETURN_IF_ERROR(
      run.Write("histogram", "histogram.csv", simnet::HistogramCsv(hist)));

  simnet::AnomalyReport report;
  json summary_fit = nullptr;
  std::string fit_error;
  auto fit = simnet::FitPowerLaw(hist, config.fit_region.first,
                                 config.fit_region.second);
  if (fit.ok()) {
    report = simnet::DetectOutliers(graph, hist, *fit,
                                    simnet::OutlierPolicy{config.outlier_k});
    summary_fit = FitJson(*fit);
    RETURN_IF_ERROR(run.Write("fit", "fit.json", summary_fit.dump(2) + "\n"));
  } else {
    fit_error = std::string(fit.status().message());
    Log(absl::StrCat("power-law fit skipped: ", fit_error));
  }
  ASSIGN_OR_RETURN(report.duplicate_groups,
                   simnet::DetectDuplicates(graph, config.dup_threshold));
  RETURN_IF_ERROR(run.Write("anomalies", "anomalies.jsonl",
                            simnet::AnomalyJsonLines(report)));

  json views = json::array();
  for (double gamma : config.views) {
    ASSIGN_OR_RETURN(simnet::SimilarityGraph view,
                     simnet::ThresholdView(graph, gamma));
    const std::string tag = GammaTag(gamma);
    RETURN_IF_ERROR(run.Write(absl::StrCat("view_", tag, "_edges"),
                              fs::path("views") / ("edges_gamma_" + tag + ".tsv"),
                              simnet::EdgeListTsv(view)));
    RETURN_IF_ERROR(run.Write(
        absl::StrCat("view_", tag, "_graphml"),
        fs::path("views") / ("graph_gamma_" + tag + ".graphml"),
        simnet::GraphMl(view)));
    views.push_back({{"gamma", gamma},
                     {"vertices", view.num_vertices()},
                     {"edges", view.num_edges()}});
  }
  RETURN_IF_ERROR(run.Finish());

  json summary = {{"blogs_kept", corpus.size()},
                  {"blogs_dropped", corpus.dropped + loaded.dropped_empty},
                  {"vocabulary", vocabulary_size},
                  {"edges", graph.num_edges()},
                  {"slope", fit.ok() ? json(fit->slope) : json(nullptr)},
                  {"outlier_vertices", report.outlier_vertices.size()},
                  {"duplicate_groups", report.duplicate_groups.size()},
                  {"views", views}};
  if (!fit_error.empty()) summary["fit_error"] = fit_error;
  return summary;
}

absl::StatusOr<json> RunCluster(const PipelineConfig& config) {
  RunRecorder run("cluster", config);
  ASSIGN_OR_RETURN(simnet::SimilarityGraph graph, LoadGraph(config, run));
  ASSIGN_OR_RETURN(simnet::SimilarityGraph view,
                   simnet::ThresholdView(graph, config.gamma));
  if (view.num_edges() == 0) {
    return absl::FailedPreconditionError(
        absl::StrCat("view edgeless at gamma ", config.gamma));
  }
  ASSIGN_OR_RETURN(cluster::Partition partition, run.Time("cluster", [&] {
    return cluster::GreedyCluster(view);
  }));
  RETURN_IF_ERROR(run.Write("partition", "partition.csv",
                            cluster::PartitionCsv(view, partition)));
  const std::string summary_line = cluster::PartitionSummaryJson(partition);
  RETURN_IF_ERROR(run.Write("summary", "cluster_summary.json", summary_line));
  RETURN_IF_ERROR(run.Finish());
  json summary = json::parse(summary_line);
  summary["gamma"] = config.gamma;
  summary["vertices"] = view.num_vertices();
  summary["edges"] = view.num_edges();
  return summary;
}

absl::StatusOr<json> RunHierarchy(const PipelineConfig& config) {
  RunRecorder run("hierarchy", config);
  ASSIGN_OR_RETURN(simnet::SimilarityGraph graph, LoadGraph(config, run));

  if (config.cluster_id.has_value()) {
    if (config.partition.empty()) {
      return absl::InvalidArgumentError("cluster_id needs a partition file");
    }
    ASSIGN_OR_RETURN(std::string csv, run.ReadInput(config.partition));
    std::vector<uint32_t> keep;
    std::map<std::string, int> label_of;
    bool header = true;
    for (std::string_view line : Split(csv, '\n')) {
      if (line.empty()) continue;
      if (header) {
        header = false;
        continue;
      }
      const std::size_t comma = line.rfind(',');
      int label = 0;
      if (comma == line.npos ||
          !absl::SimpleAtoi(AsAbsl(line.substr(comma + 1)), &label)) {
        return absl::InvalidArgumentError("malformed partition row");
      }
      label_of[std::string(line.substr(0, comma))] = label;
    }
    for (uint32_t v = 0; v < graph.num_vertices(); ++v) {
      auto it = label_of.find(graph.vertices()[v]);
      if (it != label_of.end() && it->second == *config.cluster_id) {
        keep.push_back(v);
      }
    }
    if (keep.empty()) {
      return absl::NotFoundError(
          absl::StrCat("cluster ", *config.cluster_id, " has no vertices"));
    }
    graph = graph.InducedSubgraph(keep);
  }

  ASSIGN_OR_RETURN(hrg::SimpleGraph simple, hrg::Binarize(graph, config.gamma));
  const auto components = simple.Components();
  if (config.component.has_value()) {
    const int k = *config.component;
    if (k < 0 || k >= static_cast<int>(components.size())) {
      return absl::OutOfRangeError(absl::StrCat(
          "component ", k, " out of range (", components.size(), " components)"));
    }
    simple = simple.Subgraph(components[static_cast<std::size_t>(k)]);
  } else if (components.size() > 1) {
    std::string sizes;
    for (std::size_t k = 0; k < components.size(); ++k) {
      absl::StrAppend(&sizes, k == 0 ? "" : ", ", k, ":",
                      components[k].size());
    }
    return absl::FailedPreconditionError(absl::StrCat(
        "subgraph is disconnected after binarization (", components.size(),
        " components; index:size ", sizes,
        "); rerun once per component with --component <index>"));
  }

  hrg::FitOptions options;
  options.steps = config.hrg_steps;
  options.burn_in = config.hrg_burn_in;
  options.seed = config.hrg_seed;
  ASSIGN_OR_RETURN(hrg::FitResult fit, run.Time("fit", [&] {
    return hrg::Fit(simple, options);
  }));
  RETURN_IF_ERROR(run.Write("dendrogram", "dendrogram.nwk",
                            hrg::ExportNewick(fit.best, simple.ids()) + "\n"));
  RETURN_IF_ERROR(run.Write("trace", "trace.csv", hrg::TraceCsv(fit)));
  RETURN_IF_ERROR(run.Finish());
  return json{{"vertices", simple.num_vertices()},
              {"edges", simple.num_edges()},
              {"best_loglik", fit.best_loglik},
              {"steps", fit.steps},
              {"burn_in", fit.burn_in},
              {"accepted", fit.accepted},
              {"seed", fit.seed}};
}

absl::StatusOr<json> RunSynth(const PipelineConfig& config) {
  RunRecorder run("synth", config);
  if (config.spec.empty()) {
    return absl::InvalidArgumentError("no synth spec given (set `spec`)");
  }
  ASSIGN_OR_RETURN(std::string text, run.ReadInput(config.spec));
  ASSIGN_OR_RETURN(synth::CorpusSpec spec, synth::ParseCorpusSpec(text));
  const synth::SynthCorpus corpus =
      run.Time("generate", [&] { return synth::GenerateFromSpec(spec); });
  RETURN_IF_ERROR(
      run.Write("corpus", "corpus.jsonl", ingest::ToJsonLines(corpus.docs)));
  RETURN_IF_ERROR(run.Write("ground_truth", "ground_truth.json",
                            synth::GroundTruthJson(corpus.truth)));
  RETURN_IF_ERROR(run.Finish());
  return json{{"documents", corpus.docs.size()},
              {"duplicate_groups", corpus.truth.planted_duplicates.size()},
              {"splogs", corpus.truth.planted_splogs.size()},
              {"expected_survivors",
               corpus.truth.expected_survivors.value_or(0)}};
}

}  // namespace blogsim::pipeline
