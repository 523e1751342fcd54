#include <charconv>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "blogsim/simnet.h"
#include "blogsim/strings.h"
#include "nlohmann/json.hpp"

namespace blogsim::simnet {
namespace {

std::string XmlEscape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string EdgeListTsv(const SimilarityGraph& graph) {
  std::string out;
  const auto& ids = graph.vertices();
  for (const Edge& e : graph.edges()) {
    absl::StrAppendFormat(&out, "%s\t%s\t%.6g\n", ids[e.u], ids[e.v], e.s);
  }
  return out;
}

absl::StatusOr<SimilarityGraph> ParseEdgeListTsv(std::string_view tsv,
                                                 double store_threshold) {
  std::vector<std::tuple<DocumentId, DocumentId, double>> triples;
  int line_no = 0;
  for (std::string_view line : Split(tsv, '\n')) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields = Split(line, '\t');
    double s = 0.0;
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty() ||
        std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(),
                        s)
                .ec != std::errc()) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed edge row at line ", line_no));
    }
    triples.emplace_back(std::string(fields[0]), std::string(fields[1]), s);
  }
  return SimilarityGraph::FromTriples(std::move(triples), store_threshold);
}

std::string GraphMl(const SimilarityGraph& graph) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"s\" for=\"edge\" attr.name=\"s\" attr.type=\"double\"/>\n"
      "  <graph id=\"similarity\" edgedefault=\"undirected\">\n";
  const auto& ids = graph.vertices();
  for (const DocumentId& id : ids) {
    absl::StrAppend(&out, "    <node id=\"", XmlEscape(id), "\"/>\n");
  }
  for (const Edge& e : graph.edges()) {
    absl::StrAppendFormat(
        &out,
        "    <edge source=\"%s\" target=\"%s\"><data key=\"s\">%.17g</data>"
        "</edge>\n",
        XmlEscape(ids[e.u]), XmlEscape(ids[e.v]), e.s);
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

std::string HistogramCsv(const SimilarityHistogram& hist) {
  std::string out = "bin_lo,bin_hi,count,density\n";
  for (std::size_t b = 0; b < hist.num_bins(); ++b) {
    absl::StrAppendFormat(&out, "%.10g,%.10g,%d,%.10g\n", hist.bin_edges[b],
                          hist.bin_edges[b + 1], hist.counts[b],
                          hist.Density(b));
  }
  return out;
}

std::string AnomalyJsonLines(const AnomalyReport& report) {
  std::string out;
  for (const OutlierVertex& v : report.outlier_vertices) {
    nlohmann::json record = {{"kind", "outlier_vertex"},
                             {"id", v.id},
                             {"flagged_edges", v.flagged_edges}};
    absl::StrAppend(&out, record.dump(), "\n");
  }
  for (const DuplicateGroup& g : report.duplicate_groups) {
    nlohmann::json record = {{"kind", "duplicate_group"},
                             {"representative", g.representative},
                             {"size", g.members.size()},
                             {"members", g.members}};
    absl::StrAppend(&out, record.dump(), "\n");
  }
  return out;
}

}  // namespace blogsim::simnet
