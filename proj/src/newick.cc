#include <charconv>
#include <unordered_map>

#include "absl/strings/str_cat.h"
#include "blogsim/hrg.h"
#include "blogsim/strings.h"

namespace blogsim::hrg {
namespace {

constexpr std::string_view kNewickSpecial = " ()[]':;,_\t\r\n";

std::string QuoteLabel(std::string_view label) {
  if (!label.empty() && label.find_first_of(kNewickSpecial) == label.npos) {
    return std::string(label);
  }
  std::string out = "'";
  for (char c : label) {
    if (c == '\'') out += '\'';
    out += c;
  }
  out += '\'';
  return out;
}

std::string FormatSupport(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, end);
}

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  absl::StatusOr<NewickNode> ParseTree() {
    auto root = ParseSubtree();
    if (!root.ok()) return root.status();
    SkipSpace();
    if (!Consume(';')) return Error("expected ';'");
    SkipSpace();
    if (pos_ != text_.size()) return Error("trailing characters");
    return root;
  }

 private:
  absl::Status Error(std::string_view what) const {
    return absl::InvalidArgumentError(
        absl::StrCat("newick: ", AsAbsl(what), " at offset ", pos_));
  }

  void SkipSpace() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        ++pos_;
      } else if (c == '[') {
        const std::size_t close = text_.find(']', pos_);
        pos_ = close == text_.npos ? text_.size() : close + 1;
      } else {
        break;
      }
    }
  }

  bool Consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  absl::StatusOr<std::string> ParseLabel() {
    SkipSpace();
    std::string label;
    if (Consume('\'')) {
      while (true) {
        if (pos_ >= text_.size()) return Error("unterminated quoted label");
        const char c = text_[pos_++];
        if (c == '\'') {
          if (Consume('\'')) {
            label += '\'';
            continue;
          }
          break;
        }
        label += c;
      }
      return label;
    }
    while (pos_ < text_.size() &&
           std::string_view("()[]':;, \t\r\n").find(text_[pos_]) ==
               std::string_view::npos) {
      const char c = text_[pos_++];
      label += (c == '_') ? ' ' : c;
    }
    return label;
  }

  absl::Status SkipBranchLength() {
    SkipSpace();
    if (!Consume(':')) return absl::OkStatus();
    SkipSpace();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           std::string_view("(),;[ \t\r\n").find(text_[pos_]) ==
               std::string_view::npos) {
      ++pos_;
    }
    if (pos_ == start) return Error("empty branch length");
    return absl::OkStatus();
  }

  absl::StatusOr<NewickNode> ParseSubtree() {
    if (++depth_ > 100000) return Error("nesting too deep");
    SkipSpace();
    NewickNode node;
    if (Consume('(')) {
      do {
        auto child = ParseSubtree();
        if (!child.ok()) return child.status();
        node.children.push_back(*std::move(child));
        SkipSpace();
      } while (Consume(','));
      if (!Consume(')')) return Error("expected ')'");
      auto label = ParseLabel();
      if (!label.ok()) return label.status();
      double support = 0.0;
      if (!label->empty()) {
        auto [end, ec] = std::from_chars(
            label->data(), label->data() + label->size(), support);
        if (ec == std::errc() && end == label->data() + label->size()) {
          node.support = support;
        } else {
          node.label = *std::move(label);
        }
      }
    } else {
      auto label = ParseLabel();
      if (!label.ok()) return label.status();
      if (label->empty()) return Error("empty leaf label");
      node.label = *std::move(label);
    }
    absl::Status status = SkipBranchLength();
    if (!status.ok()) return status;
    --depth_;
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int depth_ = 0;
};

}  // namespace

std::string ExportNewick(const Dendrogram& d, std::span<const DocumentId> ids) {
  // Returns the subtree text and the least leaf id below it.
  auto render = [&](auto&& self,
                    Child c) -> std::pair<std::string, std::string_view> {
    if (c.is_leaf) return {QuoteLabel(ids[c.index]), ids[c.index]};
    const InternalNode& node = d.node(c.index);
    auto left = self(self, node.left);
    auto right = self(self, node.right);
    if (right.second < left.second) std::swap(left, right);
    return {absl::StrCat("(", left.first, ",", right.first, ")",
                         FormatSupport(node.Theta())),
            left.second};
  };
  return render(render, Child{d.root(), false}).first + ";";
}

absl::StatusOr<NewickNode> ParseNewick(std::string_view text) {
  return NewickParser(text).ParseTree();
}

absl::StatusOr<Dendrogram> FromNewick(const SimpleGraph& graph,
                                      const NewickNode& tree) {
  std::unordered_map<std::string_view, uint32_t> leaf_of;
  for (uint32_t v = 0; v < graph.num_vertices(); ++v) {
    leaf_of.emplace(graph.ids()[v], v);
  }
  std::vector<InternalNode> nodes;
  auto build = [&](auto&& self, const NewickNode& n) -> absl::StatusOr<Child> {
    if (n.children.empty()) {
      auto it = leaf_of.find(n.label);
      if (it == leaf_of.end()) {
        return absl::InvalidArgumentError(
            absl::StrCat("newick leaf not in graph: ", n.label));
      }
      return Child{it->second, true};
    }
    if (n.children.size() != 2) {
      return absl::InvalidArgumentError("newick tree is not binary");
    }
    auto left = self(self, n.children[0]);
    if (!left.ok()) return left.status();
    auto right = self(self, n.children[1]);
    if (!right.ok()) return right.status();
    InternalNode node;
    node.left = *left;
    node.right = *right;
    nodes.push_back(node);
    return Child{static_cast<uint32_t>(nodes.size() - 1), false};
  };
  auto top = build(build, tree);
  if (!top.ok()) return top.status();
  if (top->is_leaf) {
    return absl::InvalidArgumentError("newick tree has no internal node");
  }
  return Dendrogram::FromNodes(graph, std::move(nodes), top->index);
}

}  // namespace blogsim::hrg
