// Bridges between std::string_view and absl::string_view, which are distinct
// types in some absl builds.

#ifndef BLOGSIM_STRINGS_H_
#define BLOGSIM_STRINGS_H_

#include <string_view>
#include <vector>

#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"

namespace blogsim {

inline absl::string_view AsAbsl(std::string_view s) {
  return absl::string_view(s.data(), s.size());
}

inline std::string_view AsStd(absl::string_view s) {
  return std::string_view(s.data(), s.size());
}

inline std::vector<std::string_view> Split(std::string_view text, char sep,
                                           bool skip_empty = false) {
  std::vector<std::string_view> out;
  for (absl::string_view piece : absl::StrSplit(AsAbsl(text), sep)) {
    if (skip_empty && piece.empty()) continue;
    out.push_back(AsStd(piece));
  }
  return out;
}

}  // namespace blogsim

#endif  // BLOGSIM_STRINGS_H_
