#ifndef BLOGSIM_STATUS_MACROS_H_
#define BLOGSIM_STATUS_MACROS_H_

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define BLOGSIM_CONCAT_INNER_(a, b) a##b
#define BLOGSIM_CONCAT_(a, b) BLOGSIM_CONCAT_INNER_(a, b)

#define RETURN_IF_ERROR(expr)                  \
  do {                                         \
    const ::absl::Status _status = (expr);     \
    if (!_status.ok()) return _status;         \
  } while (0)

#define ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                           \
  if (!statusor.ok()) return statusor.status();      \
  lhs = std::move(statusor).value()

#define ASSIGN_OR_RETURN(lhs, rexpr) \
  ASSIGN_OR_RETURN_IMPL_(BLOGSIM_CONCAT_(_statusor_, __LINE__), lhs, rexpr)

#endif  // BLOGSIM_STATUS_MACROS_H_
