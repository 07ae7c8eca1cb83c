#pragma once

#include <cstddef>
#include <functional>

namespace ust {

struct ExecPolicy {
  unsigned threads = 1;  // 0 means hardware concurrency
};

unsigned resolve_threads(unsigned requested) noexcept;

// Worker count from the UST_THREADS environment variable (0 or unset = auto).
unsigned threads_from_env();

// Calls body(i) for every i in [0, count). Items are handed out dynamically;
// callers must write results into per-item slots and reduce afterwards in
// index order so that output does not depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  ExecPolicy policy);

}  // namespace ust
