#pragma once

#include <cstddef>
#include <functional>

namespace earnshaw {

/// Upper bound on worker threads used by frequency loops. 0 means one per
/// hardware thread.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(i) for i in [0, n). Each index is handled by exactly one
/// worker; the caller reduces results in index order, so the outcome does
/// not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace earnshaw
