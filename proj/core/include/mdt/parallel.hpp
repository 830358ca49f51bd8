#pragma once

#include <cstddef>
#include <functional>

namespace mdt {

/// Runs body(i) for i in [0, count) on up to `threads` workers.
///
/// Iterations must write to disjoint outputs. If any iteration throws, the
/// exception of the lowest failing index is rethrown after all workers stop,
/// so the failure reported does not depend on scheduling.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace mdt
