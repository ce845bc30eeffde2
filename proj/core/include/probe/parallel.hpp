#pragma once

#include <cstddef>
#include <functional>

namespace probe {

/// Worker count after applying the PROBE_WORKERS override. Never returns 0.
std::size_t resolve_workers(std::size_t configured);

/// Runs fn(i) for i in [0, count) on up to `workers` threads pulling indices
/// from a shared counter. If any call throws, the exception from the lowest
/// failing index is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace probe
