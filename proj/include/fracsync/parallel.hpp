#pragma once

#include <cstddef>
#include <functional>

namespace fracsync {

/// Worker count: FRACSYNC_THREADS if set, else `configured` if > 0, else
/// the hardware concurrency.
int resolve_thread_count(int configured = 0);

/// Calls `task(i)` for every i in [0, n) on up to `threads` workers.
///
/// Tasks must write only to their own slot of caller-owned storage; callers
/// reduce afterwards in index order, so results do not depend on the
/// worker count. The first exception thrown by a task is rethrown here.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& task);

}  // namespace fracsync
