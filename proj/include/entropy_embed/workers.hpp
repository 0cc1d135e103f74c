#pragma once

#include <optional>

namespace entropy_embed {

/// Worker count from an explicit flag, else ENTROPY_EMBED_WORKERS, else the
/// number of available cores. Throws InvalidArgument for values below 1.
int resolve_workers(std::optional<int> flag);

/// Sets the OpenMP team size and limits parallelism to one active level, so
/// kernels called from a parallel loop run serially inside it.
void set_workers(int workers);

}  // namespace entropy_embed
