#include "entropy_embed/workers.hpp"

#include <cstdlib>
#include <string>

#include <omp.h>

#include "entropy_embed/error.hpp"

namespace entropy_embed {

int resolve_workers(std::optional<int> flag) {
  int workers = 0;
  if (flag) {
    workers = *flag;
  } else if (const char* env = std::getenv("ENTROPY_EMBED_WORKERS"); env && *env) {
    try {
      workers = std::stoi(env);
    } catch (const std::exception&) {
      throw InvalidArgument(std::string("ENTROPY_EMBED_WORKERS is not an integer: ") + env);
    }
  } else {
    workers = omp_get_num_procs();
  }
  if (workers < 1) throw InvalidArgument("worker count must be >= 1");
  return workers;
}

void set_workers(int workers) {
  omp_set_num_threads(workers);
  omp_set_max_active_levels(1);
}

}  // namespace entropy_embed
