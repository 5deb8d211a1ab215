#ifndef RATESCALE_SRC_PARALLEL_HPP
#define RATESCALE_SRC_PARALLEL_HPP

#include <omp.h>

namespace ratescale::detail {

inline int resolve_threads(int requested) {
  return requested > 0 ? requested : omp_get_max_threads();
}

} // namespace ratescale::detail

#endif
