#pragma once

#include <exception>

namespace eemimo::detail {

// OpenMP loop over [0, n). Exceptions cannot cross the parallel region, so
// the first one is captured and rethrown on the calling thread.
template <class Body>
void parallel_for(long long n, Body&& body) {
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
#pragma omp critical(eemimo_parallel_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace eemimo::detail
