#include "plk/kernels.hpp"

#include "plk/theorem.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plk::kernels {

void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body, bool parallel) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  } else {
    for (long long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int max_threads() noexcept {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

std::vector<std::optional<int>> windings(const CharacteristicFunction& q,
                                         const std::vector<Region>& cells, bool parallel) {
  std::vector<std::optional<int>> out(cells.size());
  for_each_index(
      cells.size(), [&](std::size_t i) { out[i] = winding_number(q, cells[i]); }, parallel);
  return out;
}

std::vector<double> v_along(const Trajectory& traj, const ExtendedHistory& ext,
                            const LKCertificate& cert, const std::vector<double>& times,
                            int quad_intervals, bool parallel) {
  std::vector<double> out(times.size());
  for_each_index(
      times.size(),
      [&](std::size_t i) { out[i] = eval_V_along(traj, ext, cert, times[i], quad_intervals); },
      parallel);
  return out;
}

}  // namespace

std::vector<std::optional<int>> cell_windings_serial(const CharacteristicFunction& q,
                                                     const std::vector<Region>& cells) {
  return windings(q, cells, false);
}

std::vector<std::optional<int>> cell_windings_parallel(const CharacteristicFunction& q,
                                                       const std::vector<Region>& cells) {
  return windings(q, cells, true);
}

std::vector<double> v_along_serial(const Trajectory& traj, const ExtendedHistory& ext,
                                   const LKCertificate& cert, const std::vector<double>& times,
                                   int quad_intervals) {
  return v_along(traj, ext, cert, times, quad_intervals, false);
}

std::vector<double> v_along_parallel(const Trajectory& traj, const ExtendedHistory& ext,
                                     const LKCertificate& cert, const std::vector<double>& times,
                                     int quad_intervals) {
  return v_along(traj, ext, cert, times, quad_intervals, true);
}

}  // namespace plk::kernels
