#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <vector>

#include "plk/certificate.hpp"
#include "plk/dde.hpp"
#include "plk/spectrum.hpp"

namespace plk {
class ExtendedHistory;
}

/// Data-parallel kernels.  Each has a serial reference and an OpenMP
/// version; both write one output per index, so results agree bitwise.
namespace plk::kernels {

/// Winding number of each cell boundary (empty where the contour grazes a root).
[[nodiscard]] std::vector<std::optional<int>> cell_windings_serial(
    const CharacteristicFunction& q, const std::vector<Region>& cells);
[[nodiscard]] std::vector<std::optional<int>> cell_windings_parallel(
    const CharacteristicFunction& q, const std::vector<Region>& cells);

/// V along the trajectory at each time.
[[nodiscard]] std::vector<double> v_along_serial(const Trajectory& traj,
                                                 const ExtendedHistory& ext,
                                                 const LKCertificate& cert,
                                                 const std::vector<double>& times,
                                                 int quad_intervals);
[[nodiscard]] std::vector<double> v_along_parallel(const Trajectory& traj,
                                                   const ExtendedHistory& ext,
                                                   const LKCertificate& cert,
                                                   const std::vector<double>& times,
                                                   int quad_intervals);

/// Calls body(i) for i in [0, n).  Exceptions are captured per index and the
/// one with the smallest index is rethrown after all indices finish.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& body, bool parallel);

/// Worker threads available to the parallel kernels (1 without OpenMP).
[[nodiscard]] int max_threads() noexcept;

}  // namespace plk::kernels
