#ifndef RKDMD_GRID_HPP
#define RKDMD_GRID_HPP

#include <vector>

#include "rkdmd/errors.hpp"

namespace rkdmd {

// Uniform time grid t_i = t0 + i*dt, i = 0..n-1.  Every propagation,
// kernel series and integral-equation solve in this library lives on one
// of these; helpers that accept two grids require commensurate spacing.
struct TimeGrid {
  double t0 = 0.0;
  double dt = 0.0;
  int n = 0;

  double time(int i) const { return t0 + dt * i; }
  double t_end() const { return time(n - 1); }

  std::vector<double> times() const {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = time(i);
    return out;
  }

  void validate() const {
    if (!(dt > 0.0)) throw ConfigError("grid: dt must be > 0");
    if (n < 1) throw ConfigError("grid: need at least one sample");
  }

  bool same_spacing(const TimeGrid& other, double rel_tol = 1e-9) const {
    double scale = dt > other.dt ? dt : other.dt;
    double diff = dt - other.dt;
    if (diff < 0) diff = -diff;
    return diff <= rel_tol * scale;
  }
};

}  // namespace rkdmd

#endif  // RKDMD_GRID_HPP
