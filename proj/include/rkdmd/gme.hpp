#ifndef RKDMD_GME_HPP
#define RKDMD_GME_HPP

#include <vector>

#include "rkdmd/dmd.hpp"
#include "rkdmd/grid.hpp"
#include "rkdmd/hamiltonian.hpp"
#include "rkdmd/kernels.hpp"

namespace rkdmd {

// Invariant drifts above this are flagged in trajectory metadata.
inline constexpr double kGmeInvariantTol = 1e-6;

// Forward/backward population kernels tabulated on the solver's lag grid.
struct PopulationKernelTable {
  std::vector<double> k_dd;
  std::vector<double> k_ad;
};

// Tables come either from a stored kernel series (spacing must match the
// solver grid; a shorter series is refused unless zero_pad explicitly
// extends it with zeros) or from a fitted model evaluated at every lag.
PopulationKernelTable population_table(const KernelSeries& series,
                                       const TimeGrid& grid, bool zero_pad);
PopulationKernelTable population_table(const DmdModel& model,
                                       const TimeGrid& grid);

// Same for a drive-harmonic kernel set: per-harmonic lag series, combined
// at solve time as k(tau; t) = k_0 + 2 Re sum_n k_n exp(i n omega t).
struct FloquetKernelTable {
  double omega = 0.0;
  int n_max = 0;
  std::vector<std::vector<Complex>> k_dd;
  std::vector<std::vector<Complex>> k_ad;
};

FloquetKernelTable floquet_table(const FloquetKernelSet& set,
                                 const TimeGrid& grid, bool zero_pad);
FloquetKernelTable floquet_table(const DmdModel& model, double omega,
                                 int n_max, const TimeGrid& grid);

struct PopulationTrajectory {
  TimeGrid grid;
  std::vector<double> p_d;
  // Largest excursion of P_D outside [0, 1]; representation keeps
  // P_A = 1 - P_D exact.
  double max_bound_dev = 0.0;
};

// Volterra integro-differential solve of
//   dP_D/dt = int_0^t [-k_DD(tau) P_D + k_AD(tau) (1 - P_D)](t - tau) dtau
// with trapezoidal memory quadrature and a Heun predictor-corrector step.
PopulationTrajectory solve_population(const PopulationKernelTable& kern,
                                      double p_d0, const TimeGrid& grid);
PopulationTrajectory solve_population_floquet(const FloquetKernelTable& kern,
                                              double p_d0,
                                              const TimeGrid& grid);

// Full 4x4 kernel acting on vec(rho) = (rho_DD, rho_AD, rho_DA, rho_AA).
struct GmeKernelTable {
  std::vector<Eigen::Matrix4cd> k;
};

GmeKernelTable gme_table(const KernelSeries& series, const TimeGrid& grid,
                         bool zero_pad);
GmeKernelTable gme_table(const DmdModel& model, const TimeGrid& grid);

struct DensityTrajectory {
  TimeGrid grid;
  std::vector<Eigen::Matrix2cd> rho;
  double max_trace_dev = 0.0;
  double max_herm_dev = 0.0;
  bool flagged = false;
};

// drho/dt = -i[H(t), rho] + int_0^t K(tau) rho(t - tau) dtau, same scheme
// as the population solver.  Trace and Hermiticity are monitored, not
// enforced.
DensityTrajectory solve_gme(const GmeKernelTable& kern,
                            const EtHamiltonian& h,
                            const Eigen::Matrix2cd& rho0,
                            const TimeGrid& grid);

}  // namespace rkdmd

#endif  // RKDMD_GME_HPP
