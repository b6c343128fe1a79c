#ifndef RKDMD_KERNELS_HPP
#define RKDMD_KERNELS_HPP

#include <map>
#include <string>
#include <vector>

#include "rkdmd/grid.hpp"
#include "rkdmd/hierarchy.hpp"

namespace rkdmd {

// Projection of the hierarchy vector defining which slow variables the
// memory kernel closes on.  kPopulation keeps the tier-0 populations
// (diagonal) only; kSystem keeps the whole tier-0 reduced density matrix.
// The complement Q = 1 - P spans everything else, including every
// higher-tier ADO.
enum class ProjectorKind { kPopulation, kSystem };

AdoState apply_projector(ProjectorKind kind, const AdoState& state);
AdoState apply_complement(ProjectorKind kind, const AdoState& state);

// Named kernel components on a uniform lag grid starting at lag 0.
// Population kind: "k_DD" (forward, donor loss) and "k_AD" (backward,
// donor gain from the acceptor), both entering
//   dP_D/dt = -int k_DD(tau) P_D(t-tau) dtau + int k_AD(tau) P_A(t-tau) dtau.
// System kind: the 16 superoperator entries "K_ij[a,b]" coupling input
// entry rho_ab to the derivative of rho_ij.
struct KernelSeries {
  TimeGrid grid;
  std::map<std::string, std::vector<Complex>> comp;

  std::vector<std::string> labels() const;
  void validate() const;
};

struct ExtractionInfo {
  int substeps = 1;
  // Population kind: how well the two kernel columns cancel (trace
  // preservation) and how real the components are.  Both are integration
  // diagnostics; exact in exact arithmetic.
  double max_trace_colsum = 0.0;
  double max_imag = 0.0;
};

// Memory kernel of the projected hierarchy: seed w = Q L e_a at absolute
// time t_origin, propagate under the Q-projected generator along the lag
// grid, read off P L w.  Exact at any hierarchy depth; depth governs only
// how faithful the hierarchy itself is.
KernelSeries extract_kernel(const HierarchySpace& space,
                            const EtHamiltonian& h, ProjectorKind kind,
                            const TimeGrid& lag_grid, double t_origin = 0.0,
                            int substeps = 0, ExtractionInfo* info = nullptr);

// Population kernels of a driven system sampled at n_phase equally spaced
// drive phases; k[j] holds the series with origin j * period / n_phase.
struct PhaseKernelSamples {
  double period = 0.0;
  int n_phase = 0;
  TimeGrid lag_grid;
  std::vector<KernelSeries> k;
};

PhaseKernelSamples extract_two_time_kernel(const HierarchySpace& space,
                                           const EtHamiltonian& h,
                                           const TimeGrid& lag_grid,
                                           int n_phase, int substeps = 0,
                                           ExtractionInfo* info = nullptr);

// Drive harmonics of the two-time kernel, k(tau; t) = sum_n k_n(tau)
// exp(i n omega t) with t the evaluation time.  Reality of the kernel
// gives k_{-n} = conj(k_n), so only n >= 0 is stored.
struct FloquetKernelSet {
  double omega = 0.0;
  int n_max = 0;
  TimeGrid lag_grid;
  std::vector<std::map<std::string, std::vector<Complex>>> comp;
};

FloquetKernelSet fourier_components(const PhaseKernelSamples& samples,
                                    double omega, int n_max);

// Single harmonic, any n including negative; used to test the conjugate
// symmetry rather than assume it.
std::map<std::string, std::vector<Complex>> fourier_component(
    const PhaseKernelSamples& samples, double omega, int n);

// Reconstruction of k(tau_i; t) from stored harmonics.
std::map<std::string, Complex> floquet_reconstruct(
    const FloquetKernelSet& set, int lag_index, double t);

// All harmonics flattened into one series with components "k_DD[n=0]",
// "k_AD[n=0]", ...; the layout model fits and CSV dumps work with.
KernelSeries flatten_floquet(const FloquetKernelSet& set);

// Plain discrete Fourier transform of each component,
// X(w_j) = dt * sum_n x_n exp(-i w_j n dt) over the symmetric harmonic
// range; w = 0 is the kernel's DC value (its Markovian rate content).
struct SpectrumSeries {
  std::vector<double> omega;
  std::map<std::string, std::vector<Complex>> comp;
};

SpectrumSeries kernel_fft(const KernelSeries& series);

}  // namespace rkdmd

#endif  // RKDMD_KERNELS_HPP
