#ifndef RKDMD_HIERARCHY_HPP
#define RKDMD_HIERARCHY_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rkdmd/bath.hpp"
#include "rkdmd/grid.hpp"
#include "rkdmd/hamiltonian.hpp"
#include "rkdmd/numerics.hpp"

namespace rkdmd {

// One exponential bath term as seen by the hierarchy, with the coupling
// operator it multiplies (0 = |A><A|, 1 = |D><A| + |A><D|).
struct HierarchyTerm {
  Complex eta;
  Complex eta_bar;
  Complex gamma;
  int op = 0;
};

// Index set and coupling tables for the auxiliary density operators: all
// occupation vectors n over the K bath terms with sum(n) <= depth, in graded
// lexicographic order (tier by tier).  No rescaling is applied to the ADOs
// and the hierarchy is cut hard at the given depth; convergence is checked
// by comparing runs at different depths.
class HierarchySpace {
 public:
  static constexpr std::size_t kDefaultMemoryCap =
      std::size_t(2) * 1024 * 1024 * 1024;

  HierarchySpace(const std::vector<BathExpansion>& baths, int depth,
                 std::size_t memory_cap_bytes = kDefaultMemoryCap);

  int n_ado() const { return n_ado_; }
  int n_terms() const { return static_cast<int>(terms_.size()); }
  int depth() const { return depth_; }
  std::size_t state_size() const {
    return 4 * static_cast<std::size_t>(n_ado_);
  }
  const std::vector<HierarchyTerm>& terms() const { return terms_; }

  const std::uint8_t* occupations(int idx) const {
    return occ_.data() + static_cast<std::size_t>(idx) * terms_.size();
  }
  int tier(int idx) const;
  // -1 when the occupation vector is outside the truncated set.
  int index_of(const std::vector<std::uint8_t>& occ) const;
  int up_neighbor(int idx, int k) const {
    return up_[static_cast<std::size_t>(idx) * terms_.size() +
               static_cast<std::size_t>(k)];
  }
  int down_neighbor(int idx, int k) const {
    return down_[static_cast<std::size_t>(idx) * terms_.size() +
                 static_cast<std::size_t>(k)];
  }

  // Largest total decay rate sum(n_k Re gamma_k) across the set; deep tiers
  // of Matsubara terms make the system stiff even when the physics is slow.
  double max_tier_damping() const { return max_damping_; }
  // Fixed number of integration substeps per grid step keeping dt_sub within
  // the stability region of the classical Runge-Kutta scheme.
  int suggested_substeps(double dt, const EtHamiltonian& h) const;

  // Time derivative of the full hierarchy vector.  Layout: ADO block a
  // occupies y[4a..4a+3] as a column-major 2x2 matrix.
  void rhs(const EtHamiltonian& h, double t, const Complex* y,
           Complex* dy) const;

 private:
  int depth_ = 0;
  int n_ado_ = 0;
  std::vector<HierarchyTerm> terms_;
  std::vector<std::uint8_t> occ_;
  std::vector<std::int32_t> up_;
  std::vector<std::int32_t> down_;
  std::vector<Complex> damping_;
  double max_damping_ = 0.0;
  std::unordered_map<std::string, std::int32_t> lookup_;
};

// Hierarchy state: tier-0 block is the reduced density matrix.
struct AdoState {
  CVector values;
  double t = 0.0;
};

// Factorized donor initial condition: rho = |D><D|, all higher ADOs zero.
AdoState thermal_donor_initial(const HierarchySpace& space);

Eigen::Matrix2cd tier0_matrix(const AdoState& state);

CVector rhs(const HierarchySpace& space, const EtHamiltonian& h,
            const AdoState& state, double t);

struct PropagationMetrics {
  double max_trace_dev = 0.0;
  double max_herm_dev = 0.0;
  int substeps = 1;
};

// Fixed-step RK4 over the grid (substeps <= 0 selects the suggested value).
// Samples carry grid times; sample 0 is the initial state.  Non-finite
// values abort with a NumericalError naming the time reached.
std::vector<AdoState> propagate(const HierarchySpace& space,
                                const EtHamiltonian& h, const AdoState& init,
                                const TimeGrid& grid, int substeps = 0,
                                PropagationMetrics* metrics = nullptr);

// Streaming variant: observer(i, state) is called for every grid sample and
// full snapshots are not retained.
void propagate_observe(
    const HierarchySpace& space, const EtHamiltonian& h, const AdoState& init,
    const TimeGrid& grid, int substeps,
    const std::function<void(int, const AdoState&)>& observer,
    PropagationMetrics* metrics = nullptr);

}  // namespace rkdmd

#endif  // RKDMD_HIERARCHY_HPP
