#ifndef RKDMD_DMD_HPP
#define RKDMD_DMD_HPP

#include <string>
#include <vector>

#include "rkdmd/grid.hpp"
#include "rkdmd/kernels.hpp"
#include "rkdmd/numerics.hpp"

namespace rkdmd {

// Uniformly sampled trajectory, one state per column.
struct SnapshotSet {
  CMatrix data;
  double dt = 0.0;
  double t0 = 0.0;
  std::vector<std::string> labels;  // optional row names

  void validate() const;
};

enum class AmplitudeMethod { kProject, kTrajectoryLsq };

// Best-fit linear propagator in modal form.  Snapshots are delay-embedded
// with depth `delay` before the decomposition, which raises the effective
// state dimension of short, structurally rich signals; modes therefore have
// base_dim*delay rows and prediction reads the leading block.
struct DmdModel {
  int base_dim = 0;
  int delay = 1;
  double dt = 0.0;
  double t0 = 0.0;
  int rank = 0;
  CMatrix modes;
  CVector disc_eigs;
  CVector cont_freqs;  // omega = -i ln(lambda) / dt, principal branch
  CVector amplitudes;
  std::vector<std::string> labels;
  int dropped_modes = 0;  // zero eigenvalues removed during the fit

  // State at absolute time t (any t, including past the training window).
  CVector predict(double t) const;
  CMatrix predict_series(const TimeGrid& grid) const;

  void save_json(const std::string& path) const;
  static DmdModel load_json(const std::string& path);
};

DmdModel fit_dmd(const SnapshotSet& snaps, const RankPolicy& policy,
                 AmplitudeMethod amplitudes = AmplitudeMethod::kTrajectoryLsq,
                 int delay = 25);

// Relative Frobenius mismatch of the model against its training snapshots.
double reconstruction_error(const DmdModel& model, const SnapshotSet& snaps);

// Kernel components stacked into snapshot rows (label order), first `count`
// lag samples.
SnapshotSet snapshots_from_series(const KernelSeries& series, int count);

// Model predictions laid back out as a kernel series on an arbitrary grid;
// the model must carry component labels.
KernelSeries series_from_model(const DmdModel& model, const TimeGrid& grid);

}  // namespace rkdmd

#endif  // RKDMD_DMD_HPP
