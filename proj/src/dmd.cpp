#include "rkdmd/dmd.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

namespace rkdmd {

namespace {

using nlohmann::json;

json complex_list(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json complex_matrix(const CMatrix& m) {
  json out = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      out.push_back({m(r, c).real(), m(r, c).imag()});
  return out;
}

CVector parse_complex_list(const json& j, const char* what) {
  if (!j.is_array())
    throw ConfigError(std::string("model file: ") + what + " must be a list");
  CVector out(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& entry : j) {
    if (!entry.is_array() || entry.size() != 2)
      throw ConfigError(std::string("model file: ") + what +
                        " entries must be [re, im] pairs");
    out(i++) = Complex(entry[0].get<double>(), entry[1].get<double>());
  }
  return out;
}

// Delay-embed columns: Y(:, j) stacks snapshots j .. j+delay-1.
CMatrix embed(const CMatrix& x, int delay) {
  const Eigen::Index base = x.rows();
  const Eigen::Index m_e = x.cols() - delay + 1;
  CMatrix y(base * delay, m_e);
  for (Eigen::Index j = 0; j < m_e; ++j)
    for (int d = 0; d < delay; ++d)
      y.block(base * d, j, base, 1) = x.col(j + d);
  return y;
}

}  // namespace

void SnapshotSet::validate() const {
  if (data.rows() < 1 || data.cols() < 2)
    throw ConfigError("snapshots: need at least one row and two columns");
  if (!(dt > 0.0)) throw ConfigError("snapshots: dt must be > 0");
  if (!labels.empty() &&
      labels.size() != static_cast<std::size_t>(data.rows()))
    throw ConfigError("snapshots: label count does not match rows");
}

DmdModel fit_dmd(const SnapshotSet& snaps, const RankPolicy& policy,
                 AmplitudeMethod amplitudes, int delay) {
  snaps.validate();
  policy.validate();
  if (delay < 1) throw ConfigError("dmd: delay must be >= 1");
  if (snaps.data.cols() - delay + 1 < 2)
    throw ConfigError(
        "dmd: snapshot window too short for the requested delay embedding");

  const CMatrix y = embed(snaps.data, delay);
  const Eigen::Index m_e = y.cols();
  const CMatrix x1 = y.leftCols(m_e - 1);
  const CMatrix x2 = y.rightCols(m_e - 1);

  const TruncatedSvd svd = truncated_svd(x1, policy);
  CMatrix sig_inv_v = svd.v;
  for (int c = 0; c < svd.rank(); ++c) sig_inv_v.col(c) /= svd.sigma(c);
  const CMatrix a_tilde = svd.u.adjoint() * x2 * sig_inv_v;
  const EigResult eig = eig_dense(a_tilde);

  // Exact modes; zero eigenvalues carry no dynamics and break the log map,
  // so they are removed and reported.
  const double eig_floor = 1e-14 * std::abs(eig.values(0));
  std::vector<int> keep;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (std::abs(eig.values(i)) > eig_floor)
      keep.push_back(static_cast<int>(i));
  if (keep.empty())
    throw NumericalError("dmd: every eigenvalue vanished after truncation");

  DmdModel model;
  model.base_dim = static_cast<int>(snaps.data.rows());
  model.delay = delay;
  model.dt = snaps.dt;
  model.t0 = snaps.t0;
  model.rank = static_cast<int>(keep.size());
  model.dropped_modes = static_cast<int>(eig.values.size()) - model.rank;
  model.labels = snaps.labels;

  const CMatrix phi_full = x2 * sig_inv_v * eig.vectors;
  model.modes.resize(y.rows(), model.rank);
  model.disc_eigs.resize(model.rank);
  for (int i = 0; i < model.rank; ++i) {
    model.modes.col(i) = phi_full.col(keep[static_cast<std::size_t>(i)]);
    model.disc_eigs(i) = eig.values(keep[static_cast<std::size_t>(i)]);
  }
  model.cont_freqs.resize(model.rank);
  const Complex mi_over_dt = Complex(0.0, -1.0) / snaps.dt;
  for (int i = 0; i < model.rank; ++i)
    model.cont_freqs(i) = mi_over_dt * std::log(model.disc_eigs(i));

  if (amplitudes == AmplitudeMethod::kProject) {
    const TruncatedSvd mode_svd =
        truncated_svd(model.modes, RankPolicy::threshold(1e-13));
    model.amplitudes = pinv_apply(mode_svd, y.col(0));
  } else {
    // Joint fit over the whole embedded trajectory.
    CMatrix stacked(y.rows() * m_e, model.rank);
    CVector target(y.rows() * m_e);
    CVector powers = CVector::Ones(model.rank);
    for (Eigen::Index j = 0; j < m_e; ++j) {
      for (int r = 0; r < model.rank; ++r)
        stacked.block(y.rows() * j, r, y.rows(), 1) =
            model.modes.col(r) * powers(r);
      target.segment(y.rows() * j, y.rows()) = y.col(j);
      powers = powers.cwiseProduct(model.disc_eigs);
    }
    model.amplitudes = lsq_solve(stacked, target);
  }
  return model;
}

CVector DmdModel::predict(double t) const {
  const double steps = (t - t0) / dt;
  CVector scaled(rank);
  for (int i = 0; i < rank; ++i)
    scaled(i) =
        amplitudes(i) * std::exp(std::log(disc_eigs(i)) * steps);
  return modes.topRows(base_dim) * scaled;
}

CMatrix DmdModel::predict_series(const TimeGrid& grid) const {
  grid.validate();
  CMatrix out(base_dim, grid.n);
  for (int i = 0; i < grid.n; ++i) out.col(i) = predict(grid.time(i));
  return out;
}

double reconstruction_error(const DmdModel& model, const SnapshotSet& snaps) {
  snaps.validate();
  if (snaps.data.rows() != model.base_dim)
    throw NumericalError("dmd: snapshot rows do not match model");
  double num = 0.0, den = 0.0;
  for (Eigen::Index j = 0; j < snaps.data.cols(); ++j) {
    const CVector pred = model.predict(snaps.t0 + snaps.dt * j);
    num += (pred - snaps.data.col(j)).squaredNorm();
    den += snaps.data.col(j).squaredNorm();
  }
  if (den == 0.0)
    throw NumericalError("dmd: reconstruction error of all-zero snapshots");
  return std::sqrt(num / den);
}

void DmdModel::save_json(const std::string& path) const {
  json j;
  j["format"] = "rkdmd.dmd_model";
  j["version"] = 1;
  j["base_dim"] = base_dim;
  j["delay"] = delay;
  j["dt"] = dt;
  j["t0"] = t0;
  j["rank"] = rank;
  j["dropped_modes"] = dropped_modes;
  j["labels"] = labels;
  j["modes_rows"] = modes.rows();
  j["modes"] = complex_matrix(modes);
  j["disc_eigs"] = complex_list(disc_eigs);
  j["cont_freqs"] = complex_list(cont_freqs);
  j["amplitudes"] = complex_list(amplitudes);

  std::ofstream out(path);
  if (!out) throw ConfigError("model file: cannot write '" + path + "'");
  out << j.dump(2) << "\n";
}

DmdModel DmdModel::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("model file: cannot read '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("model file: invalid JSON in '" + path +
                      "': " + e.what());
  }

  try {
    if (j.value("format", std::string()) != "rkdmd.dmd_model")
      throw ConfigError("model file: '" + path +
                        "' is not a saved DMD model");
    if (j.value("version", 0) != 1)
      throw ConfigError("model file: unsupported version");

    DmdModel model;
    model.base_dim = j.at("base_dim").get<int>();
    model.delay = j.at("delay").get<int>();
    model.dt = j.at("dt").get<double>();
    model.t0 = j.at("t0").get<double>();
    model.rank = j.at("rank").get<int>();
    model.dropped_modes = j.value("dropped_modes", 0);
    model.labels = j.value("labels", std::vector<std::string>());
    model.disc_eigs = parse_complex_list(j.at("disc_eigs"), "disc_eigs");
    model.cont_freqs = parse_complex_list(j.at("cont_freqs"), "cont_freqs");
    model.amplitudes = parse_complex_list(j.at("amplitudes"), "amplitudes");

    const Eigen::Index rows = j.at("modes_rows").get<Eigen::Index>();
    const CVector flat = parse_complex_list(j.at("modes"), "modes");
    if (rows < 1 || model.rank < 1 || flat.size() != rows * model.rank)
      throw ConfigError("model file: mode matrix shape is inconsistent");
    model.modes.resize(rows, model.rank);
    for (Eigen::Index c = 0; c < model.rank; ++c)
      for (Eigen::Index r = 0; r < rows; ++r)
        model.modes(r, c) = flat(c * rows + r);

    if (model.disc_eigs.size() != model.rank ||
        model.cont_freqs.size() != model.rank ||
        model.amplitudes.size() != model.rank)
      throw ConfigError("model file: spectral data sizes are inconsistent");
    if (rows != static_cast<Eigen::Index>(model.base_dim) * model.delay)
      throw ConfigError("model file: rows do not match base_dim * delay");
    if (!(model.dt > 0.0)) throw ConfigError("model file: dt must be > 0");
    return model;
  } catch (const json::exception& e) {
    throw ConfigError("model file: missing or mistyped field in '" + path +
                      "': " + e.what());
  }
}

SnapshotSet snapshots_from_series(const KernelSeries& series, int count) {
  series.validate();
  if (count < 2 || count > series.grid.n)
    throw ConfigError("snapshots: sample count outside the stored series");
  SnapshotSet snaps;
  snaps.dt = series.grid.dt;
  snaps.t0 = series.grid.t0;
  snaps.labels = series.labels();
  snaps.data.resize(static_cast<Eigen::Index>(snaps.labels.size()), count);
  Eigen::Index r = 0;
  for (const auto& [label, values] : series.comp) {
    for (int i = 0; i < count; ++i)
      snaps.data(r, i) = values[static_cast<std::size_t>(i)];
    ++r;
  }
  return snaps;
}

KernelSeries series_from_model(const DmdModel& model, const TimeGrid& grid) {
  if (model.labels.empty())
    throw NumericalError(
        "dmd: model carries no component labels to rebuild a series");
  if (model.labels.size() != static_cast<std::size_t>(model.base_dim))
    throw NumericalError("dmd: label count does not match base dimension");
  const CMatrix pred = model.predict_series(grid);
  KernelSeries out;
  out.grid = grid;
  for (std::size_t r = 0; r < model.labels.size(); ++r) {
    std::vector<Complex> values(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i)
      values[static_cast<std::size_t>(i)] = pred(static_cast<Eigen::Index>(r), i);
    out.comp[model.labels[r]] = std::move(values);
  }
  return out;
}

}  // namespace rkdmd
