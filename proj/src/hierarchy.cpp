#include "rkdmd/hierarchy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rkdmd {

namespace {

std::string occ_key(const std::uint8_t* occ, std::size_t k) {
  return std::string(reinterpret_cast<const char*>(occ), k);
}

void enumerate_compositions(int k_terms, int total,
                            std::vector<std::uint8_t>& cur, int pos, int left,
                            std::vector<std::uint8_t>& out) {
  if (pos == k_terms - 1) {
    cur[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(left);
    out.insert(out.end(), cur.begin(), cur.end());
    return;
  }
  for (int o = 0; o <= left; ++o) {
    cur[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(o);
    enumerate_compositions(k_terms, total, cur, pos + 1, left - o, out);
  }
}

struct Rk4Work {
  std::vector<Complex> k1, k2, k3, k4, tmp;
  explicit Rk4Work(std::size_t n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

}  // namespace

HierarchySpace::HierarchySpace(const std::vector<BathExpansion>& baths,
                               int depth, std::size_t memory_cap_bytes) {
  if (depth < 0) throw ConfigError("hierarchy: depth must be >= 0");
  depth_ = depth;

  for (const BathExpansion& bath : baths) {
    for (const BathTerm& src : bath.terms) {
      HierarchyTerm term;
      term.eta = src.eta;
      term.eta_bar = src.eta_bar;
      term.gamma = src.gamma;
      term.op = bath.coupling == CouplingLabel::kDonorGap ? 0 : 1;
      if (!(term.gamma.real() > 0.0))
        throw NumericalError("hierarchy: bath term with non-decaying rate");
      terms_.push_back(term);
    }
  }
  const int k_terms = n_terms();

  long double count = 1.0L;
  for (int i = 1; i <= depth_; ++i)
    count = count * static_cast<long double>(k_terms + i) / i;
  if (count > 2.0e9L)
    throw CapacityError(
        "hierarchy: index set exceeds 2e9 entries; reduce depth or the "
        "number of bath terms");

  if (k_terms == 0) {
    n_ado_ = 1;
    occ_.clear();
    lookup_[std::string()] = 0;
    damping_.assign(1, Complex(0.0, 0.0));
    return;
  }

  std::vector<std::uint8_t> cur(static_cast<std::size_t>(k_terms), 0);
  for (int tier = 0; tier <= depth_; ++tier)
    enumerate_compositions(k_terms, tier, cur, 0, tier, occ_);
  n_ado_ = static_cast<int>(occ_.size() / static_cast<std::size_t>(k_terms));

  const std::size_t state_bytes = state_size() * sizeof(Complex);
  const std::size_t table_bytes =
      occ_.size() * (1 + 2 * sizeof(std::int32_t)) +
      static_cast<std::size_t>(n_ado_) * sizeof(Complex);
  const std::size_t est = 6 * state_bytes + table_bytes;
  if (est > memory_cap_bytes) {
    std::ostringstream msg;
    msg << "hierarchy: " << n_ado_ << " auxiliary operators need about "
        << est / (1024 * 1024) << " MiB (cap " << memory_cap_bytes / (1024 * 1024)
        << " MiB); reduce hierarchy.depth or raise hierarchy.memory_cap_mb";
    throw CapacityError(msg.str());
  }

  lookup_.reserve(static_cast<std::size_t>(n_ado_) * 2);
  for (int a = 0; a < n_ado_; ++a)
    lookup_[occ_key(occupations(a), static_cast<std::size_t>(k_terms))] = a;

  up_.assign(occ_.size(), -1);
  down_.assign(occ_.size(), -1);
  damping_.assign(static_cast<std::size_t>(n_ado_), Complex(0.0, 0.0));
  std::vector<std::uint8_t> probe(static_cast<std::size_t>(k_terms));
  for (int a = 0; a < n_ado_; ++a) {
    const std::uint8_t* occ = occupations(a);
    const std::size_t row = static_cast<std::size_t>(a) * k_terms;
    Complex damp(0.0, 0.0);
    int tier_a = 0;
    for (int k = 0; k < k_terms; ++k) {
      tier_a += occ[static_cast<std::size_t>(k)];
      damp += static_cast<double>(occ[static_cast<std::size_t>(k)]) *
              terms_[static_cast<std::size_t>(k)].gamma;
    }
    damping_[static_cast<std::size_t>(a)] = damp;
    max_damping_ = std::max(max_damping_, std::abs(damp));

    std::copy(occ, occ + k_terms, probe.begin());
    for (int k = 0; k < k_terms; ++k) {
      if (tier_a < depth_) {
        ++probe[static_cast<std::size_t>(k)];
        auto it = lookup_.find(occ_key(probe.data(), probe.size()));
        up_[row + static_cast<std::size_t>(k)] =
            it == lookup_.end() ? -1 : it->second;
        --probe[static_cast<std::size_t>(k)];
      }
      if (occ[static_cast<std::size_t>(k)] > 0) {
        --probe[static_cast<std::size_t>(k)];
        auto it = lookup_.find(occ_key(probe.data(), probe.size()));
        down_[row + static_cast<std::size_t>(k)] =
            it == lookup_.end() ? -1 : it->second;
        ++probe[static_cast<std::size_t>(k)];
      }
    }
  }
}

int HierarchySpace::tier(int idx) const {
  const std::uint8_t* occ = occupations(idx);
  int t = 0;
  for (int k = 0; k < n_terms(); ++k) t += occ[static_cast<std::size_t>(k)];
  return t;
}

int HierarchySpace::index_of(const std::vector<std::uint8_t>& occ) const {
  if (occ.size() != static_cast<std::size_t>(n_terms()))
    throw NumericalError("hierarchy: occupation vector has wrong length");
  auto it = lookup_.find(occ_key(occ.data(), occ.size()));
  return it == lookup_.end() ? -1 : it->second;
}

int HierarchySpace::suggested_substeps(double dt,
                                       const EtHamiltonian& h) const {
  double hnorm = 0.0;
  const int probes = h.driven() ? 8 : 1;
  const double step = h.driven() ? h.period() / probes : 0.0;
  for (int i = 0; i < probes; ++i) {
    Eigen::Matrix2cd m = h.at(step * i);
    hnorm = std::max(hnorm, m.cwiseAbs().rowwise().sum().maxCoeff());
  }
  const double stiffness = max_damping_ + 4.0 * hnorm;
  return std::max(1, static_cast<int>(std::ceil(dt * stiffness / 2.5)));
}

void HierarchySpace::rhs(const EtHamiltonian& h, double t, const Complex* y,
                         Complex* dy) const {
  const Eigen::Matrix2cd hm = h.at(t);
  const Complex h00 = hm(0, 0), h01 = hm(0, 1), h10 = hm(1, 0), h11 = hm(1, 1);
  const Complex mi(0.0, -1.0);
  const int k_terms = n_terms();
  const int n = n_ado_;

#pragma omp parallel for schedule(static)
  for (int a = 0; a < n; ++a) {
    const Complex* r = y + 4 * static_cast<std::size_t>(a);
    const Complex r00 = r[0], r10 = r[1], r01 = r[2], r11 = r[3];
    const Complex damp = damping_[static_cast<std::size_t>(a)];

    Complex d00 = mi * (h01 * r10 - r01 * h10) - damp * r00;
    Complex d10 = mi * (h10 * r00 + h11 * r10 - r10 * h00 - r11 * h10) -
                  damp * r10;
    Complex d01 = mi * (h00 * r01 + h01 * r11 - r00 * h01 - r01 * h11) -
                  damp * r01;
    Complex d11 = mi * (h10 * r01 - r10 * h01) - damp * r11;

    const std::size_t row = static_cast<std::size_t>(a) * k_terms;
    for (int k = 0; k < k_terms; ++k) {
      const HierarchyTerm& term = terms_[static_cast<std::size_t>(k)];
      const std::int32_t iu = up_[row + static_cast<std::size_t>(k)];
      if (iu >= 0) {
        const Complex* x = y + 4 * static_cast<std::size_t>(iu);
        if (term.op == 0) {
          d10 += mi * x[1];
          d01 -= mi * x[2];
        } else {
          d00 += mi * (x[1] - x[2]);
          d10 += mi * (x[0] - x[3]);
          d01 += mi * (x[3] - x[0]);
          d11 += mi * (x[2] - x[1]);
        }
      }
      const std::int32_t id = down_[row + static_cast<std::size_t>(k)];
      if (id >= 0) {
        const double nk = occ_[row + static_cast<std::size_t>(k)];
        const Complex* x = y + 4 * static_cast<std::size_t>(id);
        const Complex ce = mi * nk * term.eta;
        const Complex cb = mi * nk * term.eta_bar;
        if (term.op == 0) {
          d10 += ce * x[1];
          d01 -= cb * x[2];
          d11 += (ce - cb) * x[3];
        } else {
          d00 += ce * x[1] - cb * x[2];
          d10 += ce * x[0] - cb * x[3];
          d01 += ce * x[3] - cb * x[0];
          d11 += ce * x[2] - cb * x[1];
        }
      }
    }

    Complex* out = dy + 4 * static_cast<std::size_t>(a);
    out[0] = d00;
    out[1] = d10;
    out[2] = d01;
    out[3] = d11;
  }
}

AdoState thermal_donor_initial(const HierarchySpace& space) {
  AdoState state;
  state.values = CVector::Zero(static_cast<Eigen::Index>(space.state_size()));
  state.values(0) = Complex(1.0, 0.0);
  return state;
}

Eigen::Matrix2cd tier0_matrix(const AdoState& state) {
  Eigen::Matrix2cd m;
  m << state.values(0), state.values(2), state.values(1), state.values(3);
  return m;
}

CVector rhs(const HierarchySpace& space, const EtHamiltonian& h,
            const AdoState& state, double t) {
  if (state.values.size() != static_cast<Eigen::Index>(space.state_size()))
    throw NumericalError("hierarchy: state length does not match space");
  CVector out(state.values.size());
  space.rhs(h, t, state.values.data(), out.data());
  return out;
}

namespace {

template <typename F>
void rk4_advance(F&& f, double t, double h, std::vector<Complex>& y,
                 Rk4Work& w) {
  const std::size_t n = y.size();
  f(t, y.data(), w.k1.data());
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + (0.5 * h) * w.k1[i];
  f(t + 0.5 * h, w.tmp.data(), w.k2.data());
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + (0.5 * h) * w.k2[i];
  f(t + 0.5 * h, w.tmp.data(), w.k3.data());
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + h * w.k3[i];
  f(t + h, w.tmp.data(), w.k4.data());
  const double c = h / 6.0;
  for (std::size_t i = 0; i < n; ++i)
    y[i] += c * (w.k1[i] + 2.0 * (w.k2[i] + w.k3[i]) + w.k4[i]);
}

}  // namespace

void propagate_observe(
    const HierarchySpace& space, const EtHamiltonian& h, const AdoState& init,
    const TimeGrid& grid, int substeps,
    const std::function<void(int, const AdoState&)>& observer,
    PropagationMetrics* metrics) {
  grid.validate();
  if (init.values.size() != static_cast<Eigen::Index>(space.state_size()))
    throw NumericalError("hierarchy: state length does not match space");
  const int sub =
      substeps > 0 ? substeps : space.suggested_substeps(grid.dt, h);

  std::vector<Complex> y(init.values.data(),
                         init.values.data() + init.values.size());
  Rk4Work work(y.size());
  auto deriv = [&](double t, const Complex* in, Complex* out) {
    space.rhs(h, t, in, out);
  };

  AdoState sample;
  sample.values.resize(init.values.size());
  const Complex tr0 = y[0] + y[3];
  PropagationMetrics local;
  local.substeps = sub;

  auto emit = [&](int i) {
    std::copy(y.begin(), y.end(), sample.values.data());
    sample.t = grid.time(i);
    const Complex tr = y[0] + y[3];
    local.max_trace_dev = std::max(local.max_trace_dev, std::abs(tr - tr0));
    const double herm =
        std::max({std::abs(y[2] - std::conj(y[1])),
                  std::abs(Complex(0.0, y[0].imag())),
                  std::abs(Complex(0.0, y[3].imag()))});
    local.max_herm_dev = std::max(local.max_herm_dev, herm);
    observer(i, sample);
  };

  emit(0);
  const double hstep = grid.dt / sub;
  for (int i = 1; i < grid.n; ++i) {
    const double t_base = grid.time(i - 1);
    for (int s = 0; s < sub; ++s)
      rk4_advance(deriv, t_base + s * hstep, hstep, y, work);
    double norm2 = 0.0;
    for (const Complex& v : y) norm2 += std::norm(v);
    if (!std::isfinite(norm2)) {
      std::ostringstream msg;
      msg << "hierarchy: integration blew up at t = " << grid.time(i)
          << " (substeps = " << sub << ")";
      throw NumericalError(msg.str());
    }
    emit(i);
  }
  if (metrics) *metrics = local;
}

std::vector<AdoState> propagate(const HierarchySpace& space,
                                const EtHamiltonian& h, const AdoState& init,
                                const TimeGrid& grid, int substeps,
                                PropagationMetrics* metrics) {
  std::vector<AdoState> samples;
  samples.reserve(static_cast<std::size_t>(grid.n));
  propagate_observe(
      space, h, init, grid, substeps,
      [&samples](int, const AdoState& s) { samples.push_back(s); }, metrics);
  return samples;
}

}  // namespace rkdmd
