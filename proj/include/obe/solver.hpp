#pragma once

// Hamiltonian assembly in the symmetry-adapted basis, dense diagonalization,
// and variational optimization of the oscillator scale.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "obe/basis.hpp"
#include "obe/matel.hpp"

namespace obe {

namespace detail {

inline double kernel_sum_12(const std::vector<RadialKernel>& ks, const ChannelState& bra,
                            const ChannelState& ket, const ScaleParams& s) {
  double v = 0.0;
  for (const RadialKernel& k : ks) v += two_body_me_12(bra, ket, k, s);
  return v;
}

}  // namespace detail

// Hamiltonian in the raw (unsymmetrized) channel basis.
inline Eigen::MatrixXd assemble_channel_hamiltonian(const std::vector<ChannelState>& channels,
                                                    const SystemConfig& cfg, const ScaleParams& s,
                                                    const CoefficientTables* tables) {
  cfg.validate();
  const int n = int(channels.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);

  // With identical particles on exchange-adapted states the three pair
  // interactions contribute equally; keep only the 1-2 (and m3 kinetic) terms
  // times three. Callers enable this through cfg.pairs_equal.
  const bool shortcut = cfg.pairs_equal && cfg.identical_masses();

  std::optional<AngleTables> at;
  if (!shortcut &&
      (cfg.kinematics == Kinematics::semirelativistic || !cfg.v13.empty() || !cfg.v23.empty()))
    at.emplace(cfg, s);

  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const ChannelState& bra = channels[i];
      const ChannelState& ket = channels[j];
      double v = 0.0;
      if (cfg.kinematics == Kinematics::nonrelativistic) {
        v += kinetic_nr(bra, ket, cfg, s);
      } else if (shortcut) {
        v += kinetic_sr_identical(bra, ket, cfg, s);
      } else {
        v += kinetic_sr(bra, ket, cfg, s, *at);
      }
      if (shortcut) {
        v += 3.0 * detail::kernel_sum_12(cfg.v12, bra, ket, s);
      } else {
        v += detail::kernel_sum_12(cfg.v12, bra, ket, s);
        for (const RadialKernel& k : cfg.v23) v += two_body_me_23(bra, ket, k, cfg, s, *at);
        for (const RadialKernel& k : cfg.v13) v += two_body_me_13(bra, ket, k, cfg, s, *at);
      }
      if (!cfg.three_body.empty()) {
        if (!tables)
          throw std::invalid_argument("assemble_channel_hamiltonian: three-body force needs tables");
        for (const RadialKernel& k : cfg.three_body)
          v += three_body_me_hyper(bra, ket, k, cfg, s, tables->hyper, &tables->bhyper);
      }
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

// Matrix of a pair-12 radial observable (e.g. the distance r12) in the
// channel basis. Valid only when the exchange symmetry makes all pairs
// equivalent or when the 1-2 pair itself is wanted.
inline Eigen::MatrixXd assemble_channel_r12(const std::vector<ChannelState>& channels,
                                            const ScaleParams& s) {
  const int n = int(channels.size());
  Eigen::MatrixXd o = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double v = observable_r12(channels[i], channels[j], s);
      o(i, j) = v;
      o(j, i) = v;
    }
  return o;
}

struct SpectrumResult {
  double a = 0.0, b = 0.0;
  int basis_size = 0;
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, in the symmetry-adapted basis
};

inline SpectrumResult solve_sector(const SymmetrizedBasis& basis, const SystemConfig& cfg,
                                   const ScaleParams& s, const CoefficientTables* tables,
                                   int nstates) {
  SpectrumResult res;
  res.a = s.a;
  res.b = s.b;
  res.basis_size = basis.size();
  if (basis.size() == 0) throw std::runtime_error("solve_sector: empty basis");
  const Eigen::MatrixXd h_ch = assemble_channel_hamiltonian(basis.channels, cfg, s, tables);
  Eigen::MatrixXd h = basis.transform.transpose() * h_ch * basis.transform;
  h = 0.5 * (h + h.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("solve_sector: diagonalization failed");
  const int k = std::min(nstates, int(es.eigenvalues().size()));
  res.eigenvalues = es.eigenvalues().head(k);
  res.eigenvectors = es.eigenvectors().leftCols(k);
  return res;
}

// <state| O |state> for a channel-basis operator matrix.
inline double expectation(const SymmetrizedBasis& basis, const Eigen::MatrixXd& op_channel,
                          const Eigen::VectorXd& state) {
  const Eigen::VectorXd v = basis.transform * state;
  return v.dot(op_channel * v);
}

struct ScaleOptimum {
  double a = 0.0;
  double energy = 0.0;
  int evaluations = 0;
};

// Minimize the eigenvalue of index `state` over the locked scale a by
// bracketing on a log grid followed by golden-section refinement.
inline ScaleOptimum optimize_scale(const SymmetrizedBasis& basis, const SystemConfig& cfg,
                                   const CoefficientTables* tables, double a_low, double a_high,
                                   double rel_tol = 1e-6, int scan_points = 24, int state = 0) {
  if (!(a_low > 0.0) || !(a_high > a_low))
    throw std::invalid_argument("optimize_scale: need 0 < a_low < a_high");
  if (state < 0) throw std::invalid_argument("optimize_scale: state must be non-negative");
  ScaleOptimum opt;
  auto energy = [&](double ln_a) {
    ++opt.evaluations;
    return solve_sector(basis, cfg, ScaleParams::locked_scale(std::exp(ln_a)), tables, state + 1)
        .eigenvalues[state];
  };

  const double lo = std::log(a_low), hi = std::log(a_high);
  int best = 0;
  std::vector<double> xs(scan_points), es(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    xs[i] = lo + (hi - lo) * i / (scan_points - 1);
    es[i] = energy(xs[i]);
    if (es[i] < es[best]) best = i;
  }
  double xa = xs[std::max(0, best - 1)];
  double xb = xs[std::min(scan_points - 1, best + 1)];
  if (best == 0 || best == scan_points - 1)
    throw std::runtime_error("optimize_scale: minimum at the edge of the scan range");

  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = xb - gr * (xb - xa), x2 = xa + gr * (xb - xa);
  double f1 = energy(x1), f2 = energy(x2);
  while (xb - xa > rel_tol) {
    if (f1 < f2) {
      xb = x2;
      x2 = x1;
      f2 = f1;
      x1 = xb - gr * (xb - xa);
      f1 = energy(x1);
    } else {
      xa = x1;
      x1 = x2;
      f1 = f2;
      x2 = xa + gr * (xb - xa);
      f2 = energy(x2);
    }
  }
  opt.a = std::exp(0.5 * (xa + xb));
  opt.energy = std::min(f1, f2);
  return opt;
}

}  // namespace obe
