#pragma once

// Hamiltonian matrix elements in the channel basis: kinetic energy
// (non- and semi-relativistic), the three two-body potential terms, and the
// hyperradial three-body force via the hyperspherical route with a direct
// 2-D quadrature fallback.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "obe/basis.hpp"
#include "obe/channels.hpp"
#include "obe/coeffs.hpp"
#include "obe/talmi.hpp"

namespace obe {

enum class Kinematics { nonrelativistic, semirelativistic };

struct SystemConfig {
  double m1 = 1.0, m2 = 1.0, m3 = 1.0;
  Kinematics kinematics = Kinematics::nonrelativistic;
  std::vector<RadialKernel> v12, v13, v23;
  std::vector<RadialKernel> three_body;
  bool pairs_equal = false;  // all three pair potentials identical

  double m12() const { return m1 + m2; }
  double mtot() const { return m1 + m2 + m3; }
  bool identical_masses() const { return m1 == m2 && m2 == m3; }

  void validate() const {
    if (m1 <= 0.0 || m2 <= 0.0 || m3 <= 0.0)
      throw std::invalid_argument("SystemConfig: masses must be positive");
    if (!three_body.empty() && m1 != m2)
      throw std::invalid_argument("SystemConfig: three-body forces require m1 == m2");
  }
};

struct ScaleParams {
  double a = 1.0;
  double b = 1.0;
  bool locked = false;  // b = sqrt(3) a / 2 enforced

  static ScaleParams locked_scale(double a) {
    return {a, std::sqrt(3.0) * a / 2.0, true};
  }
};

// Rotation angles/scales for the x<->y mixing pair potentials and
// semi-relativistic terms.
struct RotationChannel {
  double beta1 = 0.0, gamma1 = 0.0, eta1 = 0.0;
  double beta2 = 0.0, gamma2 = 0.0, eta2 = 0.0;

  static RotationChannel from(const SystemConfig& cfg, const ScaleParams& s) {
    RotationChannel r;
    const double m12 = cfg.m12();
    r.gamma1 = std::hypot(s.b * m12, s.a * cfg.m1);
    r.beta1 = std::atan2(s.a * cfg.m1, s.b * m12);
    r.eta1 = s.a * s.b * m12 / r.gamma1;
    r.gamma2 = std::hypot(s.b * m12, s.a * cfg.m2);
    r.beta2 = std::atan2(s.a * cfg.m2, s.b * m12);
    r.eta2 = s.a * s.b * m12 / r.gamma2;
    return r;
  }
};

// Per-(a, b) bracket tables at the two rotation angles.
struct AngleTables {
  RotationChannel rot;
  BMTables beta1;
  BMTables beta2;

  AngleTables(const SystemConfig& cfg, const ScaleParams& s)
      : rot(RotationChannel::from(cfg, s)), beta1(rot.beta1), beta2(rot.beta2) {}
};

// ---------------------------------------------------------------------------
// Kinetic energy
// ---------------------------------------------------------------------------

namespace detail {

// Tridiagonal p^2 pattern: (2n+l+3/2) on the diagonal, +sqrt(n(n+l+1/2))
// one off the diagonal.
inline double p2_pattern(int n1, int n2, int l) {
  if (n1 == n2) return 2.0 * n2 + l + 1.5;
  if (n1 + 1 == n2) return std::sqrt(n2 * (n2 + l + 0.5));
  if (n1 == n2 + 1) return std::sqrt(n1 * (n1 + l + 0.5));
  return 0.0;
}

// Real value of i^{Qbra} (-i)^{Qket}; the difference is even in every
// parity-conserving sector.
inline double momentum_phase(int q_bra, int q_ket) {
  if ((q_bra - q_ket) % 2 != 0)
    throw std::logic_error("momentum_phase: quanta parity mismatch");
  return ((q_ket + (q_ket + q_bra) / 2) % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace detail

inline double kinetic_nr(const ChannelState& bra, const ChannelState& ket,
                         const SystemConfig& cfg, const ScaleParams& s) {
  if (bra.L != ket.L || bra.lx != ket.lx || bra.ly != ket.ly) return 0.0;
  double val = 0.0;
  if (bra.ny == ket.ny) {
    const double kp = cfg.m12() / (2.0 * cfg.m1 * cfg.m2) * detail::p2_pattern(bra.nx, ket.nx, ket.lx);
    val += kp / (s.a * s.a);
  }
  if (bra.nx == ket.nx) {
    const double kq = cfg.mtot() / (2.0 * cfg.m12() * cfg.m3) * detail::p2_pattern(bra.ny, ket.ny, ket.ly);
    val += kq / (s.b * s.b);
  }
  return val;
}

// m3 term of the semi-relativistic kinetic energy (phases included).
inline double kinetic_sr_term3(const ChannelState& bra, const ChannelState& ket,
                               const SystemConfig& cfg, const ScaleParams& s) {
  if (bra.L != ket.L || bra.nx != ket.nx || bra.lx != ket.lx || bra.ly != ket.ly) return 0.0;
  const double phase = ((bra.ny + ket.ny) % 2 == 0) ? 1.0 : -1.0;
  return phase * radial_me(bra.ny, bra.ly, ket.ny, ket.ly, SqrtShiftedKernel{cfg.m3 * cfg.m3}, 1.0 / s.b);
}

namespace detail {

// Shared double-bracket contraction for the m1/m2 semi-relativistic terms:
// both states expanded at the given angle, the y labels contracted, and a
// sqrt kernel evaluated on the x part.
inline double sr_rotated_term(const ChannelState& bra, const ChannelState& ket, BMTables& bm,
                              double mass, double eta) {
  const int L = ket.L;
  const QLBlock& block_b = bm.block(bra.quanta(), L);
  const QLBlock& block_k = bm.block(ket.quanta(), L);
  const Eigen::MatrixXd& mb = bm.matrix(bra.quanta(), L);
  const Eigen::MatrixXd& mk = bm.matrix(ket.quanta(), L);
  const int cb = block_b.index_of(bra), ck = block_k.index_of(ket);
  const RadialKernel kernel = SqrtShiftedKernel{mass * mass};

  double sum = 0.0;
  for (int rb = 0; rb < int(block_b.states.size()); ++rb) {
    const double wb = mb(rb, cb);
    if (std::abs(wb) < 1e-16) continue;
    const ChannelState& nu_b = block_b.states[rb];
    for (int rk = 0; rk < int(block_k.states.size()); ++rk) {
      const ChannelState& nu_k = block_k.states[rk];
      if (nu_b.ny != nu_k.ny || nu_b.ly != nu_k.ly || nu_b.lx != nu_k.lx) continue;
      const double wk = mk(rk, ck);
      if (std::abs(wk) < 1e-16) continue;
      sum += wb * wk * radial_me(nu_b.nx, nu_b.lx, nu_k.nx, nu_k.lx, kernel, 1.0 / eta);
    }
  }
  return sum;
}

}  // namespace detail

// Full semi-relativistic kinetic energy for generic masses.
inline double kinetic_sr(const ChannelState& bra, const ChannelState& ket,
                         const SystemConfig& cfg, const ScaleParams& s, AngleTables& at) {
  if (bra.L != ket.L) return 0.0;
  double val = kinetic_sr_term3(bra, ket, cfg, s);
  const double phase = detail::momentum_phase(bra.quanta(), ket.quanta());
  const double ly_phase = ((bra.ly + ket.ly) % 2 == 0) ? 1.0 : -1.0;
  val += phase * ly_phase * detail::sr_rotated_term(bra, ket, at.beta1, cfg.m1, at.rot.eta1);
  val += phase * detail::sr_rotated_term(bra, ket, at.beta2, cfg.m2, at.rot.eta2);
  return val;
}

// For three identical particles on exchange-symmetrized states all three
// kinetic terms are equal, so the m3 term times three suffices.
inline double kinetic_sr_identical(const ChannelState& bra, const ChannelState& ket,
                                   const SystemConfig& cfg, const ScaleParams& s) {
  return 3.0 * kinetic_sr_term3(bra, ket, cfg, s);
}

// ---------------------------------------------------------------------------
// Two-body potentials
// ---------------------------------------------------------------------------

inline double two_body_me_12(const ChannelState& bra, const ChannelState& ket,
                             const RadialKernel& kernel, const ScaleParams& s) {
  if (bra.L != ket.L || bra.ny != ket.ny || bra.ly != ket.ly || bra.lx != ket.lx) return 0.0;
  return radial_me(bra.nx, bra.lx, ket.nx, ket.lx, kernel, s.a);
}

inline double two_body_me_23(const ChannelState& bra, const ChannelState& ket,
                             const RadialKernel& kernel, const SystemConfig& cfg,
                             const ScaleParams& s, AngleTables& at) {
  if (bra.L != ket.L) return 0.0;
  const int L = ket.L;
  BMTables& bm = at.beta1;
  const QLBlock& block_b = bm.block(bra.quanta(), L);
  const QLBlock& block_k = bm.block(ket.quanta(), L);
  const Eigen::MatrixXd& mb = bm.matrix(bra.quanta(), L);
  const Eigen::MatrixXd& mk = bm.matrix(ket.quanta(), L);
  const int cb = block_b.index_of(bra), ck = block_k.index_of(ket);
  const double scale = at.rot.gamma1 / cfg.m12();

  double sum = 0.0;
  for (int rb = 0; rb < int(block_b.states.size()); ++rb) {
    const double wb = mb(rb, cb);
    if (std::abs(wb) < 1e-16) continue;
    const ChannelState& nu_b = block_b.states[rb];
    for (int rk = 0; rk < int(block_k.states.size()); ++rk) {
      const ChannelState& nu_k = block_k.states[rk];
      if (nu_b.nx != nu_k.nx || nu_b.lx != nu_k.lx || nu_b.ly != nu_k.ly) continue;
      const double wk = mk(rk, ck);
      if (std::abs(wk) < 1e-16) continue;
      sum += wb * wk * radial_me(nu_b.ny, nu_b.ly, nu_k.ny, nu_k.ly, kernel, scale);
    }
  }
  const double phase = ((bra.lx + ket.lx) % 2 == 0) ? 1.0 : -1.0;
  return phase * sum;
}

inline double two_body_me_13(const ChannelState& bra, const ChannelState& ket,
                             const RadialKernel& kernel, const SystemConfig& cfg,
                             const ScaleParams& s, AngleTables& at) {
  if (bra.L != ket.L) return 0.0;
  const int L = ket.L;
  BMTables& bm = at.beta2;
  const ChannelState bra_sw{bra.ny, bra.ly, bra.nx, bra.lx, bra.L};
  const ChannelState ket_sw{ket.ny, ket.ly, ket.nx, ket.lx, ket.L};
  const QLBlock& block_b = bm.block(bra.quanta(), L);
  const QLBlock& block_k = bm.block(ket.quanta(), L);
  const Eigen::MatrixXd& mb = bm.matrix(bra.quanta(), L);
  const Eigen::MatrixXd& mk = bm.matrix(ket.quanta(), L);
  const int cb = block_b.index_of(bra_sw), ck = block_k.index_of(ket_sw);
  const double scale = at.rot.gamma2 / cfg.m12();

  double sum = 0.0;
  for (int rb = 0; rb < int(block_b.states.size()); ++rb) {
    const double wb = mb(rb, cb);
    if (std::abs(wb) < 1e-16) continue;
    const ChannelState& nu_b = block_b.states[rb];
    for (int rk = 0; rk < int(block_k.states.size()); ++rk) {
      const ChannelState& nu_k = block_k.states[rk];
      if (nu_b.ny != nu_k.ny || nu_b.ly != nu_k.ly || nu_b.lx != nu_k.lx) continue;
      const double wk = mk(rk, ck);
      if (std::abs(wk) < 1e-16) continue;
      sum += wb * wk * radial_me(nu_b.nx, nu_b.lx, nu_k.nx, nu_k.lx, kernel, scale);
    }
  }
  const double phase = ((bra.lx + ket.lx) % 2 == 0) ? 1.0 : -1.0;
  return phase * sum;
}

enum class Pair { p12, p13, p23 };

inline double two_body_me(Pair pair, const ChannelState& bra, const ChannelState& ket,
                          const RadialKernel& kernel, const SystemConfig& cfg,
                          const ScaleParams& s, AngleTables& at) {
  switch (pair) {
    case Pair::p12: return two_body_me_12(bra, ket, kernel, s);
    case Pair::p23: return two_body_me_23(bra, ket, kernel, cfg, s, at);
    case Pair::p13: return two_body_me_13(bra, ket, kernel, cfg, s, at);
  }
  return 0.0;
}

// Matrix element of the inter-particle distance r12 = a x.
inline double observable_r12(const ChannelState& bra, const ChannelState& ket,
                             const ScaleParams& s) {
  return two_body_me_12(bra, ket, PowerKernel{1.0, 1.0}, s);
}

// ---------------------------------------------------------------------------
// Three-body potential
// ---------------------------------------------------------------------------

namespace detail {

inline double hyperradial_me_cached(int n1, int n2, int K, const RadialKernel& kernel, double c,
                                    const BHyperTable* bhyper) {
  const std::vector<double>* b = bhyper ? bhyper->find(n1, n2, K) : nullptr;
  if (!b) return hyperradial_me(n1, n2, K, kernel, c);
  const double p0 = K + 1.5;
  double sum = 0.0;
  for (int k = 0; k < int(b->size()); ++k) sum += (*b)[k] * talmi_integral(p0 + k, kernel, c);
  return sum;
}

}  // namespace detail

// W(sqrt(3/2) a rho) matrix element through hyperspherical coefficients.
// Requires locked scales (b = sqrt(3) a / 2) and m1 == m2.
inline double three_body_me_hyper(const ChannelState& bra, const ChannelState& ket,
                                  const RadialKernel& kernel, const SystemConfig& cfg,
                                  const ScaleParams& s, const HyperTable& hyper,
                                  const BHyperTable* bhyper = nullptr) {
  if (!s.locked)
    throw std::invalid_argument("three_body_me_hyper: requires locked scales b = sqrt(3) a / 2");
  if (cfg.m1 != cfg.m2)
    throw std::invalid_argument("three_body_me_hyper: requires m1 == m2");
  if (bra.L != ket.L || bra.lx != ket.lx || bra.ly != ket.ly) return 0.0;
  const std::vector<HyperEntry>& eb = hyper.at(bra.nx, bra.lx, bra.ny, bra.ly);
  const std::vector<HyperEntry>& ek = hyper.at(ket.nx, ket.lx, ket.ny, ket.ly);
  const double c = std::sqrt(1.5) * s.a;
  double sum = 0.0;
  for (const HyperEntry& b : eb)
    for (const HyperEntry& k : ek) {
      if (b.K != k.K) continue;
      sum += b.c * k.c * detail::hyperradial_me_cached(b.N, k.N, b.K, kernel, c, bhyper);
    }
  return sum;
}

namespace detail {

inline double radial_wave(int n, int l, double r) {
  return radial_norm(n, double(l)) * std::pow(r, l) * std::exp(-0.5 * r * r) *
         laguerre(n, l + 0.5, r * r);
}

}  // namespace detail

// Direct 2-D quadrature of the three-body element (the oracle route).
// Valid for m1 == m2, where the x.y cross term of the potential argument
// vanishes; does not require locked scales.
inline double three_body_me_naive(const ChannelState& bra, const ChannelState& ket,
                                  const RadialKernel& kernel, const SystemConfig& cfg,
                                  const ScaleParams& s) {
  if (cfg.m1 != cfg.m2)
    throw std::invalid_argument("three_body_me_naive: requires m1 == m2");
  if (bra.L != ket.L || bra.lx != ket.lx || bra.ly != ket.ly) return 0.0;

  const double ax2 = 1.5 * s.a * s.a;       // coefficient of x^2 (m1 == m2)
  const double by2 = 2.0 * s.b * s.b;       // coefficient of y^2
  double prev = 0.0;
  for (int nodes = 96; nodes <= 1536; nodes *= 2) {
    const GLRule& rule = gauss_legendre(nodes);
    // map u in (-1,1) -> r in (0,inf) via r = tan(pi (u+1)/4)
    std::vector<double> r(nodes), jac(nodes);
    for (int i = 0; i < nodes; ++i) {
      const double t = 0.25 * M_PI * (rule.x[i] + 1.0);
      r[i] = std::tan(t);
      jac[i] = rule.w[i] * 0.25 * M_PI * (1.0 + r[i] * r[i]);
    }
    std::vector<double> fx(nodes), fy(nodes);
    for (int i = 0; i < nodes; ++i) {
      fx[i] = r[i] * r[i] * detail::radial_wave(bra.nx, bra.lx, r[i]) *
              detail::radial_wave(ket.nx, ket.lx, r[i]);
      fy[i] = r[i] * r[i] * detail::radial_wave(bra.ny, bra.ly, r[i]) *
              detail::radial_wave(ket.ny, ket.ly, r[i]);
    }
    double sum = 0.0;
    for (int i = 0; i < nodes; ++i) {
      if (fx[i] == 0.0) continue;
      double inner = 0.0;
      for (int j = 0; j < nodes; ++j) {
        if (fy[j] == 0.0) continue;
        const double arg = std::sqrt(ax2 * r[i] * r[i] + by2 * r[j] * r[j]);
        inner += jac[j] * fy[j] * kernel_eval(kernel, arg);
      }
      sum += jac[i] * fx[i] * inner;
    }
    if (nodes > 96 && std::abs(sum - prev) <= 1e-9 * std::max(1e-12, std::abs(sum))) return sum;
    prev = sum;
  }
  throw std::runtime_error("three_body_me_naive: quadrature did not converge");
}

}  // namespace obe
