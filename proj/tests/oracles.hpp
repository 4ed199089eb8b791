#pragma once

// Independent test oracles: Gauss-Hermite quadrature, spherical harmonics,
// and brute-force 6-D overlaps of coupled two-oscillator states and
// hyperspherical oscillator states. Everything here is built from explicit
// textbook definitions, not from the production coefficient machinery, so
// agreement is a genuine cross-check.

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <vector>

#include "obe/channels.hpp"
#include "obe/specfn.hpp"
#include "obe/talmi.hpp"

namespace oracle {

using Vec3 = std::array<double, 3>;
using cplx = std::complex<double>;

struct GHRule {
  std::vector<double> x;  // nodes of the physicists' Hermite polynomial
  std::vector<double> w;  // weights for integral f(x) exp(-x^2) dx
};

// Nodes/weights by Newton iteration on the Hermite recurrence.
inline const GHRule& gauss_hermite(int n) {
  static std::map<int, GHRule> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GHRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double norm0 = std::pow(M_PI, -0.25);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Asymptotic initial guesses, refined by Newton.
    double z;
    if (i == 0)
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
    else if (i == 1)
      z = r.x[n - 1] - 1.14 * std::pow(double(n), 0.426) / r.x[n - 1];
    else if (i == 2)
      z = 1.86 * r.x[n - 2] - 0.86 * r.x[n - 1];
    else if (i == 3)
      z = 1.91 * r.x[n - 3] - 0.91 * r.x[n - 2];
    else
      z = 2.0 * r.x[n - i] - r.x[n - i + 1];
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      // Orthonormal Hermite recurrence: h_{j+1} = z sqrt(2/(j+1)) h_j - sqrt(j/(j+1)) h_{j-1}
      double h0 = norm0, h1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double h2 = h1;
        h1 = h0;
        h0 = z * std::sqrt(2.0 / (j + 1.0)) * h1 - std::sqrt(double(j) / (j + 1.0)) * h2;
      }
      pp = std::sqrt(2.0 * n) * h1;
      const double dz = h0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    r.x[n - 1 - i] = z;
    r.x[i] = -z;
    r.w[n - 1 - i] = r.w[i] = 2.0 / (pp * pp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

// Spherical harmonic Y_lm(theta, phi) in the Condon-Shortley convention.
inline cplx sph_harm(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  if (am > l) return 0.0;
  const double p = std::sph_legendre(unsigned(l), unsigned(am), theta);
  const cplx e = std::exp(cplx(0.0, am * phi));
  if (m >= 0) return p * e;
  const double sign = (am % 2 == 0) ? 1.0 : -1.0;
  return sign * p * std::conj(e);
}

// Radial oscillator function with the Gaussian factored out:
// R_nl(r) = bare_radial(n, l, r) exp(-r^2/2).
inline double bare_radial(int n, int l, double r) {
  const double norm =
      std::exp(0.5 * (std::log(2.0) + obe::log_factorial(n) - std::lgamma(n + l + 1.5)));
  return norm * std::pow(r, l) * obe::laguerre(n, l + 0.5, r * r);
}

inline double rad(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }
inline double polar(const Vec3& v) { return std::acos(v[2] / rad(v)); }
inline double azimuth(const Vec3& v) { return std::atan2(v[1], v[0]); }

// Coupled two-oscillator state of projection M, Gaussian factored out.
inline cplx bare_channel(const obe::ChannelState& s, int M, const Vec3& x, const Vec3& y) {
  const double rx = rad(x), ry = rad(y);
  const double tx = polar(x), px = azimuth(x);
  const double ty = polar(y), py = azimuth(y);
  cplx sum = 0.0;
  for (int mx = -s.lx; mx <= s.lx; ++mx) {
    const int my = M - mx;
    if (std::abs(my) > s.ly) continue;
    const double cg = obe::clebsch_gordan(s.lx, mx, s.ly, my, s.L, M);
    if (cg == 0.0) continue;
    sum += cg * sph_harm(s.lx, mx, tx, px) * sph_harm(s.ly, my, ty, py);
  }
  return sum * bare_radial(s.nx, s.lx, rx) * bare_radial(s.ny, s.ly, ry);
}

// Hyperspherical oscillator state Psi_NK^{lx ly L} of projection M, Gaussian
// factored out; x = rho sin(alpha), y = rho cos(alpha).
inline cplx bare_hyper(int N, int K, int lx, int ly, int L, int M, const Vec3& x, const Vec3& y) {
  const double rx = rad(x), ry = rad(y);
  const double rho2 = rx * rx + ry * ry;
  const double rho = std::sqrt(rho2);
  const int n = (K - lx - ly) / 2;
  if (2 * n != K - lx - ly || n < 0) throw std::domain_error("bare_hyper: invalid K");

  const double rnorm = std::exp(0.5 * (std::log(2.0) + obe::log_factorial(N) -
                                       std::lgamma(double(K + N + 3))));
  const double rpart = rnorm * std::pow(rho, K) * obe::laguerre(N, K + 2.0, rho2);

  const double nk = std::sqrt(2.0 * std::exp(obe::log_factorial(n)) * (K + 2) *
                              std::exp(obe::log_factorial(n + lx + ly + 1)) /
                              std::exp(std::lgamma(n + lx + 1.5) + std::lgamma(n + ly + 1.5)));
  const double sa = rx / rho, ca = ry / rho;
  const double cos2a = (ry * ry - rx * rx) / rho2;
  const double ang_rad = nk * std::pow(sa, lx) * std::pow(ca, ly) *
                         obe::jacobi(n, lx + 0.5, ly + 0.5, cos2a);

  const double tx = polar(x), px = azimuth(x);
  const double ty = polar(y), py = azimuth(y);
  cplx sum = 0.0;
  for (int mx = -lx; mx <= lx; ++mx) {
    const int my = M - mx;
    if (std::abs(my) > ly) continue;
    const double cg = obe::clebsch_gordan(lx, mx, ly, my, L, M);
    if (cg == 0.0) continue;
    sum += cg * sph_harm(lx, mx, tx, px) * sph_harm(ly, my, ty, py);
  }
  return rpart * ang_rad * sum;
}

// 6-D overlap sum over the tensor Gauss-Hermite grid. The integrand must be
// the product of two bare states (the exp(-(x^2+y^2)) weight is supplied by
// the rule), so it is polynomial and the sum is exact for enough nodes.
template <class F>
double overlap_6d(F&& integrand, int nodes_per_dim) {
  const GHRule& r = gauss_hermite(nodes_per_dim);
  const int n = nodes_per_dim;
  double total = 0.0;
  Vec3 x, y;
  for (int i0 = 0; i0 < n; ++i0) {
    x[0] = r.x[i0];
    for (int i1 = 0; i1 < n; ++i1) {
      x[1] = r.x[i1];
      for (int i2 = 0; i2 < n; ++i2) {
        x[2] = r.x[i2];
        const double wx = r.w[i0] * r.w[i1] * r.w[i2];
        for (int j0 = 0; j0 < n; ++j0) {
          y[0] = r.x[j0];
          for (int j1 = 0; j1 < n; ++j1) {
            y[1] = r.x[j1];
            for (int j2 = 0; j2 < n; ++j2) {
              y[2] = r.x[j2];
              total += wx * r.w[j0] * r.w[j1] * r.w[j2] * integrand(x, y);
            }
          }
        }
      }
    }
  }
  return total;
}

// Values of a set of bare states tabulated on the 6-D grid, so many pairwise
// overlaps reduce to weighted dot products.
struct GridTable {
  std::vector<double> weight;           // product weight per grid point
  std::vector<Vec3> xs, ys;             // grid points
  std::vector<std::vector<cplx>> vals;  // [state][point]

  template <class F>
  static GridTable build(int nodes_per_dim, int nstates, F&& eval_state) {
    const GHRule& r = gauss_hermite(nodes_per_dim);
    const int n = nodes_per_dim;
    GridTable t;
    t.weight.reserve(std::size_t(n) * n * n * n * n * n);
    Vec3 x, y;
    for (int i0 = 0; i0 < n; ++i0)
      for (int i1 = 0; i1 < n; ++i1)
        for (int i2 = 0; i2 < n; ++i2)
          for (int j0 = 0; j0 < n; ++j0)
            for (int j1 = 0; j1 < n; ++j1)
              for (int j2 = 0; j2 < n; ++j2) {
                x = {r.x[i0], r.x[i1], r.x[i2]};
                y = {r.x[j0], r.x[j1], r.x[j2]};
                t.weight.push_back(r.w[i0] * r.w[i1] * r.w[i2] * r.w[j0] * r.w[j1] * r.w[j2]);
                t.xs.push_back(x);
                t.ys.push_back(y);
              }
    t.vals.resize(nstates);
    for (int s = 0; s < nstates; ++s) {
      t.vals[s].resize(t.weight.size());
      for (std::size_t p = 0; p < t.weight.size(); ++p)
        t.vals[s][p] = eval_state(s, t.xs[p], t.ys[p]);
    }
    return t;
  }

  cplx overlap(int sa, int sb) const {
    cplx sum = 0.0;
    for (std::size_t p = 0; p < weight.size(); ++p)
      sum += weight[p] * std::conj(vals[sa][p]) * vals[sb][p];
    return sum;
  }

  // Overlap with a scalar factor f(x, y) inserted between the states.
  template <class F>
  cplx overlap_with(int sa, int sb, F&& f) const {
    cplx sum = 0.0;
    for (std::size_t p = 0; p < weight.size(); ++p)
      sum += weight[p] * std::conj(vals[sa][p]) * f(xs[p], ys[p]) * vals[sb][p];
    return sum;
  }
};

}  // namespace oracle
