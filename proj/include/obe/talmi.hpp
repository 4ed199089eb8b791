#pragma once

// Talmi-integral machinery for radial oscillator matrix elements.
//
// The product of two radial oscillator functions times the r^2 measure is
// expanded exactly on the weights (2/Gamma(p+3/2)) r^{2p+2} e^{-r^2}; the
// expansion coefficients B are obtained by multiplying out the two Laguerre
// polynomials, which also covers the half-integer-order hyperradial case.
// Matrix elements then reduce to finite sums of Talmi integrals I_p, which
// have closed forms for power, Gaussian and sqrt(x^2 + alpha) kernels and a
// quadrature fallback otherwise.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <variant>
#include <vector>

#include "obe/quadrature.hpp"
#include "obe/specfn.hpp"

namespace obe {

struct PowerKernel {
  double alpha = 1.0;  // alpha * x^beta
  double beta = 0.0;
};
struct GaussianKernel {
  double alpha = 1.0;  // alpha * exp(-beta x^2)
  double beta = 0.0;
};
struct SqrtShiftedKernel {
  double alpha = 0.0;  // sqrt(x^2 + alpha)
};
struct TabulatedKernel {
  std::function<double(double)> f;
};

using RadialKernel = std::variant<PowerKernel, GaussianKernel, SqrtShiftedKernel, TabulatedKernel>;

inline double kernel_eval(const RadialKernel& k, double x) {
  return std::visit(
      [x](const auto& kk) -> double {
        using T = std::decay_t<decltype(kk)>;
        if constexpr (std::is_same_v<T, PowerKernel>)
          return kk.alpha * std::pow(x, kk.beta);
        else if constexpr (std::is_same_v<T, GaussianKernel>)
          return kk.alpha * std::exp(-kk.beta * x * x);
        else if constexpr (std::is_same_v<T, SqrtShiftedKernel>)
          return std::sqrt(x * x + kk.alpha);
        else
          return kk.f(x);
      },
      k);
}

namespace detail {

// Coefficients of L_n^{lam+1/2}(u) as a polynomial in u.
inline std::vector<double> laguerre_coeffs(int n, double lam) {
  std::vector<double> c(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double v = binomial(n + lam + 0.5, double(n - i)) / std::exp(log_factorial(i));
    c[i] = (i % 2 == 0) ? v : -v;
  }
  return c;
}

inline double radial_norm(int n, double lam) {
  return std::exp(0.5 * (std::log(2.0) + log_factorial(n) - std::lgamma(n + lam + 1.5)));
}

}  // namespace detail

// B coefficients for the pair (n1, lam1), (n2, lam2); entry k corresponds to
// p = (lam1 + lam2)/2 + k, k = 0 .. n1+n2. lam is the power of r in the
// radial function: the orbital quantum number l for ordinary radial
// functions, K + 3/2 for hyperradial ones.
namespace detail {

// Quad-precision B coefficients for doubled lam values t = 2 lam with
// t1 + t2 even; entry k corresponds to p = (t1 + t2)/4 + k. The alternating
// convolution cancels by ~a digit per quantum, hence the working precision.
inline std::vector<f128> b_coefficients_f128(int n1, int t1, int n2, int t2) {
  std::vector<f128> c1(n1 + 1), c2(n2 + 1);
  for (int i = 0; i <= n1; ++i) {
    const f128 v = binom_half_f128(2 * n1 + t1 + 1, n1 - i) / factorial_f128(i);
    c1[i] = (i % 2 == 0) ? v : -v;
  }
  for (int i = 0; i <= n2; ++i) {
    const f128 v = binom_half_f128(2 * n2 + t2 + 1, n2 - i) / factorial_f128(i);
    c2[i] = (i % 2 == 0) ? v : -v;
  }
  const f128 nn = 2 * sqrt_f128(factorial_f128(n1) * factorial_f128(n2) /
                                (gamma_half(2 * n1 + t1 + 3) * gamma_half(2 * n2 + t2 + 3)));
  std::vector<f128> b(n1 + n2 + 1);
  for (int k = 0; k <= n1 + n2; ++k) {
    f128 conv = 0;
    for (int i = std::max(0, k - n2); i <= std::min(n1, k); ++i) conv += c1[i] * c2[k - i];
    b[k] = f128(0.5) * nn * gamma_half((t1 + t2) / 2 + 2 * k + 3) * conv;
  }
  return b;
}

}  // namespace detail

inline std::vector<double> b_coefficients(int n1, double lam1, int n2, double lam2) {
  if (n1 < 0 || n2 < 0) throw std::domain_error("b_coefficients: negative n");
  const int t1 = int(std::lround(2.0 * lam1)), t2 = int(std::lround(2.0 * lam2));
  std::vector<double> b(n1 + n2 + 1, 0.0);
  if (std::abs(2.0 * lam1 - t1) < 1e-12 && std::abs(2.0 * lam2 - t2) < 1e-12 &&
      (t1 + t2) % 2 == 0) {
    const std::vector<detail::f128> bq = detail::b_coefficients_f128(n1, t1, n2, t2);
    for (int k = 0; k <= n1 + n2; ++k) b[k] = double(bq[k]);
    return b;
  }
  const std::vector<double> c1 = detail::laguerre_coeffs(n1, lam1);
  const std::vector<double> c2 = detail::laguerre_coeffs(n2, lam2);
  const double nn = detail::radial_norm(n1, lam1) * detail::radial_norm(n2, lam2);
  for (int k = 0; k <= n1 + n2; ++k) {
    double conv = 0.0;
    for (int i = std::max(0, k - n2); i <= std::min(n1, k); ++i) conv += c1[i] * c2[k - i];
    const double p = 0.5 * (lam1 + lam2) + k;
    b[k] = 0.5 * nn * std::exp(std::lgamma(p + 1.5)) * conv;
  }
  return b;
}

// <n1 l1 | r | n2 l2> (unit scale) in quad precision end to end; the bracket
// generator needs this to ~1e-25 so the exponentiated tables stay clean at
// large Q.
inline double radial_r_element_exact(int n1, int l1, int n2, int l2) {
  using detail::f128;
  if ((l1 + l2) % 2 == 0)
    throw std::domain_error("radial_r_element_exact: l parities must differ");
  const std::vector<f128> b = detail::b_coefficients_f128(n1, 2 * l1, n2, 2 * l2);
  f128 sum = 0;
  for (int k = 0; k < int(b.size()); ++k) {
    const int tp = l1 + l2 + 2 * k;  // 2p
    sum += b[k] * detail::gamma_half(tp + 4) / detail::gamma_half(tp + 3);
  }
  return double(sum);
}

// Single B(n1 l1, n2 l2, p) coefficient; returns 0 for p outside the range.
inline double b_coefficient(int n1, int l1, int n2, int l2, double p) {
  const double k_real = p - 0.5 * (l1 + l2);
  const int k = int(std::lround(k_real));
  if (std::abs(k_real - k) > 1e-9 || k < 0 || k > n1 + n2) return 0.0;
  return b_coefficients(n1, double(l1), n2, double(l2))[k];
}

// I_p for the sqrt(x^2 + alpha) kernel, evaluated in r-space where the
// integrand (2/Gamma(p+3/2)) r^{2p+2} e^{-r^2} sqrt(alpha + a^2 r^2) is
// smooth; the weight is kept in log form to avoid overflow at large p.
inline double sqrt_kernel_integral(double p, double alpha, double a) {
  if (alpha < 0.0) throw std::domain_error("sqrt_kernel_integral: alpha must be >= 0");
  const double lg = std::lgamma(p + 1.5);
  const double rmax = std::sqrt(p + 1.5 + 24.0 * std::sqrt(p + 2.0) + 45.0);
  auto f = [&](double r) {
    if (r <= 0.0) return 0.0;
    return std::exp(std::log(2.0) + (2.0 * p + 2.0) * std::log(r) - r * r - lg) *
           std::sqrt(alpha + a * a * r * r);
  };
  return integrate_adaptive(f, 0.0, rmax, 1e-13);
}

// Talmi integral I_p(O, a) = (2/Gamma(p+3/2)) int_0^inf r^{2p+2} e^{-r^2} O(ar) dr.
inline double talmi_integral(double p, const RadialKernel& kernel, double a) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerKernel>) {
          if (k.beta <= -(2.0 * p + 3.0))
            throw std::domain_error("talmi_integral: divergent power kernel");
          return k.alpha * std::pow(a, k.beta) *
                 std::exp(std::lgamma(p + 1.5 + 0.5 * k.beta) - std::lgamma(p + 1.5));
        } else if constexpr (std::is_same_v<T, GaussianKernel>) {
          return k.alpha * std::pow(1.0 + a * a * k.beta, -1.5 - p);
        } else if constexpr (std::is_same_v<T, SqrtShiftedKernel>) {
          if (k.alpha == 0.0)
            return a * std::exp(std::lgamma(p + 2.0) - std::lgamma(p + 1.5));
          return sqrt_kernel_integral(p, k.alpha, a);
        } else {
          const double lg = std::lgamma(p + 1.5);
          const double rmax = std::sqrt(p + 1.5) + 12.0;
          auto f = [&](double r) {
            if (r <= 0.0) return 0.0;
            return std::exp(std::log(2.0) + (2.0 * p + 2.0) * std::log(r) - r * r - lg) *
                   k.f(a * r);
          };
          return integrate_adaptive(f, 0.0, rmax, 1e-12);
        }
      },
      kernel);
}

// Generic radial matrix element int r^2 dr R_{n1 lam1}(r) O(ar) R_{n2 lam2}(r).
inline double radial_me_generic(int n1, double lam1, int n2, double lam2,
                                const RadialKernel& kernel, double a) {
  const std::vector<double> b = b_coefficients(n1, lam1, n2, lam2);
  const double p0 = 0.5 * (lam1 + lam2);
  double sum = 0.0;
  for (int k = 0; k < int(b.size()); ++k) sum += b[k] * talmi_integral(p0 + k, kernel, a);
  return sum;
}

namespace detail {

inline const std::vector<double>& cached_b(int n1, int l1, int n2, int l2) {
  static std::map<std::uint64_t, std::vector<double>> cache;
  static std::mutex mtx;
  const std::uint64_t key =
      std::uint64_t(n1) | std::uint64_t(l1) << 16 | std::uint64_t(n2) << 32 | std::uint64_t(l2) << 48;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  return cache.emplace(key, b_coefficients(n1, double(l1), n2, double(l2))).first->second;
}

}  // namespace detail

// <n1 l1 | O(ar) | n2 l2> radial matrix element for ordinary oscillator
// functions; l1 and l2 must have equal parity (guaranteed by the selection
// rules of the callers).
inline double radial_me(int n1, int l1, int n2, int l2, const RadialKernel& kernel, double a) {
  const std::vector<double>& b = detail::cached_b(n1, l1, n2, l2);
  const double p0 = 0.5 * (l1 + l2);
  double sum = 0.0;
  for (int k = 0; k < int(b.size()); ++k) sum += b[k] * talmi_integral(p0 + k, kernel, a);
  return sum;
}

// Hyperradial matrix element int rho^5 drho R_{N1 K} O(c rho) R_{N2 K} via the
// same expansion with lam = K + 3/2.
inline double hyperradial_me(int n1, int n2, int K, const RadialKernel& kernel, double c) {
  return radial_me_generic(n1, K + 1.5, n2, K + 1.5, kernel, c);
}

}  // namespace obe
