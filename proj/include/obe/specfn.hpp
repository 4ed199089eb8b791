#pragma once

// Special functions used throughout the oscillator-basis machinery:
// log-gamma, real-argument binomials, explicit Laguerre/Jacobi sums and
// Clebsch-Gordan coefficients (Racah closed form, cached).

#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace obe {

inline double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: argument must be positive");
  return std::lgamma(x);
}

struct SignedLog {
  double log;
  int sign;  // +1, -1 or 0 (value is exactly zero / pole hit)
};

inline bool is_nonpositive_integer(double x) {
  return x <= 0.0 && std::abs(x - std::round(x)) < 1e-12;
}

// ln|Gamma(x)| with sign, valid for any non-pole real x.
inline SignedLog signed_log_gamma(double x) {
  if (x > 0.0) return {std::lgamma(x), 1};
  if (is_nonpositive_integer(x))
    throw std::domain_error("signed_log_gamma: pole at non-positive integer");
  // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
  const double s = std::sin(M_PI * x);
  const double l = std::log(M_PI / std::abs(s)) - std::lgamma(1.0 - x);
  return {l, s > 0.0 ? 1 : -1};
}

// Binomial coefficient Gamma(x+1) / (Gamma(y+1) Gamma(x-y+1)).
inline double binomial(double x, double y) {
  if (is_nonpositive_integer(x + 1.0) || is_nonpositive_integer(y + 1.0) ||
      is_nonpositive_integer(x - y + 1.0))
    throw std::domain_error("binomial: gamma pole in arguments");
  const SignedLog a = signed_log_gamma(x + 1.0);
  const SignedLog b = signed_log_gamma(y + 1.0);
  const SignedLog c = signed_log_gamma(x - y + 1.0);
  return a.sign * b.sign * c.sign * std::exp(a.log - b.log - c.log);
}

inline double log_factorial(int n) {
  static std::vector<double> table = [] {
    std::vector<double> t(256);
    for (int i = 0; i < 256; ++i) t[i] = std::lgamma(double(i) + 1.0);
    return t;
  }();
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  if (n < int(table.size())) return table[n];
  return std::lgamma(double(n) + 1.0);
}

// Generalized Laguerre polynomial L_n^a(x), three-term recurrence.
inline double laguerre(int n, double a, double x) {
  if (n < 0) throw std::domain_error("laguerre: n must be non-negative");
  if (n == 0) return 1.0;
  double lm1 = 1.0, l = 1.0 + a - x;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0 + a - x) * l - (k - 1.0 + a) * lm1) / k;
    lm1 = l;
    l = next;
  }
  return l;
}

// Jacobi polynomial P_n^{(a,b)}(x), three-term recurrence.
inline double jacobi(int n, double a, double b, double x) {
  if (n < 0) throw std::domain_error("jacobi: n must be non-negative");
  if (n == 0) return 1.0;
  double pm1 = 1.0, p = 0.5 * (a - b + (a + b + 2.0) * x);
  for (int k = 2; k <= n; ++k) {
    const double c = 2.0 * k + a + b;
    const double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    const double a2 = (c - 1.0) * (a * a - b * b);
    const double a3 = (c - 1.0) * c * (c - 2.0);
    const double a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    const double next = ((a2 + a3 * x) * p - a4 * pm1) / a1;
    pm1 = p;
    p = next;
  }
  return p;
}

namespace detail {

// Quad-precision helpers for the alternating coefficient sums, which lose
// more digits than double can spare at large Q. Only basic arithmetic is
// used, so no quadmath runtime is required.
using f128 = __float128;

inline f128 sqrt_f128(f128 x) {
  if (x <= 0) return 0;
  f128 y = f128(std::sqrt(double(x)));
  y = f128(0.5) * (y + x / y);
  y = f128(0.5) * (y + x / y);
  return y;
}

// Gamma(k/2) for k >= 1.
inline f128 gamma_half(int k) {
  static const std::vector<f128> table = [] {
    std::vector<f128> t(1024);
    // pi split across two doubles for ~32 accurate digits
    const f128 pi = f128(3.141592653589793116) + f128(1.2246467991473531772e-16);
    t[1] = sqrt_f128(pi);
    t[2] = 1;
    for (int i = 3; i < int(t.size()); ++i) t[i] = (f128(i) / 2 - 1) * t[i - 2];
    return t;
  }();
  if (k < 1 || k >= int(table.size())) throw std::domain_error("gamma_half: index out of range");
  return table[k];
}

inline f128 factorial_f128(int n) {
  static const std::vector<f128> table = [] {
    std::vector<f128> t(257);
    t[0] = 1;
    for (int i = 1; i < int(t.size()); ++i) t[i] = f128(i) * t[i - 1];
    return t;
  }();
  if (n < 0 || n >= int(table.size())) throw std::domain_error("factorial_f128: out of range");
  return table[n];
}

// binomial(top2/2, k) = Gamma(top2/2 + 1) / (k! Gamma(top2/2 - k + 1)).
inline f128 binom_half_f128(int top2, int k) {
  return gamma_half(top2 + 2) / (factorial_f128(k) * gamma_half(top2 - 2 * k + 2));
}

}  // namespace detail

namespace detail {

inline std::uint64_t pack_cg_key(int l1, int m1, int l2, int m2, int L, int M) {
  auto enc = [](int v) { return std::uint64_t(v + 128) & 0x3ff; };
  return enc(l1) | enc(m1) << 10 | enc(l2) << 20 | enc(m2) << 30 |
         enc(L) << 40 | enc(M) << 50;
}

inline double clebsch_gordan_uncached(int l1, int m1, int l2, int m2, int L, int M) {
  if (m1 + m2 != M) return 0.0;
  if (L < std::abs(l1 - l2) || L > l1 + l2) return 0.0;
  if (std::abs(m1) > l1 || std::abs(m2) > l2 || std::abs(M) > L) return 0.0;

  // Racah closed sum. The alternating sum cancels by roughly a digit per
  // unit of angular momentum, so it is taken in quad precision.
  using detail::f128;
  using detail::factorial_f128;
  const f128 pref2 = f128(2 * L + 1) * factorial_f128(l1 + l2 - L) *
                     factorial_f128(l1 - l2 + L) * factorial_f128(-l1 + l2 + L) /
                     factorial_f128(l1 + l2 + L + 1) * factorial_f128(l1 + m1) *
                     factorial_f128(l1 - m1) * factorial_f128(l2 + m2) *
                     factorial_f128(l2 - m2) * factorial_f128(L + M) * factorial_f128(L - M);

  const int kmin = std::max({0, l2 - L - m1, l1 - L + m2});
  const int kmax = std::min({l1 + l2 - L, l1 - m1, l2 + m2});
  f128 sum = 0;
  for (int k = kmin; k <= kmax; ++k) {
    const f128 t = 1 / (factorial_f128(k) * factorial_f128(l1 + l2 - L - k) *
                        factorial_f128(l1 - m1 - k) * factorial_f128(l2 + m2 - k) *
                        factorial_f128(L - l2 + m1 + k) * factorial_f128(L - l1 - m2 + k));
    sum += (k % 2 == 0) ? t : -t;
  }
  return double(detail::sqrt_f128(pref2) * sum);
}

}  // namespace detail

// Condon-Shortley Clebsch-Gordan coefficient <l1 m1 l2 m2 | L M>.
// Selection-rule violations return 0. Values are cached; the cache is
// internally synchronized.
inline double clebsch_gordan(int l1, int m1, int l2, int m2, int L, int M) {
  if (l1 < 0 || l2 < 0 || L < 0)
    throw std::domain_error("clebsch_gordan: negative angular momentum");
  static std::unordered_map<std::uint64_t, double> cache;
  static std::mutex mtx;
  const std::uint64_t key = detail::pack_cg_key(l1, m1, l2, m2, L, M);
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  const double v = detail::clebsch_gordan_uncached(l1, m1, l2, m2, L, M);
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(key, v);
  return v;
}

}  // namespace obe
