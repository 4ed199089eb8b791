#pragma once

// Gauss-Legendre rules with adaptive panel doubling. Integrands here are
// smooth (polynomials times Gaussians, possibly with integrable endpoint
// singularities handled by the caller's change of variable).

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

namespace obe {

struct GLRule {
  std::vector<double> x;  // nodes on [-1, 1]
  std::vector<double> w;
};

// Nodes/weights by Newton iteration on the Legendre recurrence.
inline const GLRule& gauss_legendre(int n) {
  static std::map<int, GLRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GLRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

template <class F>
double integrate_panels(F&& f, double a, double b, int panels, const GLRule& rule) {
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double c = lo + 0.5 * h, s = 0.5 * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.x.size(); ++i) acc += rule.w[i] * f(c + s * rule.x[i]);
    total += s * acc;
  }
  return total;
}

// Panel-doubling adaptive integration to a relative tolerance.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double reltol,
                          double abstol = 1e-300, int max_doublings = 16) {
  const GLRule& rule = gauss_legendre(24);
  double prev = integrate_panels(f, a, b, 1, rule);
  int panels = 2;
  for (int d = 0; d < max_doublings; ++d, panels *= 2) {
    const double cur = integrate_panels(f, a, b, panels, rule);
    if (std::abs(cur - prev) <= reltol * std::abs(cur) + abstol) return cur;
    prev = cur;
  }
  throw std::runtime_error("integrate_adaptive: no convergence");
}

}  // namespace obe
