#pragma once

// Built-in benchmark systems, so reproduction commands do not depend on
// hand-typed constants.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "obe/matel.hpp"

namespace obe {

struct NamedSystem {
  std::string name;
  SystemConfig cfg;
  double a_low = 0.5;  // default search window for the scale optimization
  double a_high = 5.0;
};

inline NamedSystem named_system(const std::string& name) {
  NamedSystem sys;
  sys.name = name;
  sys.cfg.pairs_equal = true;
  if (name == "gauss3b") {
    // three identical unit-mass bosons, attractive three-body Gaussian
    sys.cfg.three_body = {GaussianKernel{-std::pow(3.0, 4.0 / 3.0), 1.0 / 27.0}};
    sys.a_low = 0.6;
    sys.a_high = 6.0;
  } else if (name == "coulomb3b") {
    // three identical unit-mass bosons, attractive three-body Coulomb
    sys.cfg.three_body = {PowerKernel{-3.0, -1.0}};
    sys.a_low = 1.0;
    sys.a_high = 30.0;
  } else if (name == "coulomb-linear") {
    // pair Coulomb attraction plus linear three-body confinement
    const RadialKernel coulomb = PowerKernel{-1.0, -1.0};
    sys.cfg.v12 = {coulomb};
    sys.cfg.v13 = {coulomb};
    sys.cfg.v23 = {coulomb};
    sys.cfg.three_body = {PowerKernel{0.5, 1.0}};
    sys.a_low = 0.2;
    sys.a_high = 4.0;
  } else if (name == "helium-trimer") {
    // two-body attractive and three-body repulsive Gaussians (helium trimer
    // parametrization; energies in K, lengths in a.u.)
    const double mass = 0.0231048;
    const double v0 = 1.227, w0 = 0.279, r0 = 10.03, rho0 = 13.85;
    sys.cfg.m1 = sys.cfg.m2 = sys.cfg.m3 = mass;
    const RadialKernel pair = GaussianKernel{-v0, 1.0 / (r0 * r0)};
    sys.cfg.v12 = {pair};
    sys.cfg.v13 = {pair};
    sys.cfg.v23 = {pair};
    sys.cfg.three_body = {GaussianKernel{w0, 1.0 / (rho0 * rho0)}};
    sys.a_low = 4.0;
    sys.a_high = 60.0;
  } else if (name == "bench-linear3b") {
    // attractive linear three-body force, used for timing comparisons
    sys.cfg.three_body = {PowerKernel{0.5, 1.0}};
    sys.a_low = 0.5;
    sys.a_high = 8.0;
  } else {
    throw std::invalid_argument("named_system: unknown system '" + name + "'");
  }
  return sys;
}

inline std::vector<std::string> named_system_list() {
  return {"gauss3b", "coulomb3b", "coulomb-linear", "helium-trimer", "bench-linear3b"};
}

}  // namespace obe
