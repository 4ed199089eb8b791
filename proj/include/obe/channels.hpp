#pragma once

// Channel states (n_x, l_x, n_y, l_y; L) of the coupled two-oscillator basis
// and their grouping into fixed-(Q, L) blocks.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace obe {

struct ChannelState {
  int nx = 0, lx = 0, ny = 0, ly = 0;
  int L = 0;

  int quanta() const { return 2 * nx + lx + 2 * ny + ly; }
  int parity() const { return (lx + ly) % 2 == 0 ? +1 : -1; }

  bool operator==(const ChannelState& o) const {
    return nx == o.nx && lx == o.lx && ny == o.ny && ly == o.ly && L == o.L;
  }
};

inline std::uint64_t channel_key(int nx, int lx, int ny, int ly) {
  return std::uint64_t(nx) | std::uint64_t(lx) << 16 | std::uint64_t(ny) << 32 |
         std::uint64_t(ly) << 48;
}

// All channel states with a given number of quanta and total orbital angular
// momentum, in deterministic (l_x, l_y, n_x) order.
struct QLBlock {
  int Q = 0, L = 0;
  std::vector<ChannelState> states;

  int index_of(const ChannelState& s) const {
    for (int i = 0; i < int(states.size()); ++i)
      if (states[i] == s) return i;
    throw std::out_of_range("QLBlock::index_of: state not in block");
  }
};

inline QLBlock make_ql_block(int Q, int L) {
  if (Q < 0 || L < 0) throw std::domain_error("make_ql_block: negative Q or L");
  QLBlock b;
  b.Q = Q;
  b.L = L;
  for (int lx = 0; lx <= Q; ++lx)
    for (int ly = 0; ly <= Q - lx; ++ly) {
      if (L < std::abs(lx - ly) || L > lx + ly) continue;
      if ((Q - lx - ly) % 2 != 0) continue;
      for (int nx = 0; 2 * nx <= Q - lx - ly; ++nx) {
        const int ny = (Q - lx - ly - 2 * nx) / 2;
        b.states.push_back({nx, lx, ny, ly, L});
      }
    }
  std::sort(b.states.begin(), b.states.end(), [](const ChannelState& a, const ChannelState& c) {
    if (a.lx != c.lx) return a.lx < c.lx;
    if (a.ly != c.ly) return a.ly < c.ly;
    return a.nx < c.nx;
  });
  return b;
}

}  // namespace obe
