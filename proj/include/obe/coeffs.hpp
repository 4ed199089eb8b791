#pragma once

// Brody-Moshinsky brackets at arbitrary angle and hyperspherical
// coefficients <n_x n_y | N K>_{l_x l_y}, plus the on-disk coefficient cache.
//
// Brackets are generated as exp(beta * G) on each (Q, L) block, where G is
// the block matrix of the rotation generator a.b+ - a+.b. The generator is
// angle-independent, so it is cached and only the exponential is recomputed
// when the angle changes. This construction makes orthogonality and the
// composition rule M(b1) M(b2) = M(b1 + b2) hold by construction.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <zlib.h>

#include "obe/channels.hpp"
#include "obe/specfn.hpp"
#include "obe/talmi.hpp"

namespace obe {

namespace detail {

// int r^3 dr R_{n'l'} R_{nl}, cached (needed with |l'-l| = 1).
inline double radial_r_element(int n1, int l1, int n2, int l2) {
  static std::map<std::uint64_t, double> cache;
  static std::mutex mtx;
  const std::uint64_t key = channel_key(n1, l1, n2, l2);
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const double v = radial_r_element_exact(n1, l1, n2, l2);
  return cache.emplace(key, v).first->second;
}

// <n' l' m' | x_mu | n l m> by Wigner-Eckart on the rank-1 position tensor.
inline double x_component_element(int n1, int l1, int m1, int n2, int l2, int m2, int mu) {
  if (m1 != m2 + mu || std::abs(l1 - l2) != 1) return 0.0;
  const double ang = clebsch_gordan(l2, m2, 1, mu, l1, m1) *
                     std::sqrt((2.0 * l2 + 1.0) / (2.0 * l1 + 1.0)) *
                     clebsch_gordan(l2, 0, 1, 0, l1, 0);
  if (ang == 0.0) return 0.0;
  return ang * radial_r_element(n1, l1, n2, l2);
}

}  // namespace detail

// Block matrix of the rotation generator a.b+ - a+.b in the coupled basis.
// Antisymmetric; exp(beta * G) gives the bracket table.
inline Eigen::MatrixXd bm_generator_block(const QLBlock& block) {
  const int s = int(block.states.size());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(s, s);
  const int L = block.L;
  for (int r = 0; r < s; ++r) {
    const ChannelState& br = block.states[r];
    for (int c = 0; c < s; ++c) {
      const ChannelState& kt = block.states[c];
      const int dqx = (2 * br.nx + br.lx) - (2 * kt.nx + kt.lx);
      if (std::abs(dqx) != 1) continue;
      const double sign = (dqx == -1) ? 1.0 : -1.0;  // a.b+ vs -a+.b
      double acc = 0.0;
      for (int mx = -kt.lx; mx <= kt.lx; ++mx) {
        const int my = -mx;
        if (std::abs(my) > kt.ly) continue;
        const double cgk = clebsch_gordan(kt.lx, mx, kt.ly, my, L, 0);
        if (cgk == 0.0) continue;
        for (int mu = -1; mu <= 1; ++mu) {
          const int mxp = mx + mu, myp = -mxp;
          if (std::abs(mxp) > br.lx || std::abs(myp) > br.ly) continue;
          const double cgb = clebsch_gordan(br.lx, mxp, br.ly, myp, L, 0);
          if (cgb == 0.0) continue;
          const double xe = detail::x_component_element(br.nx, br.lx, mxp, kt.nx, kt.lx, mx, mu);
          if (xe == 0.0) continue;
          const double ye = detail::x_component_element(br.ny, br.ly, myp, kt.ny, kt.ly, my, -mu);
          if (ye == 0.0) continue;
          const double musign = (mu == 0) ? 1.0 : -1.0;
          acc += cgb * cgk * musign * 2.0 * xe * ye;
        }
      }
      g(r, c) = sign * acc;
    }
  }
  return 0.5 * (g - g.transpose());  // kill roundoff asymmetry
}

namespace detail {

inline const Eigen::MatrixXd& cached_bm_generator(int Q, int L) {
  static std::map<std::pair<int, int>, Eigen::MatrixXd> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find({Q, L});
  if (it != cache.end()) return it->second;
  return cache.emplace(std::make_pair(Q, L), bm_generator_block(make_ql_block(Q, L))).first->second;
}

}  // namespace detail

// Bracket matrix M with M[row, col] = <row; L | col; L>_beta, i.e. column
// `col` holds the expansion of the rotated state over unrotated ones.
inline Eigen::MatrixXd brody_moshinsky(const QLBlock& block, double beta) {
  const Eigen::MatrixXd& g = detail::cached_bm_generator(block.Q, block.L);
  if (g.rows() == 0 || beta == 0.0) return Eigen::MatrixXd::Identity(g.rows(), g.cols());
  return (beta * g).exp();
}

// Per-angle bracket cache for one solver pass. Not thread-safe; use one
// instance per thread.
class BMTables {
 public:
  explicit BMTables(double beta) : beta_(beta) {}

  double beta() const { return beta_; }

  const QLBlock& block(int Q, int L) { return entry(Q, L).first; }
  const Eigen::MatrixXd& matrix(int Q, int L) { return entry(Q, L).second; }

 private:
  std::pair<QLBlock, Eigen::MatrixXd>& entry(int Q, int L) {
    auto it = cache_.find({Q, L});
    if (it != cache_.end()) return it->second;
    QLBlock b = make_ql_block(Q, L);
    Eigen::MatrixXd m = brody_moshinsky(b, beta_);
    return cache_.emplace(std::make_pair(Q, L), std::make_pair(std::move(b), std::move(m)))
        .first->second;
  }

  double beta_;
  std::map<std::pair<int, int>, std::pair<QLBlock, Eigen::MatrixXd>> cache_;
};

// ---------------------------------------------------------------------------
// Hyperspherical coefficients
// ---------------------------------------------------------------------------

// <n_x n_y | N K>_{l_x l_y}: overlap between a coupled two-oscillator state
// and a hyperspherical oscillator state, by the closed quadruple sum with all
// gamma ratios in log space. Returns 0 when 2N+K != Q or K < l_x+l_y or
// K - l_x - l_y is odd.
inline double hyperspherical_coefficient(int nx, int lx, int ny, int ly, int N, int K) {
  const int Q = 2 * nx + lx + 2 * ny + ly;
  if (2 * N + K != Q) return 0.0;
  if (K < lx + ly || (K - lx - ly) % 2 != 0) return 0.0;
  const int n = (K - lx - ly) / 2;

  // Quad precision throughout: the alternating quadruple sum cancels down
  // from terms of order 10^(Q/2), which double cannot absorb at large Q.
  using detail::f128;
  using detail::binom_half_f128;
  using detail::factorial_f128;
  using detail::gamma_half;

  const f128 nk2 = 2 * factorial_f128(n) * f128(K + 2) * factorial_f128(n + lx + ly + 1) /
                   (gamma_half(2 * n + 2 * lx + 3) * gamma_half(2 * n + 2 * ly + 3));
  const f128 c2 = nk2 * 8 * factorial_f128(nx) * factorial_f128(ny) * factorial_f128(N) /
                  (gamma_half(2 * nx + 2 * lx + 3) * gamma_half(2 * ny + 2 * ly + 3) *
                   gamma_half(2 * (K + N + 3)));
  const f128 c0 = detail::sqrt_f128(c2) / 4;

  f128 sum = 0;
  for (int s = 0; s <= N; ++s) {
    const f128 ts = c0 * factorial_f128(N + K + 2) /
                    (factorial_f128(N - s) * factorial_f128(K + s + 2) * factorial_f128(s));
    for (int m = 0; m <= n; ++m) {
      const f128 tm =
          ts * binom_half_f128(2 * n + 2 * ly + 1, n - m) * binom_half_f128(2 * n + 2 * lx + 1, m);
      for (int i = 0; i <= nx; ++i) {
        const f128 ti =
            tm * binom_half_f128(2 * nx + 2 * lx + 1, nx - i) / factorial_f128(i);
        for (int j = 0; j <= ny; ++j) {
          const f128 tj =
              ti * binom_half_f128(2 * ny + 2 * ly + 1, ny - j) / factorial_f128(j);
          const f128 g = gamma_half(lx + ly + K + 6 + 2 * (i + j + s)) *
                         gamma_half(2 * (lx + i + n - m) + 3) *
                         gamma_half(2 * (ly + j + m) + 3) /
                         factorial_f128(lx + ly + n + j + i + 2);
          const int sgn = ((s + n - m + i + j) % 2 == 0) ? 1 : -1;
          sum += sgn * tj * g;
        }
      }
    }
  }
  return double(sum);
}

struct HyperEntry {
  int N = 0, K = 0;
  double c = 0.0;
};

// Angle- and parameter-free coefficient table over all channels with
// Q <= qmax (independent of L).
struct HyperTable {
  int qmax = -1;
  std::unordered_map<std::uint64_t, std::vector<HyperEntry>> channels;

  const std::vector<HyperEntry>& at(int nx, int lx, int ny, int ly) const {
    auto it = channels.find(channel_key(nx, lx, ny, ly));
    if (it == channels.end()) {
      std::ostringstream os;
      os << "HyperTable: missing channel (" << nx << "," << lx << "," << ny << "," << ly
         << "); rebuild the cache with a larger qmax";
      throw std::out_of_range(os.str());
    }
    return it->second;
  }
};

inline HyperTable build_hyper_table(int qmax) {
  HyperTable t;
  t.qmax = qmax;
  for (int lx = 0; lx <= qmax; ++lx)
    for (int ly = 0; ly + lx <= qmax; ++ly)
      for (int nx = 0; 2 * nx + lx + ly <= qmax; ++nx)
        for (int ny = 0; 2 * nx + 2 * ny + lx + ly <= qmax; ++ny) {
          const int Q = 2 * nx + lx + 2 * ny + ly;
          std::vector<HyperEntry> entries;
          for (int K = lx + ly; K <= Q; K += 2) {
            const int N = (Q - K) / 2;
            entries.push_back({N, K, hyperspherical_coefficient(nx, lx, ny, ly, N, K)});
          }
          t.channels.emplace(channel_key(nx, lx, ny, ly), std::move(entries));
        }
  return t;
}

// Largest |sum_k c_k^2 - 1| over all channels.
inline double hyper_table_normalization_residual(const HyperTable& t) {
  double worst = 0.0;
  for (const auto& [key, entries] : t.channels) {
    (void)key;
    double s = 0.0;
    for (const HyperEntry& e : entries) s += e.c * e.c;
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Persisted coefficient tables
// ---------------------------------------------------------------------------

// Hyperradial B-coefficient vectors B(N1, K+3/2; N2, K+3/2; p), indexed by
// k = p - (K + 3/2).
struct BHyperTable {
  std::unordered_map<std::uint64_t, std::vector<double>> entries;

  static std::uint64_t key(int n1, int n2, int K) {
    return std::uint64_t(n1) | std::uint64_t(n2) << 20 | std::uint64_t(K) << 40;
  }

  const std::vector<double>* find(int n1, int n2, int K) const {
    auto it = entries.find(key(n1, n2, K));
    return it == entries.end() ? nullptr : &it->second;
  }
};

struct CoefficientTables {
  int qmax = -1;
  HyperTable hyper;
  BHyperTable bhyper;
  std::uint32_t checksum = 0;  // payload CRC, filled by save/load
};

inline CoefficientTables build_tables(int qmax) {
  CoefficientTables t;
  t.qmax = qmax;
  t.hyper = build_hyper_table(qmax);
  for (int K = 0; K <= qmax; ++K)
    for (int n1 = 0; 2 * n1 + K <= qmax; ++n1)
      for (int n2 = 0; 2 * n2 + K <= qmax; ++n2)
        t.bhyper.entries.emplace(BHyperTable::key(n1, n2, K),
                                 b_coefficients(n1, K + 1.5, n2, K + 1.5));
  return t;
}

constexpr int kTablesFormatVersion = 1;

namespace detail {

template <class T>
void put_raw(std::string& buf, const T& v) {
  buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get_raw(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size())
    throw std::runtime_error("coefficient table file truncated");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace detail

// Little-endian fixed-width records behind a small text header carrying the
// format version, qmax, record counts and a CRC32 of the payload.
inline void save_tables(const CoefficientTables& t, const std::string& path) {
  std::string payload;
  std::uint64_t hyper_records = 0;
  for (const auto& [key, entries] : t.hyper.channels) {
    const int nx = int(key & 0xffff), lx = int((key >> 16) & 0xffff);
    const int ny = int((key >> 32) & 0xffff), ly = int((key >> 48) & 0xffff);
    for (const HyperEntry& e : entries) {
      detail::put_raw<std::int32_t>(payload, nx);
      detail::put_raw<std::int32_t>(payload, lx);
      detail::put_raw<std::int32_t>(payload, ny);
      detail::put_raw<std::int32_t>(payload, ly);
      detail::put_raw<std::int32_t>(payload, e.N);
      detail::put_raw<std::int32_t>(payload, e.K);
      detail::put_raw<double>(payload, e.c);
      ++hyper_records;
    }
  }
  std::uint64_t b_records = 0;
  for (const auto& [key, vec] : t.bhyper.entries) {
    detail::put_raw<std::int32_t>(payload, int(key & 0xfffff));
    detail::put_raw<std::int32_t>(payload, int((key >> 20) & 0xfffff));
    detail::put_raw<std::int32_t>(payload, int((key >> 40) & 0xfffff));
    detail::put_raw<std::int32_t>(payload, int(vec.size()));
    for (double v : vec) detail::put_raw<double>(payload, v);
    ++b_records;
  }
  const std::uint32_t crc =
      ::crc32(0, reinterpret_cast<const Bytef*>(payload.data()), uInt(payload.size()));

  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_tables: cannot open " + path);
  f << "OBE-TABLES " << kTablesFormatVersion << "\n"
    << "qmax " << t.qmax << "\n"
    << "hyper " << hyper_records << "\n"
    << "bhyper " << b_records << "\n"
    << "crc32 " << std::hex << crc << std::dec << "\n";
  f.write(payload.data(), std::streamsize(payload.size()));
  if (!f) throw std::runtime_error("save_tables: write failed for " + path);
}

inline CoefficientTables load_tables(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_tables: cannot open " + path);
  std::string magic;
  int version = -1;
  f >> magic >> version;
  if (magic != "OBE-TABLES") throw std::runtime_error("load_tables: not a coefficient table file");
  if (version != kTablesFormatVersion) {
    std::ostringstream os;
    os << "load_tables: file version " << version << " unsupported (expected "
       << kTablesFormatVersion << ")";
    throw std::runtime_error(os.str());
  }
  std::string tag;
  int qmax = -1;
  std::uint64_t hyper_records = 0, b_records = 0;
  std::uint32_t crc_expected = 0;
  f >> tag >> qmax;
  if (tag != "qmax") throw std::runtime_error("load_tables: malformed header (qmax)");
  f >> tag >> hyper_records;
  if (tag != "hyper") throw std::runtime_error("load_tables: malformed header (hyper)");
  f >> tag >> b_records;
  if (tag != "bhyper") throw std::runtime_error("load_tables: malformed header (bhyper)");
  f >> tag >> std::hex >> crc_expected >> std::dec;
  if (tag != "crc32") throw std::runtime_error("load_tables: malformed header (crc32)");
  f.ignore(1);  // newline before payload

  std::string payload((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  const std::uint32_t crc =
      ::crc32(0, reinterpret_cast<const Bytef*>(payload.data()), uInt(payload.size()));
  if (crc != crc_expected) throw std::runtime_error("load_tables: checksum mismatch");

  CoefficientTables t;
  t.qmax = qmax;
  t.hyper.qmax = qmax;
  t.checksum = crc;
  std::size_t pos = 0;
  for (std::uint64_t r = 0; r < hyper_records; ++r) {
    const int nx = detail::get_raw<std::int32_t>(payload, pos);
    const int lx = detail::get_raw<std::int32_t>(payload, pos);
    const int ny = detail::get_raw<std::int32_t>(payload, pos);
    const int ly = detail::get_raw<std::int32_t>(payload, pos);
    HyperEntry e;
    e.N = detail::get_raw<std::int32_t>(payload, pos);
    e.K = detail::get_raw<std::int32_t>(payload, pos);
    e.c = detail::get_raw<double>(payload, pos);
    t.hyper.channels[channel_key(nx, lx, ny, ly)].push_back(e);
  }
  for (std::uint64_t r = 0; r < b_records; ++r) {
    const int n1 = detail::get_raw<std::int32_t>(payload, pos);
    const int n2 = detail::get_raw<std::int32_t>(payload, pos);
    const int K = detail::get_raw<std::int32_t>(payload, pos);
    const int nk = detail::get_raw<std::int32_t>(payload, pos);
    std::vector<double> vec(nk);
    for (int i = 0; i < nk; ++i) vec[i] = detail::get_raw<double>(payload, pos);
    t.bhyper.entries.emplace(BHyperTable::key(n1, n2, K), std::move(vec));
  }
  if (pos != payload.size()) throw std::runtime_error("load_tables: trailing bytes in payload");
  return t;
}

}  // namespace obe
