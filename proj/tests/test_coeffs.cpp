#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "obe/basis.hpp"
#include "obe/coeffs.hpp"
#include "oracles.hpp"

using namespace obe;

TEST_CASE("bracket blocks are orthogonal and compose over angles") {
  for (int L : {0, 1, 2, 4}) {
    for (int Q = 0; Q <= 12; ++Q) {
      const QLBlock blk = make_ql_block(Q, L);
      if (blk.states.empty()) continue;
      const int n = int(blk.states.size());
      const Eigen::MatrixXd m1 = brody_moshinsky(blk, 0.37);
      const Eigen::MatrixXd m2 = brody_moshinsky(blk, -1.1);
      const Eigen::MatrixXd m12 = brody_moshinsky(blk, 0.37 - 1.1);
      CHECK((m1.transpose() * m1 - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
            1e-10);
      CHECK((m1 * m2 - m12).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("bracket at zero angle is the identity") {
  const QLBlock blk = make_ql_block(6, 2);
  const int n = int(blk.states.size());
  CHECK((brody_moshinsky(blk, 0.0) - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("brackets match the 6-D rotated-overlap oracle on small blocks") {
  // M[row, col] must equal the overlap of state row with state col evaluated
  // at (cos b x + sin b y, -sin b x + cos b y).
  const double beta = 0.6;
  const double cb = std::cos(beta), sb = std::sin(beta);
  for (int L : {0, 1, 2}) {
    for (int Q = L; Q <= 4; ++Q) {
      const QLBlock blk = make_ql_block(Q, L);
      if (blk.states.empty()) continue;
      const int n = int(blk.states.size());
      const Eigen::MatrixXd m = brody_moshinsky(blk, beta);

      auto grid = oracle::GridTable::build(8, 2 * n, [&](int s, const oracle::Vec3& x,
                                                         const oracle::Vec3& y) {
        if (s < n) return oracle::bare_channel(blk.states[s], 0, x, y);
        oracle::Vec3 xt, yt;
        for (int c = 0; c < 3; ++c) {
          xt[c] = cb * x[c] + sb * y[c];
          yt[c] = -sb * x[c] + cb * y[c];
        }
        return oracle::bare_channel(blk.states[s - n], 0, xt, yt);
      });
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
          const oracle::cplx o = grid.overlap(r, n + c);
          CHECK(std::abs(o.imag()) < 1e-10);
          CHECK(o.real() == doctest::Approx(m(r, c)).epsilon(1e-8).scale(1.0));
        }
    }
  }
}

TEST_CASE("particle-2/3 permutation blocks are involutive with unit spectrum") {
  BMTables bm(M_PI / 6.0);
  for (int L : {0, 1, 2, 3}) {
    for (int Q = 0; Q <= 10; ++Q) {
      const QLBlock& blk = bm.block(Q, L);
      if (blk.states.empty()) continue;
      const int n = int(blk.states.size());
      const Eigen::MatrixXd p = p23_matrix(blk, bm.matrix(Q, L));
      CHECK((p * p - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(p).eigenvalues();
      for (int i = 0; i < n; ++i) CHECK(std::abs(std::abs(ev[i]) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("hyperspherical coefficients are normalized for every channel") {
  const HyperTable t = build_hyper_table(20);
  CHECK(hyper_table_normalization_residual(t) < 1e-10);
}

TEST_CASE("hyperspherical coefficients match the 6-D overlap oracle") {
  for (int Q = 0; Q <= 4; ++Q) {
    for (int lx = 0; lx <= Q; ++lx) {
      for (int ly = 0; lx + ly <= Q; ++ly) {
        if ((Q - lx - ly) % 2 != 0) continue;
        const int L = lx + ly;  // stretched coupling is always allowed
        for (int nx = 0; 2 * nx <= Q - lx - ly; ++nx) {
          const int ny = (Q - lx - ly - 2 * nx) / 2;
          const ChannelState cs{nx, lx, ny, ly, L};
          for (int K = lx + ly; K <= Q; K += 2) {
            const int N = (Q - K) / 2;
            const double closed = hyperspherical_coefficient(nx, lx, ny, ly, N, K);
            const double direct = oracle::overlap_6d(
                [&](const oracle::Vec3& x, const oracle::Vec3& y) {
                  return std::real(std::conj(oracle::bare_hyper(N, K, lx, ly, L, 0, x, y)) *
                                   oracle::bare_channel(cs, 0, x, y));
                },
                8);
            CHECK(closed == doctest::Approx(direct).epsilon(1e-8).scale(1.0));
          }
        }
      }
    }
  }
}

TEST_CASE("hyperspherical coefficient selection rules") {
  CHECK(hyperspherical_coefficient(1, 0, 1, 0, 0, 2) == 0.0);  // 2N + K != Q
  CHECK(hyperspherical_coefficient(0, 1, 0, 1, 1, 0) == 0.0);  // K < lx + ly
  CHECK(hyperspherical_coefficient(1, 0, 0, 0, 1, 0) != 0.0);
}

TEST_CASE("two-channel block at Q=2 is an orthogonal mixing matrix") {
  // Channels (1,0,0,0) and (0,0,1,0) both expand over (N,K) in {(1,0),(0,2)}.
  const double a11 = hyperspherical_coefficient(1, 0, 0, 0, 1, 0);
  const double a12 = hyperspherical_coefficient(1, 0, 0, 0, 0, 2);
  const double a21 = hyperspherical_coefficient(0, 0, 1, 0, 1, 0);
  const double a22 = hyperspherical_coefficient(0, 0, 1, 0, 0, 2);
  CHECK(a11 * a11 + a12 * a12 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a21 * a21 + a22 * a22 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(a11 * a21 + a12 * a22 == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("coefficient tables survive a save/load round trip unchanged") {
  const CoefficientTables t = build_tables(6);
  const std::string path = "tables_roundtrip.tab";
  save_tables(t, path);
  const CoefficientTables u = load_tables(path);
  CHECK(u.qmax == t.qmax);
  CHECK(u.checksum != 0);
  REQUIRE(u.hyper.channels.size() == t.hyper.channels.size());
  for (const auto& [key, entries] : t.hyper.channels) {
    auto it = u.hyper.channels.find(key);
    REQUIRE(it != u.hyper.channels.end());
    REQUIRE(it->second.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      CHECK(it->second[i].N == entries[i].N);
      CHECK(it->second[i].K == entries[i].K);
      CHECK(it->second[i].c == entries[i].c);  // bit-exact
    }
  }
  REQUIRE(u.bhyper.entries.size() == t.bhyper.entries.size());
  for (const auto& [key, vec] : t.bhyper.entries) {
    auto it = u.bhyper.entries.find(key);
    REQUIRE(it != u.bhyper.entries.end());
    CHECK(it->second == vec);
  }
  std::remove(path.c_str());
}

TEST_CASE("table loader rejects corrupted, foreign and truncated files") {
  const CoefficientTables t = build_tables(4);
  const std::string path = "tables_integrity.tab";
  save_tables(t, path);

  auto slurp = [&]() {
    std::ifstream f(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  };
  auto spit = [&](const std::string& data) {
    std::ofstream f(path, std::ios::binary);
    f.write(data.data(), std::streamsize(data.size()));
  };
  const std::string original = slurp();

  SUBCASE("payload corruption breaks the checksum") {
    std::string bad = original;
    bad[bad.size() - 10] ^= 0x5a;
    spit(bad);
    CHECK_THROWS_WITH_AS(load_tables(path), "load_tables: checksum mismatch",
                         std::runtime_error);
  }
  SUBCASE("unsupported format version is refused") {
    std::string bad = original;
    bad.replace(bad.find(" 1\n"), 3, " 9\n");
    spit(bad);
    CHECK_THROWS_AS(load_tables(path), std::runtime_error);
  }
  SUBCASE("foreign magic is refused") {
    std::string bad = original;
    bad[0] = 'X';
    spit(bad);
    CHECK_THROWS_AS(load_tables(path), std::runtime_error);
  }
  SUBCASE("truncated payload is refused") {
    spit(original.substr(0, original.size() - 7));
    CHECK_THROWS_AS(load_tables(path), std::runtime_error);
  }
  SUBCASE("missing file is refused") {
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_tables(path), std::runtime_error);
  }
  std::remove(path.c_str());
}

TEST_CASE("BMTables caches blocks consistently with direct construction") {
  BMTables bm(0.8);
  const Eigen::MatrixXd& m = bm.matrix(5, 1);
  const Eigen::MatrixXd direct = brody_moshinsky(make_ql_block(5, 1), 0.8);
  CHECK((m - direct).cwiseAbs().maxCoeff() == 0.0);
  CHECK(bm.beta() == 0.8);
}
