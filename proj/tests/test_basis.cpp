#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "obe/basis.hpp"

using namespace obe;

namespace {

SectorSpec sector(int L, int parity, Exchange ex, int sigma, int qmax) {
  SectorSpec s;
  s.L = L;
  s.parity = parity;
  s.exchange = ex;
  s.sigma = sigma;
  s.qmax = qmax;
  return s;
}

}  // namespace

TEST_CASE("channel enumeration respects quanta, parity and angular selection") {
  const SectorSpec s = sector(1, -1, Exchange::none, +1, 7);
  const std::vector<ChannelState> ch = enumerate_channels(s);
  CHECK(!ch.empty());
  for (const ChannelState& c : ch) {
    CHECK(c.L == 1);
    CHECK(c.quanta() <= 7);
    CHECK(c.quanta() % 2 == 1);
    CHECK((c.lx + c.ly) % 2 == 1);
    CHECK(std::abs(c.lx - c.ly) <= 1);
    CHECK(c.lx + c.ly >= 1);
  }
  CHECK_THROWS_AS(enumerate_channels(sector(0, +1, Exchange::none, +1, -1)), std::domain_error);
}

TEST_CASE("two-identical-particle sectors restrict the lx parity") {
  const std::vector<ChannelState> even =
      enumerate_channels(sector(0, +1, Exchange::two_identical, +1, 8));
  for (const ChannelState& c : even) CHECK(c.lx % 2 == 0);
  const std::vector<ChannelState> odd =
      enumerate_channels(sector(0, +1, Exchange::two_identical, -1, 8));
  for (const ChannelState& c : odd) CHECK(c.lx % 2 == 1);
  // Together they tile the unrestricted sector.
  const std::vector<ChannelState> all = enumerate_channels(sector(0, +1, Exchange::none, +1, 8));
  CHECK(even.size() + odd.size() == all.size());
}

TEST_CASE("non-symmetrized transforms are the identity") {
  for (Exchange ex : {Exchange::none, Exchange::two_identical}) {
    const SymmetrizedBasis b = symmetrize(sector(2, +1, ex, +1, 6));
    CHECK(b.size() == int(b.channels.size()));
    CHECK((b.transform - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() ==
          0.0);
  }
}

TEST_CASE("three-boson symmetric basis dimensions") {
  // Dimension of the fully symmetric L=0+ space per quanta cutoff.
  const int expected[] = {7, 11, 16, 23, 31, 41, 53, 67, 83, 102};
  for (int i = 0; i < 10; ++i) {
    const int qmax = 6 + 2 * i;
    const SymmetrizedBasis b = symmetrize(sector(0, +1, Exchange::three_identical, +1, qmax));
    CHECK(b.size() == expected[i]);
  }
}

TEST_CASE("symmetrized transforms have orthonormal columns") {
  for (int L : {0, 1, 2, 3}) {
    for (int parity : {+1, -1}) {
      const SymmetrizedBasis b = symmetrize(sector(L, parity, Exchange::three_identical, +1, 12));
      if (b.size() == 0) continue;
      const Eigen::MatrixXd g = b.transform.transpose() * b.transform;
      CHECK((g - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("kept columns are eigenvectors of the full-block permutation") {
  // Embed each symmetry-adapted column into the full (Q, L) block (zeros on
  // the lx-odd states) and verify P23 v = sigma v there, not just in the
  // restricted subspace.
  BMTables bm(M_PI / 6.0);
  for (int L : {0, 2}) {
    const SectorSpec s = sector(L, +1, Exchange::three_identical, +1, 14);
    const SymmetrizedBasis b = symmetrize(s);
    REQUIRE(b.size() > 0);
    for (int col = 0; col < b.size(); ++col) {
      // locate the (single) Q block this column lives on
      int q = -1;
      for (int i = 0; i < int(b.channels.size()); ++i)
        if (b.transform(i, col) != 0.0) {
          REQUIRE((q == -1 || q == b.channels[i].quanta()));
          q = b.channels[i].quanta();
        }
      REQUIRE(q >= 0);
      const QLBlock& blk = bm.block(q, L);
      const Eigen::MatrixXd p = p23_matrix(blk, bm.matrix(q, L));
      Eigen::VectorXd v = Eigen::VectorXd::Zero(blk.states.size());
      for (int i = 0; i < int(b.channels.size()); ++i)
        if (b.transform(i, col) != 0.0 && b.channels[i].quanta() == q)
          v[blk.index_of(b.channels[i])] = b.transform(i, col);
      CHECK((p * v - s.sigma * v).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("antisymmetric sector selects odd lx and satisfies the permutation") {
  BMTables bm(M_PI / 6.0);
  const SectorSpec s = sector(0, +1, Exchange::three_identical, -1, 12);
  const SymmetrizedBasis b = symmetrize(s);
  CHECK(b.size() > 0);
  for (const ChannelState& c : b.channels) CHECK(c.lx % 2 == 1);
  // Same full-block eigenvector property with sigma = -1.
  for (int col = 0; col < b.size(); ++col) {
    int q = -1;
    for (int i = 0; i < int(b.channels.size()); ++i)
      if (b.transform(i, col) != 0.0) q = b.channels[i].quanta();
    const QLBlock& blk = bm.block(q, 0);
    const Eigen::MatrixXd p = p23_matrix(blk, bm.matrix(q, 0));
    Eigen::VectorXd v = Eigen::VectorXd::Zero(blk.states.size());
    for (int i = 0; i < int(b.channels.size()); ++i)
      if (b.transform(i, col) != 0.0 && b.channels[i].quanta() == q)
        v[blk.index_of(b.channels[i])] = b.transform(i, col);
    CHECK((p * v + v).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("p23_matrix validates its inputs") {
  BMTables bm(M_PI / 6.0);
  const QLBlock blk = make_ql_block(4, 0);
  CHECK_THROWS_AS(p23_matrix(blk, bm.matrix(6, 0)), std::invalid_argument);
}
