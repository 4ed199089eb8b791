#pragma once

// Sector enumeration and exchange-symmetry adaptation.
//
// Parity is fixed by the parity of Q, P12 symmetry by the parity of l_x.
// Full (anti)symmetrization under all particle exchanges additionally
// requires, per (Q, L) block, the eigenvectors of the particle-2/3
// permutation restricted to the l_x-selected states. That restricted matrix
// is not an involution: its spectrum is exactly {sigma, -sigma/2}, the
// sigma-eigenvectors being the fully (anti)symmetric states. The unrestricted
// block permutation matrix is an involution with eigenvalues +-1.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "obe/channels.hpp"
#include "obe/coeffs.hpp"

namespace obe {

enum class Exchange { none, two_identical, three_identical };

struct SectorSpec {
  int L = 0;
  int parity = +1;        // +1 or -1
  Exchange exchange = Exchange::none;
  int sigma = +1;         // exchange eigenvalue for identical particles
  int qmax = 0;

  bool selects_lx_parity() const { return exchange != Exchange::none; }
  // P12 eigenvalue (-1)^{l_x} must equal sigma.
  bool admits(const ChannelState& s) const {
    if (s.L != L || s.quanta() > qmax || s.parity() != parity) return false;
    if (selects_lx_parity() && ((s.lx % 2 == 0) ? +1 : -1) != sigma) return false;
    return true;
  }
};

// All admitted channel states, ordered by Q then block order.
inline std::vector<ChannelState> enumerate_channels(const SectorSpec& sector) {
  if (sector.qmax < 0) throw std::domain_error("enumerate_channels: negative qmax");
  std::vector<ChannelState> out;
  for (int Q = 0; Q <= sector.qmax; ++Q) {
    if ((Q % 2 == 0 ? +1 : -1) != sector.parity) continue;
    for (const ChannelState& s : make_ql_block(Q, sector.L).states)
      if (sector.admits(s)) out.push_back(s);
  }
  return out;
}

// Matrix of the particle-2/3 permutation on a full (Q, L) block, from the
// pi/6 bracket table (valid for b = sqrt(3) a / 2).
inline Eigen::MatrixXd p23_matrix(const QLBlock& block, const Eigen::MatrixXd& bm_pi6) {
  const int s = int(block.states.size());
  if (bm_pi6.rows() != s || bm_pi6.cols() != s)
    throw std::invalid_argument("p23_matrix: bracket table does not match block");
  Eigen::MatrixXd p(s, s);
  for (int r = 0; r < s; ++r) {
    const ChannelState& br = block.states[r];
    const ChannelState swapped{br.ny, br.ly, br.nx, br.lx, br.L};
    const int rs = block.index_of(swapped);
    const double phase = ((br.lx + br.ly + block.L) % 2 == 0) ? 1.0 : -1.0;
    for (int c = 0; c < s; ++c) p(r, c) = phase * bm_pi6(rs, c);
  }
  return p;
}

struct SymmetrizedBasis {
  SectorSpec sector;
  std::vector<ChannelState> channels;  // l_x-selected channel states
  Eigen::MatrixXd transform;           // channels x symmetry-adapted states

  int size() const { return int(transform.cols()); }
};

namespace detail {

// Deterministic modified Gram-Schmidt over the selected eigenvector columns.
inline void orthonormalize_columns(Eigen::MatrixXd& m) {
  for (int c = 0; c < m.cols(); ++c) {
    for (int k = 0; k < c; ++k) m.col(c) -= m.col(k).dot(m.col(c)) * m.col(k);
    const double norm = m.col(c).norm();
    if (norm < 1e-8) throw std::runtime_error("orthonormalize_columns: degenerate columns");
    m.col(c) /= norm;
    // fix an overall sign: largest-magnitude entry positive
    int imax = 0;
    m.col(c).cwiseAbs().maxCoeff(&imax);
    if (m(imax, c) < 0.0) m.col(c) = -m.col(c);
  }
}

}  // namespace detail

// Build the symmetry-adapted basis for a sector. For three identical
// particles this diagonalizes, per (Q, L) block, the permutation matrix
// restricted to the l_x-selected states and keeps the sigma-eigenvectors;
// otherwise the transform is the identity on the selected channels.
inline SymmetrizedBasis symmetrize(const SectorSpec& sector) {
  SymmetrizedBasis basis;
  basis.sector = sector;
  basis.channels = enumerate_channels(sector);
  const int nch = int(basis.channels.size());

  if (sector.exchange != Exchange::three_identical) {
    basis.transform = Eigen::MatrixXd::Identity(nch, nch);
    return basis;
  }

  BMTables bm(M_PI / 6.0);
  std::vector<Eigen::VectorXd> columns;
  std::vector<int> column_q;

  int offset = 0;  // position of the current block's selected states in `channels`
  for (int Q = 0; Q <= sector.qmax; ++Q) {
    if ((Q % 2 == 0 ? +1 : -1) != sector.parity) continue;
    const QLBlock& block = bm.block(Q, sector.L);
    if (block.states.empty()) continue;
    const Eigen::MatrixXd p_full = p23_matrix(block, bm.matrix(Q, sector.L));

    std::vector<int> sel;
    for (int i = 0; i < int(block.states.size()); ++i)
      if (sector.admits(block.states[i])) sel.push_back(i);
    if (sel.empty()) continue;

    Eigen::MatrixXd p(sel.size(), sel.size());
    for (std::size_t r = 0; r < sel.size(); ++r)
      for (std::size_t c = 0; c < sel.size(); ++c) p(r, c) = p_full(sel[r], sel[c]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
    std::vector<int> keep;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
      const double ev = es.eigenvalues()[i];
      if (std::abs(ev - sector.sigma) < 1e-6) {
        keep.push_back(i);
      } else if (std::abs(ev + 0.5 * sector.sigma) >= 1e-6) {
        throw std::runtime_error(
            "symmetrize: restricted permutation eigenvalue outside {sigma, -sigma/2}; "
            "bracket phase convention broken");
      }
    }
    if (!keep.empty()) {
      Eigen::MatrixXd vecs(sel.size(), keep.size());
      for (std::size_t c = 0; c < keep.size(); ++c) vecs.col(c) = es.eigenvectors().col(keep[c]);
      detail::orthonormalize_columns(vecs);
      for (int c = 0; c < vecs.cols(); ++c) {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(nch);
        for (std::size_t r = 0; r < sel.size(); ++r) full[offset + int(r)] = vecs(r, c);
        columns.push_back(std::move(full));
        column_q.push_back(Q);
      }
    }
    offset += int(sel.size());
  }

  basis.transform = Eigen::MatrixXd::Zero(nch, int(columns.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) basis.transform.col(int(c)) = columns[c];
  return basis;
}

}  // namespace obe
