#include "coherence/channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace coherence {

// ----------------------------------------------------------------- KrausSet

double KrausSet::completeness_residual(const std::vector<ComplexMatrix>& ops) {
  if (ops.empty()) {
    return 1.0;
  }
  const auto d = ops.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (const auto& k : ops) {
    sum += k.adjoint() * k;
  }
  return max_abs(sum - ComplexMatrix::Identity(d, d));
}

KrausSet KrausSet::from_operators(std::vector<ComplexMatrix> ops,
                                  double completeness_tol) {
  if (ops.empty()) {
    throw InvariantError("KrausSet: operator list is empty");
  }
  const auto d = ops.front().rows();
  if (d < 2) {
    throw InvariantError("KrausSet: dimension must be >= 2");
  }
  for (std::size_t n = 0; n < ops.size(); ++n) {
    if (ops[n].rows() != d || ops[n].cols() != d) {
      std::ostringstream msg;
      msg << "KrausSet: operator " << n << " is " << ops[n].rows() << "x"
          << ops[n].cols() << ", expected " << d << "x" << d;
      throw InvariantError(msg.str());
    }
  }
  const double residual = completeness_residual(ops);
  if (!(residual <= completeness_tol)) {
    std::ostringstream msg;
    msg << "KrausSet: completeness violated, max |sum K^dag K - I| = "
        << residual;
    throw IncompleteKrausError(msg.str(), residual);
  }
  return KrausSet(static_cast<int>(d), std::move(ops));
}

ComplexMatrix apply_kraus(const KrausSet& kraus, const ComplexMatrix& m) {
  if (m.rows() != kraus.dim() || m.cols() != kraus.dim()) {
    throw InvariantError("apply_channel: state dimension " +
                         std::to_string(m.rows()) +
                         " does not match channel dimension " +
                         std::to_string(kraus.dim()));
  }
  ComplexMatrix out = ComplexMatrix::Zero(m.rows(), m.cols());
  for (const auto& k : kraus.operators()) {
    out.noalias() += k * m * k.adjoint();
  }
  return out;
}

DensityMatrix apply_channel(const KrausSet& kraus, const DensityMatrix& rho) {
  ComplexMatrix out = apply_kraus(kraus, rho.matrix());
  out = 0.5 * (out + out.adjoint()).eval();
  StateTolerances tol;
  tol.trace = kCompletenessTol;
  tol.min_eigenvalue = -1e-9;
  return DensityMatrix::from_matrix(std::move(out), tol);
}

// ------------------------------------------------------------------- FSIO

void FsioChannel::validate(double tol) const {
  if (diagonals.empty()) {
    throw InvariantError("FsioChannel: no diagonal factors");
  }
  const int d = dim();
  for (std::size_t n = 0; n < diagonals.size(); ++n) {
    if (diagonals[n].size() != d) {
      throw InvariantError("FsioChannel: factor " + std::to_string(n) +
                           " has wrong length");
    }
  }
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (const auto& a : diagonals) {
      s += std::norm(a(i));
    }
    if (std::abs(s - 1.0) > tol) {
      std::ostringstream msg;
      msg << "FsioChannel: sum_n |a_" << i << i << "^(n)|^2 = " << s
          << " != 1";
      throw InvariantError(msg.str());
    }
  }
}

KrausSet fsio_to_kraus(const FsioChannel& ch) {
  ch.validate();
  const int d = ch.dim();
  std::vector<ComplexMatrix> ops;
  ops.reserve(ch.diagonals.size());
  for (const auto& a : ch.diagonals) {
    ComplexMatrix k = ComplexMatrix::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      k(ch.permutation[i], i) = a(i);
    }
    ops.push_back(std::move(k));
  }
  return KrausSet::from_operators(std::move(ops));
}

FsioChannel random_fsio(int d, int n_kraus, Rng& rng) {
  if (d < 2) {
    throw InvariantError("random_fsio: dimension must be >= 2");
  }
  if (n_kraus < 1) {
    throw InvariantError("random_fsio: need at least one Kraus operator");
  }
  FsioChannel ch{random_permutation(d, rng), {}};
  ch.diagonals.assign(static_cast<std::size_t>(n_kraus), ComplexVector(d));
  for (int i = 0; i < d; ++i) {
    ComplexVector v(n_kraus);
    for (int n = 0; n < n_kraus; ++n) {
      v(n) = rng.complex_normal();
    }
    v /= v.norm();
    for (int n = 0; n < n_kraus; ++n) {
      ch.diagonals[static_cast<std::size_t>(n)](i) = v(n);
    }
  }
  return ch;
}

FsioChannel random_fsio(int d, int n_kraus, RngSeed seed) {
  Rng rng(seed);
  return random_fsio(d, n_kraus, rng);
}

KrausSet random_fio_not_fsio(int d, int n_kraus, Rng& rng) {
  if (d < 2 || n_kraus < 2) {
    throw InvariantError("random_fio_not_fsio: need d >= 2 and n_kraus >= 2");
  }
  // Column map: a permutation with the last column folded onto column 0's row.
  std::vector<int> col_to_row = random_permutation(d, rng).map();
  col_to_row.back() = col_to_row.front();

  std::vector<ComplexMatrix> ops(static_cast<std::size_t>(n_kraus),
                                 ComplexMatrix::Zero(d, d));
  // Columns sharing a row need orthonormal factor vectors over n.
  for (int row = 0; row < d; ++row) {
    std::vector<int> group;
    for (int c = 0; c < d; ++c) {
      if (col_to_row[static_cast<std::size_t>(c)] == row) {
        group.push_back(c);
      }
    }
    if (group.empty()) {
      continue;
    }
    const ComplexMatrix u = random_unitary(n_kraus, rng);
    for (std::size_t g = 0; g < group.size(); ++g) {
      for (int n = 0; n < n_kraus; ++n) {
        ops[static_cast<std::size_t>(n)](row, group[g]) =
            u(n, static_cast<Eigen::Index>(g));
      }
    }
  }
  return KrausSet::from_operators(std::move(ops));
}

KrausSet random_sio_mixture(int d, int n_parts, Rng& rng) {
  if (n_parts < 1) {
    throw InvariantError("random_sio_mixture: need at least one part");
  }
  std::vector<double> w(static_cast<std::size_t>(n_parts));
  double total = 0.0;
  for (auto& x : w) {
    x = rng.uniform() + 1e-3;
    total += x;
  }
  std::vector<ComplexMatrix> ops;
  for (int part = 0; part < n_parts; ++part) {
    const KrausSet piece = fsio_to_kraus(random_fsio(d, rng.uniform_int(1, 2), rng));
    const double scale = std::sqrt(w[static_cast<std::size_t>(part)] / total);
    for (const auto& k : piece.operators()) {
      ops.push_back(scale * k);
    }
  }
  return KrausSet::from_operators(std::move(ops));
}

KrausSet gad_channel(double p, double eps) {
  if (!(p >= 0.0 && p <= 1.0) || !(eps >= 0.0 && eps <= 1.0)) {
    throw InvariantError("gad_channel: p and eps must lie in [0, 1]");
  }
  const double sp = std::sqrt(p);
  const double sq = std::sqrt(1.0 - p);
  const double damp = std::sqrt(1.0 - eps);
  const double jump = std::sqrt(eps);
  ComplexMatrix k0 = ComplexMatrix::Zero(2, 2);
  k0(0, 0) = sp;
  k0(1, 1) = sp * damp;
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 1) = sp * jump;
  ComplexMatrix k2 = ComplexMatrix::Zero(2, 2);
  k2(0, 0) = sq * damp;
  k2(1, 1) = sq;
  ComplexMatrix k3 = ComplexMatrix::Zero(2, 2);
  k3(1, 0) = sq * jump;
  return KrausSet::from_operators({k0, k1, k2, k3});
}

// --------------------------------------------------------- classification

SparsityPattern SparsityPattern::of(const ComplexMatrix& m, double zero_tol) {
  SparsityPattern p;
  p.dim = static_cast<int>(m.rows());
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (std::abs(m(r, c)) > zero_tol) {
        p.entries.emplace_back(r, c);
      }
    }
  }
  return p;
}

bool SparsityPattern::contains(int row, int col) const {
  return std::find(entries.begin(), entries.end(), std::pair{row, col}) !=
         entries.end();
}

bool ChannelClassification::lattice_consistent() const {
  return (!gio || fsio) && (!fsio || (fio && sio)) && (!fio || io) &&
         (!sio || io) && (!io || mio);
}

std::optional<FsioChannel> ChannelClassification::as_fsio() const {
  if (!fsio || !certificate.permutation) {
    return std::nullopt;
  }
  return FsioChannel{*certificate.permutation, certificate.diagonal_factors};
}

namespace {

constexpr double kMioOffDiagonalTol = 1e-10;

std::string most_specific_label(const ChannelClassification& c) {
  if (c.gio) return "GIO";
  if (c.fsio) return "FSIO";
  if (c.fio && c.sio) return "FIO+SIO";
  if (c.fio) return "FIO";
  if (c.sio) return "SIO";
  if (c.io) return "IO";
  if (c.mio) return "MIO";
  return "NONE";
}

} // namespace

ChannelClassification classify_kraus(const KrausSet& kraus, double zero_tol) {
  const int d = kraus.dim();
  ChannelClassification out;
  auto& cert = out.certificate;

  std::vector<SparsityPattern> patterns;
  patterns.reserve(kraus.size());
  for (const auto& k : kraus.operators()) {
    patterns.push_back(SparsityPattern::of(k, zero_tol));
  }

  // IO and SIO: per-operator column / row occupancy.
  out.io = true;
  out.sio = true;
  for (std::size_t n = 0; n < patterns.size(); ++n) {
    std::vector<int> col_count(static_cast<std::size_t>(d), 0);
    std::vector<int> row_count(static_cast<std::size_t>(d), 0);
    for (auto [r, c] : patterns[n].entries) {
      if (++col_count[static_cast<std::size_t>(c)] == 2 && out.io) {
        out.io = false;
        cert.witnesses.push_back({"IO", static_cast<int>(n), r, c,
                                  "two nonzero entries in one column"});
      }
      if (++row_count[static_cast<std::size_t>(r)] == 2 && out.sio) {
        out.sio = false;
        cert.witnesses.push_back({"SIO", static_cast<int>(n), r, c,
                                  "two nonzero entries in one row"});
      }
    }
  }
  out.sio = out.sio && out.io;

  // FIO: one shared column-to-row map across all operators.
  out.fio = out.io;
  std::vector<int> col_map(static_cast<std::size_t>(d), -1);
  if (out.fio) {
    for (std::size_t n = 0; n < patterns.size() && out.fio; ++n) {
      for (auto [r, c] : patterns[n].entries) {
        int& slot = col_map[static_cast<std::size_t>(c)];
        if (slot == -1) {
          slot = r;
        } else if (slot != r) {
          out.fio = false;
          cert.witnesses.push_back(
              {"FIO", static_cast<int>(n), r, c,
               "column already mapped to row " + std::to_string(slot)});
          break;
        }
      }
    }
  }
  if (out.fio) {
    cert.column_map = col_map;
  }

  // FSIO: SIO plus an injective shared map, completed to a permutation.
  out.fsio = out.sio && out.fio;
  if (out.fsio) {
    std::vector<int> owner(static_cast<std::size_t>(d), -1);
    for (int c = 0; c < d; ++c) {
      const int r = col_map[static_cast<std::size_t>(c)];
      if (r < 0) continue;
      if (owner[static_cast<std::size_t>(r)] != -1) {
        out.fsio = false;
        cert.witnesses.push_back(
            {"FSIO", -1, r, c,
             "shared map sends columns " +
                 std::to_string(owner[static_cast<std::size_t>(r)]) + " and " +
                 std::to_string(c) + " to the same row"});
        break;
      }
      owner[static_cast<std::size_t>(r)] = c;
    }
  }
  if (out.fsio) {
    std::vector<int> full = col_map;
    std::vector<bool> used(static_cast<std::size_t>(d), false);
    for (int r : full) {
      if (r >= 0) used[static_cast<std::size_t>(r)] = true;
    }
    for (int c = 0; c < d; ++c) {
      if (full[static_cast<std::size_t>(c)] >= 0) continue;
      const auto it = std::find(used.begin(), used.end(), false);
      const int r = static_cast<int>(it - used.begin());
      *it = true;
      full[static_cast<std::size_t>(c)] = r;
      cert.completed_columns.push_back(c);
    }
    Permutation pi(full);
    for (const auto& k : kraus.operators()) {
      ComplexVector a(d);
      for (int i = 0; i < d; ++i) {
        a(i) = k(pi[i], i);
      }
      cert.diagonal_factors.push_back(std::move(a));
    }
    cert.permutation = std::move(pi);
  }

  // GIO: every operator diagonal.
  out.gio = true;
  for (std::size_t n = 0; n < patterns.size() && out.gio; ++n) {
    for (auto [r, c] : patterns[n].entries) {
      if (r != c) {
        out.gio = false;
        cert.witnesses.push_back({"GIO", static_cast<int>(n), r, c,
                                  "off-diagonal nonzero entry"});
        break;
      }
    }
  }

  // MIO: basis projectors must map to diagonal outputs.
  out.mio = true;
  for (int i = 0; i < d && out.mio; ++i) {
    ComplexMatrix image = ComplexMatrix::Zero(d, d);
    for (const auto& k : kraus.operators()) {
      image.noalias() += k.col(i) * k.col(i).adjoint();
    }
    for (int r = 0; r < d && out.mio; ++r) {
      for (int c = 0; c < d; ++c) {
        if (r != c && std::abs(image(r, c)) > kMioOffDiagonalTol) {
          out.mio = false;
          cert.witnesses.push_back({"MIO", i, r, c,
                                    "basis projector image is coherent"});
          break;
        }
      }
    }
  }

  if (!out.lattice_consistent()) {
    throw std::logic_error("classify_kraus: flags violate GIO<FSIO<FIO,SIO<IO<MIO");
  }
  out.most_specific = most_specific_label(out);
  return out;
}

} // namespace coherence
