#include "ionmcmr/couplings.hpp"

#include <map>
#include <sstream>

namespace ionmcmr {

namespace {

ComplexMatrix<> bare_coupling(const ManifoldBasis& upper, const ManifoldBasis& lower, int rank,
                              const PolarizationGeometry& geom) {
  if (upper.i != lower.i) throw NumericalError("manifolds with different nuclear spin cannot be coupled");
  std::vector<std::complex<double>> t(2 * rank + 1);
  for (int q = -rank; q <= rank; ++q) t[q + rank] = rank == 1 ? tensor_rank1(q, geom) : tensor_rank2(q, geom);

  ComplexMatrix<> m = ComplexMatrix<>::Zero(upper.dim(), lower.dim());
  for (int a = 0; a < upper.dim(); ++a) {
    for (int b = 0; b < lower.dim(); ++b) {
      if (upper.mi(a) != lower.mi(b)) continue;
      const HalfInteger mu = upper.mj(a), ml = lower.mj(b);
      const int q = (mu - ml).twice() / 2;
      if (q < -rank || q > rank) continue;
      const double we = wigner_eckart_factor(upper.j, mu, rank, q, lower.j, ml);
      if (we == 0.0) continue;
      m(a, b) = we * detail::parity_sign(q) * t[rank - q];
    }
  }
  return m;
}

}  // namespace

ComplexMatrix<> coupling_matrix(const DressedManifold& upper, const DressedManifold& lower, int rank,
                                const PolarizationGeometry& geom) {
  geom.validate();
  return upper.levels.mixing.adjoint() * bare_coupling(upper.levels.basis, lower.levels.basis, rank, geom) *
         lower.levels.mixing;
}

ComplexMatrix<> rabi_2052(const DressedManifold& d, const DressedManifold& s, double omega0,
                          const PolarizationGeometry& geom) {
  if (omega0 < 0.0) throw NumericalError("negative Rabi frequency");
  return omega0 * coupling_matrix(d, s, 2, geom);
}

ComplexMatrix<> rabi_650(const DressedManifold& p, const DressedManifold& d, double omega0,
                         const PolarizationGeometry& geom) {
  if (omega0 < 0.0) throw NumericalError("negative Rabi frequency");
  return omega0 * coupling_matrix(p, d, 1, geom);
}

std::vector<BlockOperator> decay_operators(const DressedManifold& upper, const DressedManifold& lower, double rate,
                                           int upper_offset, int lower_offset) {
  std::vector<BlockOperator> out;
  if (rate <= 0.0) return out;
  const ManifoldBasis& bu = upper.levels.basis;
  const ManifoldBasis& bl = lower.levels.basis;
  const double norm = std::sqrt(bu.j.multiplicity() * rate);

  std::map<int, std::vector<int>> lower_groups, upper_groups;
  for (int k = 0; k < static_cast<int>(lower.groups.size()); ++k) lower_groups[lower.groups[k]].push_back(k);
  for (int k = 0; k < static_cast<int>(upper.groups.size()); ++k) upper_groups[upper.groups[k]].push_back(k);

  for (int q = -1; q <= 1; ++q) {
    // |l><u| amplitudes (-1)^(J_l - m_l) (J_l 1 J_u; -m_l q m_u), bare basis.
    ComplexMatrix<> bare = ComplexMatrix<>::Zero(bl.dim(), bu.dim());
    for (int a = 0; a < bl.dim(); ++a) {
      for (int b = 0; b < bu.dim(); ++b) {
        if (bl.mi(a) != bu.mi(b)) continue;
        bare(a, b) = norm * wigner_eckart_factor(bl.j, bl.mj(a), 1, q, bu.j, bu.mj(b));
      }
    }
    const ComplexMatrix<> dressed = lower.levels.mixing.adjoint() * bare * upper.levels.mixing;
    for (const auto& [gl, ls] : lower_groups) {
      for (const auto& [gu, us] : upper_groups) {
        // The block spans each group's index range; entries of other groups stay zero.
        const int l0 = ls.front(), l1 = ls.back(), u0 = us.front(), u1 = us.back();
        ComplexMatrix<> block = ComplexMatrix<>::Zero(l1 - l0 + 1, u1 - u0 + 1);
        for (int a : ls)
          for (int b : us) block(a - l0, b - u0) = dressed(a, b);
        if (block.cwiseAbs().maxCoeff() < 1e-14 * norm) continue;
        out.push_back({lower_offset + l0, upper_offset + u0, block});
      }
    }
  }
  return out;
}

std::vector<BlockOperator> collapse_operators(const DressedManifold& s, const DressedManifold& d,
                                              const DressedManifold& p, double gamma, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw NumericalError("branching ratio outside [0, 1]");
  const int ns = s.levels.size(), nd = d.levels.size();
  auto ops = decay_operators(p, s, beta * gamma, ns + nd, 0);
  auto to_d = decay_operators(p, d, (1.0 - beta) * gamma, ns + nd, ns);
  ops.insert(ops.end(), to_d.begin(), to_d.end());

  const int dim = ns + nd + p.levels.size();
  ComplexMatrix<> sum = ComplexMatrix<>::Zero(dim, dim);
  for (const auto& l : ops) {
    const ComplexMatrix<> m = l.dense(dim);
    sum += m.adjoint() * m;
  }
  const ComplexMatrix<> on_p = sum.bottomRightCorner(p.levels.size(), p.levels.size());
  const double err = (on_p - gamma * ComplexMatrix<>::Identity(on_p.rows(), on_p.cols())).cwiseAbs().maxCoeff();
  if (err > 1e-6 * gamma) {
    std::ostringstream msg;
    msg << "collapse operators violate the decay-rate sum by " << err / gamma << " (relative)";
    throw NumericalError(msg.str());
  }
  return ops;
}

double max_abs(const ComplexMatrix<>& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace ionmcmr
