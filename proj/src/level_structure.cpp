#include "ionmcmr/level_structure.hpp"

#include <cmath>
#include <sstream>

#include "ionmcmr/parallel.hpp"

namespace ionmcmr {

ManifoldHamiltonian<double> manifold_hamiltonian(const Species& species, std::string_view level, double b_tesla,
                                                 const LaserField& stark_field) {
  const Level& l = species.level(level);
  ManifoldHamiltonian<double> h;
  h.level = l.label;
  h.basis = ManifoldBasis{l.j, species.nuclear_spin};
  h.matrix = zeeman_operator(l.g_j, b_tesla, h.basis) + hyperfine_operator(species.hyperfine_for(level), h.basis);
  if (stark_field.intensity > 0.0) {
    const Polarizability alpha = dynamic_polarizability(species, level, stark_field.angular_frequency());
    h.matrix += stark_operator(alpha, stark_field, h.basis);
  }
  return h;
}

HalfInteger dominant_f(const EigenLevels<double>& levels, int k) {
  const ManifoldBasis& b = levels.basis;
  const auto sj = spin_operators(b.j);
  const auto si = spin_operators(b.i);
  const double jj = b.j.value() * (b.j.value() + 1), ii = b.i.value() * (b.i.value() + 1);
  const ComplexMatrix<> f2 = ComplexMatrix<>::Identity(b.dim(), b.dim()) * (jj + ii) +
                             2.0 * detail::i_dot_j<double>(b);
  const double expect = (levels.mixing.col(k).adjoint() * f2 * levels.mixing.col(k))(0, 0).real();
  HalfInteger best = HalfInteger::from_twice(std::abs(b.j.twice() - b.i.twice()));
  double best_gap = 1e300;
  for (int tf = std::abs(b.j.twice() - b.i.twice()); tf <= b.j.twice() + b.i.twice(); tf += 2) {
    const double f = 0.5 * tf;
    const double gap = std::abs(f * (f + 1) - expect);
    if (gap < best_gap) {
      best_gap = gap;
      best = HalfInteger::from_twice(tf);
    }
  }
  return best;
}

double mean_mf(const EigenLevels<double>& levels, int k) {
  double m = 0.0;
  for (int r = 0; r < levels.basis.dim(); ++r) m += std::norm(levels.mixing(r, k)) * levels.basis.mf(r).value();
  return m;
}

ShiftCurves shift_curves(const Species& species, std::string_view level, double b_tesla,
                         const std::vector<double>& intensity_grid, const LaserField& stark_field) {
  for (std::size_t k = 1; k < intensity_grid.size(); ++k) {
    if (!(intensity_grid[k] > intensity_grid[k - 1])) throw ConfigError("intensity grid must be strictly increasing");
  }
  ShiftCurves out;
  out.level = std::string(level);
  out.intensities = intensity_grid;
  const std::size_t n = intensity_grid.size();
  std::vector<EigenLevels<double>> solved(n);
  parallel_for(n, [&](std::size_t k) {
    LaserField f = stark_field;
    f.intensity = intensity_grid[k];
    const auto h = manifold_hamiltonian(species, level, b_tesla, f);
    solved[k] = diagonalize(h.matrix, h.basis);
  });

  std::vector<int> order;  // order[s] = eigen index of tracked state s at the current row
  for (std::size_t k = 0; k < n; ++k) {
    const auto& cur = solved[k];
    const int dim = cur.size();
    if (k == 0) {
      for (int s = 0; s < dim; ++s) order.push_back(s);
    } else {
      const auto& prev = solved[k - 1];
      Eigen::MatrixXd overlap(dim, dim);
      for (int s = 0; s < dim; ++s)
        for (int l = 0; l < dim; ++l)
          overlap(s, l) = std::norm(prev.mixing.col(order[s]).dot(cur.mixing.col(l)));
      std::vector<int> next(dim, -1);
      std::vector<bool> taken(dim, false);
      for (int round = 0; round < dim; ++round) {
        double best = -1.0;
        int bs = -1, bl = -1;
        for (int s = 0; s < dim; ++s) {
          if (next[s] >= 0) continue;
          for (int l = 0; l < dim; ++l) {
            if (!taken[l] && overlap(s, l) > best) {
              best = overlap(s, l);
              bs = s;
              bl = l;
            }
          }
        }
        if (best < 0.5) {
          std::ostringstream msg;
          msg << "state tracking ambiguous at grid index " << k << " (intensity " << intensity_grid[k]
              << " W/m^2): best overlap " << best;
          throw ConvergenceError(msg.str());
        }
        next[bs] = bl;
        taken[bl] = true;
      }
      order = next;
    }
    std::vector<double> row(dim);
    for (int s = 0; s < dim; ++s) row[s] = cur.energies[order[s]];
    out.energies.push_back(std::move(row));
  }
  return out;
}

}  // namespace ionmcmr
