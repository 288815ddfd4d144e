#include "ionmcmr/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "ionmcmr/error.hpp"
#include "ionmcmr/units.hpp"

namespace ionmcmr {

namespace {

using C = std::complex<double>;
constexpr double residual_tolerance = 1e-3;  // rad/s

ComplexMatrix<> identity(int n) { return ComplexMatrix<>::Identity(n, n); }

}  // namespace

double Envelope::at(double t, double slot_time) const {
  if (shape == EnvelopeShape::Constant) return 1.0;
  const double period = slot * slot_count;
  const long cycle_index = static_cast<long>(std::floor(slot_time / period));
  const int active = static_cast<int>((slot_time - cycle_index * period) / slot);
  if (active != slot_index) return 0.0;
  if (shape == EnvelopeShape::Square) return 1.0;
  const double x = std::clamp((t - cycle_index * period - active * slot) / slot, 0.0, 1.0);
  return 0.42 - 0.5 * std::cos(units::two_pi * x) + 0.08 * std::cos(2.0 * units::two_pi * x);
}

void Envelope::validate() const {
  if (shape == EnvelopeShape::Constant) return;
  if (!(slot > 0.0)) throw ConfigError("switched envelope needs a positive slot length");
  if (slot_count < 1 || slot_index < 0 || slot_index >= slot_count) {
    throw ConfigError("envelope slot index outside the switching sequence");
  }
}

ComplexMatrix<> BlockOperator::dense(int dim) const {
  ComplexMatrix<> out = ComplexMatrix<>::Zero(dim, dim);
  out.block(row, col, block.rows(), block.cols()) = block;
  return out;
}

int SystemModel::manifold_index(const std::string& name) const {
  for (std::size_t m = 0; m < manifolds.size(); ++m) {
    if (manifolds[m] == name) return static_cast<int>(m);
  }
  throw ConfigError("model has no manifold '" + name + "'");
}

int SystemModel::offset(int manifold) const {
  for (int n = 0; n < dim(); ++n) {
    if (states[n].manifold == manifold) return n;
  }
  return dim();
}

int SystemModel::size(int manifold) const {
  return static_cast<int>(std::count_if(states.begin(), states.end(),
                                        [&](const ModelState& s) { return s.manifold == manifold; }));
}

std::vector<int> SystemModel::states_in(int manifold) const {
  std::vector<int> out;
  for (int n = 0; n < dim(); ++n) {
    if (states[n].manifold == manifold) out.push_back(n);
  }
  return out;
}

void SystemModel::validate() const {
  if (energies.size() != dim()) throw NumericalError("energy vector does not match the basis");
  for (int n = 1; n < dim(); ++n) {
    if (states[n].manifold < states[n - 1].manifold) throw NumericalError("basis states must be grouped by manifold");
  }
  for (const auto& t : tones) {
    if (t.lower < 0 || t.upper < 0 || t.lower >= static_cast<int>(manifolds.size()) ||
        t.upper >= static_cast<int>(manifolds.size())) {
      throw NumericalError("tone '" + t.name + "' references an unknown manifold");
    }
    if (t.rabi.rows() != size(t.upper) || t.rabi.cols() != size(t.lower)) {
      throw NumericalError("Rabi matrix of tone '" + t.name + "' does not match its manifolds");
    }
    t.envelope.validate();
  }
  for (const auto& l : collapse) {
    if (l.row < 0 || l.col < 0 || l.row + l.block.rows() > dim() || l.col + l.block.cols() > dim()) {
      throw NumericalError("collapse operator block outside the basis");
    }
  }
}

RotatingFrame rotating_frame(const SystemModel& model) {
  model.validate();
  const int dim = model.dim();

  // Global ids for (manifold, group).
  std::map<std::pair<int, int>, int> gid;
  std::vector<int> group_of(dim);
  for (int n = 0; n < dim; ++n) {
    const auto key = std::make_pair(model.states[n].manifold, model.states[n].group);
    auto it = gid.find(key);
    if (it == gid.end()) it = gid.emplace(key, static_cast<int>(gid.size())).first;
    group_of[n] = it->second;
  }
  const int ngroups = static_cast<int>(gid.size());

  // Secular couplings, bucketed by (tone, lower group, upper group).
  struct Element {
    int u, l;
    C rabi;
  };
  std::map<std::tuple<int, int, int>, std::vector<Element>> buckets;
  std::map<std::pair<int, int>, std::set<int>> edge_tones;
  for (std::size_t k = 0; k < model.tones.size(); ++k) {
    const auto& tone = model.tones[k];
    const int ou = model.offset(tone.upper), ol = model.offset(tone.lower);
    for (int a = 0; a < tone.rabi.rows(); ++a) {
      for (int b = 0; b < tone.rabi.cols(); ++b) {
        const C w = tone.rabi(a, b);
        if (w == C(0.0)) continue;
        const int u = ou + a, l = ol + b;
        if (std::abs(tone.frequency - (model.energies[u] - model.energies[l])) > model.secular_cutoff) continue;
        buckets[{static_cast<int>(k), group_of[l], group_of[u]}].push_back({u, l, w});
        edge_tones[{group_of[l], group_of[u]}].insert(static_cast<int>(k));
      }
    }
  }

  // Group frames: spanning forest over the coupled groups.
  std::vector<double> mean(ngroups, 0.0);
  std::vector<int> count(ngroups, 0);
  for (int n = 0; n < dim; ++n) {
    mean[group_of[n]] += model.energies[n];
    ++count[group_of[n]];
  }
  for (int g = 0; g < ngroups; ++g) mean[g] /= count[g];

  std::map<std::pair<int, int>, double> edge_frequency;
  for (const auto& [edge, tones] : edge_tones) {
    double sum = 0.0;
    for (int k : tones) sum += model.tones[k].frequency;
    edge_frequency[edge] = sum / tones.size();
  }
  std::vector<double> psi(ngroups, 0.0);
  std::vector<bool> seen(ngroups, false);
  for (int root = 0; root < ngroups; ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    psi[root] = mean[root];
    std::queue<int> pending;
    pending.push(root);
    while (!pending.empty()) {
      const int g = pending.front();
      pending.pop();
      for (const auto& [edge, nu] : edge_frequency) {
        const auto [gl, gu] = edge;
        if (gl == g && !seen[gu]) {
          psi[gu] = psi[g] + nu;
          seen[gu] = true;
          pending.push(gu);
        } else if (gu == g && !seen[gl]) {
          psi[gl] = psi[g] - nu;
          seen[gl] = true;
          pending.push(gl);
        }
      }
    }
  }

  RotatingFrame rf;
  rf.frame.resize(dim);
  rf.h0 = ComplexMatrix<>::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    rf.frame[n] = psi[group_of[n]];
    rf.h0(n, n) = model.energies[n] - rf.frame[n];
  }
  for (const auto& [key, elements] : buckets) {
    const auto [k, gl, gu] = key;
    const auto& tone = model.tones[k];
    const double r = tone.frequency - (psi[gu] - psi[gl]);
    ComplexMatrix<> v = ComplexMatrix<>::Zero(dim, dim);
    for (const auto& e : elements) v(e.u, e.l) += 0.5 * e.rabi;
    const bool constant = tone.envelope.shape == EnvelopeShape::Constant;
    if (constant && std::abs(r) < residual_tolerance) {
      rf.h0 += v + v.adjoint();
      continue;
    }
    auto same = std::find_if(rf.terms.begin(), rf.terms.end(), [&](const FrameTerm& t) {
      return std::abs(t.residual - r) < residual_tolerance && t.envelope == tone.envelope;
    });
    if (same != rf.terms.end()) {
      same->v += v;
    } else {
      rf.terms.push_back({v, r, tone.envelope});
    }
  }

  rf.decay = ComplexMatrix<>::Zero(dim, dim);
  for (const auto& l : model.collapse) {
    const ComplexMatrix<> d = l.dense(dim);
    rf.decay += d.adjoint() * d;
  }
  double bound = rf.h0.cwiseAbs().maxCoeff();
  double fastest = 0.0;
  for (const auto& t : rf.terms) {
    bound += t.v.cwiseAbs().maxCoeff();
    fastest = std::max(fastest, std::abs(t.residual));
  }
  rf.max_rate = std::max({bound, fastest, 0.5 * rf.decay.cwiseAbs().maxCoeff()});
  return rf;
}

ComplexMatrix<> RotatingFrame::hamiltonian(double t, double slot_time) const {
  ComplexMatrix<> h = h0;
  for (const auto& term : terms) {
    const double a = term.envelope.at(t, slot_time);
    if (a == 0.0) continue;
    const C phase = std::polar(a, -term.residual * t);
    h += phase * term.v;
    h += std::conj(phase) * term.v.adjoint();
  }
  return h;
}

DensityDiagnostics diagnose(const DensityMatrix& rho) {
  DensityDiagnostics d;
  d.trace_error = std::abs(rho.trace() - C(1.0));
  d.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  const ComplexMatrix<> herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix<>> solver(herm, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = solver.eigenvalues().minCoeff();
  return d;
}

void check_density_matrix(const DensityMatrix& rho, double time) {
  const auto d = diagnose(rho);
  std::ostringstream msg;
  msg << "density matrix at t = " << time << " s: ";
  if (d.trace_error > 1e-8) {
    msg << "trace deviates by " << d.trace_error;
    throw NumericalError(msg.str());
  }
  if (d.hermiticity_error > 1e-10) {
    msg << "Hermiticity violated by " << d.hermiticity_error;
    throw NumericalError(msg.str());
  }
  if (d.min_eigenvalue < -1e-8) {
    msg << "negative eigenvalue " << d.min_eigenvalue;
    throw NumericalError(msg.str());
  }
}

double RotatingFrame::shortest_slot() const {
  double slot = 0.0;
  for (const auto& t : terms) {
    if (t.envelope.shape == EnvelopeShape::Constant) continue;
    slot = slot == 0.0 ? t.envelope.slot : std::min(slot, t.envelope.slot);
  }
  return slot;
}

double max_time_step(const RotatingFrame& frame) { return 1.0 / (20.0 * std::max(frame.max_rate, 1.0)); }

double aligned_time_step(const RotatingFrame& frame, double span) {
  // Half the allowed maximum: at the limit itself, 100 us of undamped Rabi
  // cycling pushes zero eigenvalues of a rank-deficient state to about -1e-7.
  const double limit = 0.5 * max_time_step(frame);
  const double slot = frame.shortest_slot();
  const double unit = slot > 0.0 ? slot : span;
  if (!(unit > 0.0)) return limit;
  return unit / std::ceil(unit / limit - 1e-9);
}

Integrator::Integrator(const SystemModel& model, const DensityMatrix& rho0, double dt)
    : frame_(rotating_frame(model)), jumps_(model.collapse), rho_(rho0) {
  if (rho0.rows() != model.dim() || rho0.cols() != model.dim()) {
    throw NumericalError("initial state does not match the model dimension");
  }
  const double limit = max_time_step(frame_);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "step-size violation: dt = " << dt << " s exceeds 1/(20 max|H|) = " << limit << " s";
    throw NumericalError(msg.str());
  }
  dt_ = dt > 0.0 ? dt : aligned_time_step(frame_, 0.0);

  const int n = model.dim();
  // Only the energies go into the integrating factor; the decay stays with the
  // jumps so the scheme conserves the trace exactly.
  const Eigen::VectorXcd a = C(0.0, -1.0) * frame_.h0.diagonal();
  h_off_ = frame_.h0;
  h_off_.diagonal().setZero();
  decay_ = frame_.decay;
  half_.resize(n, n);
  full_.resize(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const C g = a[i] + std::conj(a[j]);
      half_(i, j) = std::exp(0.5 * dt_ * g);
      full_(i, j) = std::exp(dt_ * g);
    }
  }
}

DensityMatrix Integrator::coupling_part(double t, double slot_time, const DensityMatrix& rho) const {
  ComplexMatrix<> h = frame_.hamiltonian(t, slot_time);
  h.diagonal().setZero();
  const ComplexMatrix<> b = C(0.0, -1.0) * h - 0.5 * decay_;
  DensityMatrix out = b * rho;
  out += rho * b.adjoint();
  for (const auto& j : jumps_) {
    const auto m = j.block.cols();
    out.block(j.row, j.row, j.block.rows(), j.block.rows()) +=
        j.block * rho.block(j.col, j.col, m, m) * j.block.adjoint();
  }
  return out;
}

void Integrator::step() {
  // Lawson RK4 in the frame of the diagonal generator.
  const double h = dt_, mid = t_ + 0.5 * h;
  k1_ = coupling_part(t_, mid, rho_);
  tmp_ = half_.cwiseProduct(rho_ + (0.5 * h) * k1_);
  k2_ = coupling_part(mid, mid, tmp_);
  tmp_ = half_.cwiseProduct(rho_) + (0.5 * h) * k2_;
  k3_ = coupling_part(mid, mid, tmp_);
  tmp_ = full_.cwiseProduct(rho_) + h * half_.cwiseProduct(k3_);
  k4_ = coupling_part(t_ + h, mid, tmp_);
  rho_ = full_.cwiseProduct(rho_ + (h / 6.0) * k1_) + (h / 3.0) * half_.cwiseProduct(k2_ + k3_) + (h / 6.0) * k4_;
  t_ += h;
}

Trajectory evolve(const SystemModel& model, const DensityMatrix& rho0, double duration,
                  const EvolveOptions& options) {
  if (duration < 0.0) throw NumericalError("negative evolution time");
  double dt = options.dt;
  if (dt <= 0.0) dt = aligned_time_step(rotating_frame(model), options.sample_interval > 0.0 ? options.sample_interval : duration);
  Integrator integ(model, rho0, dt);
  Trajectory traj;
  check_density_matrix(rho0, 0.0);
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);

  const long total = std::lround(duration / integ.dt());
  const long every = options.sample_interval > 0.0
                         ? std::max(1L, std::lround(options.sample_interval / integ.dt()))
                         : std::max(1L, total);
  for (long s = 1; s <= total; ++s) {
    integ.step();
    if (s % every == 0 || s == total) {
      check_density_matrix(integ.state(), integ.time());
      traj.times.push_back(integ.time());
      traj.states.push_back(integ.state());
    }
  }
  return traj;
}

namespace {

// Superoperator of X -> -i [H, X] in column-major vectorization.
ComplexMatrix<> commutator_superop(const ComplexMatrix<>& h) {
  const ComplexMatrix<> id = identity(static_cast<int>(h.rows()));
  return C(0.0, -1.0) * (ComplexMatrix<>(Eigen::kroneckerProduct(id, h)) -
                         ComplexMatrix<>(Eigen::kroneckerProduct(h.transpose(), id)));
}

ComplexMatrix<> liouvillian_static(const RotatingFrame& frame, const std::vector<BlockOperator>& jumps) {
  const int n = static_cast<int>(frame.h0.rows());
  const ComplexMatrix<> id = identity(n);
  ComplexMatrix<> l = commutator_superop(frame.h0);
  for (const auto& j : jumps) {
    const ComplexMatrix<> d = j.dense(n);
    const ComplexMatrix<> dd = d.adjoint() * d;
    l += ComplexMatrix<>(Eigen::kroneckerProduct(d.conjugate(), d)) -
         0.5 * ComplexMatrix<>(Eigen::kroneckerProduct(id, dd)) -
         0.5 * ComplexMatrix<>(Eigen::kroneckerProduct(dd.transpose(), id));
  }
  return l;
}

DensityMatrix unvec(const Eigen::VectorXcd& x, int n) {
  DensityMatrix rho(n, n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) rho(r, c) = x[c * n + r];
  return rho;
}

// Null vector of L normalized to unit trace; false when the kernel is not one-dimensional.
bool stationary(const ComplexMatrix<>& l, int n, DensityMatrix& rho) {
  Eigen::FullPivLU<ComplexMatrix<>> lu(l);
  lu.setThreshold(1e-10);
  if (lu.rank() != n * n - 1) return false;
  ComplexMatrix<> m = l;
  m.row(0).setZero();
  for (int i = 0; i < n; ++i) m(0, i * n + i) = 1.0;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n * n);
  rhs[0] = 1.0;
  const Eigen::VectorXcd x = m.partialPivLu().solve(rhs);
  rho = unvec(x, n);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return true;
}

}  // namespace

bool floquet_steady_state(const RotatingFrame& frame, const std::vector<BlockOperator>& jumps, DensityMatrix& rho,
                          int& harmonics) {
  const int n = static_cast<int>(frame.h0.rows());
  const ComplexMatrix<> l0 = liouvillian_static(frame, jumps);
  if (frame.terms.empty()) {
    harmonics = 0;
    return stationary(l0, n, rho);
  }
  double omega = 0.0;
  for (const auto& t : frame.terms) {
    if (t.envelope.shape != EnvelopeShape::Constant) return false;
    omega = std::max(omega, std::abs(t.residual));
  }
  ComplexMatrix<> hm = ComplexMatrix<>::Zero(n, n);  // coefficient of e^{-i omega t}
  for (const auto& t : frame.terms) {
    if (std::abs(std::abs(t.residual) - omega) > 1e-9 * omega + residual_tolerance) return false;
    if (t.residual > 0) hm += t.v;
    else hm += t.v.adjoint();
  }
  const ComplexMatrix<> lm = commutator_superop(hm);
  const ComplexMatrix<> lp = commutator_superop(hm.adjoint());
  const int nn = n * n;
  const ComplexMatrix<> id = identity(nn);

  // rho(t) = sum_k rho_k e^{-i k omega t}:  -i k omega rho_k = L0 rho_k + Lm rho_{k-1} + Lp rho_{k+1}.
  auto effective = [&](int cutoff) {
    ComplexMatrix<> s = ComplexMatrix<>::Zero(nn, nn), t = ComplexMatrix<>::Zero(nn, nn);
    for (int k = cutoff; k >= 1; --k) {
      const C shift(0.0, k * omega);
      s = -(l0 + shift * id + lp * s).partialPivLu().solve(lm);
      t = -(l0 - shift * id + lm * t).partialPivLu().solve(lp);
    }
    return ComplexMatrix<>(l0 + lp * s + lm * t);
  };

  DensityMatrix previous;
  for (int cutoff = 6; cutoff <= 96; cutoff *= 2) {
    DensityMatrix current;
    if (!stationary(effective(cutoff), n, current)) return false;
    if (previous.size() != 0 && (current - previous).cwiseAbs().maxCoeff() < 1e-10) {
      rho = current;
      harmonics = cutoff;
      return true;
    }
    previous = current;
  }
  throw ConvergenceError("Floquet harmonic expansion did not converge within 96 harmonics");
}

Trajectory evolve_exact(const SystemModel& model, const DensityMatrix& rho0, double duration,
                        double sample_interval) {
  const RotatingFrame frame = rotating_frame(model);
  if (!frame.is_static()) throw NumericalError("exact propagation needs a time-independent rotating frame");
  if (!(sample_interval > 0.0) || duration < 0.0) throw NumericalError("invalid sampling for exact propagation");
  const int n = model.dim();
  const ComplexMatrix<> step = (liouvillian_static(frame, model.collapse) * sample_interval).exp();
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(rho0.data(), n * n);
  Trajectory traj;
  check_density_matrix(rho0, 0.0);
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  const long samples = std::lround(duration / sample_interval);
  for (long k = 1; k <= samples; ++k) {
    x = step * x;
    DensityMatrix rho = unvec(x, n);
    check_density_matrix(rho, k * sample_interval);
    traj.times.push_back(k * sample_interval);
    traj.states.push_back(std::move(rho));
  }
  return traj;
}

DensityMatrix mixed_state(const SystemModel& model, int manifold) {
  const auto idx = model.states_in(manifold);
  if (idx.empty()) throw NumericalError("cannot prepare a state in an empty manifold");
  DensityMatrix rho = DensityMatrix::Zero(model.dim(), model.dim());
  for (int i : idx) rho(i, i) = 1.0 / idx.size();
  return rho;
}

SteadyState steady_state(const SystemModel& model, const std::vector<int>& observed,
                         const SteadyStateOptions& options) {
  auto population = [&](const DensityMatrix& rho) {
    double p = 0.0;
    for (int i : observed) p += rho(i, i).real();
    return p;
  };
  SteadyState out;
  const RotatingFrame frame = rotating_frame(model);
  if (options.allow_floquet && model.dim() <= options.floquet_max_dim) {
    int harmonics = 0;
    if (floquet_steady_state(frame, model.collapse, out.rho, harmonics)) {
      check_density_matrix(out.rho, 0.0);
      out.population = population(out.rho);
      out.method = frame.terms.empty() ? "static" : "floquet";
      out.harmonics = harmonics;
      return out;
    }
  }

  double slowest = 0.0, cycle = 0.0;
  for (const auto& t : frame.terms) {
    if (std::abs(t.residual) > residual_tolerance) {
      slowest = slowest == 0.0 ? std::abs(t.residual) : std::min(slowest, std::abs(t.residual));
    }
    cycle = std::max(cycle, t.envelope.cycle());
  }
  double window = slowest > 0.0 ? 10.0 * units::two_pi / slowest : 1e-6;
  if (cycle > 0.0) window = std::max(1.0, std::ceil(window / cycle)) * cycle;

  Integrator integ(model, mixed_state(model, 0));
  const long window_steps = std::max(1L, std::lround(window / integ.dt()));
  const double cutoff = 5.0 / (options.f_estimate * options.beta_gamma);
  while (integ.time() < cutoff) integ.step();

  double last = -1.0;
  while (true) {
    DensityMatrix sum = DensityMatrix::Zero(model.dim(), model.dim());
    for (long s = 0; s < window_steps; ++s) {
      integ.step();
      sum += integ.state();
    }
    check_density_matrix(integ.state(), integ.time());
    const DensityMatrix avg = sum / static_cast<double>(window_steps);
    const double p = population(avg);
    if (last >= 0.0 && std::abs(p - last) < options.drift_tolerance) {
      out.rho = avg;
      out.population = p;
      out.method = "time-average";
      out.averaged_time = window_steps * integ.dt();
      return out;
    }
    last = p;
    if (integ.time() > options.max_time) {
      std::ostringstream msg;
      msg << "steady state not reached after " << integ.time() << " s (window mean drifting)";
      throw ConvergenceError(msg.str());
    }
  }
}

}  // namespace ionmcmr
