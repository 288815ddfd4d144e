#pragma once

// Generic Lindblad engine for a few manifolds coupled by near-resonant tones.
//
// Energies and tone frequencies are angular (rad/s) and measured relative to
// the optical reference of each manifold, so the large optical offsets never
// enter. In the lab frame a tone contributes (Omega_ul / 2) e^{-i nu t} |u><l| + h.c.;
// the engine moves every state group (a manifold, or one hyperfine F level of
// it) into a frame rotating at a group frequency chosen so that as many terms
// as possible become static.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ionmcmr/angular.hpp"

namespace ionmcmr {

using DensityMatrix = ComplexMatrix<double>;

enum class EnvelopeShape { Constant, Square, Blackman };

/// Amplitude envelope. Square and Blackman envelopes are on only during their
/// own slot of a cyclic sequence of `slot_count` slots of length `slot`.
struct Envelope {
  EnvelopeShape shape = EnvelopeShape::Constant;
  double slot = 0.0;
  int slot_index = 0;
  int slot_count = 1;

  double operator()(double t) const { return at(t, t); }
  /// Value at t with the active slot decided at `slot_time`; integrators pass
  /// the step midpoint so a step ending on a switching edge stays in its slot.
  double at(double t, double slot_time) const;
  double cycle() const { return shape == EnvelopeShape::Constant ? 0.0 : slot * slot_count; }
  void validate() const;
  bool operator==(const Envelope&) const = default;
};

struct DriveTone {
  std::string name;
  int lower = 0;  // manifold index
  int upper = 0;
  ComplexMatrix<double> rabi;  // rows: upper-manifold states, cols: lower-manifold states; rad/s
  double frequency = 0.0;      // rad/s on top of the optical reference difference
  Envelope envelope;
};

/// A dense block placed at (row, col) of an otherwise zero operator.
struct BlockOperator {
  int row = 0;
  int col = 0;
  ComplexMatrix<double> block;

  ComplexMatrix<double> dense(int dim) const;
};

struct ModelState {
  std::string label;
  int manifold = 0;
  int group = 0;  // states sharing (manifold, group) share a rotating frame
};

struct SystemModel {
  std::vector<std::string> manifolds;
  std::vector<ModelState> states;  // contiguous per manifold, in manifold order
  Eigen::VectorXd energies;        // rad/s
  std::vector<DriveTone> tones;
  std::vector<BlockOperator> collapse;
  double secular_cutoff = 2.0 * 3.14159265358979323846 * 100e6;  // rad/s

  int dim() const { return static_cast<int>(states.size()); }
  int manifold_index(const std::string& name) const;
  int offset(int manifold) const;
  int size(int manifold) const;
  std::vector<int> states_in(int manifold) const;
  /// Throws NumericalError on inconsistent dimensions or negative data.
  void validate() const;
};

/// One oscillating term env(t) (V e^{-i r t} + h.c.) of the rotating-frame Hamiltonian.
struct FrameTerm {
  ComplexMatrix<double> v;
  double residual = 0.0;
  Envelope envelope;
};

struct RotatingFrame {
  Eigen::VectorXd frame;        // rotation frequency of each state
  ComplexMatrix<double> h0;     // static part
  std::vector<FrameTerm> terms; // oscillating or switched parts
  ComplexMatrix<double> decay;  // sum_k L_k^dagger L_k
  double max_rate = 0.0;        // bound on |H| entries and decay rates, rad/s

  ComplexMatrix<double> hamiltonian(double t) const { return hamiltonian(t, t); }
  ComplexMatrix<double> hamiltonian(double t, double slot_time) const;
  /// Shortest switching slot among the terms, 0 when nothing is switched.
  double shortest_slot() const;
  bool is_static() const { return terms.empty(); }
};

RotatingFrame rotating_frame(const SystemModel& model);

struct DensityDiagnostics {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
};

DensityDiagnostics diagnose(const DensityMatrix& rho);
/// Throws NumericalError when trace, Hermiticity or positivity tolerances fail.
void check_density_matrix(const DensityMatrix& rho, double time);

/// Maximal stable step for a model: 1 / (20 max|H|).
double max_time_step(const RotatingFrame& frame);
/// Default step: the largest step not above half the limit that divides `span` (and the shortest
/// switching slot, when there is one) into whole steps.
double aligned_time_step(const RotatingFrame& frame, double span);

struct EvolveOptions {
  double dt = 0.0;               // 0 selects the largest allowed step
  double sample_interval = 0.0;  // 0 records only the final state
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

/// Fourth-order Runge-Kutta integration of the master equation. Every sampled
/// state is checked against the density-matrix tolerances.
Trajectory evolve(const SystemModel& model, const DensityMatrix& rho0, double duration,
                  const EvolveOptions& options = {});

/// Exact propagation exp(L t) for a time-independent rotating frame, sampled
/// every `sample_interval`. Throws NumericalError when the frame oscillates.
Trajectory evolve_exact(const SystemModel& model, const DensityMatrix& rho0, double duration, double sample_interval);

/// Incremental integrator for callers that need running averages.
/// Integrating-factor RK4: the diagonal of H is propagated exactly, couplings
/// and dissipation by RK4. The trace is conserved to rounding.
class Integrator {
 public:
  Integrator(const SystemModel& model, const DensityMatrix& rho0, double dt = 0.0);

  void step();
  double time() const { return t_; }
  double dt() const { return dt_; }
  const DensityMatrix& state() const { return rho_; }
  const RotatingFrame& frame() const { return frame_; }

 private:
  DensityMatrix coupling_part(double t, double slot_time, const DensityMatrix& rho) const;

  RotatingFrame frame_;
  std::vector<BlockOperator> jumps_;
  ComplexMatrix<double> h_off_;      // static couplings
  ComplexMatrix<double> decay_;      // sum L^dagger L
  ComplexMatrix<double> half_, full_;  // elementwise exp of the diagonal generator over dt/2, dt
  DensityMatrix rho_;
  double t_ = 0.0;
  double dt_ = 0.0;
  DensityMatrix k1_, k2_, k3_, k4_, tmp_;
};

struct SteadyStateOptions {
  double f_estimate = 0.02;  // sets the transient cutoff 5 / (f beta Gamma)
  double beta_gamma = 0.73 * 2.0 * 3.14159265358979323846 * 20.5e6;
  double drift_tolerance = 1e-3;
  double max_time = 400e-6;
  int floquet_max_dim = 16;
  bool allow_floquet = true;
};

struct SteadyState {
  DensityMatrix rho;  // time-averaged state
  double population = 0.0;
  std::string method;  // "static", "floquet" or "time-average"
  int harmonics = 0;
  double averaged_time = 0.0;
};

/// Time-averaged steady state and its population in `observed` states.
/// Throws ConvergenceError when neither route settles.
SteadyState steady_state(const SystemModel& model, const std::vector<int>& observed,
                         const SteadyStateOptions& options = {});

/// Steady state of a frame whose oscillating terms all share one frequency, by
/// a matrix continued fraction over Fourier harmonics. Returns false when the
/// frame is not of that form or the stationary state is not unique.
bool floquet_steady_state(const RotatingFrame& frame, const std::vector<BlockOperator>& jumps, DensityMatrix& rho,
                          int& harmonics);

/// Equal mixture of the states of one manifold.
DensityMatrix mixed_state(const SystemModel& model, int manifold);

}  // namespace ionmcmr
