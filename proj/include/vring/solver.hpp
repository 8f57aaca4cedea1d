#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "vring/greens.hpp"
#include "vring/grid.hpp"
#include "vring/profiles.hpp"

namespace vring {

struct Tolerances {
  double zeta = 1e-8;   // L1(nu) change of zeta per step, relative to kappa
  double mu = 1e-10;    // relative mass error accepted by the multiplier search
  std::size_t max_iterations = 500;
};

struct ProblemConfig {
  double kappa = 4.0 * 3.14159265358979323846;
  double W = 1.0;
  double epsilon = 0.1;
  // Cap parameter; NaN selects 40 max(1, g(0+)).
  double Lambda = std::numeric_limits<double>::quiet_NaN();
  std::size_t n_r = 192;
  std::size_t n_z = 192;
  Tolerances tol;
  bool symmetrize = true;
  // Anderson mixing depth for the accelerated candidate step; 0 runs the
  // plain ascent iteration.
  std::size_t anderson_depth = 5;
  // Also try shifting the iterate by one radial cell each step; the core
  // otherwise drifts toward its equilibrium radius very slowly.
  bool translation_moves = true;
  unsigned threads = 1;

  double r_star() const;
  double log_inv_eps() const;
  DomainBounds domain() const;
  GridSpec grid() const;
  double cap(const GeneratorPair& gen) const;
  // Every violated constraint, one message each; empty when valid.
  std::vector<std::string> problems(const GeneratorPair& gen) const;
  // Throws ConfigError joining all problems.
  void validate(const GeneratorPair& gen) const;
};

// psi = psi0 - (W r^2 / 2) log(1/eps) - mu.
ScalarField relative_stream(const ProblemConfig& cfg, const ScalarField& psi0, double mu);

double energy(const ProblemConfig& cfg, const GeneratorPair& gen, const ScalarField& zeta,
              const ScalarField& psi0);

// eps^2 zeta = min(Lambda, i(r, psi_+)).
ScalarField pointwise_update(const ProblemConfig& cfg, const GeneratorPair& gen,
                             const ScalarField& psi);

struct MuSolution {
  double mu = 0.0;
  ScalarField zeta;
  double mass = 0.0;
  std::size_t bisections = 0;
  bool level_fill = false;  // mass matched by a partial fill of a jump
};

// Multiplier for the mass constraint. mass(mu) is nonincreasing; mu = 0 when
// mass(0) <= kappa, otherwise bisection on [0, max psi0] until the mass is
// within tol.mu of kappa from below. A jump in i (discontinuous g) that the
// bisection cannot resolve is closed by filling the jump cells
// proportionally.
MuSolution solve_mu(const ProblemConfig& cfg, const GeneratorPair& gen, const ScalarField& psi0);

// Uniform patch on the disc of radius eps sqrt(kappa / (pi r*)) about (r*, 0)
// with total circulation kappa; the radius grows if the cap would bind.
ScalarField initialize(const ProblemConfig& cfg, const GeneratorPair& gen);

struct SolveState {
  ScalarField zeta;
  ScalarField psi0;
  ScalarField psi;
  double mu = 0.0;
  double energy = 0.0;
  std::size_t iteration = 0;
};

struct SolveResult {
  SolveState state;
  bool converged = false;
  std::vector<double> energy_trace;  // energy of every accepted iterate
  std::vector<double> change_trace;  // relative L1 change per step
  std::size_t accelerated_steps = 0;
  std::size_t translation_steps = 0;
  bool energy_monotone = true;       // within 1e-9 relative
  double kkt_residual = 0.0;
  double patch_measure = 0.0;
  double Lambda = 0.0;
  // False for eps >= 0.5, where the small-eps diagnostics lose meaning.
  bool asymptotics_reliable = true;
};

SolveResult run(const ProblemConfig& cfg, const GeneratorPair& gen);
// Reuses a precomputed operator, which must match cfg.grid().
SolveResult run(const ProblemConfig& cfg, const GeneratorPair& gen, const StreamOperator& op);

// Largest violation of the three-case optimality conditions: zeta-cases are
// scaled by Lambda / eps^2 (through eps^2 zeta vs Lambda), psi-cases by
// max |psi| on the grid.
double kkt_residual(const ProblemConfig& cfg, const GeneratorPair& gen, const ScalarField& zeta,
                    const ScalarField& psi);
double kkt_residual(const ProblemConfig& cfg, const GeneratorPair& gen, const SolveResult& result);

// nu-measure of {eps^2 zeta >= 0.999 Lambda}.
double patch_measure(const ProblemConfig& cfg, double Lambda, const ScalarField& zeta);

}  // namespace vring
