#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "vring/profiles.hpp"

namespace vring::validation {

struct GreensOptions {
  std::size_t pairs = 1000;
  double sigma_min = 1e-6;
  double agreement_tol = 1e-10;
  // Remainder stability: the coarse sample is a prefix of the fine one.
  std::size_t remainder_coarse = 1000;
  std::size_t remainder_fine = 10000;
  double remainder_sigma_min = 1e-4;
  double remainder_sigma_max = 10.0;
  double remainder_growth = 1.05;
  std::uint64_t seed = 20240611;
  double kappa = 12.566370614359172;
  double W = 1.0;
};

struct GreensRow {
  double r, z, rp, zp, sigma, K_quad, K_closed, rel_err, bound;
};

struct GreensReport {
  std::vector<GreensRow> rows;
  double max_rel_err = 0.0;
  std::size_t nonpositive = 0;
  std::size_t bound_violations = 0;
  double worst_bound_ratio = 0.0;  // max K / bound
  // Same check with the constant 1/(2 pi) in place of 1/(4 pi).
  std::size_t wide_bound_violations = 0;
  double remainder_sup_coarse = 0.0;
  double remainder_sup_fine = 0.0;
  double remainder_limit = 0.0;
  double seconds = 0.0;
  bool agreement_passed = false;
  bool bound_passed = false;
  bool remainder_passed = false;
  bool passed() const { return agreement_passed && bound_passed && remainder_passed; }
  std::string csv() const;  // r,z,rp,zp,sigma,K_quad,K_closed,rel_err,bound
  nlohmann::json summary() const;
};

GreensReport run_greens(const GreensOptions& opts = {});

struct BathtubOptions {
  std::size_t trials = 200;
  std::size_t max_atoms = 10;
  double tol = 1e-12;
  std::uint64_t seed = 20240611;
};

struct BathtubReport {
  std::size_t trials = 0;
  std::size_t value_mismatches = 0;
  std::size_t level_mismatches = 0;
  std::size_t structure_failures = 0;
  std::size_t capacity_failures = 0;
  std::size_t monotonicity_failures = 0;
  double max_value_error = 0.0;
  std::vector<std::string> failures;  // first few, for the report
  double seconds = 0.0;
  bool passed() const {
    return value_mismatches == 0 && level_mismatches == 0 && structure_failures == 0 &&
           capacity_failures == 0 && monotonicity_failures == 0;
  }
  nlohmann::json summary() const;
};

BathtubReport run_bathtub(const BathtubOptions& opts = {});

struct ProfileFamilyReport {
  std::string generator;
  double max_J_error = 0.0;          // |J - J_numeric| / (1 + |J|)
  double max_inverse_error = 0.0;    // both directions
  double max_fenchel_young_gap = 0.0;
  double min_fenchel_young_slack = 0.0;  // min of I + J - s t over random (s, t)
  double max_convexity_violation = 0.0;
  double max_H_error = 0.0;
  AssumptionReport assumptions;
  bool J_passed = false, inverse_passed = false, fenchel_young_passed = false;
  bool convexity_passed = false, H_passed = false;
  bool passed() const {
    return J_passed && inverse_passed && fenchel_young_passed && convexity_passed && H_passed &&
           assumptions.all_passed();
  }
  nlohmann::json summary() const;
};

struct ProfilesOptions {
  double r_star = 1.0;
  std::uint64_t seed = 20240611;
};

struct ProfilesReport {
  std::vector<ProfileFamilyReport> families;
  double seconds = 0.0;
  bool passed() const;
  nlohmann::json summary() const;
};

// The generator list used by the suite: power_law, beltrami and mixed with
// p in {1, 2} and turkington with alpha = 1.
std::vector<GeneratorPair> profile_suite_generators();
ProfileFamilyReport check_generator(const GeneratorPair& gen, const ProfilesOptions& opts = {});
ProfilesReport run_profiles(const ProfilesOptions& opts = {});

struct CrossOperatorReport {
  std::vector<double> box_factors;
  std::vector<double> rel_l2;  // per box factor
  double seconds = 0.0;
  bool within_tolerance = false;  // every error <= 5%
  bool decreasing = false;
  bool passed() const { return within_tolerance && decreasing; }
  nlohmann::json summary() const;
};

// Uniform disc patch of radius `patch_radius` centred at (r*, 0) on an
// n_r x n_z grid of D; Green summation against the finite-difference solver
// on boxes with margins factor * diam(D).
CrossOperatorReport run_cross_operator(std::size_t n_r = 96, std::size_t n_z = 128,
                                       double patch_radius = 0.2,
                                       std::vector<double> box_factors = {3.0, 6.0, 12.0});

}  // namespace vring::validation
