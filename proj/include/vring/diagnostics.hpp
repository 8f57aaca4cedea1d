#pragma once

#include <span>
#include <string>
#include <vector>

#include "vring/fd_solver.hpp"
#include "vring/grid.hpp"
#include "vring/profiles.hpp"
#include "vring/solver.hpp"

namespace vring {

inline constexpr double kDefaultSupportThreshold = 1e-6;

struct SupportStats {
  double theta_minus = 0.0;  // radial extent of the support on the row nearest z = 0
  double theta_plus = 0.0;
  double diam = 0.0;          // largest distance between support cell centres
  double dist_to_ring = 0.0;  // sup over support of the distance to (r*, 0)
  double planar_area = 0.0;   // dr dz times the number of support cells
  std::size_t cells = 0;
};

// Support = cells with zeta > threshold_fraction * max zeta. Throws
// DomainError when empty.
SupportStats support_stats(const ScalarField& zeta, double r_star,
                           double threshold_fraction = kDefaultSupportThreshold);

// sqrt(area / pi) for the planar area of the support.
double core_radius(const SupportStats& stats);

struct Point2 {
  double r = 0.0;
  double z = 0.0;
};

// Centroid under the planar measure dr dz.
Point2 center_of_vorticity(const ScalarField& zeta);

struct ScaledProfile {
  // phi(x) = eps^2 zeta(X + eps x) sampled at x = (coordinate(a), coordinate(b)),
  // flat index a * samples + b with the radial offset along a.
  std::vector<double> phi;
  std::size_t samples = 0;
  double window = 0.0;
  double coordinate(std::size_t k) const {
    return -window + 2.0 * window * static_cast<double>(k) / static_cast<double>(samples - 1);
  }
  double planar_mass = 0.0;        // \int phi dx, equal to \int zeta dr dz
  double angular_variation = 0.0;  // relative L2 deviation from the angular mean
  std::vector<double> radial_mean; // angular mean on rings of width window / n
  bool radially_nonincreasing = false;  // within 5% of the peak
};

// Throws DomainError when the support reaches beyond the window.
ScaledProfile scaled_profile(const ScalarField& zeta, Point2 center, double epsilon,
                             double window, std::size_t samples = 129,
                             double threshold_fraction = kDefaultSupportThreshold);

// Support 4-connected with one component and no holes (the complement is
// 8-connected inside a one-cell padded bounding box).
bool topology_check(const ScalarField& zeta, double threshold_fraction = kDefaultSupportThreshold);

struct VelocityField {
  ScalarField v_r, v_theta, v_z;
};

// v_r = -psi_z / r, v_z = psi_r / r with centred differences (one-sided
// second order on the edges), v_theta = H(psi) / (eps r).
VelocityField velocity_field(const ScalarField& psi, const GeneratorPair& gen, double epsilon);

struct FarFieldProbe {
  double r = 0.0, z = 0.0;
  double distance = 0.0;   // from the nearest support cell
  double v_z = 0.0;
  double expected = 0.0;   // -W log(1/eps)
  double rel_error = 0.0;
};

struct AxisProbe {
  // |psi0| / r^2 on the z = 0 column between the axis offset and r_min(D).
  std::vector<double> r;
  std::vector<double> ratio;
  bool bounded = false;
};

struct DiagnosticsRecord {
  SupportStats support;
  Point2 center;
  double mu = 0.0;
  double energy = 0.0;
  double mass = 0.0;
  bool simply_connected = false;
  bool support_interior = false;  // no support cell on the outer ring of D
  bool psi_negative_on_boundary = false;
  double dz_psi_max = 0.0;        // max of psi_z over z > 0, scaled by max |psi|
  bool psi_max_in_support = false;
  double swirl_max = 0.0;
  bool swirl_on_core = false;     // {v_theta > 0} matches the support
  FarFieldProbe far_field;
  AxisProbe axis;
  double core_radius = 0.0;
};

struct DiagnosticsOptions {
  double threshold_fraction = kDefaultSupportThreshold;
  bool far_field = true;
  double box_factor = 4.0;  // fd box margin in units of diam(D)
};

DiagnosticsRecord diagnose(const ProblemConfig& cfg, const GeneratorPair& gen,
                           const SolveResult& result, const DiagnosticsOptions& options = {});

// Far-field and axis probes on an fd_solve extension of the converged state.
FarFieldProbe probe_far_field(const ProblemConfig& cfg, const SolveResult& result,
                              const FdSolution& fd, const SupportStats& support);
AxisProbe probe_axis(const FdSolution& fd, const GridSpec& domain);

// One sweep row.
struct SweepPoint {
  double epsilon = 0.0;
  double mu = 0.0;
  double E = 0.0;
  double R_center = 0.0;
  double theta_minus = 0.0, theta_plus = 0.0;
  double diam = 0.0;
  double dist_to_ring = 0.0;
  double mass = 0.0;
  double kkt_residual = 0.0;
  double patch_measure = 0.0;
  bool simply_connected = false;
  double far_vz = 0.0;
  double core_radius = 0.0;
  std::string status = "converged";
};

SweepPoint make_sweep_point(const ProblemConfig& cfg, const SolveResult& result,
                            const DiagnosticsRecord& record);

struct AsymptoticFit {
  double slope_mu = 0.0, intercept_mu = 0.0, r_squared_mu = 0.0;
  double slope_E = 0.0, intercept_E = 0.0, r_squared_E = 0.0;
  double predicted_slope_mu = 0.0;  // 3 kappa^2 / (32 pi^2 W)
  double predicted_slope_E = 0.0;   // kappa^3 / (32 pi^2 W)
  double rel_error_mu = 0.0, rel_error_E = 0.0;
  std::size_t points = 0;
};

// Least squares of mu and E against log(1/eps). Needs >= 3 distinct eps.
AsymptoticFit asymptotic_fit(std::span<const SweepPoint> points, double kappa, double W);

struct KelvinHicksReport {
  // W log(1/eps) - (kappa / (4 pi r*)) (log(8 r* / core_radius) - 1/4) per point.
  std::vector<double> differences;
  double spread = 0.0;
  bool bounded = false;  // spread <= 0.25 W
  std::vector<double> core_ratio;  // core_radius / eps
  double core_ratio_factor = 0.0;  // max / min
};

KelvinHicksReport kelvin_hicks_check(std::span<const SweepPoint> points, double kappa, double W);

struct LineFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
};
LineFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace vring
