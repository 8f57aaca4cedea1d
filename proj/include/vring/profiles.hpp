#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace vring {

enum class ProfileFamily { power_law, turkington, beltrami, mixed, tabulated, custom };

std::string to_string(ProfileFamily family);
ProfileFamily parse_profile_family(const std::string& name);

// Profile pair (f, g) with i(r, t) = g(t) + f(t) / r^2. The four built-in
// families carry closed forms for I, J, dJ/ds and H; tabulated and custom
// pairs go through the numeric paths.
class GeneratorPair {
 public:
  static GeneratorPair power_law(double p);      // f = 0,    g = t_+^p
  static GeneratorPair turkington(double alpha);  // f = t_+,  g = alpha chi(t > 0)
  static GeneratorPair beltrami(double p);       // f = t_+^p, g = 0
  static GeneratorPair mixed(double p);          // f = g = t_+^p

  // Piecewise-linear f and g through (t_k, f_k, g_k), t_0 = 0 < t_1 < ...,
  // extended linearly past the last knot and by zero for t <= 0. g_0 is the
  // right limit g(0+).
  static GeneratorPair tabulated(std::vector<double> t, std::vector<double> f,
                                 std::vector<double> g);
  // CSV with header `t,f,g`.
  static GeneratorPair from_table_csv(const std::string& path);

  // Arbitrary callables; everything but f and g is computed numerically.
  static GeneratorPair custom(std::string name, std::function<double(double)> f,
                              std::function<double(double)> g);

  ProfileFamily family() const { return family_; }
  double p() const { return p_; }
  double alpha() const { return alpha_; }
  const std::string& name() const { return name_; }
  bool has_closed_form() const;

  double f(double t) const;
  double g(double t) const;
  // Right limit of g at 0.
  double g0_plus() const;
  // True when f vanishes identically, so there is no swirl.
  bool swirl_free() const;

  // Exact primitives F(t) = \int_0^t f and G(t) = \int_0^t g for tabulated
  // pairs; empty otherwise.
  double table_primitive_f(double t) const;
  double table_primitive_g(double t) const;

 private:
  GeneratorPair() = default;

  struct Table {
    std::vector<double> t, f, g, F, G;  // F, G cumulative integrals at knots
  };

  ProfileFamily family_ = ProfileFamily::power_law;
  double p_ = 1.0;
  double alpha_ = 0.0;
  std::string name_;
  std::shared_ptr<const Table> table_;
  std::function<double(double)> f_fn_, g_fn_;
};

double eval_i(const GeneratorPair& gen, double r, double t);
// I(r, t) = \int_0^t i(r, s) ds.
double eval_I(const GeneratorPair& gen, double r, double t);
// J(r, s) = sup_t [s t - I(r, t)] for s >= 0 and 0 for s < 0.
double eval_J(const GeneratorPair& gen, double r, double s);
// Grid search over [0, t_max] with n intervals and golden-section polish.
// Throws RangeError when i(r, t_max) <= s, i.e. the sup is not bracketed.
double eval_J_numeric(const GeneratorPair& gen, double r, double s, double t_max,
                      std::size_t n = 2000);
double eval_dJds(const GeneratorPair& gen, double r, double s);
// Swirl generator with H H' = f and H(0) = 0.
double eval_H(const GeneratorPair& gen, double t);

// Smallest t_max (by doubling from 1) with i(r, t_max) > s.
double bracket_conjugate(const GeneratorPair& gen, double r, double s);

struct AssumptionSampleSpec {
  double d = 2.0;             // radii sampled in (0, d]
  std::size_t n_r = 16;
  double t_max = 50.0;        // t sampled geometrically in [1e-4, t_max]
  std::size_t n_t = 200;
  std::vector<double> taus = {0.01, 0.1, 1.0, 10.0};
};

struct AssumptionCheck {
  std::string name;  // a1 .. a4
  bool passed = false;
  std::string detail;
};

struct AssumptionReport {
  std::string generator;
  std::vector<AssumptionCheck> checks;
  // (a3) witnesses when found.
  double delta0 = 0.0;
  double delta1 = 0.0;
  bool all_passed() const;
  // Sampling only certifies the inequalities on the sampled set.
  std::string coverage_note;
};

AssumptionReport check_assumptions(const GeneratorPair& gen,
                                   const AssumptionSampleSpec& sample = {});

}  // namespace vring
