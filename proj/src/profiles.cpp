#include "vring/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vring/errors.hpp"
#include "vring/quadrature.hpp"

namespace vring {
namespace {

double pos(double t) { return t > 0.0 ? t : 0.0; }

void require_radius(double r) {
  if (!(r > 0.0)) throw DomainError("generator evaluated at non-positive radius");
}

void require_exponent(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ConfigError("profile exponent p must be > 0");
}

// Linear interpolation on knots t (ascending, t[0] = 0), linear extension
// past the last knot.
double interp(const std::vector<double>& t, const std::vector<double>& y, double x) {
  if (x <= 0.0) return 0.0;
  const std::size_t n = t.size();
  std::size_t k;
  if (x >= t[n - 1]) {
    k = n - 2;
  } else {
    k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  }
  const double w = (x - t[k]) / (t[k + 1] - t[k]);
  return y[k] + w * (y[k + 1] - y[k]);
}

// \int_0^x of the same interpolant, given cumulative integrals Y at knots.
double interp_primitive(const std::vector<double>& t, const std::vector<double>& y,
                        const std::vector<double>& Y, double x) {
  if (x <= 0.0) return 0.0;
  const std::size_t n = t.size();
  std::size_t k;
  if (x >= t[n - 1]) {
    k = n - 2;
    if (x == t[n - 1]) return Y[n - 1];
  } else {
    k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), x) - t.begin()) - 1;
  }
  const double yx = interp(t, y, x);
  return Y[k] + 0.5 * (y[k] + yx) * (x - t[k]);
}

double numeric_primitive(const std::function<double(double)>& fn, double t) {
  if (t <= 0.0) return 0.0;
  auto q = integrate_adaptive([&](double s) { return fn(s); }, {0.0, t}, 1e-13, 1e-300);
  return q.value;
}

}  // namespace

std::string to_string(ProfileFamily family) {
  switch (family) {
    case ProfileFamily::power_law: return "power_law";
    case ProfileFamily::turkington: return "turkington";
    case ProfileFamily::beltrami: return "beltrami";
    case ProfileFamily::mixed: return "mixed";
    case ProfileFamily::tabulated: return "tabulated";
    case ProfileFamily::custom: return "custom";
  }
  return "unknown";
}

ProfileFamily parse_profile_family(const std::string& name) {
  for (auto f : {ProfileFamily::power_law, ProfileFamily::turkington, ProfileFamily::beltrami,
                 ProfileFamily::mixed, ProfileFamily::tabulated, ProfileFamily::custom})
    if (to_string(f) == name) return f;
  throw ConfigError("unknown profile family '" + name + "'");
}

GeneratorPair GeneratorPair::power_law(double p) {
  require_exponent(p);
  GeneratorPair gen;
  gen.family_ = ProfileFamily::power_law;
  gen.p_ = p;
  gen.name_ = "power_law(p=" + std::to_string(p) + ")";
  return gen;
}

GeneratorPair GeneratorPair::turkington(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("turkington alpha must be >= 0");
  GeneratorPair gen;
  gen.family_ = ProfileFamily::turkington;
  gen.alpha_ = alpha;
  gen.name_ = "turkington(alpha=" + std::to_string(alpha) + ")";
  return gen;
}

GeneratorPair GeneratorPair::beltrami(double p) {
  require_exponent(p);
  GeneratorPair gen;
  gen.family_ = ProfileFamily::beltrami;
  gen.p_ = p;
  gen.name_ = "beltrami(p=" + std::to_string(p) + ")";
  return gen;
}

GeneratorPair GeneratorPair::mixed(double p) {
  require_exponent(p);
  GeneratorPair gen;
  gen.family_ = ProfileFamily::mixed;
  gen.p_ = p;
  gen.name_ = "mixed(p=" + std::to_string(p) + ")";
  return gen;
}

GeneratorPair GeneratorPair::tabulated(std::vector<double> t, std::vector<double> f,
                                       std::vector<double> g) {
  if (t.size() < 2 || f.size() != t.size() || g.size() != t.size())
    throw ConfigError("profile table needs >= 2 rows of equal length");
  if (t[0] != 0.0) throw ConfigError("profile table must start at t = 0");
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (!std::isfinite(t[k]) || !std::isfinite(f[k]) || !std::isfinite(g[k]))
      throw ConfigError("profile table contains non-finite entries");
    if (k > 0 && !(t[k] > t[k - 1])) throw ConfigError("profile table t must be increasing");
  }
  auto table = std::make_shared<Table>();
  table->F.assign(t.size(), 0.0);
  table->G.assign(t.size(), 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double h = t[k] - t[k - 1];
    table->F[k] = table->F[k - 1] + 0.5 * h * (f[k] + f[k - 1]);
    table->G[k] = table->G[k - 1] + 0.5 * h * (g[k] + g[k - 1]);
  }
  table->t = std::move(t);
  table->f = std::move(f);
  table->g = std::move(g);
  GeneratorPair gen;
  gen.family_ = ProfileFamily::tabulated;
  gen.name_ = "tabulated(" + std::to_string(table->t.size()) + " knots)";
  gen.table_ = std::move(table);
  return gen;
}

GeneratorPair GeneratorPair::from_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open profile table '" + path + "'");
  std::string line;
  std::getline(in, line);
  line.erase(std::remove_if(line.begin(), line.end(), ::isspace), line.end());
  if (line != "t,f,g") throw ConfigError("profile table header must be 't,f,g'");
  std::vector<double> t, f, g;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double a, b, c;
    if (!(fields >> a >> b >> c))
      throw ConfigError("profile table row " + std::to_string(row) + " is malformed");
    t.push_back(a);
    f.push_back(b);
    g.push_back(c);
  }
  return tabulated(std::move(t), std::move(f), std::move(g));
}

GeneratorPair GeneratorPair::custom(std::string name, std::function<double(double)> f,
                                    std::function<double(double)> g) {
  if (!f || !g) throw ConfigError("custom generator needs both f and g");
  GeneratorPair gen;
  gen.family_ = ProfileFamily::custom;
  gen.name_ = std::move(name);
  gen.f_fn_ = std::move(f);
  gen.g_fn_ = std::move(g);
  return gen;
}

bool GeneratorPair::has_closed_form() const {
  return family_ != ProfileFamily::tabulated && family_ != ProfileFamily::custom;
}

double GeneratorPair::f(double t) const {
  switch (family_) {
    case ProfileFamily::power_law: return 0.0;
    case ProfileFamily::turkington: return pos(t);
    case ProfileFamily::beltrami:
    case ProfileFamily::mixed: return t > 0.0 ? std::pow(t, p_) : 0.0;
    case ProfileFamily::tabulated: return interp(table_->t, table_->f, t);
    case ProfileFamily::custom: return f_fn_(t);
  }
  return 0.0;
}

double GeneratorPair::g(double t) const {
  switch (family_) {
    case ProfileFamily::power_law:
    case ProfileFamily::mixed: return t > 0.0 ? std::pow(t, p_) : 0.0;
    case ProfileFamily::turkington: return t > 0.0 ? alpha_ : 0.0;
    case ProfileFamily::beltrami: return 0.0;
    case ProfileFamily::tabulated: return interp(table_->t, table_->g, t);
    case ProfileFamily::custom: return g_fn_(t);
  }
  return 0.0;
}

double GeneratorPair::g0_plus() const {
  switch (family_) {
    case ProfileFamily::turkington: return alpha_;
    case ProfileFamily::tabulated: return table_->g[0];
    case ProfileFamily::custom: return g_fn_(std::numeric_limits<double>::min());
    default: return 0.0;
  }
}

bool GeneratorPair::swirl_free() const {
  switch (family_) {
    case ProfileFamily::power_law: return true;
    case ProfileFamily::tabulated:
      return std::all_of(table_->f.begin(), table_->f.end(), [](double v) { return v == 0.0; });
    default: return false;
  }
}

double GeneratorPair::table_primitive_f(double t) const {
  if (!table_) return 0.0;
  return interp_primitive(table_->t, table_->f, table_->F, t);
}

double GeneratorPair::table_primitive_g(double t) const {
  if (!table_) return 0.0;
  return interp_primitive(table_->t, table_->g, table_->G, t);
}

double eval_i(const GeneratorPair& gen, double r, double t) {
  require_radius(r);
  if (t <= 0.0) return 0.0;
  return gen.g(t) + gen.f(t) / (r * r);
}

double eval_I(const GeneratorPair& gen, double r, double t) {
  require_radius(r);
  if (t <= 0.0) return 0.0;
  const double p = gen.p();
  const double r2 = r * r;
  switch (gen.family()) {
    case ProfileFamily::power_law: return std::pow(t, p + 1.0) / (p + 1.0);
    case ProfileFamily::turkington: return gen.alpha() * t + t * t / (2.0 * r2);
    case ProfileFamily::beltrami: return std::pow(t, p + 1.0) / ((p + 1.0) * r2);
    case ProfileFamily::mixed: return (1.0 + 1.0 / r2) * std::pow(t, p + 1.0) / (p + 1.0);
    case ProfileFamily::tabulated:
      return gen.table_primitive_g(t) + gen.table_primitive_f(t) / r2;
    case ProfileFamily::custom:
      return numeric_primitive([&](double s) { return gen.g(s); }, t) +
             numeric_primitive([&](double s) { return gen.f(s); }, t) / r2;
  }
  return 0.0;
}

double bracket_conjugate(const GeneratorPair& gen, double r, double s) {
  double t = 1.0;
  for (int k = 0; k < 2000; ++k) {
    if (eval_i(gen, r, t) > s) return t;
    t *= 2.0;
    if (!std::isfinite(t)) break;
  }
  throw RangeError("i(r, t) does not exceed s = " + std::to_string(s) + " for any finite t");
}

double eval_J_numeric(const GeneratorPair& gen, double r, double s, double t_max,
                      std::size_t n) {
  require_radius(r);
  if (s < 0.0) throw DomainError("numeric conjugate requires s >= 0");
  if (n < 2) n = 2;
  if (!(eval_i(gen, r, t_max) > s))
    throw RangeError("t_max does not bracket the supremum (i(r, t_max) <= s)");
  auto phi = [&](double t) { return s * t - eval_I(gen, r, t); };
  const double h = t_max / static_cast<double>(n);
  std::size_t best = 0;
  double best_val = phi(0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    const double v = phi(h * static_cast<double>(k));
    if (v > best_val) {
      best_val = v;
      best = k;
    }
  }
  // phi is concave, so the maximiser lies within one grid step of `best`.
  double a = best == 0 ? 0.0 : h * static_cast<double>(best - 1);
  double b = std::min(t_max, h * static_cast<double>(best + 1));
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = phi(x1), f2 = phi(x2);
  for (int it = 0; it < 200 && b - a > 1e-14 * (1.0 + b); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = phi(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = phi(x1);
    }
  }
  return std::max({best_val, f1, f2, 0.0});
}

double eval_J(const GeneratorPair& gen, double r, double s) {
  require_radius(r);
  if (s <= 0.0) return 0.0;
  const double p = gen.p();
  const double r2 = r * r;
  switch (gen.family()) {
    case ProfileFamily::power_law: return p / (p + 1.0) * std::pow(s, 1.0 + 1.0 / p);
    case ProfileFamily::turkington: {
      const double e = pos(s - gen.alpha());
      return 0.5 * e * e * r2;
    }
    case ProfileFamily::beltrami:
      return p / (p + 1.0) * std::pow(r2, 1.0 / p) * std::pow(s, 1.0 + 1.0 / p);
    case ProfileFamily::mixed:
      return p / (p + 1.0) * std::pow(r2 / (r2 + 1.0), 1.0 / p) * std::pow(s, 1.0 + 1.0 / p);
    default: break;
  }
  // J(s) = s t* - I(t*) at the generalised inverse t* of i(r, .).
  const double t = eval_dJds(gen, r, s);
  return std::max(0.0, s * t - eval_I(gen, r, t));
}

double eval_dJds(const GeneratorPair& gen, double r, double s) {
  require_radius(r);
  if (s <= 0.0) return 0.0;
  const double p = gen.p();
  const double r2 = r * r;
  switch (gen.family()) {
    case ProfileFamily::power_law: return std::pow(s, 1.0 / p);
    case ProfileFamily::turkington: return pos(s - gen.alpha()) * r2;
    case ProfileFamily::beltrami: return std::pow(r2 * s, 1.0 / p);
    case ProfileFamily::mixed: return std::pow(r2 * s / (r2 + 1.0), 1.0 / p);
    default: break;
  }
  // Generalised inverse of the nondecreasing map t -> i(r, t).
  if (gen.g0_plus() + gen.f(0.0) / r2 >= s) return 0.0;
  double lo = 0.0;
  double hi = bracket_conjugate(gen, r, s);
  for (int it = 0; it < 400 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval_i(gen, r, mid) < s)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double eval_H(const GeneratorPair& gen, double t) {
  if (t <= 0.0) return 0.0;
  const double p = gen.p();
  switch (gen.family()) {
    case ProfileFamily::power_law: return 0.0;
    case ProfileFamily::turkington: return t;
    case ProfileFamily::beltrami:
    case ProfileFamily::mixed: return std::sqrt(2.0 / (p + 1.0)) * std::pow(t, 0.5 * (p + 1.0));
    case ProfileFamily::tabulated: return std::sqrt(2.0 * gen.table_primitive_f(t));
    case ProfileFamily::custom:
      return std::sqrt(2.0 * numeric_primitive([&](double s) { return gen.f(s); }, t));
  }
  return 0.0;
}

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const AssumptionCheck& c) { return c.passed; });
}

AssumptionReport check_assumptions(const GeneratorPair& gen, const AssumptionSampleSpec& sample) {
  AssumptionReport report;
  report.generator = gen.name();

  std::vector<double> radii;
  for (std::size_t k = 1; k <= sample.n_r; ++k)
    radii.push_back(sample.d * static_cast<double>(k) / static_cast<double>(sample.n_r));

  std::vector<double> tpos;  // geometric on [1e-4, t_max]
  const double t0 = 1e-4;
  for (std::size_t k = 0; k < sample.n_t; ++k)
    tpos.push_back(t0 * std::pow(sample.t_max / t0, static_cast<double>(k) /
                                                        static_cast<double>(sample.n_t - 1)));
  std::vector<double> tall;
  for (auto it = tpos.rbegin(); it != tpos.rend(); ++it) tall.push_back(-*it);
  tall.push_back(0.0);
  tall.insert(tall.end(), tpos.begin(), tpos.end());

  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };

  {  // (a1)
    AssumptionCheck c{"a1", true, "f, g nonnegative and nondecreasing on sampled t"};
    for (std::size_t k = 0; k < tall.size() && c.passed; ++k) {
      const double t = tall[k];
      const double fv = gen.f(t), gv = gen.g(t);
      if (fv < 0.0 || gv < 0.0) {
        c.passed = false;
        c.detail = "negative value at t = " + fmt(t);
      } else if (k > 0) {
        const double tp = tall[k - 1];
        const double slack = 1e-14 * (1.0 + std::abs(fv) + std::abs(gv));
        if (fv < gen.f(tp) - slack || gv < gen.g(tp) - slack) {
          c.passed = false;
          c.detail = "decrease between t = " + fmt(tp) + " and t = " + fmt(t);
        }
      }
    }
    report.checks.push_back(c);
  }

  {  // (a2)
    AssumptionCheck c{"a2", true, "i(r, .) zero on t <= 0 and strictly increasing on t > 0"};
    for (double r : radii) {
      for (std::size_t k = 0; k < tall.size() && c.passed; ++k) {
        const double t = tall[k];
        const double v = eval_i(gen, r, t);
        if (t <= 0.0 && v != 0.0) {
          c.passed = false;
          c.detail = "i(" + fmt(r) + ", " + fmt(t) + ") != 0";
        } else if (t > 0.0 && k > 0 && tall[k - 1] > 0.0 && !(v > eval_i(gen, r, tall[k - 1]))) {
          c.passed = false;
          c.detail = "i not strictly increasing at r = " + fmt(r) + ", t = " + fmt(t);
        }
      }
      if (!c.passed) break;
    }
    report.checks.push_back(c);
  }

  {  // (a3)
    AssumptionCheck c{"a3", false, "no (delta0, delta1) on the search grid satisfies the bound"};
    const double d1_grid[] = {0.0, 0.5, 1.0, 2.0, 5.0, 10.0};
    // Tabulate once; the search only rescales.
    struct Sample {
      double I, it, i;
    };
    std::vector<Sample> samples;
    for (double r : radii)
      for (double t : tpos) {
        const double iv = eval_i(gen, r, t);
        samples.push_back({eval_I(gen, r, t), iv * t, iv});
      }
    // Smallest delta1 first, then smallest delta0.
    for (double d1 : d1_grid) {
      for (int k0 = 1; k0 <= 9 && !c.passed; ++k0) {
        const double d0 = 0.1 * k0;
        const bool ok = std::all_of(samples.begin(), samples.end(), [&](const Sample& s) {
          return s.I <= d0 * s.it + d1 * s.i + 1e-12 * (1.0 + std::abs(s.I));
        });
        if (ok) {
          c.passed = true;
          report.delta0 = d0;
          report.delta1 = d1;
          c.detail = "I <= delta0 i t + delta1 i with delta0 = " + fmt(d0) +
                     ", delta1 = " + fmt(d1) + " on all samples";
        }
      }
      if (c.passed) break;
    }
    report.checks.push_back(c);
  }

  {  // (a4)
    AssumptionCheck c{"a4", true, "i(r, t) exp(-tau t) decreases to 0 along t = 2^k"};
    for (double tau : sample.taus) {
      for (double r : {radii.front(), radii.back()}) {
        std::vector<double> v;
        for (int k = 0; k <= 40; ++k) {
          const double t = std::ldexp(1.0, k);
          const double iv = eval_i(gen, r, t);
          v.push_back(iv > 0.0 ? std::exp(std::log(iv) - tau * t) : 0.0);
        }
        const double peak = *std::max_element(v.begin(), v.end());
        bool tail_decreasing = true;
        for (std::size_t k = v.size() - 5; k < v.size(); ++k)
          if (v[k] > v[k - 1]) tail_decreasing = false;
        if (!tail_decreasing || !(v.back() <= 1e-12 * peak) || !std::isfinite(peak)) {
          c.passed = false;
          c.detail = "no decay for tau = " + fmt(tau) + " at r = " + fmt(r);
        }
      }
      if (!c.passed) break;
    }
    report.checks.push_back(c);
  }

  report.coverage_note =
      "inequalities verified on " + std::to_string(radii.size()) + " radii in (0, " +
      fmt(sample.d) + "] and " + std::to_string(tpos.size()) + " values of t in [1e-4, " +
      fmt(sample.t_max) + "]; behaviour between and beyond samples is not certified";
  return report;
}

}  // namespace vring
