#include "vring/grid.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "vring/errors.hpp"

namespace vring {

double GridSpec::r_center(std::size_t i) const {
  return r_min_ + (static_cast<double>(i) + 0.5) * dr_;
}

double GridSpec::z_center(std::size_t j) const {
  // Measured from the midline so that mirrored cells get exactly negated
  // coordinates on symmetric grids.
  const double mid = 0.5 * (z_min_ + z_max_);
  return mid + (static_cast<double>(j) + 0.5 - 0.5 * static_cast<double>(n_z_)) * dz_;
}

bool GridSpec::symmetric_in_z() const {
  const double scale = std::max(std::abs(z_min_), std::abs(z_max_));
  return n_z_ % 2 == 0 && std::abs(z_min_ + z_max_) <= 1e-12 * scale;
}

std::string GridSpec::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << r_min_ << ',' << r_max_ << ',' << z_min_ << ',' << z_max_ << ',' << n_r_ << ','
     << n_z_;
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

GridSpec build_grid(const DomainBounds& b, std::size_t n_r, std::size_t n_z) {
  const bool finite = std::isfinite(b.r_min) && std::isfinite(b.r_max) &&
                      std::isfinite(b.z_min) && std::isfinite(b.z_max);
  if (!finite) throw ConfigError("grid bounds must be finite");
  if (!(b.r_min > 0.0)) throw ConfigError("grid requires r_min > 0");
  if (!(b.r_max > b.r_min)) throw ConfigError("grid requires r_max > r_min");
  if (!(b.z_max > b.z_min)) throw ConfigError("grid requires z_max > z_min");
  if (n_r < 2 || n_z < 2) throw ConfigError("grid requires n_r, n_z >= 2");
  GridSpec g;
  g.r_min_ = b.r_min;
  g.r_max_ = b.r_max;
  g.z_min_ = b.z_min;
  g.z_max_ = b.z_max;
  g.n_r_ = n_r;
  g.n_z_ = n_z;
  g.dr_ = (b.r_max - b.r_min) / static_cast<double>(n_r);
  g.dz_ = (b.z_max - b.z_min) / static_cast<double>(n_z);
  return g;
}

DomainBounds default_domain(double kappa, double W) {
  if (!(kappa > 0.0) || !(W > 0.0)) throw ConfigError("kappa and W must be positive");
  const double r_star = kappa / (4.0 * std::numbers::pi * W);
  return {0.5 * r_star, 2.0 * r_star, -1.0, 1.0};
}

ScalarField::ScalarField(GridSpec spec, double fill)
    : spec_(spec), values_(spec.size(), fill) {}

ScalarField::ScalarField(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.size())
    throw ConsistencyError("field value count does not match grid");
}

double ScalarField::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::max(m, v);
  return m;
}

double ScalarField::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : values_) m = std::min(m, v);
  return m;
}

bool ScalarField::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.spec() == b.spec())) throw ConsistencyError("fields live on different grids");
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

double integrate_nu(const ScalarField& field) {
  const GridSpec& g = field.spec();
  double total = 0.0;
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    double column = 0.0;
    for (std::size_t j = 0; j < g.n_z(); ++j) column += field(i, j);
    total += column * g.cell_volume(i);
  }
  return total;
}

double inner_nu(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  const GridSpec& g = a.spec();
  double total = 0.0;
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    double column = 0.0;
    for (std::size_t j = 0; j < g.n_z(); ++j) column += a(i, j) * b(i, j);
    total += column * g.cell_volume(i);
  }
  return total;
}

void write_field_csv(std::ostream& out, const ScalarField& field) {
  const GridSpec& g = field.spec();
  out << "r,z,value\n";
  char buf[96];
  for (std::size_t i = 0; i < g.n_r(); ++i) {
    for (std::size_t j = 0; j < g.n_z(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.r_center(i), g.z_center(j),
                    field(i, j));
      out << buf;
    }
  }
}

void write_field_csv(const std::string& path, const ScalarField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_field_csv(out, field);
}

}  // namespace vring
