#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace vring {

struct DomainBounds {
  double r_min = 0.0;
  double r_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;
};

struct CellIndex {
  std::size_t i = 0;  // radial
  std::size_t j = 0;  // axial
};

// Uniform cell-centred grid on a rectangle of the meridional half-plane
// r > 0. Cells are indexed (i, j) with i along r and j along z; flat storage
// is row-major with j fastest.
class GridSpec {
 public:
  GridSpec() = default;

  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  std::size_t n_r() const { return n_r_; }
  std::size_t n_z() const { return n_z_; }
  double dr() const { return dr_; }
  double dz() const { return dz_; }
  std::size_t size() const { return n_r_ * n_z_; }

  double r_center(std::size_t i) const;
  double z_center(std::size_t j) const;
  // nu-measure of a cell: r_i dr dz.
  double cell_volume(std::size_t i) const { return r_center(i) * dr_ * dz_; }
  double cell_area() const { return dr_ * dz_; }

  std::size_t flat(std::size_t i, std::size_t j) const { return i * n_z_ + j; }
  CellIndex cell(std::size_t flat_index) const {
    return {flat_index / n_z_, flat_index % n_z_};
  }
  // Index of the cell mirrored through the midline of the z-range.
  std::size_t mirror_j(std::size_t j) const { return n_z_ - 1 - j; }

  // True when the z-range is centred on z = 0 and n_z is even, so that cells
  // pair up exactly under z -> -z.
  bool symmetric_in_z() const;

  // Short stable fingerprint of the discretisation (FNV-1a over the bounds
  // and counts), used in run manifests.
  std::string fingerprint() const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  friend GridSpec build_grid(const DomainBounds&, std::size_t, std::size_t);
  double r_min_ = 0.0, r_max_ = 0.0, z_min_ = 0.0, z_max_ = 0.0;
  std::size_t n_r_ = 0, n_z_ = 0;
  double dr_ = 0.0, dz_ = 0.0;
};

GridSpec build_grid(const DomainBounds& bounds, std::size_t n_r, std::size_t n_z);

// D = (r*/2, 2r*) x (-1, 1) with r* = kappa / (4 pi W).
DomainBounds default_domain(double kappa, double W);

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridSpec spec, double fill = 0.0);
  ScalarField(GridSpec spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double& operator()(std::size_t i, std::size_t j) { return values_[spec_.flat(i, j)]; }
  double operator()(std::size_t i, std::size_t j) const { return values_[spec_.flat(i, j)]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }

  double max() const;
  double min() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

// Throws ConsistencyError when the two fields live on different grids.
void require_same_grid(const ScalarField& a, const ScalarField& b);

// Midpoint rule for the integral of a field against d nu = r dr dz.
double integrate_nu(const ScalarField& field);
double inner_nu(const ScalarField& a, const ScalarField& b);

// CSV with header `r,z,value`, one row per cell in storage order, 17
// significant digits.
void write_field_csv(std::ostream& out, const ScalarField& field);
void write_field_csv(const std::string& path, const ScalarField& field);

}  // namespace vring
