#pragma once

#include "sdym/rhsplit.hpp"

namespace sdym {

struct Axis {
  double lo = -2, hi = 2;
  int n = 9;
  double h() const { return n > 1 ? (hi - lo) / (n - 1) : 0.0; }
  double at(int i) const { return lo + i * h(); }
};

struct GridSpec {
  std::array<Axis, 4> axes;

  static GridSpec cube(double lo, double hi, int n);
  // n^4 lattice of spacing h centred on c
  static GridSpec around(const R4Point& c, double h, int n);
  size_t size() const;
  size_t index(const std::array<int, 4>& i) const;
  std::array<int, 4> multi(size_t idx) const;
  R4Point point(const std::array<int, 4>& i) const;
  // at least `margin` sites from every face
  bool interior(const std::array<int, 4>& i, int margin) const;
  double spacing() const;  // largest axis spacing
  void check(int min_count = 5) const;
};

// a Mat2 per lattice site
struct MatGrid {
  GridSpec grid;
  std::vector<Mat2> data;
  Mat2& at(const std::array<int, 4>& i) { return data[grid.index(i)]; }
  const Mat2& at(const std::array<int, 4>& i) const { return data[grid.index(i)]; }
};

enum FComp { F_uv = 0, F_uub, F_uvb, F_vub, F_vvb, F_ubvb };

struct GaugeGrid {
  GridSpec grid;
  std::vector<Mat2> psi0, psiInf;
  std::vector<Mat2> Au, Av, Aub, Avb;     // valid two sites in from the faces
  std::vector<std::array<Mat2, 6>> F;     // same sites as A
  double max_split_residual = 0;

  MatGrid J() const;
};

struct SplitOptions {
  AnnulusSpec annulus{0.25, 32};
  SplitConfig split{8};
};

GaugeGrid reconstruct_connection(const PatchingField& field, const GridSpec& grid, const SplitOptions& opt = {});

struct SDResidual {
  double r1 = 0, r2 = 0, r3 = 0;
  double max() const { return std::max(r1, std::max(r2, r3)); }
};

// max over sites with F populated; box > 0 restricts to |x_i - centre| <= box
SDResidual sd_residual(const GaugeGrid& g, double box = 0);
double sd_residual_twistor(const GaugeGrid& g, const std::vector<SpectralPoint>& zs);
// F(X(z), Y(z)) from the six complex components
Mat2 curvature_on_twistor(const std::array<Mat2, 6>& F, const SpectralPoint& z);

// second-order central differences along the four real axes at site idx
std::array<Mat2, 4> central_gradient(const std::vector<Mat2>& f, size_t idx, const GridSpec& g);

double yang_residual(const MatGrid& J);

// real-frame curvature and the density -sum_{mu<nu} tr F_{mu nu}^2
std::array<std::array<Mat2, 4>, 4> real_frame_curvature(const std::array<Mat2, 6>& F);
double density_from_curvature(const std::array<Mat2, 6>& F);

struct DensityOptions {
  double h = 1e-2;  // stencil step, absolute
  AnnulusSpec annulus{0.25, 64};
  SplitConfig split{16};
};

// pointwise action density from a fourth-order stencil of local splittings
double action_density(const PatchingField& field, const R4Point& x, const DensityOptions& opt = {});
std::array<Mat2, 6> curvature_at(const PatchingField& field, const R4Point& x, const DensityOptions& opt = {});

enum class Quadrature { Radial, Lattice };

struct ActionOptions {
  Quadrature quadrature = Quadrature::Radial;
  R4Point centre;            // radial: symmetry centre
  double scale = 1.0;        // radial: size scale, sets the cutoff radius and stencil step
  double radius_factor = 10;
  double simpson_tol = 1e-6;  // relative
  double extent = 2;          // lattice: half-width
  int n = 9;                  // lattice: points per axis
  SplitOptions lattice_split;
};

struct ActionResult {
  double action = 0;  // bulk + tail
  double bulk = 0;
  double tail = 0;
  int evaluations = 0;
  bool tail_warning = false;
};

ActionResult action_integral(const PatchingField& field, const ActionOptions& opt = {});

}  // namespace sdym
