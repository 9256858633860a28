#pragma once

#include <array>
#include <functional>

#include "sdym/types.hpp"

namespace sdym {

struct R4Point {
  double x1 = 0, x2 = 0, x3 = 0, x4 = 0;

  double operator[](int i) const { return i == 0 ? x1 : i == 1 ? x2 : i == 2 ? x3 : x4; }
  double& operator[](int i) { return i == 0 ? x1 : i == 1 ? x2 : i == 2 ? x3 : x4; }
  cplx u() const { return {x1, x2}; }
  cplx v() const { return {x3, -x4}; }
  R4Point shifted(int axis, double h) const {
    R4Point p = *this;
    p[axis] += h;
    return p;
  }
  double norm() const { return std::sqrt(x1 * x1 + x2 * x2 + x3 * x3 + x4 * x4); }
};

R4Point from_complex(cplx u, cplx v);

// A point of CP^1. Infinity is a tag, never an IEEE inf.
class SpectralPoint {
 public:
  SpectralPoint() = default;
  SpectralPoint(cplx z) : z_(z) {}
  SpectralPoint(double z) : z_(z) {}
  static SpectralPoint infinity() {
    SpectralPoint p;
    p.inf_ = true;
    return p;
  }
  bool is_inf() const { return inf_; }
  bool is_zero() const { return !inf_ && z_ == cplx(0.0); }
  // only meaningful when !is_inf()
  cplx value() const;

 private:
  cplx z_{0.0};
  bool inf_ = false;
};

struct AnnulusSpec {
  double epsilon = 0.25;
  int n_samples = 128;

  void check() const;
  double r_inner() const { return 1.0 / (1.0 + epsilon); }
  double r_outer() const { return 1.0 + epsilon; }
  bool contains(cplx z) const {
    double a = std::abs(z);
    return a > r_inner() && a < r_outer();
  }
  cplx sample(int j) const;
};

using MatField = std::function<Mat2(const R4Point&, const SpectralPoint&)>;

std::pair<cplx, cplx> to_complex(const R4Point& x);
SpectralPoint sigma_cp1(const SpectralPoint& z);
std::array<cplx, 4> sigma_c4(const std::array<cplx, 4>& z);

// (w1, w2) = (u - z conj v, v + z conj u). For z = inf the caller must ask
// for the second chart explicitly.
std::pair<cplx, cplx> incidence(const R4Point& x, const SpectralPoint& z);

// second-chart coordinates (-conj v + u/z, conj u + v/z, 1/z); valid at z = inf
std::array<cplx, 3> incidence_inf_chart(const R4Point& x, const SpectralPoint& z);

MatField star_fn(MatField f);

enum class TwistorDir { X, Y };

// X(z) = d_ubar - z d_v, Y(z) = d_vbar + z d_u by central differences.
// At z = inf the rescaled fields z^-1 X = -d_v, z^-1 Y = d_u are used.
Mat2 twistor_derivative(const MatField& f, TwistorDir which, const R4Point& x,
                        const SpectralPoint& z, double h);

// complex-coordinate derivatives from the four real ones
struct ComplexDerivs {
  Mat2 du, dv, dub, dvb;
};
ComplexDerivs complex_derivs(const std::array<Mat2, 4>& d_real);

}  // namespace sdym
