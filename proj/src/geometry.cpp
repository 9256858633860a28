#include "sdym/geometry.hpp"

#include <numbers>

namespace sdym {

const char* error_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::InfiniteChart: return "InfiniteChart";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateLine: return "DegenerateLine";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::PoleAtChartBoundary: return "PoleAtChartBoundary";
    case ErrorCode::PoleOutsideAnnulus: return "PoleOutsideAnnulus";
    case ErrorCode::NontrivialSplittingType: return "NontrivialSplittingType";
    case ErrorCode::NotReal: return "NotReal";
    case ErrorCode::QuadratureDiverged: return "QuadratureDiverged";
    case ErrorCode::QuadratureTail: return "QuadratureTail";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::FitResidualTooLarge: return "FitResidualTooLarge";
    case ErrorCode::BlowupReached: return "BlowupReached";
    case ErrorCode::BadInput: return "BadInput";
  }
  return "Unknown";
}

R4Point from_complex(cplx u, cplx v) { return {u.real(), u.imag(), v.real(), -v.imag()}; }

cplx SpectralPoint::value() const {
  if (inf_) throw Error(ErrorCode::InfiniteChart, "affine value requested at z = inf");
  return z_;
}

void AnnulusSpec::check() const {
  if (!(epsilon > 0)) throw Error(ErrorCode::BadInput, "annulus epsilon must be positive");
  if (n_samples < 8 || (n_samples & (n_samples - 1)))
    throw Error(ErrorCode::BadInput, "n_samples must be a power of two >= 8");
}

cplx AnnulusSpec::sample(int j) const {
  return std::polar(1.0, 2.0 * std::numbers::pi * j / n_samples);
}

std::pair<cplx, cplx> to_complex(const R4Point& x) { return {x.u(), x.v()}; }

SpectralPoint sigma_cp1(const SpectralPoint& z) {
  if (z.is_inf()) return SpectralPoint(0.0);
  if (z.is_zero()) return SpectralPoint::infinity();
  return SpectralPoint(-1.0 / std::conj(z.value()));
}

std::array<cplx, 4> sigma_c4(const std::array<cplx, 4>& z) {
  return {-std::conj(z[1]), std::conj(z[0]), -std::conj(z[3]), std::conj(z[2])};
}

std::pair<cplx, cplx> incidence(const R4Point& x, const SpectralPoint& z) {
  if (z.is_inf()) throw Error(ErrorCode::InfiniteChart, "incidence at z = inf needs the second chart");
  cplx u = x.u(), v = x.v(), zz = z.value();
  return {u - zz * std::conj(v), v + zz * std::conj(u)};
}

std::array<cplx, 3> incidence_inf_chart(const R4Point& x, const SpectralPoint& z) {
  cplx u = x.u(), v = x.v();
  if (z.is_inf()) return {-std::conj(v), std::conj(u), 0.0};
  if (z.is_zero()) throw Error(ErrorCode::InfiniteChart, "second chart undefined at z = 0");
  cplx iz = 1.0 / z.value();
  return {-std::conj(v) + iz * u, std::conj(u) + iz * v, iz};
}

MatField star_fn(MatField f) {
  return [f](const R4Point& x, const SpectralPoint& z) -> Mat2 {
    return f(x, sigma_cp1(z)).adjoint();
  };
}

ComplexDerivs complex_derivs(const std::array<Mat2, 4>& d) {
  ComplexDerivs c;
  c.du = 0.5 * (d[0] - I1 * d[1]);
  c.dub = 0.5 * (d[0] + I1 * d[1]);
  c.dv = 0.5 * (d[2] + I1 * d[3]);
  c.dvb = 0.5 * (d[2] - I1 * d[3]);
  return c;
}

Mat2 twistor_derivative(const MatField& f, TwistorDir which, const R4Point& x,
                        const SpectralPoint& z, double h) {
  std::array<Mat2, 4> d;
  for (int a = 0; a < 4; ++a)
    d[a] = (f(x.shifted(a, h), z) - f(x.shifted(a, -h), z)) / (2 * h);
  ComplexDerivs c = complex_derivs(d);
  if (z.is_inf()) return which == TwistorDir::X ? Mat2(-c.dv) : Mat2(c.du);
  cplx zz = z.value();
  return which == TwistorDir::X ? Mat2(c.dub - zz * c.dv) : Mat2(c.dvb + zz * c.du);
}

}  // namespace sdym
