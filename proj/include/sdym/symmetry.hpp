#pragma once

#include "sdym/gauge.hpp"

namespace sdym {

// coeff * w1^p * w2^q * z^m
struct TwistorTerm {
  int p = 0, q = 0, m = 0;
  Mat2 coeff = Mat2::Zero();
};

// T(x, z) as a finite sum of monomials in w1 = u - z conj(v), w2 = v + z conj(u), z.
// Each monomial is annihilated by X(z), Y(z), so T is holomorphic on the annulus.
struct TwistorPoly {
  std::vector<TwistorTerm> terms;

  static TwistorPoly constant(const Mat2& c) { return {{{0, 0, 0, c}}}; }
  static TwistorPoly monomial(int p, int q, int m, const Mat2& c) { return {{{p, q, m, c}}}; }
  bool empty() const;
  TwistorPoly scaled(cplx s) const;
  TwistorPoly operator+(const TwistorPoly& o) const;
  // every coefficient traceless to tol
  bool traceless(double tol = 1e-12) const;
};

Mat2 eval_T(const TwistorPoly& T, const R4Point& x, const SpectralPoint& z);
// T*(x, z) = T(x, sigma(z))^dagger
Mat2 eval_T_star(const TwistorPoly& T, const R4Point& x, const SpectralPoint& z);

// -T G - G T*
Mat2 g_flow_infinitesimal(const TwistorPoly& T, const Mat2& G, const R4Point& x, const SpectralPoint& z);

Mat2 expm2(const Mat2& M);

// G -> g G g*, with g = exp(-t T)
PatchingField g_flow_exp(const TwistorPoly& T, double t, const PatchingField& G);
PatchingField g_flow_exp(const MatField& g, const PatchingField& G);

struct JDot {
  Mat2 value;           // chi-form
  Mat2 value_psi;       // psi-form
  double form_gap = 0;  // max-abs difference of the two
};

// Jdot at x for the symmetry generated by T with spectral parameter spectral_lambda;
// s must be the splitting of G at the same x
JDot j_dot(const TwistorPoly& T, const SpectralPoint& spectral_lambda, const Splitting& s, const R4Point& x);

// J grid and Jdot grid from local splittings at every lattice site
struct JPair {
  MatGrid J, Jdot;
  double max_form_gap = 0;
};
JPair j_and_jdot(const TwistorPoly& T, const SpectralPoint& spectral_lambda, const PatchingField& field,
                 const GridSpec& grid, const SplitOptions& opt = {});

// max over sites two in from the faces of
// d_u(J d_ub(J^-1 Jdot) J^-1) + d_v(J d_vb(J^-1 Jdot) J^-1)
double linearisation_residual(const MatGrid& J, const MatGrid& Jdot);

// d(t, x, z) driving alpha' = d alpha
using DeformField = std::function<Mat2(double, const R4Point&, const SpectralPoint&)>;

struct FlowOptions {
  int steps = 16;        // initial RK4 step count
  int max_steps = 4096;  // halving floor
  double tol = 1e-6;     // local error estimate |a_N - a_2N| / 15
};

// Integrated flow G(t) = alpha(t) G0 alpha*(t), alpha' = d alpha, alpha(0) = Id
struct FlowState {
  double t = 0;
  DeformField d;
  PatchingField G0;
  FlowOptions opt;

  struct Alpha {
    Mat2 value;
    double error = 0;  // step-halving estimate
    int steps = 0;
  };
  Alpha alpha(const R4Point& x, const SpectralPoint& z) const;
  // alpha on the annulus samples at x
  LoopMatrix alpha_loop(const R4Point& x, const AnnulusSpec& spec) const;
  Mat2 G(const R4Point& x, const SpectralPoint& z) const;
  PatchingField field() const;
};

FlowState integrate_flow(const DeformField& d, const PatchingField& G0, double t_end, const FlowOptions& opt = {});

// instanton scale from the half-maximum radius of rho ~ (r^2 + lambda^2)^-4
double lambda_from_half_radius(double r_half);

struct ScaleMeasurement {
  double lambda_eff = 0;
  double r_half = 0;
  double rho0 = 0;
  int evaluations = 0;
};
// rho(centre + r e1) bisected for rho = rho(centre)/2
ScaleMeasurement measure_scale(const PatchingField& field, const R4Point& centre, double r_max,
                               const DensityOptions& opt = {});

// consistency checks of the symmetry flow

struct H0Report {
  double residual = 0;   // negative modes of h0 + E on the inner contour
  double tail = 0;       // high-mode content of h0
  double t_step = 0;
  double eps_contour = 0;
  bool pass = false;
};

struct H0Options {
  double t_step = 1e-5;
  AnnulusSpec annulus{0.25, 64};
  SplitConfig split{24};
  double tol = 1e-6;
  double tail_tol = 1e-6;
  // points on the inner contour; Q has a pole just outside it, so its modes decay slowly
  int contour_samples = 1024;
};

H0Report h0_verify(const TwistorPoly& T, const SpectralPoint& spectral_lambda, const PatchingField& field,
                            const R4Point& x, const H0Options& opt = {});

enum class GdotRoute { ExpFlow, JFlow, LambdaIndependence };

struct GdotReport {
  GdotRoute route = GdotRoute::ExpFlow;
  double residual = 0;      // after removing the best rho_inf G + G rho_0
  double raw = 0;           // |Gdot + TG + GT*| before the fit
  double rho_norm = 0;
  bool pass = false;
};

struct GdotOptions {
  double t_step = 1e-5;
  AnnulusSpec annulus{0.25, 64};
  SplitConfig split{24};
  int rho_modes = 24;
  double tol = 1e-6;
  SpectralPoint spectral_lambda{1.05};
  SpectralPoint spectral_lambda2{cplx(0.9, 0.3)};  // second value for the lambda-independence route
};

GdotReport gdot_consistency(const TwistorPoly& T, const PatchingField& field, const R4Point& x, GdotRoute route,
                            const GdotOptions& opt = {});

}  // namespace sdym
