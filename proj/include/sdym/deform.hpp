#pragma once

#include <optional>
#include <variant>

#include "sdym/symmetry.hpp"

namespace sdym {

// t-derivatives of the one-instanton parameters
struct OneInstantonRate {
  double lam = 0;
  cplx alpha{0.0};
  cplx beta{0.0};
};

// A one-parameter family of ADHM data. k = 1 families supply params(t); general
// families supply data(t). Frame-map families (G(t) = a(t) G0 a*(t), not ADHM)
// supply frame(t, x, z) and its t-derivative as the deformation parameter.
struct ADHMFamily {
  std::string name;
  std::function<OneInstantonParams(double)> params;
  std::function<OneInstantonRate(double)> rate;  // optional; central differences otherwise
  std::function<ADHMData(double)> data;          // optional; defaults to one_instanton_data(params(t))
  DeformField frame;                             // frame-map families only
  DeformField frame_d;                           // their deformation parameter
  double fd_step = 1e-5;

  bool is_frame_map() const { return bool(frame); }
  bool is_k1() const { return bool(params); }
  OneInstantonRate rate_at(double t) const;
  ADHMData data_at(double t) const;
  // patching field at t
  PatchingField field_at(double t) const;
};

// lambda(t) = lam0 / sqrt(1 - flow_k lam0^2 t)
ADHMFamily scaling_family(double lam0, double flow_k);
// lambda, alpha, beta linear in t
ADHMFamily affine_family(const OneInstantonParams& p0, const OneInstantonRate& r);
// a(t) = (1 - t^2)^-1/2 [[1, t/z], [t z, 1]] acting on the one-instanton G
ADHMFamily frame_map_family(const OneInstantonParams& p0 = {});
// smooth nonlinear k = 1 family, reproducible from the seed
ADHMFamily smooth_family(unsigned seed);
// two-instanton family moving scales and centres smoothly
ADHMFamily two_instanton_family(unsigned seed);

double scaling_flow(double lam0, double flow_k, double t);

// d(t, x, z) for k = 1 from the outer-product formula
Mat2 d_param_k1(const ADHMFamily& fam, double t, const R4Point& x, const SpectralPoint& z);

struct GeneralDeformParams {
  CMat s;      // s_Ai, 2 x k
  CMat u;      // u_Ai, 2 x k
  Mat2 c;      // c_A^B
  CMat lam;    // lambda_A^i, 2 x k
  double u_consistency = 0;   // |u - (G s + lambda B)| is not available without w; this is |u - eps delta conj(s(sigma z))|
  double c_trace = 0;
};

struct DGeneral {
  Mat2 d;              // from the derivative of f_A
  Mat2 d_from_e;       // from e-derivatives at sigma(z), u_i (x) lambda^i + conjugated c
  GeneralDeformParams params;
  double gdot_residual = -1;  // |Gdot - (dG + Gd*)| when checked
};

// d from pairings of t-derivatives of the line basis
DGeneral d_general(const ADHMFamily& fam, double t, const R4Point& x, const SpectralPoint& z, bool check_gdot = true);

// finite-difference Gdot of the family
Mat2 family_gdot(const ADHMFamily& fam, double t, const R4Point& x, const SpectralPoint& z);

// the ten matrices multiplying
// w1^2/z, w1 w2/z, w2^2/z, w1/z, w1, w2/z, w2, 1/z, 1, z
struct DeformationCoeffs {
  std::array<Mat2, 10> c;
  Mat2& operator[](int i) { return c[i]; }
  const Mat2& operator[](int i) const { return c[i]; }
  Mat2 eval(const R4Point& x, const SpectralPoint& z) const;
};

inline constexpr const char* kCoeffNames[10] = {"cA", "cB", "cC", "cD", "cE", "cF", "cG", "cH", "cI", "cJ"};
// (p, q, m) exponents of the basis functions
inline constexpr int kCoeffPQM[10][3] = {{2, 0, -1}, {1, 1, -1}, {0, 2, -1}, {1, 0, -1}, {1, 0, 0},
                                         {0, 1, -1}, {0, 1, 0},  {0, 0, -1}, {0, 0, 0},  {0, 0, 1}};
// retained after absorption: singular at z = inf
inline constexpr int kSingularAtInf[6] = {0, 1, 2, 4, 6, 9};

// closed-form coefficients in (lambda, alpha, beta) and their rates
DeformationCoeffs decompose_coeffs(const OneInstantonParams& p, const OneInstantonRate& r);
DeformationCoeffs decompose_coeffs(const ADHMFamily& fam, double t);
// the same by expanding the outer product as polynomials in (w1, w2, z)
DeformationCoeffs expand_coeffs(const OneInstantonParams& p, const OneInstantonRate& r);

struct CoeffFit {
  DeformationCoeffs coeffs;
  double residual = 0;  // max sample misfit
  double conditioning = 0;  // |R_last| / |R_00| of the pivoted QR
};
// least squares against the ten basis functions at n_samples random (x, z)
CoeffFit fit_coeffs(const std::function<Mat2(const R4Point&, const SpectralPoint&)>& d, int n_samples = 48,
                    unsigned seed = 11, double fit_tol = 1e-8);

// drop the parts holomorphic on the outer region (D, F, H, I)
DeformationCoeffs absorb_holomorphic(const DeformationCoeffs& c);

struct Scaling {
  double flow_k = 0;
};
struct NotInduced {
  std::string witness;
  double variation = 0;
};
using Verdict = std::variant<Scaling, NotInduced>;

struct ClassifyOptions {
  double tol = 1e-8;
  int fit_samples = 48;
};

// coefficients of the family at t, closed form for ADHM families, fitted for frame maps
DeformationCoeffs family_coeffs(const ADHMFamily& fam, double t, const ClassifyOptions& opt = {});
Verdict classify_flow(const ADHMFamily& fam, const std::vector<double>& t_samples, const ClassifyOptions& opt = {});
std::string verdict_string(const Verdict& v);

// T = -d(0) as a TwistorPoly
TwistorPoly tangent_generator(const ADHMFamily& fam);
TwistorPoly coeffs_to_poly(const DeformationCoeffs& c);

// alpha' = d alpha generator for a family: the outer-product d for ADHM families,
// a' a^-1 for frame maps
DeformField flow_generator(const ADHMFamily& fam);

}  // namespace sdym
