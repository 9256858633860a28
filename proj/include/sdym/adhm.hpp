#pragma once

#include <string>
#include <vector>

#include "sdym/geometry.hpp"

namespace sdym {

// Rank-k ADHM datum: A(z) = sum_i z_i A_i : C^k -> C^{2k+2}.
struct ADHMData {
  int k = 1;
  std::array<CMat, 4> A;  // each (2k+2) x k
  CMat omega;             // antisymmetric (2k+2) x (2k+2)
  CMat JV;                // sigma_V(x) = JV conj(x), JV^2 = -1
  CMat JW;                // sigma_W(w) = JW conj(w), JW^2 = 1

  int dim() const { return 2 * k + 2; }
  CMat A_at(const std::array<cplx, 4>& z) const;
  cplx form(const CVec& a, const CVec& b) const { return (a.transpose() * omega * b)(0, 0); }
  CVec sigma_V(const CVec& x) const { return JV * x.conjugate(); }
  CVec sigma_W(const CVec& w) const { return JW * w.conjugate(); }
  void check_shapes() const;
};

struct OneInstantonParams {
  double lam = 1.0;
  cplx alpha{0.0};
  cplx beta{0.0};
};

// instanton centre in R^4: where A3 = A4 = 0 on every line
R4Point instanton_center(const OneInstantonParams& p);

struct ValidationCheck {
  std::string name;
  double residual;
  double tol;
  bool pass;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool pass() const;
  const ValidationCheck* find(const std::string& name) const;
};

struct LineBasis {
  CVec e1, e2, f1, f2;
  CMat v;          // spanning vectors v_i of U_z, columns
  CMat w;          // dual vectors w^i, columns
  CMat lambdaAi;   // 2 x k, filled by patching_matrix
};

struct PatchingResult {
  Mat2 G;
  CMat lambdaAi;  // 2 x k
};

struct PatchingField {
  MatField eval;
  std::string provenance;  // from-ADHM | closed-form-k1 | synthetic | ...
  Mat2 operator()(const R4Point& x, const SpectralPoint& z) const { return eval(x, z); }
};

// homogeneous C^4 point of the real line L_x over z (second chart at z = inf)
std::array<cplx, 4> line_point(const R4Point& x, const SpectralPoint& z);

ADHMData one_instanton_data(const OneInstantonParams& p);

// quaternion a + b j as the block [[a, -conj b], [b, conj a]]
Mat2 quaternion(cplx a, cplx b);
// column j of A(z) stacks Lambda_j (z1, z2) over B_ij (z1, z2) - delta_ij (z3, z4);
// isotropy needs B symmetric and Lambda^dag Lambda + B^dag B real
ADHMData quaternionic_data(const std::vector<Mat2>& Lambda, const std::vector<std::vector<Mat2>>& B);
// k = 2: real scales, centres b1, b2, off-diagonal mu (b1 - b2)
ADHMData two_instanton_data(double lam1, double lam2, const Mat2& b1, const Mat2& b2, double mu);
ValidationReport validate(const ADHMData& d, unsigned seed = 7, double tol = 1e-10);

// e_A, v_i, w^i at a homogeneous point; e_A has degree zero
LineBasis line_basis_at(const ADHMData& d, const std::array<cplx, 4>& zvec);
LineBasis line_basis(const ADHMData& d, const R4Point& x, const SpectralPoint& z);

PatchingResult patching_matrix(const ADHMData& d, const R4Point& x, const SpectralPoint& z);
PatchingResult closed_form_G(const OneInstantonParams& p, const R4Point& x, const SpectralPoint& z);

PatchingField adhm_field(const ADHMData& d);
PatchingField closed_form_field(const OneInstantonParams& p);
PatchingField identity_field();

}  // namespace sdym
