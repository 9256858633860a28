#pragma once

#include "sdym/loop.hpp"

namespace sdym {

struct SplitConfig {
  int M = 32;               // Psi_inf modes -M..0
  double rank_tol = 1e-6;   // smallest/largest singular value of the mode system
  double real_tol = 1e-8;   // input reality / det tolerance (relative)
};

struct Splitting {
  LoopMatrix psi0;    // modes >= 0
  LoopMatrix psiInf;  // modes <= 0
  Mat2 psi0_at0;      // psi_0 = Psi_0(0), hermitian positive-definite
  Mat2 psiInf_atInf;  // psi_inf = Psi_inf(inf) = (psi_0^dagger)^-1

  // diagnostics
  double recon_residual = 0;     // max_j |Psi_inf^-1 Psi_0 - G|
  double analytic_residual = 0;  // negative modes of Psi_inf G
  double reality_residual = 0;   // |Psi_inf - (Psi_0*)^-1|
  double sv_ratio = 0;           // conditioning of the mode system

  Mat2 Psi0(cplx z) const { return psi0.eval(z); }
  Mat2 PsiInf(const SpectralPoint& z) const { return z.is_inf() ? psiInf_atInf : psiInf.eval(z.value()); }
};

Splitting birkhoff_split(const LoopMatrix& G, const SplitConfig& cfg = {});
Splitting split_at(const PatchingField& f, const R4Point& x, const AnnulusSpec& spec, const SplitConfig& cfg = {});

Mat2 j_function(const Splitting& s);

struct ChiPair {
  LoopMatrix chi0, chiInf;
};
ChiPair chi_functions(const Splitting& s);

}  // namespace sdym
