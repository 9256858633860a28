#pragma once

#include <vector>

#include "sdym/adhm.hpp"

namespace sdym {

// 2x2 matrix function on the annulus: unit-circle samples plus Fourier modes.
// modes are kept in FFT order; mode(m) is the coefficient of z^m.
class LoopMatrix {
 public:
  LoopMatrix() = default;
  static LoopMatrix from_samples(const AnnulusSpec& spec, std::vector<Mat2> samples);
  static LoopMatrix from_modes(const AnnulusSpec& spec, int lo, int hi, const std::vector<Mat2>& coeffs);

  const AnnulusSpec& spec() const { return spec_; }
  int n() const { return spec_.n_samples; }
  int lo() const { return lo_; }
  int hi() const { return hi_; }
  const std::vector<Mat2>& samples() const { return samples_; }
  const Mat2& sample(int j) const { return samples_[j]; }
  Mat2 mode(int m) const;
  // Laurent sum over the stored band; valid wherever that series converges
  Mat2 eval(cplx z) const;
  // largest coefficient with |m| >= n/4 (aliasing / truncation indicator)
  double tail() const;
  // largest coefficient strictly below / above the given mode
  double max_mode_below(int m) const;
  double max_mode_above(int m) const;

 private:
  AnnulusSpec spec_;
  std::vector<Mat2> samples_;
  std::vector<Mat2> modes_;  // FFT order, size n
  int lo_ = 0, hi_ = 0;
};

// forward / inverse DFT of Mat2 sequences (coefficient convention c_m = (1/n) sum f_j z_j^-m)
std::vector<Mat2> dft_modes(const std::vector<Mat2>& samples);
std::vector<Mat2> idft_samples(const std::vector<Mat2>& modes);

LoopMatrix sample_loop(const PatchingField& f, const R4Point& x, const AnnulusSpec& spec);
LoopMatrix sample_loop(const std::function<Mat2(cplx)>& f, const AnnulusSpec& spec);

}  // namespace sdym
