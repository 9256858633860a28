#include "sdym/loop.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace sdym {

namespace {

// FFTW plans for four interleaved series (the entries of a Mat2 array)
struct PlanPair {
  fftw_plan fwd, bwd;
};

std::mutex plan_mutex;

PlanPair plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<fftw_complex> a(4 * n), b(4 * n);
  int dims[1] = {n};
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p;
  p.fwd = fftw_plan_many_dft(1, dims, 4, a.data(), nullptr, 4, 1, b.data(), nullptr, 4, 1, FFTW_FORWARD, flags);
  p.bwd = fftw_plan_many_dft(1, dims, 4, a.data(), nullptr, 4, 1, b.data(), nullptr, 4, 1, FFTW_BACKWARD, flags);
  cache[n] = p;
  return p;
}

std::vector<Mat2> run(const std::vector<Mat2>& in, bool forward) {
  int n = int(in.size());
  PlanPair p = plans_for(n);
  std::vector<Mat2> out(n);
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<Mat2*>(in.data()));
  auto* dst = reinterpret_cast<fftw_complex*>(out.data());
  fftw_execute_dft(forward ? p.fwd : p.bwd, src, dst);
  return out;
}

}  // namespace

std::vector<Mat2> dft_modes(const std::vector<Mat2>& samples) {
  auto m = run(samples, true);
  double s = 1.0 / double(samples.size());
  for (auto& x : m) x *= s;
  return m;
}

std::vector<Mat2> idft_samples(const std::vector<Mat2>& modes) { return run(modes, false); }

LoopMatrix LoopMatrix::from_samples(const AnnulusSpec& spec, std::vector<Mat2> samples) {
  spec.check();
  if (int(samples.size()) != spec.n_samples) throw Error(ErrorCode::ShapeMismatch, "sample count != n_samples");
  LoopMatrix l;
  l.spec_ = spec;
  l.modes_ = dft_modes(samples);
  l.samples_ = std::move(samples);
  l.lo_ = -(spec.n_samples / 2 - 1);
  l.hi_ = spec.n_samples / 2 - 1;
  return l;
}

LoopMatrix LoopMatrix::from_modes(const AnnulusSpec& spec, int lo, int hi, const std::vector<Mat2>& coeffs) {
  spec.check();
  int n = spec.n_samples;
  if (hi - lo + 1 != int(coeffs.size())) throw Error(ErrorCode::ShapeMismatch, "mode band size mismatch");
  if (lo <= -n / 2 || hi >= n / 2) throw Error(ErrorCode::ShapeMismatch, "mode band exceeds sampling");
  LoopMatrix l;
  l.spec_ = spec;
  l.lo_ = lo;
  l.hi_ = hi;
  l.modes_.assign(n, Mat2::Zero());
  for (int m = lo; m <= hi; ++m) l.modes_[((m % n) + n) % n] = coeffs[m - lo];
  l.samples_ = idft_samples(l.modes_);
  return l;
}

Mat2 LoopMatrix::mode(int m) const {
  if (m < lo_ || m > hi_) return Mat2::Zero();
  int n = spec_.n_samples;
  return modes_[((m % n) + n) % n];
}

Mat2 LoopMatrix::eval(cplx z) const {
  // Horner in z for m >= 0 and in 1/z for m < 0
  Mat2 pos = Mat2::Zero(), neg = Mat2::Zero();
  for (int m = hi_; m >= 0; --m) pos = pos * z + mode(m);
  if (lo_ < 0) {
    cplx iz = 1.0 / z;
    for (int m = lo_; m <= -1; ++m) neg = neg * iz + mode(m);
    neg *= iz;
  }
  return pos + neg;
}

double LoopMatrix::tail() const {
  int n = spec_.n_samples;
  double t = 0;
  for (int m = lo_; m <= hi_; ++m)
    if (std::abs(m) >= n / 4) t = std::max(t, maxabs(mode(m)));
  return t;
}

double LoopMatrix::max_mode_below(int m0) const {
  double t = 0;
  for (int m = lo_; m < m0 && m <= hi_; ++m) t = std::max(t, maxabs(mode(m)));
  return t;
}

double LoopMatrix::max_mode_above(int m0) const {
  double t = 0;
  for (int m = std::max(lo_, m0 + 1); m <= hi_; ++m) t = std::max(t, maxabs(mode(m)));
  return t;
}

LoopMatrix sample_loop(const PatchingField& f, const R4Point& x, const AnnulusSpec& spec) {
  spec.check();
  std::vector<Mat2> s(spec.n_samples);
  for (int j = 0; j < spec.n_samples; ++j) s[j] = f(x, SpectralPoint(spec.sample(j)));
  return LoopMatrix::from_samples(spec, std::move(s));
}

LoopMatrix sample_loop(const std::function<Mat2(cplx)>& f, const AnnulusSpec& spec) {
  spec.check();
  std::vector<Mat2> s(spec.n_samples);
  for (int j = 0; j < spec.n_samples; ++j) s[j] = f(spec.sample(j));
  return LoopMatrix::from_samples(spec, std::move(s));
}

}  // namespace sdym
