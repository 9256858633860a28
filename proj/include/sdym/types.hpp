#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace sdym {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

inline constexpr cplx I1{0.0, 1.0};

enum class ErrorCode {
  InfiniteChart,
  ShapeMismatch,
  DegenerateLine,
  SingularSystem,
  PoleAtChartBoundary,
  PoleOutsideAnnulus,
  NontrivialSplittingType,
  NotReal,
  QuadratureDiverged,
  QuadratureTail,
  StepFailure,
  FitResidualTooLarge,
  BlowupReached,
  BadInput,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode c, const std::string& what)
      : std::runtime_error(std::string(error_name(c)) + ": " + what), code_(c) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// max-abs entry, the norm used for every residual in the library
inline double maxabs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }
inline double maxabs(const CMat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

inline Mat2 inv2(const Mat2& m) {
  cplx d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r / d;
}

inline Mat2 adj2(const Mat2& m) {
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r;
}

inline Mat2 mat2(cplx a, cplx b, cplx c, cplx d) {
  Mat2 r;
  r << a, b, c, d;
  return r;
}

}  // namespace sdym
