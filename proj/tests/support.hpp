#pragma once

#include <random>

#include "sdym/io.hpp"

namespace sdym::test {

inline R4Point rand_point(std::mt19937_64& g, double radius) {
  std::uniform_real_distribution<double> U(-radius, radius);
  R4Point x;
  do x = {U(g), U(g), U(g), U(g)};
  while (x.norm() > radius);
  return x;
}

inline cplx rand_unit(std::mt19937_64& g) {
  std::uniform_real_distribution<double> U(0, 2 * M_PI);
  return std::polar(1.0, U(g));
}

inline cplx rand_disk(std::mt19937_64& g, double r) {
  std::uniform_real_distribution<double> U(-r, r);
  cplx c;
  do c = {U(g), U(g)};
  while (std::abs(c) > r);
  return c;
}

inline Mat2 rand_mat(std::mt19937_64& g) {
  std::normal_distribution<double> N;
  return mat2({N(g), N(g)}, {N(g), N(g)}, {N(g), N(g)}, {N(g), N(g)});
}

inline OneInstantonParams rand_params(std::mt19937_64& g) {
  std::uniform_real_distribution<double> L(0.5, 2.0);
  return {L(g), rand_disk(g, 2), rand_disk(g, 2)};
}

inline const Mat2 kE = mat2(0, 1, 0, 0);

}  // namespace sdym::test
