#pragma once

#include <complex>
#include <vector>

#include "hfot/geometry.hpp"

namespace hfot {

/// Values on the (s, theta) sampling grid, s-major.
template <class T>
struct SinoArray {
  SinogramGrid grid;
  std::vector<T> values;

  SinoArray() = default;
  explicit SinoArray(const SinogramGrid& g, T fill = T{}) : grid(g), values(g.size(), fill) {}

  T& at(int i, int j) { return values[grid.index(i, j)]; }
  const T& at(int i, int j) const { return values[grid.index(i, j)]; }
};

using RealSino = SinoArray<double>;
using ComplexSino = SinoArray<std::complex<double>>;

inline RealSino real_part(const ComplexSino& z) {
  RealSino out(z.grid);
  for (std::size_t k = 0; k < z.values.size(); ++k) out.values[k] = z.values[k].real();
  return out;
}

inline RealSino imag_part(const ComplexSino& z) {
  RealSino out(z.grid);
  for (std::size_t k = 0; k < z.values.size(); ++k) out.values[k] = z.values[k].imag();
  return out;
}

}  // namespace hfot
