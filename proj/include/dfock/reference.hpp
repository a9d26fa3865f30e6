#pragma once

// Serial reference versions of the kernels in dfock/parallel.hpp.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dfock::reference {

template <class T, class F>
T sequential_sum(std::size_t n, F&& f) {
  T acc{};
  for (std::size_t i = 0; i < n; ++i) acc += f(i);
  return acc;
}

template <class T, class F>
std::vector<T> serial_map(std::size_t n, F&& f) {
  std::vector<T> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(f(i));
  return out;
}

template <class Cplx>
std::vector<Cplx> weighted_gram(std::span<const Cplx> u, std::span<const double> w,
                                std::size_t dim) {
  std::vector<Cplx> g(dim * dim);
  for (std::size_t m = 0; m < dim; ++m)
    for (std::size_t n = 0; n < dim; ++n) {
      Cplx acc{};
      for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * u[i * dim + n] * std::conj(u[i * dim + m]);
      g[m * dim + n] = acc;
    }
  return g;
}

}  // namespace dfock::reference
