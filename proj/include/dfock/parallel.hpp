#pragma once

// OpenMP kernels shared by every module. Each kernel has a plain serial
// counterpart in dfock/reference.hpp; the tests compare the two and the
// benchmark target times them against each other.

#include <complex>
#include <cstddef>
#include <exception>
#include <span>
#include <vector>

#include <omp.h>

namespace dfock::kernels {

/// Summation block size. Fixed so that block partial sums, and hence the
/// final result, do not depend on the thread count.
inline constexpr std::size_t kSumBlock = 512;

/// Holds the first exception thrown inside a parallel region so that it can
/// be rethrown on the calling thread after the region ends.
class ExceptionGuard {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
#pragma omp critical(dfock_exception_guard)
      if (!first_) first_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (first_) std::rethrow_exception(first_);
  }

 private:
  std::exception_ptr first_;
};

/// Deterministic parallel reduction of f(0) + ... + f(n-1).
/// Blocks are summed in parallel, block totals are added in index order.
template <class T, class F>
T blocked_sum(std::size_t n, F&& f) {
  const std::size_t nblocks = (n + kSumBlock - 1) / kSumBlock;
  std::vector<T> partial(nblocks, T{});
  ExceptionGuard guard;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nblocks); ++b) {
    guard.run([&] {
      const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
      const std::size_t hi = std::min(n, lo + kSumBlock);
      T acc{};
      for (std::size_t i = lo; i < hi; ++i) acc += f(i);
      partial[static_cast<std::size_t>(b)] = acc;
    });
  }
  guard.rethrow();
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

/// out[i] = f(i) for i in [0, n), evaluated in parallel.
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f) {
  std::vector<T> out(n);
  ExceptionGuard guard;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
    guard.run([&] { out[static_cast<std::size_t>(i)] = f(static_cast<std::size_t>(i)); });
  guard.rethrow();
  return out;
}

/// Hermitian weighted Gram matrix G[m, n] = sum_i w_i * u_i[n] * conj(u_i[m]),
/// with u stored row-major as rows of length dim. Only the lower triangle is
/// accumulated (one entry per task); the upper triangle is mirrored.
template <class Cplx>
std::vector<Cplx> weighted_gram(std::span<const Cplx> u, std::span<const double> w,
                                std::size_t dim) {
  const std::size_t rows = w.size();
  std::vector<Cplx> g(dim * dim);
  const std::size_t npairs = dim * (dim + 1) / 2;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(npairs); ++k) {
    // unrank k -> (m, n) with n <= m
    std::size_t m = 0;
    std::size_t rem = static_cast<std::size_t>(k);
    while (rem > m) {
      rem -= m + 1;
      ++m;
    }
    const std::size_t n = rem;
    Cplx acc{};
    for (std::size_t i = 0; i < rows; ++i) {
      const Cplx* row = u.data() + i * dim;
      acc += w[i] * row[n] * std::conj(row[m]);
    }
    if (m == n) acc = Cplx(std::real(acc));
    g[m * dim + n] = acc;
    g[n * dim + m] = std::conj(acc);
  }
  return g;
}

inline int max_threads() { return omp_get_max_threads(); }
inline void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

}  // namespace dfock::kernels
