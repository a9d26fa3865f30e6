#include <stdexcept>

#include "doctest.h"
#include "generators.hpp"

#include "dfock/parallel.hpp"
#include "dfock/reference.hpp"

using namespace dfock;

TEST_SUITE("parallel") {
  TEST_CASE("blocked sum matches the serial sum and ignores the thread count") {
    gen::Rng rng(11);
    std::vector<double> v(100003);
    for (auto& x : v) x = rng.normal();
    auto f = [&](std::size_t i) { return v[i]; };
    const double serial = reference::sequential_sum<double>(v.size(), f);
    const int threads = kernels::max_threads();
    kernels::set_threads(1);
    const double one = kernels::blocked_sum<double>(v.size(), f);
    kernels::set_threads(threads);
    const double many = kernels::blocked_sum<double>(v.size(), f);
    CHECK(one == many);
    CHECK(many == doctest::Approx(serial).epsilon(1e-12));
  }

  TEST_CASE("parallel map matches the serial map") {
    auto f = [](std::size_t i) { return std::sin(0.1 * static_cast<double>(i)); };
    CHECK(kernels::parallel_map<double>(5000, f) == reference::serial_map<double>(5000, f));
  }

  TEST_CASE("weighted gram matches the reference") {
    gen::Rng rng(12);
    const std::size_t dim = 9, rows = 301;
    std::vector<std::complex<double>> u(rows * dim);
    std::vector<double> w(rows);
    for (auto& x : u) x = {rng.normal(), rng.normal()};
    for (auto& x : w) x = rng.uniform();
    const auto a = kernels::weighted_gram<std::complex<double>>(u, w, dim);
    const auto b = reference::weighted_gram<std::complex<double>>(u, w, dim);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
    for (std::size_t m = 0; m < dim; ++m)
      for (std::size_t n = 0; n < dim; ++n) CHECK(a[m * dim + n] == std::conj(a[n * dim + m]));
  }

  TEST_CASE("exceptions inside parallel regions reach the caller") {
    auto bad = [](std::size_t i) -> double {
      if (i == 777) throw std::domain_error("boom");
      return 1.0;
    };
    CHECK_THROWS_AS(kernels::parallel_map<double>(2000, bad), std::domain_error);
    CHECK_THROWS_AS(kernels::blocked_sum<double>(2000, bad), std::domain_error);
  }
}
