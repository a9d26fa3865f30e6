#include <cmath>
#include <limits>

#include "doctest.h"
#include "generators.hpp"
#include "oracles.hpp"

#include "dfock/fock_basis.hpp"
#include "dfock/geodesic.hpp"

using namespace dfock;

namespace {

Eigen::MatrixXcd gram(const OrthonormalBasis& b, const PlaneRule& rule) {
  const auto d = static_cast<Eigen::Index>(b.dim());
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(d, d);
  std::vector<cplx> e(b.dim());
  for (const auto& n : rule.nodes()) {
    b.eval_weighted(n.z, e);
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) G(i, j) += n.w * e[j] * std::conj(e[i]);
  }
  return G;
}

OrthonormalBasis basis_for(const Potential& p, int N, BasisPath path = BasisPath::Auto) {
  return build_basis(p, N, basis_rule(p, N), path);
}

}  // namespace

TEST_SUITE("fock_basis") {
  TEST_CASE("Gaussian basis coefficients") {
    const auto b = basis_for(Potential::gaussian(1.0), 5);
    CHECK(b.diagonal());
    const auto C = b.coefficients();
    CHECK(C(3, 3).real() == doctest::Approx(1.0 / std::sqrt(6.0 * oracle::pi)).epsilon(1e-10));
    CHECK(std::abs(C(3, 2)) == 0.0);
    const auto big = basis_for(Potential::gaussian(1.0), 40);
    for (int n = 0; n <= 40; ++n)
      CHECK(std::abs(big.monomial_norms()[n] - oracle::gaussian_moment(n, 1.0)) / oracle::gaussian_moment(n, 1.0) < 1e-10);
    const auto one = basis_for(Potential::radial_power(4.0), 0);
    CHECK(one.dim() == 1);
    CHECK(one.coefficients()(0, 0).real() == doctest::Approx(1.0 / std::sqrt(oracle::power_moment(0, 4.0, 1.0))).epsilon(1e-10));
  }

  TEST_CASE("orthonormality on both paths") {
    for (const auto& p : {Potential::gaussian(1.0), Potential::radial_power(4.0)}) {
      const int N = 20;
      const auto rule = basis_rule(p, N);
      for (auto path : {BasisPath::Auto, BasisPath::Gram}) {
        const auto b = build_basis(p, N, rule, path);
        const auto G = gram(b, rule);
        CHECK((G - Eigen::MatrixXcd::Identity(N + 1, N + 1)).cwiseAbs().maxCoeff() < 1e-8);
        const auto C = b.coefficients();
        for (int i = 0; i <= N; ++i) {
          CHECK(C(i, i).real() > 0.0);
          for (int j = i + 1; j <= N; ++j) CHECK(std::abs(C(i, j)) == 0.0);
        }
      }
    }
  }

  TEST_CASE("Gram path for a non-radial weight matches the radial fast path of the same weight") {
    const auto radial = Potential::gaussian(1.0);
    const auto general = Potential::custom_general(
        "gaussian", [](cplx z) { return 0.5 * std::norm(z); }, [](cplx) { return 2.0; });
    const int N = 15;
    const auto a = basis_for(radial, N);
    const auto b = build_basis(general, N, basis_rule(general, N));
    CHECK_FALSE(b.diagonal());
    CHECK((a.coefficients() - b.coefficients()).cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("kernel values") {
    const auto b = basis_for(Potential::gaussian(1.0), 40);
    const Kernel exact(b), trunc(b, KernelMode::Truncated);
    CHECK(exact.exact());
    CHECK_FALSE(trunc.exact());
    CHECK(trunc(0.0, 0.0).real() == doctest::Approx(1.0 / oracle::pi).epsilon(1e-12));
    CHECK(exact(1.0, 1.0).real() == doctest::Approx(std::exp(1.0) / oracle::pi).epsilon(1e-14));
    CHECK(trunc(1.0, 1.0).real() == doctest::Approx(std::exp(1.0) / oracle::pi).epsilon(1e-10));
    gen::Rng rng(41);
    const double R = trunc.trust_radius();
    CHECK(R > 2.5);
    for (int k = 0; k < 50; ++k) {
      const cplx z = rng.in_disk(R), w = rng.in_disk(R);
      const cplx o = oracle::gaussian_kernel(1.0, z, w);
      CHECK(std::abs(trunc(z, w) - o) / std::abs(o) < 1e-7);
      CHECK(trunc(z, w) == std::conj(trunc(w, z)));
      CHECK(b.tail_fraction(z) < 1e-8);
    }
    CHECK_THROWS_AS(trunc(cplx(R + 0.5, 0.0), 0.0), DomainError);
    CHECK_NOTHROW(exact(cplx(R + 0.5, 0.0), 0.0));
  }

  TEST_CASE("kernel matrices are positive semidefinite") {
    const auto b = basis_for(Potential::radial_power(4.0), 30);
    const Kernel k(b);
    gen::Rng rng(42);
    const auto pts = rng.points(12, k.trust_radius());
    Eigen::MatrixXcd M(12, 12);
    for (int i = 0; i < 12; ++i)
      for (int j = 0; j < 12; ++j) M(i, j) = k(pts[j], pts[i]);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    CHECK(es.eigenvalues().minCoeff() >= -1e-9 * es.eigenvalues().maxCoeff());
  }

  TEST_CASE("kernel norms against the Gaussian closed form") {
    const auto b = basis_for(Potential::gaussian(1.0), 40);
    const Kernel k(b, KernelMode::Truncated);
    CHECK(kernel_norm(k, 2.0, 0.0) == doctest::Approx(1.0 / std::sqrt(oracle::pi)).epsilon(1e-9));
    for (const cplx z : {cplx(0.0), cplx(1.0, 0.5), cplx(-1.5, 1.5), cplx(0.0, 2.5)}) {
      for (double p : {1.0, 2.0, 3.0}) {
        const double o = oracle::gaussian_kernel_norm(1.0, p, z);
        CHECK(std::abs(kernel_norm(k, p, z) - o) / o < 1e-6);
      }
      const auto nk = normalized_kernel(k, 2.0, z);
      CHECK(kernel_norm(k, 2.0, z) / nk.norm == doctest::Approx(1.0).epsilon(1e-8));
    }
    const auto n0 = normalized_kernel(k, 2.0, 0.0);
    CHECK(std::abs(n0(cplx(0.7, 0.1))) == doctest::Approx(1.0 / std::sqrt(oracle::pi)).epsilon(1e-9));
    // sup over nodes never exceeds the true sup (alpha/pi) e^{|z|^2/2}
    CHECK(kernel_norm(k, std::numeric_limits<double>::infinity(), 1.0) <= std::exp(0.5) / oracle::pi * (1 + 1e-12));
  }

  TEST_CASE("Bergman projection") {
    const auto p = Potential::gaussian(1.0);
    const int N = 20;
    const auto b = basis_for(p, N);
    const auto rule = basis_rule(p, N);
    const auto c3 = bergman_project(b, [&](cplx z) { return b.eval(z)[3]; }, rule);
    for (int n = 0; n <= N; ++n) CHECK(std::abs(c3[n] - (n == 3 ? 1.0 : 0.0)) < 1e-9);

    gen::Rng rng(43);
    const auto f = rng.coefficients(b.dim());
    const auto back = bergman_project(b, [&](cplx z) { return synthesize(b, f, z); }, rule);
    CHECK((back - f).norm() / f.norm() < 1e-9);

    const double h0 = b.monomial_norms()[0];
    const auto odd = bergman_project(b, [&](cplx z) { return std::conj(z) / std::sqrt(h0); }, rule);
    CHECK(odd.cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("reproducing identity for random polynomials") {
    const auto p = Potential::radial_power(4.0);
    const auto b = basis_for(p, 30);
    const Kernel k(b);
    const auto rule = basis_rule(p, 30);
    gen::Rng rng(44);
    for (int t = 0; t < 5; ++t) {
      const auto f = rng.coefficients(b.dim());
      const cplx z = rng.in_disk(k.trust_radius());
      // <f, K_z> = int f conj(K_z) e^{-2 phi} dA
      const cplx ip = integrate<cplx>(rule, [&](cplx w) {
        return synthesize(b, f, w) * std::conj(k.eval_unchecked(z, w)) * std::exp(-2.0 * p.phi(w));
      });
      const cplx fz = synthesize(b, f, z);
      CHECK(std::abs(ip - fz) / (f.norm() * std::sqrt(k.diagonal(z))) < 1e-7);
    }
  }

  TEST_CASE("truncation consistency of the diagonal") {
    const auto p = Potential::radial_power(3.0);
    const auto a = basis_for(p, 20), b = basis_for(p, 40);
    const Kernel ka(a), kb(b);
    gen::Rng rng(45);
    for (int t = 0; t < 20; ++t) {
      const cplx z = rng.in_disk(ka.trust_radius());
      CHECK(std::abs(ka.diagonal(z) - kb.diagonal(z)) / kb.diagonal(z) < 1e-8);
    }
    CHECK(kb.trust_radius() > ka.trust_radius());
  }

  TEST_CASE("JSON round trip") {
    for (const auto& p : {Potential::gaussian(2.0), Potential::radial_power(4.0)})
      for (auto path : {BasisPath::Auto, BasisPath::Gram}) {
        const auto b = build_basis(p, 12, basis_rule(p, 12), path);
        const auto c = OrthonormalBasis::from_json(nlohmann::json::parse(b.to_json().dump()), p);
        CHECK(c.degree() == 12);
        CHECK(c.trust_radius() == b.trust_radius());
        CHECK((c.coefficients() - b.coefficients()).cwiseAbs().maxCoeff() < 1e-15);
        CHECK_THROWS_AS(OrthonormalBasis::from_json(b.to_json(), Potential::gaussian(3.0)), InputError);
      }
  }

  TEST_CASE("kernel decay fit and near-diagonal radius for the Gaussian") {
    const auto p = Potential::gaussian(1.0);
    const auto b = basis_for(p, 40);
    const Kernel k(b);
    const RadiusField rf(p);
    const GeodesicGrid g(rf, cplx(-1.5, -1.5), cplx(1.5, 1.5));
    std::vector<cplx> far;
    for (int i = -5; i <= 5; ++i)
      for (int j = -5; j <= 5; ++j) far.emplace_back(0.25 * i, 0.25 * j);
    const auto fit = decay_fit(k, rf, g, 0.0, far);
    REQUIRE(fit.feasible);
    CHECK(fit.epsilon >= 1.0);
    const std::vector<cplx> centers = {0.0, cplx(1, 1)};
    CHECK(near_diagonal_radius(k, rf, centers) > 0.0);
  }
}
