#include "dfock/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dfock/parallel.hpp"

namespace dfock {

namespace {

void check_atom_support(const OrthonormalBasis& b, const SymbolMeasure& mu) {
  std::vector<cplx> bad;
  for (const auto& [z, m] : mu.all_atoms())
    if (std::abs(z) > b.trust_radius()) bad.push_back(z);
  if (bad.empty()) return;
  std::ostringstream os;
  os << bad.size() << " atom(s) outside the trust radius " << b.trust_radius() << ":";
  for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i) os << ' ' << bad[i];
  throw DomainError(os.str());
}

std::vector<cplx> weighted_rows(const OrthonormalBasis& b, const DiscreteMeasure& d) {
  const std::size_t dim = b.dim();
  std::vector<cplx> u(d.size() * dim);
  kernels::ExceptionGuard guard;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(d.size()); ++i)
    guard.run([&] { b.eval_weighted(d.z[i], std::span<cplx>(u.data() + i * dim, dim)); });
  guard.rethrow();
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!detail::finite(u[i])) detail::throw_poisoned(d.z[i / dim]);
  return u;
}

}  // namespace

AssemblyOptions default_assembly(const Potential& p, int N) {
  AssemblyOptions opt;
  opt.measure.unbounded = basis_rule(p, N);
  return opt;
}

std::vector<double> eigenvalues(const Eigen::MatrixXcd& T) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(T, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("eigensolver did not converge");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

ToeplitzMatrix from_matrix(Eigen::MatrixXcd T) {
  ToeplitzMatrix t;
  t.matrix = std::move(T);
  t.spectrum = eigenvalues(t.matrix);
  return t;
}

ToeplitzMatrix assemble(const OrthonormalBasis& b, const SymbolMeasure& mu,
                        const AssemblyOptions& opt) {
  check_atom_support(b, mu);
  const DiscreteMeasure d = discretize(mu, opt.measure);
  const std::size_t dim = b.dim();
  const auto u = weighted_rows(b, d);
  const auto g = kernels::weighted_gram<cplx>(u, d.w, dim);
  Eigen::MatrixXcd T(dim, dim);
  for (std::size_t m = 0; m < dim; ++m)
    for (std::size_t n = 0; n < dim; ++n) T(m, n) = g[m * dim + n];
  T = (0.5 * (T + T.adjoint())).eval();
  ToeplitzMatrix t = from_matrix(std::move(T));
  t.symbol = mu.descriptor();
  t.basis = {{"degree", b.degree()}, {"potential", b.potential().descriptor()}};
  const double top = t.spectrum.front();
  const double low = t.spectrum.back();
  if (low < -opt.psd_tol * std::max(top, 0.0)) {
    std::ostringstream os;
    os << "Toeplitz matrix fails the PSD check: min eigenvalue " << low << " vs max " << top;
    throw ConvergenceError(os.str());
  }
  return t;
}

double operator_norm(const ToeplitzMatrix& T) {
  double m = 0.0;
  for (double l : T.spectrum) m = std::max(m, std::abs(l));
  return m;
}

double schatten_power(const ToeplitzMatrix& T, double p) {
  if (!(p > 0.0)) throw InputError("Schatten exponent must be positive");
  double s = 0.0;
  for (double l : T.spectrum)
    if (l > 0.0) s += std::pow(l, p);
  return s;
}

double schatten_norm(const ToeplitzMatrix& T, double p) {
  return std::pow(schatten_power(T, p), 1.0 / p);
}

double schatten_tail_estimate(const ToeplitzMatrix& T_full, const ToeplitzMatrix& T_half, double p) {
  return std::abs(schatten_norm(T_full, p) - schatten_norm(T_half, p));
}

double quadratic_form(const ToeplitzMatrix& T, const Eigen::VectorXcd& f) {
  if (f.size() != T.matrix.rows()) throw InputError("vector dimension does not match the operator");
  return (f.adjoint() * T.matrix * f)(0, 0).real();
}

double measure_quadratic_form(const OrthonormalBasis& b, const SymbolMeasure& mu,
                              const Eigen::VectorXcd& f, const AssemblyOptions& opt) {
  if (f.size() != static_cast<Eigen::Index>(b.dim()))
    throw InputError("vector dimension does not match the basis");
  const DiscreteMeasure d = discretize(mu, opt.measure);
  const std::size_t dim = b.dim();
  return kernels::blocked_sum<double>(d.size(), [&](std::size_t i) {
    std::vector<cplx> e(dim);
    b.eval_weighted(d.z[i], e);
    cplx s = 0.0;
    for (std::size_t n = 0; n < dim; ++n) s += f[static_cast<Eigen::Index>(n)] * e[n];
    return d.w[i] * std::norm(s);
  });
}

double kernel_action_statistic(const ToeplitzMatrix& T, const OrthonormalBasis& b, double p,
                               std::span<const cplx> z_grid, const KernelRule& rule) {
  if (!(p >= 1.0)) throw InputError("kernel action exponent must be >= 1");
  if (T.dim() != b.dim()) throw InputError("operator dimension does not match the basis");
  const std::size_t dim = b.dim();
  double best = 0.0;
  for (const cplx z : z_grid) {
    if (std::abs(z) > b.trust_radius()) {
      std::ostringstream os;
      os << "grid point " << z << " lies outside the trust radius " << b.trust_radius();
      throw DomainError(os.str());
    }
    const PlaneRule local = rule.at(z);
    const auto nodes = local.nodes();
    const Eigen::VectorXcd c = b.eval(z).conjugate();
    const Eigen::VectorXcd tc = T.matrix * c;
    std::vector<cplx> rows(nodes.size() * dim);
    kernels::ExceptionGuard guard;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nodes.size()); ++i)
      guard.run([&] { b.eval_weighted(nodes[i].z, std::span<cplx>(rows.data() + i * dim, dim)); });
    guard.rethrow();
    auto pnorm = [&](const Eigen::VectorXcd& v) {
      const double s = kernels::blocked_sum<double>(nodes.size(), [&](std::size_t i) {
        cplx a = 0.0;
        for (std::size_t n = 0; n < dim; ++n) a += v[static_cast<Eigen::Index>(n)] * rows[i * dim + n];
        return nodes[i].w * std::pow(std::abs(a), p);
      });
      return std::pow(s, 1.0 / p);
    };
    const double kn = pnorm(c);
    if (!(kn > 0.0)) throw Error("kernel norm vanished");
    best = std::max(best, pnorm(tc) / kn);
  }
  return best;
}

nlohmann::json CompactnessReport::to_json() const {
  return {{"spectrum_coarse", spectrum_n},    {"spectrum_fine", spectrum_2n},
          {"leading", leading},               {"leading_drift", leading_drift},
          {"tail_ratio", tail_ratio},         {"flat", flat},
          {"compact_signature", compact_signature}};
}

CompactnessReport compactness_indicator(const ToeplitzMatrix& T_n, const ToeplitzMatrix& T_2n,
                                        double tail_fraction) {
  CompactnessReport rep;
  rep.spectrum_n = T_n.spectrum;
  rep.spectrum_2n = T_2n.spectrum;
  const double top = T_2n.spectrum.front();
  if (!(top > 0.0)) return rep;
  for (double l : T_n.spectrum)
    if (l >= tail_fraction * T_n.spectrum.front()) ++rep.leading;
  for (std::size_t k = 0; k < rep.leading && k < T_2n.spectrum.size(); ++k)
    rep.leading_drift = std::max(rep.leading_drift, std::abs(T_2n.spectrum[k] - T_n.spectrum[k]) / top);
  rep.tail_ratio = std::max(T_2n.spectrum.back(), 0.0) / top;
  rep.flat = T_2n.spectrum.back() >= top * (1.0 - 1e-6);
  rep.compact_signature = rep.leading_drift < 1e-6 && rep.tail_ratio < tail_fraction;
  return rep;
}

}  // namespace dfock
