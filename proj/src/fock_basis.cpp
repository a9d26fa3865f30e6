#include "dfock/fock_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dfock/parallel.hpp"

namespace dfock {

namespace {

constexpr double kTailTol = 1e-8;
constexpr double kPivotTol = 1e-13;
constexpr int kTrustAngles = 32;
constexpr int kCutoffRays = 16;

std::function<double(double)> squared_weight_on_ray(const Potential& p, double angle) {
  const double rmax = p.max_radius();
  const cplx dir = std::polar(1.0, angle);
  return [p, rmax, dir](double r) {
    if (r > rmax) return 0.0;
    return std::exp(-2.0 * p.phi(r * dir));
  };
}

double search_limit(const Potential& p) {
  return std::isfinite(p.max_radius()) ? p.max_radius() : 200.0;
}

std::vector<double> moments(const Potential& p, int N) {
  return radial_moments(squared_weight_on_ray(p, 0.0), N, 1e-12, search_limit(p));
}

}  // namespace

double default_cutoff(const Potential& p, int N) {
  const int rays = p.radial() ? 1 : kCutoffRays;
  double R = 0.0;
  for (int k = 0; k < rays; ++k)
    R = std::max(R, radial_cutoff(squared_weight_on_ray(p, 2.0 * kPi * k / rays), N, 1e-20,
                                  search_limit(p)));
  return R;
}

PlaneRule basis_rule(const Potential& p, int N, int n_radial, int n_angular) {
  if (n_radial <= 0) n_radial = std::max(64, 2 * N + 40);
  if (n_angular <= 0) n_angular = std::max(64, 4 * N + 32);
  return PlaneRule::polar(n_radial, n_angular, default_cutoff(p, N));
}

void OrthonormalBasis::set_radial(int N) {
  degree_ = N;
  diagonal_ = true;
  h_ = moments(p_, N);
  ratio_.assign(h_.size(), 0.0);
  for (std::size_t n = 1; n < h_.size(); ++n) ratio_[n] = std::sqrt(h_[n - 1] / h_[n]);
}

OrthonormalBasis build_basis(const Potential& p, int N, const PlaneRule& rule, BasisPath path) {
  if (N < 0) throw InputError("basis degree must be nonnegative");
  OrthonormalBasis b;
  b.p_ = p;
  if (p.radial() && path == BasisPath::Auto) {
    b.set_radial(N);
    b.compute_trust_radius();
    return b;
  }

  b.diagonal_ = false;
  const std::size_t dim = static_cast<std::size_t>(N) + 1;
  const auto nodes = rule.nodes();
  std::vector<cplx> u(nodes.size() * dim);
  std::vector<double> w(nodes.size());
  kernels::ExceptionGuard guard;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nodes.size()); ++i) {
    guard.run([&] {
      const cplx z = nodes[i].z;
      w[i] = nodes[i].w;
      cplx v = std::exp(-p.phi(z));
      for (std::size_t k = 0; k < dim; ++k) {
        u[i * dim + k] = v;
        v *= z;
      }
    });
  }
  guard.rethrow();
  const auto g = kernels::weighted_gram<cplx>(u, w, dim);
  // g[m, n] = <z^n, z^m>; G(k, l) = <z^k, z^l> = g[l, k]
  Eigen::MatrixXcd G(dim, dim);
  for (std::size_t k = 0; k < dim; ++k)
    for (std::size_t l = 0; l < dim; ++l) G(k, l) = g[l * dim + k];

  std::size_t keep = dim;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = G(k, k).real();
    if (!(d > 0.0) || !std::isfinite(d)) {
      keep = k;
      break;
    }
  }
  std::vector<double> scale(keep);
  for (std::size_t k = 0; k < keep; ++k) scale[k] = 1.0 / std::sqrt(G(k, k).real());
  Eigen::MatrixXcd S(keep, keep);
  for (std::size_t k = 0; k < keep; ++k)
    for (std::size_t l = 0; l < keep; ++l) S(k, l) = G(k, l) * scale[k] * scale[l];

  // Cholesky with an explicit pivot test so the failing degree is known.
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(keep, keep);
  for (std::size_t j = 0; j < keep; ++j) {
    cplx d = S(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= L(j, k) * std::conj(L(j, k));
    if (!(d.real() > kPivotTol) || !std::isfinite(d.real())) {
      keep = j;
      break;
    }
    const double ljj = std::sqrt(d.real());
    L(j, j) = ljj;
    for (std::size_t i = j + 1; i < keep; ++i) {
      cplx s = S(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= L(i, k) * std::conj(L(j, k));
      L(i, j) = s / ljj;
    }
  }
  if (keep == 0) throw ConvergenceError("Gram matrix is not positive definite at degree 0");
  if (keep < dim) {
    std::ostringstream os;
    os << "Gram matrix numerically not positive definite at degree " << keep
       << "; basis truncated to degree " << keep - 1;
    b.warnings_.push_back(os.str());
  }
  const Eigen::MatrixXcd Lk = L.topLeftCorner(keep, keep);
  b.degree_ = static_cast<int>(keep) - 1;
  b.mono_scale_.assign(scale.begin(), scale.begin() + static_cast<std::ptrdiff_t>(keep));
  b.lower_inv_ = Lk.triangularView<Eigen::Lower>().solve(
      Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(keep), static_cast<Eigen::Index>(keep)));
  b.lower_inv_ = b.lower_inv_.triangularView<Eigen::Lower>();
  b.compute_trust_radius();
  return b;
}

void OrthonormalBasis::eval(cplx z, std::span<cplx> out) const {
  const std::size_t d = dim();
  if (diagonal_) {
    cplx v = 1.0 / std::sqrt(h_[0]);
    out[0] = v;
    for (std::size_t n = 1; n < d; ++n) {
      v *= z * ratio_[n];
      out[n] = v;
    }
    return;
  }
  std::vector<cplx> m(d);
  cplx v = 1.0;
  for (std::size_t k = 0; k < d; ++k) {
    m[k] = v * mono_scale_[k];
    v *= z;
  }
  for (std::size_t n = 0; n < d; ++n) {
    cplx s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) s += lower_inv_(n, k) * m[k];
    out[n] = s;
  }
}

Eigen::VectorXcd OrthonormalBasis::eval(cplx z) const {
  Eigen::VectorXcd v(dim());
  eval(z, std::span<cplx>(v.data(), dim()));
  return v;
}

void OrthonormalBasis::eval_weighted(cplx z, std::span<cplx> out) const {
  eval(z, out);
  const double w = std::exp(-p_.phi(z));
  for (auto& v : out) v *= w;
}

Eigen::MatrixXcd OrthonormalBasis::coefficients() const {
  const auto d = static_cast<Eigen::Index>(dim());
  Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(d, d);
  if (diagonal_) {
    for (Eigen::Index n = 0; n < d; ++n) C(n, n) = 1.0 / std::sqrt(h_[n]);
    return C;
  }
  for (Eigen::Index n = 0; n < d; ++n)
    for (Eigen::Index k = 0; k <= n; ++k) C(n, k) = lower_inv_(n, k) * mono_scale_[k];
  return C;
}

double OrthonormalBasis::tail_fraction(cplx z) const {
  const std::size_t d = dim();
  std::vector<cplx> e(d);
  eval(z, e);
  const std::size_t top = static_cast<std::size_t>(std::ceil(0.1 * static_cast<double>(d)));
  double total = 0.0, tail = 0.0;
  for (std::size_t n = 0; n < d; ++n) {
    const double a = std::norm(e[n]);
    total += a;
    if (n >= d - top) tail += a;
  }
  return total > 0.0 ? tail / total : 1.0;
}

void OrthonormalBasis::compute_trust_radius() {
  const int angles = diagonal_ ? 1 : kTrustAngles;
  auto worst = [&](double R) {
    double f = 0.0;
    for (int k = 0; k < angles; ++k)
      f = std::max(f, tail_fraction(std::polar(R, 2.0 * kPi * (k + 0.5) / angles)));
    return f;
  };
  const double limit = std::min(default_cutoff(p_, degree_), p_.max_radius());
  constexpr double kStep = 0.01;
  if (worst(0.0) >= kTailTol) {
    trust_radius_ = 0.0;
    return;
  }
  double lo = 0.0, hi = -1.0;
  for (double R = kStep; R <= limit; R += kStep) {
    if (worst(R) >= kTailTol) {
      hi = R;
      break;
    }
    lo = R;
  }
  if (hi < 0.0) {
    trust_radius_ = lo;
    return;
  }
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (worst(mid) < kTailTol ? lo : hi) = mid;
  }
  trust_radius_ = lo;
}

nlohmann::json OrthonormalBasis::to_json() const {
  nlohmann::json j;
  j["format"] = "dfock.basis";
  j["version"] = 1;
  j["degree"] = degree_;
  j["potential"] = p_.descriptor();
  j["trust_radius"] = trust_radius_;
  j["warnings"] = warnings_;
  if (diagonal_) {
    j["path"] = "radial";
    j["h"] = h_;
    return j;
  }
  j["path"] = "gram";
  j["monomial_scale"] = mono_scale_;
  const Eigen::MatrixXcd C = coefficients();
  std::vector<std::vector<double>> re(dim()), im(dim());
  for (std::size_t n = 0; n < dim(); ++n)
    for (std::size_t k = 0; k <= n; ++k) {
      re[n].push_back(C(n, k).real());
      im[n].push_back(C(n, k).imag());
    }
  j["coefficients"] = {{"re", re}, {"im", im}};
  return j;
}

OrthonormalBasis OrthonormalBasis::from_json(const nlohmann::json& j, const Potential& p) {
  try {
    if (j.at("format").get<std::string>() != "dfock.basis")
      throw InputError("not a basis document");
    if (j.at("version").get<int>() != 1) throw InputError("unsupported basis document version");
    if (j.at("potential") != p.descriptor())
      throw InputError("basis document was built for a different potential");
    OrthonormalBasis b;
    b.p_ = p;
    b.degree_ = j.at("degree").get<int>();
    b.trust_radius_ = j.at("trust_radius").get<double>();
    b.warnings_ = j.value("warnings", std::vector<std::string>{});
    const auto path = j.at("path").get<std::string>();
    const std::size_t d = b.dim();
    if (path == "radial") {
      b.diagonal_ = true;
      b.h_ = j.at("h").get<std::vector<double>>();
      if (b.h_.size() != d) throw InputError("basis document: h has the wrong length");
      b.ratio_.assign(d, 0.0);
      for (std::size_t n = 1; n < d; ++n) b.ratio_[n] = std::sqrt(b.h_[n - 1] / b.h_[n]);
      return b;
    }
    if (path != "gram") throw InputError("basis document: unknown path " + path);
    b.diagonal_ = false;
    b.mono_scale_ = j.at("monomial_scale").get<std::vector<double>>();
    const auto re = j.at("coefficients").at("re").get<std::vector<std::vector<double>>>();
    const auto im = j.at("coefficients").at("im").get<std::vector<std::vector<double>>>();
    if (b.mono_scale_.size() != d || re.size() != d || im.size() != d)
      throw InputError("basis document: coefficient block has the wrong size");
    b.lower_inv_ = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t n = 0; n < d; ++n) {
      if (re[n].size() != n + 1 || im[n].size() != n + 1)
        throw InputError("basis document: coefficient row has the wrong length");
      for (std::size_t k = 0; k <= n; ++k)
        b.lower_inv_(n, k) = cplx(re[n][k], im[n][k]) / b.mono_scale_[k];
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed basis document: ") + e.what());
  }
}

Kernel::Kernel(OrthonormalBasis basis, KernelMode mode) : basis_(std::move(basis)) {
  if (mode == KernelMode::Auto) {
    if (auto a = basis_.potential().gaussian_alpha()) {
      exact_ = true;
      alpha_ = *a;
    }
  }
}

double Kernel::trust_radius() const {
  return exact_ ? std::numeric_limits<double>::infinity() : basis_.trust_radius();
}

void Kernel::check_trusted(cplx z) const {
  if (exact_) return;
  if (std::abs(z) > basis_.trust_radius()) {
    std::ostringstream os;
    os << "point " << z << " lies outside the trust radius " << basis_.trust_radius()
       << " of the degree " << basis_.degree() << " basis";
    throw DomainError(os.str());
  }
}

cplx Kernel::operator()(cplx z, cplx w) const {
  check_trusted(z);
  check_trusted(w);
  return eval_unchecked(z, w);
}

cplx Kernel::eval_unchecked(cplx z, cplx w) const {
  if (exact_) return alpha_ / kPi * std::exp(alpha_ * w * std::conj(z));
  const std::size_t d = basis_.dim();
  std::vector<cplx> ez(d), ew(d);
  basis_.eval(z, ez);
  basis_.eval(w, ew);
  cplx s = 0.0;
  for (std::size_t n = 0; n < d; ++n) s += ew[n] * std::conj(ez[n]);
  return s;
}

double Kernel::diagonal(cplx z) const {
  if (exact_) return alpha_ / kPi * std::exp(alpha_ * std::norm(z));
  const std::size_t d = basis_.dim();
  std::vector<cplx> e(d);
  basis_.eval(z, e);
  double s = 0.0;
  for (const auto& v : e) s += std::norm(v);
  return s;
}

double Kernel::weighted_abs(cplx z, cplx w) const {
  if (exact_)
    return alpha_ / kPi * std::exp(alpha_ * (std::real(w * std::conj(z)) - 0.5 * std::norm(w)));
  const std::size_t d = basis_.dim();
  std::vector<cplx> ez(d), ew(d);
  basis_.eval(z, ez);
  basis_.eval_weighted(w, ew);
  cplx s = 0.0;
  for (std::size_t n = 0; n < d; ++n) s += ew[n] * std::conj(ez[n]);
  return std::abs(s);
}

double Kernel::berezin_density(cplx z, cplx w) const {
  if (exact_) return alpha_ / kPi * std::exp(-alpha_ * std::norm(z - w));
  const double a = weighted_abs(z, w);
  return a * a / diagonal(z);
}

double kernel_norm(const Kernel& k, double p, cplx z, const KernelRule& rule) {
  if (!(p >= 1.0)) throw InputError("kernel norm exponent must be >= 1");
  k.check_trusted(z);
  const PlaneRule r = rule.at(z);
  if (std::isinf(p)) {
    const auto nodes = r.nodes();
    const auto v = kernels::parallel_map<double>(
        nodes.size(), [&](std::size_t i) { return k.weighted_abs(z, nodes[i].z); });
    return *std::max_element(v.begin(), v.end());
  }
  const double s = integrate(r, [&](cplx w) { return std::pow(k.weighted_abs(z, w), p); });
  return std::pow(s, 1.0 / p);
}

Eigen::VectorXcd NormalizedKernel::coefficients() const {
  return kernel->basis().eval(z).conjugate() / norm;
}

NormalizedKernel normalized_kernel(const Kernel& k, double p, cplx z, const KernelRule& rule) {
  const double n = p == 2.0 ? std::sqrt(k.diagonal(z)) : kernel_norm(k, p, z, rule);
  if (!(n > 0.0)) throw Error("kernel norm vanished");
  k.check_trusted(z);
  return {&k, z, p, n};
}

Eigen::VectorXcd bergman_project(const OrthonormalBasis& b, const std::function<cplx(cplx)>& f,
                                 const PlaneRule& rule) {
  const auto nodes = rule.nodes();
  const std::size_t d = b.dim();
  std::vector<cplx> u(nodes.size() * d);
  kernels::ExceptionGuard guard;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nodes.size()); ++i) {
    guard.run([&] {
      const cplx z = nodes[i].z;
      std::span<cplx> row(u.data() + i * d, d);
      b.eval_weighted(z, row);
      const cplx fz = f(z) * std::exp(-b.potential().phi(z)) * nodes[i].w;
      if (!detail::finite(fz)) detail::throw_poisoned(z);
      for (auto& v : row) v = fz * std::conj(v);
    });
  }
  guard.rethrow();
  Eigen::VectorXcd c(d);
  for (std::size_t n = 0; n < d; ++n)
    c[n] = kernels::blocked_sum<cplx>(nodes.size(), [&](std::size_t i) { return u[i * d + n]; });
  return c;
}

cplx synthesize(const OrthonormalBasis& b, const Eigen::VectorXcd& c, cplx z) {
  return b.eval(z).cwiseProduct(c).sum();
}

DecayFit decay_fit(const Kernel& k, const RadiusField& rf, const GeodesicGrid& g, cplx z,
                   std::span<const cplx> far_points, double c_cap) {
  DecayFit fit;
  if (far_points.empty()) throw InputError("decay fit needs at least one far point");
  for (const cplx w : far_points) k.check_trusted(w);
  const double rz = rf(z);
  const double phiz = k.potential().phi(z);
  const auto d = g.distances(z, far_points);
  const auto rw = rf.at(far_points);
  std::vector<double> lhs(far_points.size());
  for (std::size_t i = 0; i < far_points.size(); ++i)
    lhs[i] = std::log(k.weighted_abs(z, far_points[i])) - phiz + std::log(rz * rw[i]);
  const double cap = std::log(c_cap);
  for (int s = 1; s <= 60; ++s) {
    const double eps = 0.05 * s;
    double logc = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < lhs.size(); ++i)
      logc = std::max(logc, lhs[i] + (d[i] > 0.0 ? std::pow(d[i], eps) : 0.0));
    fit.table.emplace_back(eps, logc);
    if (logc <= cap) {
      fit.feasible = true;
      fit.epsilon = eps;
      fit.C = std::exp(logc);
    }
  }
  return fit;
}

double near_diagonal_radius(const Kernel& k, const RadiusField& rf, std::span<const cplx> centers,
                            double window) {
  constexpr int kAngles = 8;
  constexpr double kFractions[] = {0.25, 0.5, 0.75, 1.0};
  double best = 0.0;
  for (int s = 1; s <= 10; ++s) {
    const double r = 0.05 * s;
    bool ok = true;
    for (const cplx z : centers) {
      const double rz = rf(z);
      const double kz = std::sqrt(k.diagonal(z));
      for (double f : kFractions) {
        for (int a = 0; a < kAngles && ok; ++a) {
          const cplx w = z + std::polar(f * r * rz, 2.0 * kPi * a / kAngles);
          if (std::abs(w) > k.trust_radius()) return best;
          const double ratio = std::abs(k(z, w)) / (kz * std::sqrt(k.diagonal(w)));
          ok = ratio >= 1.0 / window && ratio <= window;
        }
      }
      if (!ok) break;
    }
    if (ok) best = r;
  }
  return best;
}

}  // namespace dfock
