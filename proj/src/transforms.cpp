#include "dfock/transforms.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "dfock/parallel.hpp"

namespace dfock {

namespace {

/// Evaluates f at every point; with invariant set, f is evaluated once per
/// distinct |z| at the point (|z|, 0).
template <class F>
std::vector<double> evaluate(std::span<const cplx> points, bool invariant, F&& f) {
  if (!invariant)
    return kernels::parallel_map<double>(points.size(), [&](std::size_t i) { return f(points[i]); });
  std::unordered_map<std::uint64_t, std::size_t> slot;
  std::vector<double> radii;
  std::vector<std::size_t> index(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = std::abs(points[i]);
    const auto [it, fresh] = slot.emplace(std::bit_cast<std::uint64_t>(r), radii.size());
    if (fresh) radii.push_back(r);
    index[i] = it->second;
  }
  const auto vals =
      kernels::parallel_map<double>(radii.size(), [&](std::size_t j) { return f(cplx(radii[j], 0.0)); });
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = vals[index[i]];
  return out;
}

void check_atoms(const Kernel& k, const SymbolMeasure::Atomic& a) {
  if (k.exact()) return;
  std::vector<cplx> bad;
  for (const cplx z : a.points)
    if (std::abs(z) > k.trust_radius()) bad.push_back(z);
  if (bad.empty()) return;
  std::ostringstream os;
  os << bad.size() << " atom(s) outside the trust radius " << k.trust_radius() << ":";
  for (std::size_t i = 0; i < std::min<std::size_t>(bad.size(), 10); ++i) os << ' ' << bad[i];
  if (bad.size() > 10) os << " ...";
  throw DomainError(os.str());
}

double leaf_berezin(const Kernel& k, const SymbolMeasure& leaf, cplx z, const BerezinOptions& opt) {
  if (const auto* a = std::get_if<SymbolMeasure::Atomic>(&leaf.variant())) {
    double s = 0.0;
    for (std::size_t j = 0; j < a->points.size(); ++j)
      s += a->masses[j] * k.berezin_density(z, a->points[j]);
    return s;
  }
  const DiscreteMeasure d = discretize(leaf, opt.measure, z);
  double s = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = k.berezin_density(z, d.z[i]);
    if (!std::isfinite(v)) detail::throw_poisoned(d.z[i]);
    s += d.w[i] * v;
  }
  return s;
}

template <class Leaf>
void accumulate(const SymbolMeasure& mu, double scale, std::vector<double>& out, Leaf&& leaf) {
  if (const auto* s = std::get_if<SymbolMeasure::Scaled>(&mu.variant())) {
    accumulate(*s->inner, scale * s->c, out, leaf);
  } else if (const auto* s = std::get_if<SymbolMeasure::Sum>(&mu.variant())) {
    for (const auto& t : s->terms) accumulate(t, scale, out, leaf);
  } else {
    const auto v = leaf(mu);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * v[i];
  }
}

}  // namespace

double TransformField::min() const {
  return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end());
}

double TransformField::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double berezin_measure(const Kernel& k, const SymbolMeasure& mu, cplx z, const BerezinOptions& opt) {
  k.check_trusted(z);
  const cplx pts[] = {z};
  return berezin_field(k, mu, pts, opt).values[0];
}

TransformField berezin_field(const Kernel& k, const SymbolMeasure& mu, std::span<const cplx> points,
                             const BerezinOptions& opt) {
  for (const cplx z : points) k.check_trusted(z);
  TransformField f;
  f.points.assign(points.begin(), points.end());
  f.values.assign(points.size(), 0.0);
  const bool radial = k.potential().radial();
  accumulate(mu, 1.0, f.values, [&](const SymbolMeasure& leaf) {
    if (const auto* a = std::get_if<SymbolMeasure::Atomic>(&leaf.variant())) check_atoms(k, *a);
    return evaluate(points, radial && leaf.rotation_invariant(),
                    [&](cplx z) { return leaf_berezin(k, leaf, z, opt); });
  });
  f.meta = {{"transform", "berezin"}, {"symbol", mu.descriptor()}};
  return f;
}

TransformField averaging_field(const SymbolMeasure& mu, const RadiusField& rf, double r,
                               std::span<const cplx> points) {
  const auto rho = rf.at(points);
  return averaging_field(mu, r, points, rho, rf.potential().radial());
}

TransformField averaging_field(const SymbolMeasure& mu, double r, std::span<const cplx> points,
                               std::span<const double> rho, bool radial) {
  if (!(r > 0.0)) throw InputError("averaging transform needs r > 0");
  if (rho.size() != points.size()) throw InputError("rho and points differ in length");
  TransformField f;
  f.points.assign(points.begin(), points.end());
  f.values.assign(points.size(), 0.0);
  std::unordered_map<std::uint64_t, double> rho_of;
  if (radial)
    for (std::size_t i = 0; i < points.size(); ++i)
      rho_of.emplace(std::bit_cast<std::uint64_t>(std::abs(points[i])), rho[i]);
  accumulate(mu, 1.0, f.values, [&](const SymbolMeasure& leaf) {
    if (radial && leaf.rotation_invariant())
      return evaluate(points, true, [&](cplx z) {
        const double rr = r * rho_of.at(std::bit_cast<std::uint64_t>(z.real()));
        return leaf.disk_mass(z, rr) / (kPi * rr * rr);
      });
    return kernels::parallel_map<double>(points.size(), [&](std::size_t i) {
      const double rr = r * rho[i];
      return leaf.disk_mass(points[i], rr) / (kPi * rr * rr);
    });
  });
  f.meta = {{"transform", "averaging"}, {"r", r}, {"symbol", mu.descriptor()}};
  return f;
}

double berezin_operator(const Eigen::MatrixXcd& T, const OrthonormalBasis& b, cplx z) {
  if (T.rows() != static_cast<Eigen::Index>(b.dim()) || T.cols() != T.rows())
    throw InputError("operator dimension does not match the basis");
  Eigen::VectorXcd v = b.eval(z).conjugate();
  v /= v.norm();
  return (v.adjoint() * T * v)(0, 0).real();
}

TransformField berezin_operator_field(const Eigen::MatrixXcd& T, const OrthonormalBasis& b,
                                      std::span<const cplx> points) {
  TransformField f;
  f.points.assign(points.begin(), points.end());
  f.values = kernels::parallel_map<double>(
      points.size(), [&](std::size_t i) { return berezin_operator(T, b, points[i]); });
  f.meta = {{"transform", "berezin_operator"}, {"dimension", T.rows()}};
  return f;
}

double trace_exact(const Eigen::MatrixXcd& T) { return T.trace().real(); }

TraceReport trace_integral(const Eigen::MatrixXcd& T, const OrthonormalBasis& b,
                           const PlaneRule& rule, const RadiusField& rf) {
  if (T.rows() != static_cast<Eigen::Index>(b.dim()) || T.cols() != T.rows())
    throw InputError("operator dimension does not match the basis");
  const auto nodes = rule.nodes();
  const auto pts = node_points(rule);
  const auto rho = rf.at(pts);
  const std::size_t d = b.dim();
  struct Pair {
    double exact = 0.0, sigma = 0.0;
    Pair& operator+=(const Pair& o) {
      exact += o.exact;
      sigma += o.sigma;
      return *this;
    }
  };
  const Pair s = kernels::blocked_sum<Pair>(nodes.size(), [&](std::size_t i) {
    Eigen::VectorXcd u(d);
    b.eval_weighted(nodes[i].z, std::span<cplx>(u.data(), d));
    u = u.conjugate().eval();
    const double un = u.squaredNorm();
    const double q = (u.adjoint() * T * u)(0, 0).real();
    Pair p;
    p.exact = nodes[i].w * q;
    p.sigma = un > 0.0 ? nodes[i].w * q / un / (rho[i] * rho[i]) : 0.0;
    if (!std::isfinite(p.exact) || !std::isfinite(p.sigma)) detail::throw_poisoned(nodes[i].z);
    return p;
  });
  TraceReport r;
  r.matrix_trace = trace_exact(T);
  r.integral = s.exact;
  r.sigma_integral = s.sigma;
  r.sigma_ratio = s.sigma / r.matrix_trace;
  r.agreement = std::abs(r.integral - r.matrix_trace) / std::abs(r.matrix_trace);
  return r;
}

std::vector<cplx> node_points(const PlaneRule& rule) {
  std::vector<cplx> z;
  z.reserve(rule.size());
  for (const auto& n : rule.nodes()) z.push_back(n.z);
  return z;
}

double sigma_lp_power(const TransformField& f, double p, const RadiusField& rf,
                      const PlaneRule& rule) {
  if (!(p > 0.0)) throw InputError("exponent must be positive");
  const auto nodes = rule.nodes();
  if (f.size() != nodes.size()) throw InputError("field was not sampled on this rule");
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (f.points[i] != nodes[i].z) throw InputError("field was not sampled on this rule");
  const auto rho = rf.at(f.points);
  return kernels::blocked_sum<double>(nodes.size(), [&](std::size_t i) {
    const double v = std::abs(f.values[i]);
    return v == 0.0 ? 0.0 : nodes[i].w * std::pow(v, p) / (rho[i] * rho[i]);
  });
}

double sigma_lp_norm(const TransformField& f, double p, const RadiusField& rf,
                     const PlaneRule& rule) {
  return std::pow(sigma_lp_power(f, p, rf, rule), 1.0 / p);
}

nlohmann::json VanishingReport::to_json() const {
  return {{"annulus_edges", edges}, {"annulus_sups", sups}, {"global_sup", global_sup},
          {"vanishing", vanishing}};
}

VanishingReport vanishing_detector(const TransformField& f, std::span<const double> edges,
                                   double vanish_tol) {
  VanishingReport rep;
  rep.edges.assign(edges.begin(), edges.end());
  if (edges.size() < 2) return rep;
  rep.sups.assign(edges.size() - 1, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double v = std::abs(f.values[i]);
    rep.global_sup = std::max(rep.global_sup, v);
    const double a = std::abs(f.points[i]);
    for (std::size_t k = 0; k + 1 < edges.size(); ++k)
      if (a >= edges[k] && a < edges[k + 1]) rep.sups[k] = std::max(rep.sups[k], v);
  }
  const std::size_t n = rep.sups.size();
  if (n >= 3) {
    auto drops = [&](std::size_t k) { return rep.sups[k] < rep.sups[k - 1] || rep.sups[k] == 0.0; };
    const bool decreasing = drops(n - 2) && drops(n - 1);
    rep.vanishing = decreasing && rep.sups[n - 1] < vanish_tol * rep.global_sup;
  }
  return rep;
}

}  // namespace dfock
