#include "dfock/experiment/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "dfock/geodesic.hpp"
#include "dfock/io.hpp"
#include "dfock/parallel.hpp"

namespace dfock::experiment {

using nlohmann::json;

namespace {

constexpr const char* kQuantityNames[4] = {"a_schatten", "b_averaging", "c_berezin", "d_lattice"};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

cplx uniform_disk(std::mt19937_64& rng, cplx center, double radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::sqrt(u(rng));
  return center + std::polar(r, 2.0 * kPi * u(rng));
}

std::vector<cplx> concat(std::initializer_list<std::span<const cplx>> parts) {
  std::vector<cplx> out;
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

/// |f(u) e^{-phi(u)}| for f = sum_n c_n e_n at every node of d.
std::vector<double> weighted_modulus(const OrthonormalBasis& b, const Eigen::VectorXcd& c,
                                     std::span<const cplx> pts) {
  const std::size_t dim = b.dim();
  return kernels::parallel_map<double>(pts.size(), [&](std::size_t i) {
    std::vector<cplx> e(dim);
    b.eval_weighted(pts[i], e);
    cplx s = 0.0;
    for (std::size_t n = 0; n < dim; ++n) s += c[static_cast<Eigen::Index>(n)] * e[n];
    return std::abs(s);
  });
}

double weighted_power_sum(std::span<const double> w, std::span<const double> v, double p) {
  return kernels::blocked_sum<double>(w.size(), [&](std::size_t i) {
    return v[i] == 0.0 ? 0.0 : w[i] * std::pow(v[i], p);
  });
}

void dump_field(const Config& c, const RunOptions& o, const std::string& name,
                const TransformField& f) {
  if (c.write_fields) io::write_field(o.out_dir / "fields" / (name + ".csv"), f);
}

}  // namespace

std::vector<cplx> square_grid(double radius, double step) {
  std::vector<cplx> g;
  const long n = static_cast<long>(std::floor(radius / step + 1e-9));
  for (long y = -n; y <= n; ++y)
    for (long x = -n; x <= n; ++x) {
      const cplx z(x * step, y * step);
      if (std::abs(z) <= radius + 1e-12) g.push_back(z);
    }
  return g;
}

std::vector<cplx> annulus_points(std::span<const double> edges) {
  std::vector<double> radii;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    radii.push_back(edges[k]);
    radii.push_back(0.5 * (edges[k] + edges[k + 1]));
    radii.push_back(edges[k] + 0.999 * (edges[k + 1] - edges[k]));
  }
  std::vector<cplx> pts;
  for (double r : radii) {
    if (r == 0.0) {
      pts.emplace_back(0.0);
      continue;
    }
    for (int a = 0; a < 64; ++a) pts.push_back(std::polar(r, 2.0 * kPi * (a + 0.5) / 64));
  }
  return pts;
}

Eigen::VectorXcd random_coefficients(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(dim));
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v[i] = cplx(s * re, s * im);
  }
  return v;
}

Workspace::Workspace(const Config& c, int degree)
    : config(&c),
      rule(basis_rule(c.potential, degree, c.basis_radial, c.basis_angular)),
      basis(build_basis(c.potential, degree, rule)),
      kernel(basis),
      sigma_rule(PlaneRule::polar(c.sigma_radial, c.sigma_angular, c.domain_radius)),
      sigma_points(node_points(sigma_rule)),
      z_grid(square_grid(c.z_radius, c.z_step)),
      annulus(annulus_points(c.annuli)),
      rf(c.potential, concat({sigma_points, z_grid, annulus}), 0.5,
         GeometryTolerances{c.threshold("mass_tol"), c.threshold("radius_tol"), 60}),
      assembly(default_assembly(c.potential, degree)) {
  if (z_grid.empty()) throw InputError("z-grid is empty");
  assembly.psd_tol = c.threshold("psd_tol");
}

SymbolFields symbol_fields(const Workspace& w, const SymbolMeasure& mu, const Lattice& lat) {
  SymbolFields f;
  f.averaging_sigma = averaging_field(mu, w.rf, lat.r, w.sigma_points);
  f.berezin_sigma = berezin_field(w.kernel, mu, w.sigma_points, w.berezin);
  f.averaging_lattice = averaging_field(mu, lat.r, lat.points, lat.rho, w.rf.potential().radial());
  return f;
}

SchattenQuantities schatten_quantities(const Workspace& w, const ToeplitzMatrix& T,
                                       const SymbolFields& f, double p) {
  SchattenQuantities q;
  q.a = schatten_power(T, p);
  q.b = sigma_lp_power(f.averaging_sigma, p, w.rf, w.sigma_rule);
  q.c = sigma_lp_power(f.berezin_sigma, p, w.rf, w.sigma_rule);
  for (double v : f.averaging_lattice.values)
    if (v > 0.0) q.d += std::pow(v, p);
  return q;
}

double atomic_trace_oracle(const OrthonormalBasis& b, const SymbolMeasure& mu) {
  const Kernel truncated(b, KernelMode::Truncated);
  double s = 0.0;
  for (const auto& [z, m] : mu.all_atoms())
    s += m * truncated.diagonal(z) * std::exp(-2.0 * b.potential().phi(z));
  return s;
}

Report run_geometry(const Config& c, const RunOptions& o) {
  Report rep("geometry", c);
  const Potential& p = c.potential;
  const GeometryTolerances tol{c.threshold("mass_tol"), c.threshold("radius_tol"), 60};
  std::mt19937_64 rng(c.seed);
  const auto zg = square_grid(c.z_radius, c.z_step);
  if (zg.empty()) throw InputError("z-grid is empty");
  const RadiusField rf(p, zg, 0.5, tol);

  const auto rho = rf.at(zg);
  rep.scalar("rho_min", *std::min_element(rho.begin(), rho.end()));
  rep.scalar("rho_max", max_of(rho));
  rep.scalar("sigma_weight_at_0", rf.sigma_weight(0.0));
  {
    TransformField f;
    f.points = zg;
    f.values = rho;
    f.meta = {{"field", "rho"}};
    dump_field(c, o, "rho", f);
  }

  const auto mass_err = kernels::parallel_map<double>(zg.size(), [&](std::size_t i) {
    return std::abs(disk_mass(p, zg[i], rho[i], tol) - 1.0);
  });
  rep.flag("disk_mass_at_rho", max_of(mass_err), "mass_tol");

  // Lipschitz bound on random pairs
  std::vector<cplx> pa, pb;
  for (int i = 0; i < c.geometry_pairs; ++i) {
    pa.push_back(uniform_disk(rng, 0.0, c.z_radius));
    pb.push_back(uniform_disk(rng, 0.0, c.z_radius));
  }
  const auto ra = rf.at(pa), rb = rf.at(pb);
  double lip = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pa.size(); ++i)
    lip = std::max(lip, std::abs(ra[i] - rb[i]) - std::abs(pa[i] - pb[i]));
  rep.flag("lipschitz_excess", lip, "lipschitz_slack");

  // Two-sided comparison inside D^r(z)
  std::vector<cplx> centers;
  for (int i = 0; i < c.geometry_centers; ++i) centers.push_back(uniform_disk(rng, 0.0, c.z_radius));
  const auto rc = rf.at(centers);
  for (double r : c.comparison_r) {
    std::vector<cplx> ws;
    std::vector<std::size_t> owner;
    for (std::size_t i = 0; i < centers.size(); ++i)
      for (int k = 0; k < 4; ++k) {
        ws.push_back(uniform_disk(rng, centers[i], r * rc[i]));
        owner.push_back(i);
      }
    const auto rw = rf.at(ws);
    double excess = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ws.size(); ++k) {
      const double rz = rc[owner[k]];
      excess = std::max({excess, (rw[k] - (1.0 + r) * rz) / rz, ((1.0 - r) * rz - rw[k]) / rz});
    }
    rep.flag("rho_comparison_excess_r" + fmt(r), excess, "comparison_slack");
  }

  // sigma(D^r(z)) / r^2
  for (double r : c.sigma_r) {
    const auto vals = kernels::parallel_map<double>(centers.size(), [&](std::size_t i) {
      const DiskRule d(centers[i], r * rc[i], 8, 16);
      std::vector<cplx> pts;
      for (const auto& n : d.nodes()) pts.push_back(n.z);
      const auto rr = rf.at(pts);
      double s = 0.0;
      for (std::size_t k = 0; k < pts.size(); ++k) s += d.nodes()[k].w / (rr[k] * rr[k]);
      return s / (r * r);
    });
    const double lo = *std::min_element(vals.begin(), vals.end());
    const double hi = max_of(vals);
    rep.flag("sigma_disk_min_over_r2_r" + fmt(r), lo, "sigma_lower", Relation::AtLeast);
    rep.flag("sigma_disk_max_over_r2_r" + fmt(r), hi, "sigma_upper");
  }

  const std::vector<double> radii = {0.25, 0.5, 1.0, 2.0};
  std::vector<cplx> dc(centers.begin(), centers.begin() + std::min<std::size_t>(10, centers.size()));
  dc.push_back(0.0);
  rep.scalar("doubling_constant_lower_bound", doubling_constant(p, dc, radii, tol));

  std::vector<DiskPair> pairs;
  for (std::size_t i = 0; i < dc.size(); ++i)
    for (double big : {1.0, 2.0})
      for (double q : {0.1, 0.25, 0.5}) {
        const double R = big * rf(dc[i]);
        pairs.push_back({dc[i], R, dc[i], q * R});
        pairs.push_back({dc[i], R, uniform_disk(rng, dc[i], R), q * R});
      }
  const ChristFit fit = christ_fit(p, pairs, tol);
  rep.scalar("christ_C", fit.C);
  rep.scalar("christ_delta", fit.delta);
  rep.flag("christ_fit_C", fit.feasible ? fit.C : std::numeric_limits<double>::infinity(),
           "christ_c_cap");
  json frontier = json::array();
  for (const auto& [d, cmin] : fit.frontier) frontier.push_back({d, cmin});
  rep.section("christ_frontier") = frontier;

  // Geodesic distance estimates
  const double E = c.geodesic_extent;
  const GeodesicGrid g(rf, cplx(-E, -E), cplx(E, E));
  rep.scalar("geodesic_spacing", g.spacing());
  rep.scalar("geodesic_nodes", static_cast<double>(g.size()));
  double near_excess = -std::numeric_limits<double>::infinity();
  double far_c = 0.0, asym = 0.0;
  const double delta = fit.feasible ? fit.delta : 0.5;
  for (int s = 0; s < 8; ++s) {
    const std::size_t src = g.index_of(uniform_disk(rng, 0.0, 0.5 * E));
    const cplx z = g.node(src);
    const double rz = g.rho_at(src);
    const auto d = g.distances_from(z);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (k == src) continue;
      const double sep = std::abs(g.node(k) - z) / rz;
      for (double r : {0.3, 0.5}) {
        if (sep >= r) continue;
        const double cr = 1.0 / (1.0 - r);
        near_excess = std::max({near_excess, d[k] / (cr * sep) - 1.0, (sep / cr) / d[k] - 1.0});
      }
      if (sep >= 1.0) far_c = std::max(far_c, std::pow(sep, delta) / d[k]);
    }
    const cplx w = g.node(g.index_of(uniform_disk(rng, 0.0, 0.5 * E)));
    asym = std::max(asym, std::abs(g.distance(z, w) - g.distance(w, z)));
  }
  rep.flag("geodesic_near_diagonal_excess", near_excess, "metric_slack");
  rep.flag("geodesic_symmetry", asym, "metric_slack");
  rep.scalar("geodesic_far_field_c", far_c);
  rep.flag("geodesic_far_field_feasible", far_c, "far_field_cap");

  // Kernel diagnostics
  const Workspace w(c, c.degree);
  rep.scalar("trust_radius", w.basis.trust_radius());
  std::vector<cplx> far;
  const double reach = std::min(E, w.kernel.trust_radius());
  for (const cplx z : square_grid(reach, 0.25))
    if (std::abs(z.real()) <= E - g.spacing() && std::abs(z.imag()) <= E - g.spacing()) far.push_back(z);
  const DecayFit decay = decay_fit(w.kernel, rf, g, 0.0, far, c.threshold("decay_c_cap"));
  rep.scalar("kernel_decay_epsilon", decay.epsilon);
  rep.flag("kernel_decay_C", decay.feasible ? decay.C : std::numeric_limits<double>::infinity(),
           "decay_c_cap");

  std::vector<cplx> kz;
  for (const cplx z : zg)
    if (std::abs(z) <= w.kernel.trust_radius()) kz.push_back(z);
  for (double kp : c.kernel_p) {
    std::vector<double> ratios;
    for (const cplx z : kz)
      ratios.push_back(kernel_norm(w.kernel, kp, z) /
                       (std::exp(p.phi(z)) * std::pow(rf(z), 2.0 / kp - 2.0)));
    const auto stat = RatioStat::of(ratios);
    rep.ratio("kernel_norm_over_prediction_p" + fmt(kp), ratios);
    rep.flag("kernel_norm_ratio_spread_p" + fmt(kp), stat.spread(), "ratio_window");
  }
  const double r0 = near_diagonal_radius(w.kernel, rf, kz, c.threshold("near_diag_window"));
  rep.scalar("near_diagonal_r0", r0);
  rep.flag_condition("near_diagonal_r0_found", r0 > 0.0, "near_diag_window");
  return rep;
}

Report run_carleson(const Config& c, const RunOptions& o) {
  Report rep("carleson", c);
  const Workspace w(c, c.degree);
  std::mt19937_64 rng(c.seed);
  std::vector<Eigen::VectorXcd> polys;
  for (int i = 0; i < c.random_functions; ++i) polys.push_back(random_coefficients(rng, w.basis.dim()));

  // ||K_z||_p^p and ||f||_p^p are symbol independent
  std::map<double, std::vector<double>> knorm;
  std::map<double, std::vector<double>> fnorm;
  std::vector<std::vector<double>> fmod_rule;
  std::vector<cplx> rule_pts = node_points(w.rule);
  std::vector<double> rule_w;
  for (const auto& n : w.rule.nodes()) rule_w.push_back(n.w);
  for (const auto& f : polys) fmod_rule.push_back(weighted_modulus(w.basis, f, rule_pts));
  for (double kp : c.kernel_p) {
    for (const cplx z : w.z_grid) knorm[kp].push_back(std::pow(kernel_norm(w.kernel, kp, z), kp));
    for (const auto& m : fmod_rule) fnorm[kp].push_back(weighted_power_sum(rule_w, m, kp));
  }

  struct Values {
    double sup_avg = 0.0, sup_ber = 0.0;
    std::map<double, double> emb;
  };
  auto measure = [&](const SymbolMeasure& mu) {
    Values v;
    v.sup_avg = averaging_field(mu, w.rf, c.averaging_r, w.z_grid).max();
    v.sup_ber = berezin_field(w.kernel, mu, w.z_grid, w.berezin).max();
    const DiscreteMeasure d0 = discretize(mu, w.berezin.measure, 0.0);
    std::vector<std::vector<double>> fmod;
    for (const auto& f : polys) fmod.push_back(weighted_modulus(w.basis, f, d0.z));
    for (double kp : c.kernel_p) {
      double best = 0.0;
      for (std::size_t i = 0; i < w.z_grid.size(); ++i) {
        const cplx z = w.z_grid[i];
        const DiscreteMeasure d = discretize(mu, w.berezin.measure, z);
        const auto vals = kernels::parallel_map<double>(
            d.size(), [&](std::size_t k) { return w.kernel.weighted_abs(z, d.z[k]); });
        best = std::max(best, weighted_power_sum(d.w, vals, kp) / knorm[kp][i]);
      }
      for (std::size_t i = 0; i < polys.size(); ++i)
        best = std::max(best, weighted_power_sum(d0.w, fmod[i], kp) / fnorm[kp][i]);
      v.emb[kp] = best;
    }
    return v;
  };

  std::map<std::string, std::vector<double>> fam_ratios;
  double drift = 0.0;
  for (const auto& s : c.symbols) {
    const Values v = measure(s.measure);
    rep.scalar(s.name + ".sup_averaging", v.sup_avg);
    rep.scalar(s.name + ".sup_berezin", v.sup_ber);
    std::map<std::string, double> ratios = {{"averaging_over_berezin", v.sup_avg / v.sup_ber}};
    for (const auto& [kp, e] : v.emb) {
      rep.scalar(s.name + ".embedding_lower_bound_p" + fmt(kp), e);
      ratios["embedding_p" + fmt(kp) + "_over_berezin"] = e / v.sup_ber;
    }
    for (const auto& [name, r] : ratios) {
      rep.scalar(s.name + "." + name, r);
      if (!s.reference) fam_ratios[name].push_back(r);
    }

    for (double cc : c.scaling) {
      const Values vc = measure(SymbolMeasure::scaled(cc, s.measure));
      drift = std::max({drift, std::abs(vc.sup_avg / (cc * v.sup_avg) - 1.0),
                        std::abs(vc.sup_ber / (cc * v.sup_ber) - 1.0)});
      for (const auto& [kp, e] : vc.emb) drift = std::max(drift, std::abs(e / (cc * v.emb.at(kp)) - 1.0));
    }

    const auto avg_a = averaging_field(s.measure, w.rf, c.averaging_r, w.annulus);
    const auto ber_a = berezin_field(w.kernel, s.measure, w.annulus, w.berezin);
    const double vt = c.threshold("vanish_tol");
    const auto van_avg = vanishing_detector(avg_a, c.annuli, vt);
    const auto van_ber = vanishing_detector(ber_a, c.annuli, vt);
    rep.section("vanishing")[s.name] = {{"averaging", van_avg.to_json()}, {"berezin", van_ber.to_json()}};
    dump_field(c, o, "carleson_" + s.name + "_berezin", berezin_field(w.kernel, s.measure, w.z_grid, w.berezin));
  }
  rep.flag("scaling_drift", drift, "scaling_invariance");
  for (const auto& [name, samples] : fam_ratios) {
    const auto stat = RatioStat::of(samples);
    rep.ratio(name, samples);
    rep.flag(name + "_family_spread", stat.spread(), "ratio_window");
  }
  return rep;
}

Report run_toeplitz(const Config& c, const RunOptions& o) {
  Report rep("toeplitz", c);
  const Workspace w(c, c.degree);
  const int half_degree = std::max(1, c.degree / 2);
  const OrthonormalBasis half = build_basis(c.potential, half_degree,
                                            basis_rule(c.potential, half_degree, c.basis_radial, c.basis_angular));
  const AssemblyOptions half_opt = default_assembly(c.potential, half_degree);
  std::vector<cplx> grid;
  for (const cplx z : w.z_grid)
    if (std::abs(z) <= w.basis.trust_radius()) grid.push_back(z);

  std::map<std::string, std::vector<double>> fam_ratios;
  double drift = 0.0;
  for (const auto& s : c.symbols) {
    const ToeplitzMatrix T = assemble(w.basis, s.measure, w.assembly);
    const double norm = operator_norm(T);
    const double sup_ber = berezin_field(w.kernel, s.measure, w.z_grid, w.berezin).max();
    rep.scalar(s.name + ".operator_norm", norm);
    rep.scalar(s.name + ".sup_berezin", sup_ber);
    std::map<std::string, double> ratios = {{"berezin_over_norm", sup_ber / norm}};
    for (double kp : c.kernel_p) {
      const double m = kernel_action_statistic(T, w.basis, kp, grid);
      rep.scalar(s.name + ".kernel_action_p" + fmt(kp), m);
      ratios["kernel_action_p" + fmt(kp) + "_over_norm"] = m / norm;
    }
    for (const auto& [name, r] : ratios) {
      rep.scalar(s.name + "." + name, r);
      if (!s.reference) fam_ratios[name].push_back(r);
    }
    for (double cc : c.scaling) {
      const ToeplitzMatrix Tc = assemble(w.basis, SymbolMeasure::scaled(cc, s.measure), w.assembly);
      drift = std::max(drift, std::abs(operator_norm(Tc) / (cc * norm) - 1.0));
    }
    const ToeplitzMatrix Th = assemble(half, s.measure, half_opt);
    rep.section("compactness")[s.name] = compactness_indicator(Th, T).to_json();
    if (c.write_spectra) io::write_spectrum(o.out_dir / "spectra" / (s.name + ".csv"), T.spectrum);
  }
  rep.flag("scaling_drift", drift, "scaling_invariance");
  for (const auto& [name, samples] : fam_ratios) {
    const auto stat = RatioStat::of(samples);
    rep.ratio(name, samples);
    rep.flag(name + "_family_spread", stat.spread(), "ratio_window");
  }
  rep.note("compactness compares degrees " + std::to_string(half_degree) + " and " +
           std::to_string(c.degree));
  return rep;
}

Report run_schatten(const Config& c, const RunOptions& o) {
  Report rep("schatten", c);
  const Workspace w(c, c.degree);
  const int half_degree = std::max(1, c.degree / 2);
  const OrthonormalBasis half = build_basis(c.potential, half_degree,
                                            basis_rule(c.potential, half_degree, c.basis_radial, c.basis_angular));
  const AssemblyOptions half_opt = default_assembly(c.potential, half_degree);
  const double vt = c.threshold("vanish_tol");

  struct Entry {
    const NamedSymbol* s;
    ToeplitzMatrix T;
  };
  std::vector<Entry> entries;
  for (const auto& s : c.symbols) {
    const auto ber_a = berezin_field(w.kernel, s.measure, w.annulus, w.berezin);
    if (!vanishing_detector(ber_a, c.annuli, vt).vanishing) {
      rep.note("symbol '" + s.name + "' is not decaying on the annuli; skipped");
      continue;
    }
    entries.push_back({&s, assemble(w.basis, s.measure, w.assembly)});
    const ToeplitzMatrix Th = assemble(half, s.measure, half_opt);
    for (double p : c.schatten_p)
      rep.scalar(s.name + ".schatten_tail_p" + fmt(p), schatten_tail_estimate(entries.back().T, Th, p));
  }

  double drift = 0.0;
  std::map<std::string, std::map<std::string, std::vector<double>>> across_r;
  for (double r : c.lattice_r) {
    const Lattice lat = build_lattice(w.rf, r, c.domain_radius);
    const std::string rtag = "_r" + fmt(r);
    rep.scalar("lattice" + rtag + ".points", static_cast<double>(lat.size()));
    rep.scalar("lattice" + rtag + ".overlap_index", lat.overlap_index);
    rep.scalar("lattice" + rtag + ".covering_certificate", lat.covering_certificate);
    if (c.write_fields) io::write_lattice(o.out_dir / "lattices" / ("lattice" + rtag), lat);

    std::map<std::string, std::vector<double>> fam;
    for (const auto& e : entries) {
      const SymbolFields f = symbol_fields(w, e.s->measure, lat);
      for (double p : c.schatten_p) {
        const SchattenQuantities q = schatten_quantities(w, e.T, f, p);
        const std::string tag = e.s->name + rtag + "_p" + fmt(p);
        for (int i = 0; i < 4; ++i) rep.scalar(tag + "." + kQuantityNames[i], q[i]);
        for (int i = 0; i < 4; ++i)
          for (int k = i + 1; k < 4; ++k) {
            const std::string name = std::string(kQuantityNames[i]) + "_over_" + kQuantityNames[k] +
                                     rtag + "_p" + fmt(p);
            rep.scalar(e.s->name + "." + name, q[i] / q[k]);
            if (!e.s->reference) fam[name].push_back(q[i] / q[k]);
            const std::string base = std::string(kQuantityNames[i]) + "_over_" + kQuantityNames[k] + "_p" + fmt(p);
            across_r[base][e.s->name].push_back(q[i] / q[k]);
          }
      }
      for (double cc : c.scaling) {
        const SymbolMeasure scaled = SymbolMeasure::scaled(cc, e.s->measure);
        const ToeplitzMatrix Tc = assemble(w.basis, scaled, w.assembly);
        const SymbolFields fc = symbol_fields(w, scaled, lat);
        for (double p : c.schatten_p) {
          const SchattenQuantities q = schatten_quantities(w, e.T, f, p);
          const SchattenQuantities qc = schatten_quantities(w, Tc, fc, p);
          for (int i = 0; i < 4; ++i)
            if (q[i] > 0.0) drift = std::max(drift, std::abs(qc[i] / (std::pow(cc, p) * q[i]) - 1.0));
        }
      }
    }
    for (const auto& [name, samples] : fam) {
      const auto stat = RatioStat::of(samples);
      rep.ratio(name, samples);
      rep.flag(name + "_family_spread", stat.spread(), "ratio_window");
    }
  }
  for (const auto& [base, per_symbol] : across_r) {
    double worst = 1.0;
    for (const auto& [sym, samples] : per_symbol) {
      const double spread = RatioStat::of(samples).spread();
      rep.scalar(sym + "." + base + "_r_spread", spread);
      worst = std::max(worst, spread);
    }
    rep.flag(base + "_r_spread", worst, "ratio_window");
  }
  rep.flag("homogeneity_drift", drift, "homogeneity");
  return rep;
}

Report run_trace(const Config& c, const RunOptions&) {
  Report rep("trace", c);
  const Workspace w(c, c.degree);
  double worst = 0.0, oracle_worst = 0.0;
  auto one = [&](const std::string& name, const ToeplitzMatrix& T) {
    const TraceReport t = trace_integral(T.matrix, w.basis, w.rule, w.rf);
    rep.scalar(name + ".matrix_trace", t.matrix_trace);
    rep.scalar(name + ".integral_identity", t.integral);
    rep.scalar(name + ".sigma_integral", t.sigma_integral);
    rep.scalar(name + ".sigma_ratio", t.sigma_ratio);
    worst = std::max(worst, t.agreement);
  };
  for (const auto& s : c.symbols) {
    const ToeplitzMatrix T = assemble(w.basis, s.measure, w.assembly);
    one(s.name, T);
    if (std::holds_alternative<SymbolMeasure::Atomic>(s.measure.variant())) {
      const double oracle = atomic_trace_oracle(w.basis, s.measure);
      rep.scalar(s.name + ".atomic_oracle", oracle);
      oracle_worst = std::max(oracle_worst, std::abs(oracle - trace_exact(T.matrix)) / std::abs(oracle));
    }
  }
  one("identity", from_matrix(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(w.basis.dim()),
                                                          static_cast<Eigen::Index>(w.basis.dim()))));
  rep.flag("integral_identity_agreement", worst, "trace_agreement");
  rep.flag("atomic_oracle_agreement", oracle_worst, "trace_agreement");
  rep.note("sigma_ratio is the ratio of the d sigma integral of the Berezin transform to the "
           "matrix trace; it is a normalisation constant, not a pass/fail quantity");
  return rep;
}

Report run_scenario(const std::string& name, const Config& c, const RunOptions& o) {
  Report rep = name == "geometry"   ? run_geometry(c, o)
               : name == "carleson" ? run_carleson(c, o)
               : name == "toeplitz" ? run_toeplitz(c, o)
               : name == "schatten" ? run_schatten(c, o)
               : name == "trace"    ? run_trace(c, o)
                                    : throw InputError("unknown scenario '" + name + "'");
  rep.write(o.out_dir);
  return rep;
}

}  // namespace dfock::experiment
