#include "dfock/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace dfock::io {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

bool parse_double(std::string_view s, double& v) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && p == s.data() + s.size();
}

}  // namespace

std::vector<std::vector<double>> read_csv(const fs::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::vector<double> row;
    bool numeric = true;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      double v = 0.0;
      if (!parse_double(std::string_view(line).substr(start, comma - start), v)) numeric = false;
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    if (row.size() != columns)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(columns) + " fields");
    rows.push_back(std::move(row));
  }
  return rows;
}

SymbolMeasure read_atoms(const fs::path& path) {
  std::vector<cplx> z;
  std::vector<double> m;
  for (const auto& r : read_csv(path, 3)) {
    z.emplace_back(r[0], r[1]);
    m.push_back(r[2]);
  }
  return SymbolMeasure::atoms(std::move(z), std::move(m));
}

void write_atoms(const fs::path& path, const SymbolMeasure& mu) {
  auto out = open_out(path);
  out << "re,im,mass\n";
  for (const auto& [z, m] : mu.all_atoms()) out << z.real() << ',' << z.imag() << ',' << m << '\n';
}

Potential read_radial_profile(const fs::path& path) {
  std::vector<double> r, phi, lap;
  for (const auto& row : read_csv(path, 3)) {
    r.push_back(row[0]);
    phi.push_back(row[1]);
    lap.push_back(row[2]);
  }
  return Potential::custom_radial(std::move(r), std::move(phi), std::move(lap));
}

void write_field(const fs::path& path, const TransformField& f) {
  auto out = open_out(path);
  out << "re,im,value\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    out << f.points[i].real() << ',' << f.points[i].imag() << ',' << f.values[i] << '\n';
}

void write_spectrum(const fs::path& path, const std::vector<double>& spectrum) {
  auto out = open_out(path);
  out << "k,lambda\n";
  for (std::size_t k = 0; k < spectrum.size(); ++k) out << k << ',' << spectrum[k] << '\n';
}

void write_matrix(const fs::path& path, const Eigen::MatrixXcd& T) {
  auto out = open_out(path);
  out << "m,n,re,im\n";
  for (Eigen::Index m = 0; m < T.rows(); ++m)
    for (Eigen::Index n = 0; n < T.cols(); ++n)
      out << m << ',' << n << ',' << T(m, n).real() << ',' << T(m, n).imag() << '\n';
}

void write_lattice(const fs::path& stem, const Lattice& lat) {
  fs::path csv = stem, meta = stem;
  csv += ".csv";
  meta += ".json";
  auto out = open_out(csv);
  out << "re,im\n";
  for (const cplx z : lat.points) out << z.real() << ',' << z.imag() << '\n';
  write_json(meta, lat.metadata());
}

std::vector<cplx> read_lattice_points(const fs::path& csv) {
  std::vector<cplx> z;
  for (const auto& r : read_csv(csv, 2)) z.emplace_back(r[0], r[1]);
  return z;
}

void save_basis(const fs::path& path, const OrthonormalBasis& b) { write_json(path, b.to_json()); }

OrthonormalBasis load_basis(const fs::path& path, const Potential& p) {
  return OrthonormalBasis::from_json(read_json(path), p);
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace dfock::io
