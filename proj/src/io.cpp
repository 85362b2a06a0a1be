#include "fus/io.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "fus/grid.hpp"

namespace fus {

std::map<std::string, std::string> parse_key_value_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");

  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

double require_double(const std::map<std::string, std::string>& kv, const std::string& key,
                      const std::string& context) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw std::runtime_error(context + ": missing required key '" + key + "'");
  try {
    std::size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(context + ": key '" + key + "' is not a number: '" + it->second +
                             "'");
  }
}

std::string require_string(const std::map<std::string, std::string>& kv, const std::string& key,
                           const std::string& context) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw std::runtime_error(context + ": missing required key '" + key + "'");
  return it->second;
}

void write_on_axis_csv(const std::string& path, const Eigen::VectorXd& x,
                       const Eigen::VectorXcd& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << "x_m,re_Pa,im_Pa,abs_Pa\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out << x[i] << ',' << p[i].real() << ',' << p[i].imag() << ',' << std::abs(p[i]) << '\n';
}

void write_field_dump(const std::string& path, const HarmonicField& field) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    // x-fastest order is the in-memory layout already.
    out.write(reinterpret_cast<const char*>(field.values.data()),
              std::streamsize(field.values.size() * sizeof(std::complex<double>)));
  }
  std::ofstream hdr(path + ".hdr");
  if (!hdr) throw std::runtime_error("cannot write '" + path + ".hdr'");
  hdr << std::setprecision(17) << "nx = " << field.grid.dims.x()
      << "\nny = " << field.grid.dims.y() << "\nnz = " << field.grid.dims.z()
      << "\ndx = " << field.grid.dx << "\norigin_x = " << field.grid.box.lo.x()
      << "\norigin_y = " << field.grid.box.lo.y() << "\norigin_z = " << field.grid.box.lo.z()
      << "\nharmonic = " << field.wavenumber.harmonic << "\nk_re = " << field.wavenumber.k.real()
      << "\nk_im = " << field.wavenumber.k.imag() << "\nlayout = x_fastest_complex_f64_le\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  for (std::size_t i = 0; i < columns.size(); ++i)
    out << columns[i] << (i + 1 < columns.size() ? ',' : '\n');
  out << std::setprecision(17);
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? ',' : '\n');
}

}  // namespace fus
