#include <doctest.h>

#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fus/grid.hpp"
#include "fus/io.hpp"
#include "fus/medium.hpp"

TEST_SUITE("io") {

TEST_CASE("key=value parser: comments, whitespace, errors") {
  const std::string path = "test_kv.txt";
  {
    std::ofstream out(path);
    out << "# a comment\n\n  key1 =  7.5 \nkey2= text value\n";
  }
  const auto kv = fus::parse_key_value_file(path);
  CHECK(kv.size() == 2);
  CHECK(fus::require_double(kv, "key1", "test") == 7.5);
  CHECK(fus::require_string(kv, "key2", "test") == "text value");
  CHECK_THROWS(fus::require_double(kv, "missing", "test"));
  CHECK_THROWS(fus::require_double(kv, "key2", "test"));  // not a number
  std::remove(path.c_str());

  {
    std::ofstream out(path);
    out << "valid = 1\nthis line has no equals sign\n";
  }
  try {
    fus::parse_key_value_file(path);
    CHECK(false);
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);  // line number
  }
  std::remove(path.c_str());

  CHECK_THROWS(fus::parse_key_value_file("no_such_file_anywhere.txt"));
}

TEST_CASE("on-axis csv has the expected shape") {
  Eigen::VectorXd x(2);
  x << 0.01, 0.02;
  Eigen::VectorXcd p(2);
  p << std::complex<double>(3.0, 4.0), std::complex<double>(-1.0, 0.0);
  fus::write_on_axis_csv("test_axis.csv", x, p);
  std::ifstream in("test_axis.csv");
  std::string header, row1;
  std::getline(in, header);
  std::getline(in, row1);
  CHECK(header == "x_m,re_Pa,im_Pa,abs_Pa");
  CHECK(row1.substr(0, 5) == "0.01,");
  CHECK(row1.find(",5") != std::string::npos);  // |3+4i| = 5
  std::remove("test_axis.csv");
}

TEST_CASE("field dump round-trips through the raw file and header") {
  const fus::Medium water = fus::medium_preset("water");
  fus::DomainBox box{{1e-3, 0, -1e-3}, {4e-3, 2e-3, 1e-3}};
  fus::HarmonicField f;
  f.grid = fus::make_grid(box, 1e-3, 2);
  f.wavenumber = fus::complex_wavenumber(water, 1.1e6, 2);
  f.values.resize(f.grid.count());
  for (Eigen::Index i = 0; i < f.values.size(); ++i)
    f.values[i] = {double(i), -double(i) / 3.0};

  fus::write_field_dump("test_field.bin", f);

  const auto hdr = fus::parse_key_value_file("test_field.bin.hdr");
  CHECK(fus::require_double(hdr, "nx", "hdr") == f.grid.dims.x());
  CHECK(fus::require_double(hdr, "dx", "hdr") == f.grid.dx);
  CHECK(fus::require_double(hdr, "harmonic", "hdr") == 2);
  CHECK(fus::require_string(hdr, "layout", "hdr") == "x_fastest_complex_f64_le");

  std::ifstream in("test_field.bin", std::ios::binary);
  std::vector<std::complex<double>> back(f.grid.count());
  in.read(reinterpret_cast<char*>(back.data()),
          std::streamsize(back.size() * sizeof(std::complex<double>)));
  CHECK(in.gcount() == std::streamsize(back.size() * sizeof(std::complex<double>)));
  bool same = true;
  for (Eigen::Index i = 0; i < f.values.size(); ++i) same = same && back[i] == f.values[i];
  CHECK(same);
  std::remove("test_field.bin");
  std::remove("test_field.bin.hdr");
}

TEST_CASE("generic csv writer") {
  fus::write_csv("test_gen.csv", {"a", "b"}, {{1.0, 2.0}, {3.0, 4.5}});
  std::ifstream in("test_gen.csv");
  std::string l0, l1, l2;
  std::getline(in, l0);
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(l0 == "a,b");
  CHECK(l1 == "1,2");
  CHECK(l2 == "3,4.5");
  std::remove("test_gen.csv");
}

}  // TEST_SUITE
