#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <vector>

namespace fus {

struct VoxelGrid;
struct HarmonicField;

// Parses a "key = value" config file. Lines starting with '#' and blank
// lines are skipped. Keys are case-sensitive. Throws std::runtime_error
// with a line number on malformed input.
std::map<std::string, std::string> parse_key_value_file(const std::string& path);

double require_double(const std::map<std::string, std::string>& kv,
                      const std::string& key, const std::string& context);
std::string require_string(const std::map<std::string, std::string>& kv,
                           const std::string& key, const std::string& context);

// On-axis CSV: columns x_m, re_Pa, im_Pa, abs_Pa.
void write_on_axis_csv(const std::string& path, const Eigen::VectorXd& x,
                       const Eigen::VectorXcd& p);

// Raw little-endian complex-double dump in x-fastest order, plus a
// sidecar key=value header <path>.hdr with dims, spacing, origin,
// harmonic index and wavenumber.
void write_field_dump(const std::string& path, const HarmonicField& field);

// Generic CSV writer: header row followed by rows of doubles.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

}  // namespace fus
