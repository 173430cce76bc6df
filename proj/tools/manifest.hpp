#pragma once

// Manifest parsing and deterministic JSON/CSV output for the command line tool.

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "thermodtn/geometry.hpp"
#include "thermodtn/material.hpp"

namespace thermodtn::cli {

using json = nlohmann::json;

struct Manifest {
  json source;  // the parsed file, kept as provenance
  int dimension = 2;
  int x_order = 4;
  int xi_order = 4;
  int depth = 2;
  std::string mode = "float";
  std::vector<std::vector<double>> covectors;
  std::vector<double> direction;  // set when covectors come as direction + magnitudes
  std::map<std::string, double> tolerances;

  double tolerance(const std::string& name) const { return tolerances.at(name); }
};

/// Defaults for every tolerance a command may use.
std::map<std::string, double> default_tolerances();

/// Throws Error(ManifestError) naming the offending field.
Manifest parse_manifest(const json& j);
Manifest load_manifest(const std::string& path);

template <class S>
MetricJet<S> build_metric(const Manifest& m);
template <class S>
MaterialJet<S> build_material(const Manifest& m);

/// True when every coefficient jet has no x' dependence.
bool material_normal_only(const MaterialJet<Complex>& m);
bool material_constant(const MaterialJet<Complex>& m);
bool metric_flat(const MetricJet<Complex>& g);

/// %.17g formatting; integers-valued doubles keep the same format.
std::string format_double(double v);
/// Deterministic dump: sorted keys, two-space indent, %.17g numbers.
std::string dump_json(const json& j);

json complex_json(const Complex& z);
json matrix_json(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd matrix_from_json(const json& j);

json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace thermodtn::cli
