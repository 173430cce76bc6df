#include "manifest.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "thermodtn/errors.hpp"

namespace thermodtn::cli {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::ManifestError, field + ": " + what);
}

mpq_class parse_rational(const std::string& field, const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0) fail(field, "cannot read \"" + text + "\" as a rational number");
  q.canonicalize();
  if (q.get_den() == 0) fail(field, "zero denominator");
  return q;
}

/// A real number given as a JSON number or as a rational string such as "1/3".
template <class S>
S real_scalar(const json& j, const std::string& field) {
  if (j.is_number()) return ScalarOps<S>::from_double(j.get<double>());
  if (j.is_string()) {
    const mpq_class q = parse_rational(field, j.get<std::string>());
    if constexpr (std::is_same_v<S, QComplex>)
      return QComplex(q);
    else
      return Complex(q.get_d(), 0.0);
  }
  fail(field, "expected a number or a rational string");
}

template <class S>
S complex_scalar(const json& j, const std::string& field) {
  if (j.is_array()) {
    if (j.size() != 2) fail(field, "complex values are [re, im]");
    const S re = real_scalar<S>(j[0], field);
    const S im = real_scalar<S>(j[1], field);
    return re + im * ScalarOps<S>::imag_unit();
  }
  return real_scalar<S>(j, field);
}

std::vector<int> parse_multi_index(const std::string& key, int n, const std::string& field) {
  std::vector<int> J;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (used != part.size() || v < 0) throw std::invalid_argument(part);
      J.push_back(v);
    } catch (const std::exception&) {
      fail(field, "bad multi-index \"" + key + "\"");
    }
  }
  if (static_cast<int>(J.size()) != n) fail(field, "multi-index \"" + key + "\" must have " + std::to_string(n) + " entries");
  return J;
}

template <class S>
TaylorJet<S> coefficient(const json& j, const SpacePtr& sp, const std::string& field) {
  if (j.is_number() || j.is_string()) return constant_jet(sp, real_scalar<S>(j, field));
  if (!j.is_object()) fail(field, "expected a number, a preset object or a jet literal");
  if (j.contains("jet")) {
    const json& lit = j.at("jet");
    if (!lit.is_object()) fail(field + ".jet", "jet literals map \"k1,...,kn\" to [re, im]");
    TaylorJet<S> f(sp);
    for (const auto& [key, val] : lit.items()) {
      const auto J = parse_multi_index(key, sp->nx(), field + ".jet");
      int total = 0;
      for (int k : J) total += k;
      if (total > sp->max_x_order()) continue;  // beyond the jet order: truncated
      f.set_derivative(J, complex_scalar<S>(val, field + ".jet[" + key + "]"));
    }
    return f;
  }
  if (!j.contains("preset")) fail(field, "object needs \"preset\" or \"jet\"");
  const std::string preset = j.at("preset").get<std::string>();
  if (!j.contains("value")) fail(field + ".value", "missing");
  const S value = real_scalar<S>(j.at("value"), field + ".value");
  if (preset == "constant") return constant_jet(sp, value);
  if (preset == "linear-in-xn") {
    std::vector<S> slopes;
    if (j.contains("slopes")) {
      if (!j.at("slopes").is_array()) fail(field + ".slopes", "expected a list");
      for (std::size_t k = 0; k < j.at("slopes").size(); ++k)
        slopes.push_back(real_scalar<S>(j.at("slopes")[k], field + ".slopes[" + std::to_string(k) + "]"));
    }
    return polynomial_in_xn(sp, value, slopes);
  }
  fail(field + ".preset", "unknown preset \"" + preset + "\"");
}

int get_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) fail(key, "expected an integer");
  return j.at(key).get<int>();
}

std::vector<double> number_list(const json& j, const std::string& field) {
  if (!j.is_array()) fail(field, "expected a list of numbers");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) fail(field, "expected a list of numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace

std::map<std::string, double> default_tolerances() {
  return {{"residual", 1e-9},      {"sylvester", 1e-12},       {"slope", 0.3},
          {"round_trip", 1e-6},    {"layer_residual", 1e-6},   {"order0_consistency", 1e-6},
          {"closed_form", 1e-8}};
}

Manifest parse_manifest(const json& j) {
  if (!j.is_object()) fail("manifest", "top level must be an object");
  Manifest m;
  m.source = j;
  if (!j.contains("dimension")) fail("dimension", "missing");
  m.dimension = get_int(j, "dimension", 2);
  if (m.dimension < 2) fail("dimension", "must be at least 2");
  if (j.contains("jet_orders")) {
    const json& o = j.at("jet_orders");
    if (!o.is_object()) fail("jet_orders", "expected {\"x\": K, \"xi\": L}");
    m.x_order = get_int(o, "x", m.x_order);
    m.xi_order = get_int(o, "xi", m.xi_order);
  }
  m.depth = get_int(j, "depth", m.depth);
  if (m.x_order < 0 || m.xi_order < 0) fail("jet_orders", "orders must be non-negative");
  if (m.depth < 0) fail("depth", "must be non-negative");
  if (j.contains("mode")) {
    m.mode = j.at("mode").get<std::string>();
    if (m.mode != "float" && m.mode != "rational") fail("mode", "must be \"float\" or \"rational\"");
  }
  if (!j.contains("metric")) fail("metric", "missing");
  if (!j.contains("material")) fail("material", "missing");
  for (const char* c : {"lambda", "mu", "alpha", "beta"})
    if (!j.at("material").contains(c)) fail(std::string("material.") + c, "missing");

  const int t = m.dimension - 1;
  if (j.contains("covectors")) {
    const json& c = j.at("covectors");
    if (c.is_array()) {
      for (std::size_t i = 0; i < c.size(); ++i)
        m.covectors.push_back(number_list(c[i], "covectors[" + std::to_string(i) + "]"));
    } else if (c.is_object()) {
      if (!c.contains("direction") || !c.contains("magnitudes"))
        fail("covectors", "expected a list or {\"direction\", \"magnitudes\"}");
      m.direction = number_list(c.at("direction"), "covectors.direction");
      if (static_cast<int>(m.direction.size()) != t) fail("covectors.direction", "needs n - 1 components");
      double norm = 0.0;
      for (double v : m.direction) norm += v * v;
      if (!(norm > 0.0)) fail("covectors.direction", "must be nonzero");
      for (double mag : number_list(c.at("magnitudes"), "covectors.magnitudes")) {
        std::vector<double> xi;
        for (double v : m.direction) xi.push_back(v * mag);
        m.covectors.push_back(xi);
      }
    } else {
      fail("covectors", "expected a list or {\"direction\", \"magnitudes\"}");
    }
  }
  for (std::size_t i = 0; i < m.covectors.size(); ++i)
    if (static_cast<int>(m.covectors[i].size()) != t)
      fail("covectors[" + std::to_string(i) + "]", "needs n - 1 = " + std::to_string(t) + " components");

  m.tolerances = default_tolerances();
  if (j.contains("tolerances")) {
    for (const auto& [key, val] : j.at("tolerances").items()) {
      if (!m.tolerances.count(key)) fail("tolerances." + key, "unknown tolerance");
      if (!val.is_number() || !(val.get<double>() >= 0.0)) fail("tolerances." + key, "must be a non-negative number");
      m.tolerances[key] = val.get<double>();
    }
  }
  // build once to surface jet and admissibility errors at load time
  build_metric<Complex>(m);
  validate(build_material<Complex>(m));
  return m;
}

Manifest load_manifest(const std::string& path) { return parse_manifest(read_json_file(path)); }

template <class S>
MetricJet<S> build_metric(const Manifest& m) {
  const json& g = m.source.at("metric");
  const int n = m.dimension;
  const SpacePtr sp = make_x_space(n, m.x_order);
  if (!g.is_object()) fail("metric", "expected an object");
  if (g.contains("components")) {
    const json& c = g.at("components");
    std::vector<TaylorJet<S>> upper;
    for (int a = 1; a < n; ++a)
      for (int b = a; b < n; ++b) {
        const std::string key = std::to_string(a) + "," + std::to_string(b);
        if (c.contains(key))
          upper.push_back(coefficient<S>(c.at(key), sp, "metric.components." + key));
        else if (a == b)
          fail("metric.components." + key, "missing diagonal component");
        else
          upper.push_back(TaylorJet<S>(sp));
      }
    return MetricJet<S>::from_components(n, sp, upper);
  }
  const std::string preset = g.value("preset", "");
  if (preset == "euclidean") return MetricJet<S>::euclidean(n, m.x_order);
  if (preset == "warped-product") {
    if (!g.contains("warp")) fail("metric.warp", "missing");
    return MetricJet<S>::warped(n, coefficient<S>(g.at("warp"), sp, "metric.warp"));
  }
  fail("metric.preset", "unknown preset \"" + preset + "\"");
}

template <class S>
MaterialJet<S> build_material(const Manifest& m) {
  const json& j = m.source.at("material");
  const SpacePtr sp = make_x_space(m.dimension, m.x_order);
  auto constant = [&](const char* key, double fallback) {
    return j.contains(key) ? real_scalar<S>(j.at(key), std::string("material.") + key)
                           : ScalarOps<S>::from_double(fallback);
  };
  return {coefficient<S>(j.at("lambda"), sp, "material.lambda"),
          coefficient<S>(j.at("mu"), sp, "material.mu"),
          coefficient<S>(j.at("alpha"), sp, "material.alpha"),
          coefficient<S>(j.at("beta"), sp, "material.beta"),
          constant("rho", 1.0),
          constant("omega", 0.0),
          constant("theta0", 1.0),
          constant("c_heat", 1.0)};
}

template MetricJet<Complex> build_metric(const Manifest&);
template MetricJet<QComplex> build_metric(const Manifest&);
template MaterialJet<Complex> build_material(const Manifest&);
template MaterialJet<QComplex> build_material(const Manifest&);

namespace {

/// Largest Taylor coefficient of a non-constant monomial; with `tangential_only`, of monomials involving x'.
double max_derivative(const TaylorJet<Complex>& f, bool tangential_only) {
  const auto& xs = f.space()->layout->x;
  const int n = f.space()->nx();
  double worst = 0.0;
  for (int p = 1; p < xs.count_upto(f.x_order()); ++p) {
    const auto J = xs.index(p);
    bool tangential = false;
    for (int a = 0; a < n - 1; ++a) tangential |= J[static_cast<std::size_t>(a)] > 0;
    if (tangential_only && !tangential) continue;
    worst = std::max(worst, std::abs(f.taylor(p, 0)));
  }
  return worst;
}

}  // namespace

bool material_normal_only(const MaterialJet<Complex>& m) {
  for (const auto* f : {&m.lambda, &m.mu, &m.alpha, &m.beta})
    if (max_derivative(*f, true) != 0.0) return false;
  return true;
}

bool material_constant(const MaterialJet<Complex>& m) {
  for (const auto* f : {&m.lambda, &m.mu, &m.alpha, &m.beta})
    if (max_derivative(*f, false) != 0.0) return false;
  return true;
}

bool metric_flat(const MetricJet<Complex>& g) {
  const int t = g.n - 1;
  for (int a = 0; a < t; ++a)
    for (int b = 0; b < t; ++b) {
      const auto& f = g(a, b);
      if (std::abs(f.value() - Complex(a == b ? 1.0 : 0.0)) != 0.0) return false;
      if (max_derivative(f, false) != 0.0) return false;
    }
  return true;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "Infinity" : "-Infinity";
  if (v == 0.0) v = 0.0;  // no negative zero in reports
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, val] : j.items()) {  // std::map storage: keys already sorted
        if (!first) out += ",\n";
        first = false;
        out += pad + json(key).dump() + ": ";
        dump(val, out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& v : j) scalars &= v.is_primitive();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "]";
      return;
    }
    case json::value_t::number_float: out += format_double(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump(j, out, 0);
  out += "\n";
  return out;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_json(m(i, k)));
    rows.push_back(row);
  }
  return rows;
}

Eigen::MatrixXcd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) fail("matrix", "expected a list of rows");
  const auto r = static_cast<Eigen::Index>(j.size());
  const auto c = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXcd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != c) fail("matrix", "ragged rows");
    for (Eigen::Index k = 0; k < c; ++k) {
      const json& z = j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
      if (!z.is_array() || z.size() != 2) fail("matrix", "entries are [re, im]");
      m(i, k) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ManifestError, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

}  // namespace thermodtn::cli
