#include "quadembed/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "quadembed/error.hpp"

namespace quadembed {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const Json& field_of(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) parse_fail(std::string("missing key '") + key + "'");
  return doc.at(key);
}

template <class T>
T get_as(const Json& doc, const char* key) {
  try {
    return field_of(doc, key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    parse_fail(std::string("bad value for '") + key + "': " + e.what());
  }
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) parse_fail("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    parse_fail(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

Json vector_to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const Json& doc) {
  if (!doc.is_array()) parse_fail("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(doc.size()));
  for (size_t i = 0; i < doc.size(); ++i) {
    if (!doc[i].is_number()) parse_fail("expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = doc[i].get<double>();
  }
  return v;
}

Json torus_field_to_json(const TorusField& field) {
  Json terms = Json::array();
  for (const auto& t : field.terms()) {
    Json rec;
    rec["k"] = t.k.entries();
    rec["a"] = vector_to_json(t.a);
    rec["b"] = vector_to_json(t.b);
    terms.push_back(std::move(rec));
  }
  Json doc;
  doc["type"] = "torus_field";
  doc["n"] = field.dimension();
  doc["cutoff"] = field.cutoff();
  doc["terms"] = std::move(terms);
  return doc;
}

TorusField torus_field_from_json(const Json& doc) {
  const int n = get_as<int>(doc, "n");
  const double cutoff = get_as<double>(doc, "cutoff");
  if (n < 1) parse_fail("torus dimension must be positive");
  std::vector<FourierTerm> terms;
  const Json& arr = field_of(doc, "terms");
  if (!arr.is_array()) parse_fail("'terms' must be an array");
  for (const auto& rec : arr) {
    FourierTerm t;
    t.k = FrequencyVector(get_as<std::vector<int>>(rec, "k"));
    t.a = vector_from_json(field_of(rec, "a"));
    t.b = vector_from_json(field_of(rec, "b"));
    if (t.k.dimension() != n || t.a.size() != n || t.b.size() != n) parse_fail("term has wrong dimension");
    terms.push_back(std::move(t));
  }
  return TorusField::from_terms(n, cutoff, terms);
}

Json polynomial_to_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back(Json{{"e", e}, {"c", c}});
  return Json{{"variables", p.variables()}, {"terms", std::move(terms)}};
}

Polynomial polynomial_from_json(const Json& doc) {
  const int vars = get_as<int>(doc, "variables");
  if (vars < 1) parse_fail("polynomial needs at least one variable");
  Polynomial p(vars);
  const Json& arr = field_of(doc, "terms");
  if (!arr.is_array()) parse_fail("'terms' must be an array");
  for (const auto& t : arr) {
    const auto e = get_as<Exponent>(t, "e");
    if (static_cast<int>(e.size()) != vars) parse_fail("exponent has wrong length");
    for (int v : e)
      if (v < 0) parse_fail("negative exponent");
    p.add_term(e, get_as<double>(t, "c"));
  }
  return p;
}

Json poly_field_to_json(const PolyField& field) {
  Json comps = Json::array();
  for (const auto& p : field) comps.push_back(polynomial_to_json(p));
  Json doc;
  doc["type"] = "sphere_field";
  doc["n"] = static_cast<int>(field.size()) - 1;
  doc["components"] = std::move(comps);
  return doc;
}

PolyField poly_field_from_json(const Json& doc) {
  const int n = get_as<int>(doc, "n");
  const Json& arr = field_of(doc, "components");
  if (!arr.is_array() || static_cast<int>(arr.size()) != n + 1) parse_fail("need n + 1 components");
  PolyField out;
  for (const auto& c : arr) {
    out.push_back(polynomial_from_json(c));
    if (out.back().variables() != n + 1) parse_fail("component has wrong variable count");
  }
  return out;
}

Json basis_to_json(const HarmonicBasis& basis) {
  Json elements = Json::array();
  for (const auto& y : basis.elements()) elements.push_back(polynomial_to_json(y));
  Json doc;
  doc["type"] = "harmonic_basis";
  doc["n"] = basis.n();
  doc["max_degree"] = basis.max_degree();
  doc["hash"] = hex64(basis.content_hash());
  doc["degrees"] = basis.degrees();
  doc["elements"] = std::move(elements);
  return doc;
}

HarmonicBasis basis_from_json(const Json& doc) {
  std::vector<Polynomial> elements;
  for (const auto& e : field_of(doc, "elements")) elements.push_back(polynomial_from_json(e));
  HarmonicBasis basis(get_as<int>(doc, "n"), get_as<int>(doc, "max_degree"), std::move(elements),
                      get_as<std::vector<int>>(doc, "degrees"));
  if (hex64(basis.content_hash()) != get_as<std::string>(doc, "hash")) parse_fail("basis content hash mismatch");
  return basis;
}

Json sphere_field_to_json(const SphereField& field) {
  Json rows = Json::array();
  for (Eigen::Index mu = 0; mu < field.coefficients().rows(); ++mu)
    rows.push_back(vector_to_json(field.coefficients().row(mu).transpose()));
  Json doc;
  doc["type"] = "sphere_coefficients";
  doc["n"] = field.basis().n();
  doc["max_degree"] = field.basis().max_degree();
  doc["basis_hash"] = hex64(field.basis().content_hash());
  doc["coefficients"] = std::move(rows);
  return doc;
}

Json tensor_to_json(const QuadraticTensor& tensor) {
  Json entries = Json::array();
  for (const auto& e : tensor.entries()) entries.push_back(Json::array({e.i, e.j, e.k, e.value}));
  Json doc;
  doc["type"] = "quadratic_tensor";
  doc["dimension"] = tensor.dimension();
  doc["certified"] = tensor.certified();
  doc["entries"] = std::move(entries);
  return doc;
}

QuadraticTensor tensor_from_json(const Json& doc) {
  const int d = get_as<int>(doc, "dimension");
  if (d < 0) parse_fail("negative tensor dimension");
  std::vector<TensorEntry> entries;
  const Json& arr = field_of(doc, "entries");
  if (!arr.is_array()) parse_fail("'entries' must be an array");
  for (const auto& e : arr) {
    if (!e.is_array() || e.size() != 4) parse_fail("tensor entry must be [i, j, k, value]");
    TensorEntry t{e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<double>()};
    if (t.i < 0 || t.j < 0 || t.k < 0 || t.i >= d || t.j >= d || t.k >= d) parse_fail("tensor index out of range");
    entries.push_back(t);
  }
  return QuadraticTensor(d, std::move(entries));
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_rows_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : rows) {
    for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
    out << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory) {
  std::vector<std::string> header{"t"};
  for (int i = 1; i <= trajectory.dimension(); ++i) header.push_back("y_" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  rows.reserve(trajectory.size());
  for (size_t s = 0; s < trajectory.size(); ++s) {
    std::vector<double> r{trajectory.times()[s]};
    const auto& y = trajectory.state(s);
    r.insert(r.end(), y.data(), y.data() + y.size());
    rows.push_back(std::move(r));
  }
  write_rows_csv(path, header, rows);
}

Json provenance_json(const Provenance& p) {
  Json doc;
  doc["tool"] = "quadembed";
  doc["version"] = kToolVersion;
  doc["command"] = p.command;
  doc["seed"] = p.seed;
  doc["rtol"] = p.rtol;
  doc["atol"] = p.atol;
  return doc;
}

}  // namespace quadembed
