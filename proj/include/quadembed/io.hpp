#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "quadembed/integrator.hpp"
#include "quadembed/lattice_fourier.hpp"
#include "quadembed/polynomial.hpp"
#include "quadembed/quadratic_tensor.hpp"
#include "quadembed/sphere_harmonics.hpp"

namespace quadembed {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";

Json read_json(const std::filesystem::path& path);
// Writes with a two-space indent and a trailing newline.
void write_json(const std::filesystem::path& path, const Json& doc);

// {"n", "cutoff", "terms": [{"k", "a", "b"}]}; records are completed to
// the full antipodal map on load.
Json torus_field_to_json(const TorusField& field);
TorusField torus_field_from_json(const Json& doc);

// {"variables", "terms": [{"e": [...], "c": value}]}
Json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& doc);

// {"n", "components": [polynomial, ...]}
Json poly_field_to_json(const PolyField& field);
PolyField poly_field_from_json(const Json& doc);

// {"n", "max_degree", "hash", "degrees", "elements"}; the hash is checked on load.
Json basis_to_json(const HarmonicBasis& basis);
HarmonicBasis basis_from_json(const Json& doc);

// {"n", "max_degree", "basis_hash", "coefficients": [[c(mu, alpha)]]}
Json sphere_field_to_json(const SphereField& field);

// {"dimension", "certified", "entries": [[i, j, k, value], ...]}
Json tensor_to_json(const QuadraticTensor& tensor);
QuadraticTensor tensor_from_json(const Json& doc);

Json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const Json& doc);

// Header t,y_1,...,y_d and one row per stored step.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory);
void write_rows_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);
// Round-trip formatting shared by CSV and JSON output.
std::string format_number(double v);

struct Provenance {
  std::string command;
  std::uint64_t seed = 0;
  double rtol = 0.0;
  double atol = 0.0;
};

Json provenance_json(const Provenance& p);

}  // namespace quadembed
