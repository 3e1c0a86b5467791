/// @file io.hpp
/// JSON artifacts (meshes, fields), TOML run configs, atomic file writes.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sectorsym/fem.hpp"

namespace sectorsym {

/// Writes via a temporary file in the same directory and renames it into place.
/// Throws Error(io).
void write_atomic(const std::string& path, const std::string& content);
/// Throws Error(io).
std::string read_file(const std::string& path);

std::string mesh_to_json(const Mesh& mesh);
/// Throws Error(parse).
Mesh mesh_from_json(const std::string& text);

/// The field with its mesh embedded, so a single file is self-contained.
std::string field_to_json(const ScalarField& u, const std::optional<SolveReport>& report = std::nullopt,
                          const std::optional<NonlinearitySpec>& fspec = std::nullopt);
ScalarField field_from_json(const std::string& text);
/// The nonlinearity recorded with a field, if any.
std::optional<NonlinearitySpec> field_fspec_from_json(const std::string& text);

struct RunConfig {
    std::string command = "sweep";
    /// (alpha, beta) grid: every pair with beta < alpha is run.
    std::vector<double> alphas;
    std::vector<double> betas;
    /// lambda values as fractions of lambda_max
    std::vector<double> lambda_factors = {0.1, 0.25, 0.5, 0.75, 0.9};
    /// explicit angles; empty means the admissible-set policy
    std::vector<double> thetas;
    double h = 0.05;
    bool symmetric = false;
    double grading = 4.0;
    NonlinearitySpec f = NonlinearitySpec::constant(1.0);
    std::optional<double> tol;
    double c0 = 25.0;
    int fill = 3;
    std::uint64_t seed = 1;
    std::string out;

    bool operator==(const RunConfig&) const = default;
};

std::string config_to_toml(const RunConfig& c);
/// Throws Error(parse) on malformed input or angles given in degrees.
RunConfig config_from_toml(const std::string& text);

}  // namespace sectorsym
