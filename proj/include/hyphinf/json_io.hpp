#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "hyphinf/pde.hpp"
#include "hyphinf/state_space.hpp"

namespace hyphinf::io {

using nlohmann::json;

/// Row-major nested arrays.
json matrix_to_json(const Matrix& a);

/// Throws kInput unless j is a rows×cols nested array of numbers. An empty
/// array stands for any matrix with zero rows.
Matrix matrix_from_json(const json& j, Index rows, Index cols,
                        const std::string& name);

/// A plant as stored on disk. The optional reaction matrix is constant in ζ.
struct PlantFile {
  pde::HyperbolicPlant plant;
  std::optional<Matrix> reaction;
};

PlantFile plant_from_json(const json& j);
json plant_to_json(const PlantFile& f);

/// Keys states, inputs, outputs, A, B, C, D. The count keys may be omitted
/// when the matrices fix them.
StateSpace state_space_from_json(const json& j, const std::string& name);
json state_space_to_json(const StateSpace& s);

json two_port_to_json(const TwoPortStateSpace& g);

json read_json_file(const std::filesystem::path& path);
/// Two-space indentation and a trailing newline.
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace hyphinf::io
