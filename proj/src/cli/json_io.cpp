#include "hyphinf/json_io.hpp"

#include <fstream>
#include <sstream>

namespace hyphinf::io {
namespace {

Index count(const json& j, const char* key) {
  if (!j.contains(key)) {
    fail(ErrorCode::kInput, std::string("missing key '") + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    fail(ErrorCode::kInput,
         std::string("'") + key + "' must be a nonnegative integer");
  }
  return static_cast<Index>(v.get<long long>());
}

const json& member(const json& j, const char* key) {
  if (!j.contains(key)) {
    fail(ErrorCode::kInput, std::string("missing key '") + key + "'");
  }
  return j.at(key);
}

std::vector<double> numbers(const json& j, const std::string& name) {
  if (!j.is_array()) fail(ErrorCode::kInput, name + " must be an array");
  std::vector<double> out;
  for (const json& v : j) {
    if (!v.is_number()) fail(ErrorCode::kInput, name + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

pde::SpeedProfile speed_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kInput, "lambda0 must be an object");
  const json& kind = member(j, "kind");
  if (!kind.is_string()) fail(ErrorCode::kInput, "lambda0.kind must be a string");
  const std::string k = kind.get<std::string>();
  try {
    if (k == "constant") {
      const json& v = member(j, "value");
      if (!v.is_number()) fail(ErrorCode::kInput, "lambda0.value must be a number");
      return pde::SpeedProfile::constant(v.get<double>());
    }
    if (k == "piecewise") {
      return pde::SpeedProfile::piecewise(
          numbers(member(j, "breakpoints"), "lambda0.breakpoints"),
          numbers(member(j, "values"), "lambda0.values"));
    }
    if (k == "sampled") {
      return pde::SpeedProfile::sampled(
          numbers(member(j, "grid"), "lambda0.grid"),
          numbers(member(j, "values"), "lambda0.values"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInput) throw;
    fail(ErrorCode::kInput, std::string("lambda0: ") + e.what());
  }
  fail(ErrorCode::kInput, "unknown lambda0.kind '" + k + "'");
}

json speed_to_json(const pde::SpeedProfile& s) {
  switch (s.kind()) {
    case pde::SpeedProfile::Kind::kConstant:
      return {{"kind", "constant"}, {"value", s.values().front()}};
    case pde::SpeedProfile::Kind::kPiecewise:
      return {{"kind", "piecewise"},
              {"breakpoints", s.nodes()},
              {"values", s.values()}};
    case pde::SpeedProfile::Kind::kSampled:
      return {{"kind", "sampled"}, {"grid", s.nodes()}, {"values", s.values()}};
  }
  return {};
}

}  // namespace

json matrix_to_json(const Matrix& a) {
  json rows = json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Index rows, Index cols,
                        const std::string& name) {
  const std::string expect =
      " (expected " + std::to_string(rows) + "x" + std::to_string(cols) + ")";
  if (!j.is_array()) fail(ErrorCode::kInput, name + " must be an array" + expect);
  Matrix a(rows, cols);
  if (j.empty() && (rows == 0 || cols == 0)) return a;
  if (static_cast<Index>(j.size()) != rows) {
    fail(ErrorCode::kInput, name + " has " + std::to_string(j.size()) +
                                " rows" + expect);
  }
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      fail(ErrorCode::kInput, name + " row " + std::to_string(i) +
                                  " has the wrong length" + expect);
    }
    for (Index c = 0; c < cols; ++c) {
      const json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) fail(ErrorCode::kInput, name + " holds a non-number");
      a(i, c) = v.get<double>();
    }
  }
  return a;
}

PlantFile plant_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorCode::kInput, "plant must be a JSON object");
  PlantFile f;
  pde::HyperbolicPlant& p = f.plant;
  p.n = count(j, "n");
  p.k = count(j, "k");
  p.p = count(j, "p");
  p.l = count(j, "l");
  p.m = count(j, "m");
  p.lambda0 = speed_from_json(member(j, "lambda0"));
  p.E = matrix_from_json(member(j, "E"), p.n, p.k, "E");
  p.K = matrix_from_json(member(j, "K"), p.n, p.n, "K");
  p.L = matrix_from_json(member(j, "L"), p.n, p.n, "L");
  p.Ky = matrix_from_json(member(j, "Ky"), p.m, p.n, "Ky");
  p.Ly = matrix_from_json(member(j, "Ly"), p.m, p.n, "Ly");
  p.Kz = matrix_from_json(member(j, "Kz"), p.l, p.n, "Kz");
  p.Lz = matrix_from_json(member(j, "Lz"), p.l, p.n, "Lz");
  if (j.contains("M") && !j.at("M").is_null()) {
    const Matrix m = matrix_from_json(j.at("M"), p.n, p.n, "M");
    f.reaction = m;
    p.reaction = [m](double) { return m; };
  }
  try {
    p.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kInput, e.what());
  }
  return f;
}

json plant_to_json(const PlantFile& f) {
  const pde::HyperbolicPlant& p = f.plant;
  json j = {{"n", p.n},
            {"k", p.k},
            {"p", p.p},
            {"l", p.l},
            {"m", p.m},
            {"lambda0", speed_to_json(p.lambda0)},
            {"E", matrix_to_json(p.E)},
            {"K", matrix_to_json(p.K)},
            {"L", matrix_to_json(p.L)},
            {"Ky", matrix_to_json(p.Ky)},
            {"Ly", matrix_to_json(p.Ly)},
            {"Kz", matrix_to_json(p.Kz)},
            {"Lz", matrix_to_json(p.Lz)}};
  if (f.reaction) j["M"] = matrix_to_json(*f.reaction);
  return j;
}

StateSpace state_space_from_json(const json& j, const std::string& name) {
  if (!j.is_object()) fail(ErrorCode::kInput, name + " must be a JSON object");
  const auto dim = [&](const char* key, const char* mat, bool rows) -> Index {
    if (j.contains(key)) return count(j, key);
    const json& a = member(j, mat);
    if (!a.is_array()) fail(ErrorCode::kInput, name + "." + mat + " must be an array");
    if (rows) return static_cast<Index>(a.size());
    if (a.empty() || !a.front().is_array()) return 0;
    return static_cast<Index>(a.front().size());
  };
  const Index n = dim("states", "A", true);
  const Index in = dim("inputs", "D", false);
  const Index out = dim("outputs", "D", true);
  StateSpace s;
  s.A = matrix_from_json(member(j, "A"), n, n, name + ".A");
  s.B = matrix_from_json(member(j, "B"), n, in, name + ".B");
  s.C = matrix_from_json(member(j, "C"), out, n, name + ".C");
  s.D = matrix_from_json(member(j, "D"), out, in, name + ".D");
  return s;
}

json state_space_to_json(const StateSpace& s) {
  return {{"states", s.states()},
          {"inputs", s.inputs()},
          {"outputs", s.outputs()},
          {"A", matrix_to_json(s.A)},
          {"B", matrix_to_json(s.B)},
          {"C", matrix_to_json(s.C)},
          {"D", matrix_to_json(s.D)}};
}

json two_port_to_json(const TwoPortStateSpace& g) {
  return {{"A", matrix_to_json(g.A)},     {"B1", matrix_to_json(g.B1)},
          {"B2", matrix_to_json(g.B2)},   {"C1", matrix_to_json(g.C1)},
          {"C2", matrix_to_json(g.C2)},   {"D11", matrix_to_json(g.D11)},
          {"D12", matrix_to_json(g.D12)}, {"D21", matrix_to_json(g.D21)},
          {"D22", matrix_to_json(g.D22)}};
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kInput, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kInput, path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kInput, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace hyphinf::io
