#pragma once

// Strict JSON readers shared by campaign and phase-diagram configs. Every
// error names the JSON path it arose at; unknown keys are rejected.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cskit/errors.hpp"
#include "cskit/model.hpp"
#include "cskit/phase.hpp"
#include "cskit/recovery.hpp"

namespace cskit {

using nlohmann::json;

namespace config_detail {

inline std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

inline std::string index(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline std::string type_name(const json& j) { return j.type_name(); }

inline long long as_integer(const json& j, const std::string& path) {
  if (j.is_number_integer()) return j.get<long long>();
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (d == static_cast<double>(static_cast<long long>(d))) return static_cast<long long>(d);
  }
  throw ParseError(path, "expected an integer, got " + type_name(j));
}

inline int as_int(const json& j, const std::string& path, long long lo, long long hi = 1'000'000'000) {
  const auto v = as_integer(j, path);
  if (v < lo || v > hi)
    throw ParseError(path, "value " + std::to_string(v) + " out of range [" + std::to_string(lo) + ", " +
                               std::to_string(hi) + "]");
  return static_cast<int>(v);
}

inline std::uint64_t as_u64(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  throw ParseError(path, "expected a non-negative integer, got " + type_name(j));
}

inline double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number, got " + type_name(j));
  return j.get<double>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ParseError(path, "expected a boolean, got " + type_name(j));
  return j.get<bool>();
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string, got " + type_name(j));
  return j.get<std::string>();
}

// A scalar or a non-empty list of scalars.
template <class F>
auto as_list(const json& j, const std::string& path, F&& one) {
  using T = decltype(one(j, path));
  std::vector<T> out;
  if (j.is_array()) {
    if (j.empty()) throw ParseError(path, "list must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(one(j[i], index(path, i)));
  } else {
    out.push_back(one(j, path));
  }
  return out;
}

}  // namespace config_detail

// Tracks which keys of a JSON object were consumed.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ParseError(path_, "expected an object, got " + std::string(obj_.type_name()));
  }

  const json* find(std::string_view key) {
    const auto it = obj_.find(std::string(key));
    if (it == obj_.end()) return nullptr;
    seen_.insert(std::string(key));
    return &*it;
  }

  const json& require(std::string_view key) {
    const json* v = find(key);
    if (!v) throw ParseError(path(key), "required key is missing");
    return *v;
  }

  std::string path(std::string_view key) const { return config_detail::join(path_, key); }

  void finish() const {
    for (const auto& [key, value] : obj_.items())
      if (!seen_.contains(key)) throw ParseError(path(key), "unknown key");
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

inline MatrixKind parse_matrix_kind_at(const json& j, const std::string& path) {
  const auto name = config_detail::as_string(j, path);
  const auto kind = parse_matrix_kind(name);
  if (!kind || *kind == MatrixKind::Custom) throw ParseError(path, "unknown matrix kind '" + name + "'");
  return *kind;
}

inline Amplitude parse_amplitude_at(const json& j, const std::string& path) {
  const auto name = config_detail::as_string(j, path);
  const auto a = parse_amplitude(name);
  if (!a) throw ParseError(path, "unknown amplitude '" + name + "'");
  return *a;
}

// "omp" or {"name": "iht", "step": "fixed", ...}. Omitted fields take the
// solver's defaults.
inline RecoverySpec parse_solver_spec(const json& j, const std::string& path) {
  using namespace config_detail;
  if (j.is_string()) {
    const auto s = parse_solver(j.get<std::string>());
    if (!s) throw ParseError(path, "unknown solver '" + j.get<std::string>() + "'");
    return RecoverySpec::defaults(*s);
  }
  ObjectReader r(j, path);
  const auto name = as_string(r.require("name"), r.path("name"));
  const auto solver = parse_solver(name);
  if (!solver) throw ParseError(r.path("name"), "unknown solver '" + name + "'");
  RecoverySpec spec = RecoverySpec::defaults(*solver);
  if (const auto* v = r.find("residual_tol")) {
    spec.residual_tol = as_double(*v, r.path("residual_tol"));
    if (!(spec.residual_tol >= 0.0)) throw ParseError(r.path("residual_tol"), "must be >= 0");
  }
  if (const auto* v = r.find("max_iterations")) spec.max_iterations = as_int(*v, r.path("max_iterations"), 1);
  if (const auto* v = r.find("step")) {
    const auto step = as_string(*v, r.path("step"));
    if (step == "fixed")
      spec.iht_step = IhtStep::Fixed;
    else if (step == "normalized")
      spec.iht_step = IhtStep::Normalized;
    else
      throw ParseError(r.path("step"), "expected 'fixed' or 'normalized'");
  }
  auto positive = [&](const char* key, double& field) {
    if (const auto* v = r.find(key)) {
      field = as_double(*v, r.path(key));
      if (!(field > 0.0)) throw ParseError(r.path(key), "must be > 0");
    }
  };
  positive("feasibility_tol", spec.feasibility_tol);
  positive("optimality_tol", spec.optimality_tol);
  positive("penalty", spec.penalty);
  if (const auto* v = r.find("oracle_budget")) spec.oracle_budget = as_u64(*v, r.path("oracle_budget"));
  r.finish();
  return spec;
}

inline json solver_spec_to_json(const RecoverySpec& s) {
  return {{"name", std::string(to_string(s.solver))},
          {"residual_tol", s.residual_tol},
          {"max_iterations", s.max_iterations},
          {"step", s.iht_step == IhtStep::Fixed ? "fixed" : "normalized"},
          {"feasibility_tol", s.feasibility_tol},
          {"optimality_tol", s.optimality_tol},
          {"penalty", s.penalty},
          {"oracle_budget", s.oracle_budget}};
}

// "none" or {"kind": "awgn", "sigma": 0.01}.
inline NoiseModel parse_noise(const json& j, const std::string& path) {
  using namespace config_detail;
  if (j.is_string()) {
    if (j.get<std::string>() == "none") return NoiseModel::none();
    throw ParseError(path, "expected 'none' or a noise object");
  }
  ObjectReader r(j, path);
  const auto kind = as_string(r.require("kind"), r.path("kind"));
  NoiseModel noise = NoiseModel::none();
  if (kind == "awgn") {
    const double sigma = as_double(r.require("sigma"), r.path("sigma"));
    if (!(sigma >= 0.0)) throw ParseError(r.path("sigma"), "must be >= 0");
    noise = NoiseModel::awgn(sigma);
  } else if (kind == "none") {
    if (const auto* v = r.find("sigma"); v && as_double(*v, r.path("sigma")) != 0.0)
      throw ParseError(r.path("sigma"), "must be 0 when kind is none");
  } else {
    throw ParseError(r.path("kind"), "expected 'none' or 'awgn'");
  }
  r.finish();
  return noise;
}

inline json noise_to_json(const NoiseModel& n) {
  return {{"kind", n.kind() == NoiseKind::None ? "none" : "awgn"}, {"sigma", n.sigma()}};
}

inline json parse_json_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("malformed JSON: ") + e.what());
  }
}

// Phase-diagram config. Grids are given either as explicit lists
// ("delta_grid", "rho_grid") or as a point count ("grid_points") spread
// uniformly over [0.05, 1].
inline PhaseConfig parse_phase_config(const std::string& text) {
  using namespace config_detail;
  const json doc = parse_json_document(text);
  ObjectReader r(doc, "");
  PhaseConfig cfg;
  if (const auto* v = r.find("n")) cfg.n = as_int(*v, "n", 1);
  if (const auto* v = r.find("grid_points")) {
    const int p = as_int(*v, "grid_points", 1, 1000);
    cfg.delta_grid = uniform_grid(0.05, 1.0, p);
    cfg.rho_grid = uniform_grid(0.05, 1.0, p);
  }
  auto grid = [&](const char* key, std::vector<double>& out) {
    if (const auto* v = r.find(key)) {
      out = as_list(*v, key, as_double);
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!(out[i] > 0.0 && out[i] <= 1.0)) throw ParseError(index(key, i), "must lie in (0, 1]");
        if (i && !(out[i] > out[i - 1])) throw ParseError(index(key, i), "grid must be strictly increasing");
      }
    }
  };
  grid("delta_grid", cfg.delta_grid);
  grid("rho_grid", cfg.rho_grid);
  if (const auto* v = r.find("trials_per_cell")) cfg.trials_per_cell = as_int(*v, "trials_per_cell", 1);
  if (const auto* v = r.find("matrix")) cfg.matrix_kind = parse_matrix_kind_at(*v, "matrix");
  if (const auto* v = r.find("normalize")) cfg.normalize = as_bool(*v, "normalize");
  if (const auto* v = r.find("amplitude")) cfg.amplitude = parse_amplitude_at(*v, "amplitude");
  if (const auto* v = r.find("solver")) cfg.solver = parse_solver_spec(*v, "solver");
  if (const auto* v = r.find("noise")) cfg.noise = parse_noise(*v, "noise");
  if (const auto* v = r.find("success_threshold")) {
    cfg.success_threshold = as_double(*v, "success_threshold");
    if (!(cfg.success_threshold > 0.0 && cfg.success_threshold <= 1.0))
      throw ParseError("success_threshold", "must lie in (0, 1]");
  }
  if (const auto* v = r.find("seed")) cfg.seed = as_u64(*v, "seed");
  if (const auto* v = r.find("budget")) cfg.budget = as_u64(*v, "budget");
  if (const auto* v = r.find("threads")) cfg.threads = as_int(*v, "threads", 1, 1024);
  r.finish();
  if (cfg.matrix_kind == MatrixKind::Identity)
    throw ParseError("matrix", "identity is not a compressive ensemble");
  return cfg;
}

}  // namespace cskit
