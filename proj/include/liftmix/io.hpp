#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "liftmix/graph.hpp"
#include "liftmix/lift.hpp"
#include "liftmix/markov.hpp"
#include "liftmix/scenario.hpp"

namespace liftmix::io {

using json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.3.0";

inline Error parse_error(const std::string& what) { return Error(ErrorCode::ParseError, what); }

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw parse_error(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write " + path);
  out << text;
}

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw parse_error(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw parse_error(std::string("field '") + key + "': " + e.what());
  }
}

inline const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw parse_error(std::string("missing field '") + key + "'");
  return j.at(key);
}

// -- graph --------------------------------------------------------------------------

/// Undirected graphs are written as one edge per unordered pair.
inline json to_json(const Graph& g) {
  json edges = json::array();
  for (auto [i, j] : g.arcs())
    if (!g.undirected_input() || i < j) edges.push_back({i, j});
  return {{"n", g.size()}, {"edges", edges}, {"directed", !g.undirected_input()}};
}

inline Graph graph_from_json(const json& j) {
  const auto n = field<std::size_t>(j, "n");
  const auto raw = field<std::vector<std::vector<std::size_t>>>(j, "edges");
  const bool directed = j.contains("directed") ? field<bool>(j, "directed") : false;
  std::vector<Arc> edges;
  for (const auto& e : raw) {
    if (e.size() != 2) throw parse_error("edge must have two endpoints");
    edges.emplace_back(e[0], e[1]);
  }
  return Graph(n, edges, directed);
}

// -- vectors and matrices ------------------------------------------------------------

inline json to_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

inline json to_json(const Distribution& d) { return {{"weights", d.to_std()}}; }

inline Distribution distribution_from_json(const json& j) {
  const auto w = field<std::vector<double>>(j, "weights");
  return Distribution(Eigen::Map<const Vector>(w.data(), static_cast<Eigen::Index>(w.size())));
}

/// {"n": rows, "rows": [[...], ...]}; non-square matrices also carry "m" (columns).
inline json matrix_to_json(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(M.cols()));
    for (Eigen::Index c = 0; c < M.cols(); ++c) row[static_cast<std::size_t>(c)] = M(r, c);
    rows.push_back(row);
  }
  json out = {{"n", M.rows()}};
  if (M.rows() != M.cols()) out["m"] = M.cols();
  out["rows"] = rows;
  return out;
}

inline Matrix matrix_from_json(const json& j) {
  const auto n = field<std::size_t>(j, "n");
  const std::size_t m = j.contains("m") ? field<std::size_t>(j, "m") : n;
  const auto rows = field<std::vector<std::vector<double>>>(j, "rows");
  if (rows.size() != n) throw parse_error("matrix has " + std::to_string(rows.size()) + " rows, expected " + std::to_string(n));
  Matrix M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t r = 0; r < n; ++r) {
    if (rows[r].size() != m) throw parse_error("matrix row " + std::to_string(r) + " has the wrong width");
    for (std::size_t c = 0; c < m; ++c) M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  return M;
}

inline json to_json(const StochasticMatrix& P) { return matrix_to_json(P.mat()); }

inline json to_json(const TimeVaryingChain& chain) {
  json steps = json::array();
  for (const auto& s : chain.steps()) steps.push_back(to_json(s));
  return {{"T", chain.length()}, {"steps", steps}};
}

// -- lifts ---------------------------------------------------------------------------

inline json to_json(const Lift& L) {
  json meta = {{"construction", L.metadata().construction}};
  for (const auto& [k, v] : L.metadata().params) meta[k] = v;
  return {{"base", to_json(L.base())},
          {"lifted", to_json(L.lifted())},
          {"projection", L.map().projection()},
          {"A", to_json(L.A())},
          {"F", L.F() ? matrix_to_json(L.F()->mat()) : json(nullptr)},
          {"metadata", meta}};
}

inline Lift lift_from_json(const json& j) {
  Graph base = graph_from_json(member(j, "base"));
  Graph lifted = graph_from_json(member(j, "lifted"));
  auto proj = field<std::vector<std::size_t>>(j, "projection");
  Matrix A = matrix_from_json(member(j, "A"));
  std::optional<Matrix> F;
  if (j.contains("F") && !j.at("F").is_null()) F = matrix_from_json(j.at("F"));
  LiftMetadata meta;
  if (j.contains("metadata") && j.at("metadata").is_object()) {
    for (const auto& [k, v] : j.at("metadata").items()) {
      if (k == "construction" && v.is_string()) {
        meta.construction = v.get<std::string>();
      } else if (v.is_number()) {
        meta.params[k] = v.get<double>();
      }
    }
  }
  const std::size_t base_n = base.size();
  return Lift(std::move(base), LiftMap(base_n, std::move(proj)), std::move(A), std::move(F), std::move(meta),
              std::move(lifted));
}

// -- reports -------------------------------------------------------------------------

inline json mix_json(const MixTime& t) { return t ? json(*t) : json("Unmixed"); }

/// Infinite bounds (zero conductance) print as "inf".
inline json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json to_json(const ScenarioReport& r) {
  json bounds = json::array();
  for (const auto& b : r.bounds)
    bounds.push_back({{"name", b.name},
                      {"kind", to_string(b.kind)},
                      {"bound", number_json(b.bound)},
                      {"measured", number_json(b.measured)},
                      {"consistent", b.consistent}});
  json out = {{"version", kVersion},
              {"scenario", r.scenario},
              {"eps", r.eps},
              {"diameter", r.diameter},
              {"tau_marginal", mix_json(r.tau_marginal)},
              {"tau_full", mix_json(r.tau_full)},
              {"invariant", r.invariance.ok},
              {"invariance_deviation", r.invariance.max_deviation},
              {"irreducible", r.irreducible}};
  if (r.flow) out["flow_match"] = {{"max_dev", r.flow->max_dev}, {"ok", r.flow->ok}};
  if (r.phi_graph_value) out["phi_graph"] = *r.phi_graph_value;
  if (r.phi_reference) out["phi_reference"] = *r.phi_reference;
  out["compliant"] = r.compliant;
  out["bounds"] = bounds;
  out["consistent"] = r.consistent();
  out["notes"] = r.notes;
  out["tolerances"] = {{"invariance", kInvarianceTol},
                       {"stationary", kLiftStationaryTol},
                       {"exact_flow", ScenarioSpec::kExactFlowTol}};
  return out;
}

}  // namespace liftmix::io
