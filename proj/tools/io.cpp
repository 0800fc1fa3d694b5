#include "io.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ddpc::cli {

using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Parses JSON and rewrites parse failures as "path:line: message".
json parse_document(const std::string& path, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    const std::size_t stop = std::min(e.byte, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') ++line;
    }
    throw std::invalid_argument(path + ":" + std::to_string(line) + ": " + e.what());
  }
}

const json& require(const json& j, const std::string& key, const std::string& ctx) {
  auto it = j.find(key);
  if (it == j.end()) throw std::invalid_argument(ctx + ": missing '" + key + "'");
  return *it;
}

Matrix to_matrix(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty() || !j.front().is_array()) {
    throw std::invalid_argument(ctx + ": expected a nested (row-major) array");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.front().size());
  Matrix M(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw std::invalid_argument(ctx + ": ragged rows in matrix");
    }
    for (Index k = 0; k < cols; ++k) {
      if (!row[static_cast<std::size_t>(k)].is_number()) {
        throw std::invalid_argument(ctx + ": non-numeric matrix entry");
      }
      M(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return M;
}

Vector to_vector(const json& j, const std::string& ctx) {
  if (!j.is_array()) throw std::invalid_argument(ctx + ": expected an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) {
    const json& e = j[static_cast<std::size_t>(i)];
    if (!e.is_number()) throw std::invalid_argument(ctx + ": non-numeric entry");
    v(i) = e.get<double>();
  }
  return v;
}

// Signal blocks accept either a flat array (single channel) or one row per
// time step; either way the result is the stacked vector.
Vector to_signal(const json& j, Index channels, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument(ctx + ": expected an array");
  if (j.front().is_array()) {
    const Matrix M = to_matrix(j, ctx);
    if (M.cols() != channels) {
      throw std::invalid_argument(ctx + ": expected " + std::to_string(channels) +
                                  " columns per time step");
    }
    Vector v(M.size());
    for (Index k = 0; k < M.rows(); ++k) v.segment(k * channels, channels) = M.row(k);
    return v;
  }
  if (channels != 1) {
    throw std::invalid_argument(ctx + ": flat arrays are only valid for one channel");
  }
  return to_vector(j, ctx);
}

json from_matrix(const Matrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

json from_vector(const Vector& v) {
  json arr = json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

} // namespace

ProblemFile load_problem(const std::string& path) {
  const json doc = parse_document(path, read_file(path));
  ProblemFile pf;

  if (doc.contains("system")) {
    const json& s = doc["system"];
    SystemModel model;
    model.A = to_matrix(require(s, "A", path + ": system"), path + ": system.A");
    model.B = to_matrix(require(s, "B", path + ": system"), path + ": system.B");
    model.C = to_matrix(require(s, "C", path + ": system"), path + ": system.C");
    model.D = to_matrix(require(s, "D", path + ": system"), path + ": system.D");
    pf.system = std::move(model);
  }

  const json& h = require(doc, "horizons", path);
  pf.horizons.N_p = require(h, "N_p", path + ": horizons").get<Index>();
  pf.horizons.N_f = require(h, "N_f", path + ": horizons").get<Index>();
  pf.horizons.n = require(h, "n", path + ": horizons").get<Index>();

  const json& w = require(doc, "weights", path);
  pf.weights.Q = to_matrix(require(w, "Q", path + ": weights"), path + ": weights.Q");
  pf.weights.R = to_matrix(require(w, "R", path + ": weights"), path + ": weights.R");

  const json& c = require(doc, "constraints", path);
  pf.constraints.M_u = to_matrix(require(c, "M_u", path + ": constraints"), path + ": M_u");
  pf.constraints.v_u = to_vector(require(c, "v_u", path + ": constraints"), path + ": v_u");
  pf.constraints.M_y = to_matrix(require(c, "M_y", path + ": constraints"), path + ": M_y");
  pf.constraints.v_y = to_vector(require(c, "v_y", path + ": constraints"), path + ": v_y");

  const Index m = pf.constraints.M_u.cols();
  const Index p = pf.constraints.M_y.cols();

  if (doc.contains("data")) {
    const json& d = doc["data"];
    DataRecord rec;
    rec.m = m;
    rec.p = p;
    rec.u_d = to_signal(require(d, "u", path + ": data"), m, path + ": data.u");
    rec.y_d = to_signal(require(d, "y", path + ": data"), p, path + ": data.y");
    if (rec.u_d.size() % m != 0) throw std::invalid_argument(path + ": data.u length vs m");
    rec.N_d = rec.u_d.size() / m;
    pf.data = std::move(rec);
  }
  if (doc.contains("generation")) {
    const json& g = doc["generation"];
    ProblemFile::Generation gen;
    gen.N_d = require(g, "N_d", path + ": generation").get<Index>();
    gen.seed = g.value("seed", std::uint64_t{0});
    gen.amplitude = g.value("amplitude", 1.0);
    pf.generation = gen;
  }

  if (doc.contains("options")) {
    const json& o = doc["options"];
    pf.tol_rank = o.value("tol_rank", -1.0);
    pf.tol_opt = o.value("tol_opt", 1e-9);
    if (o.contains("domain")) pf.domain_bounds = to_vector(o["domain"], path + ": options.domain");
    if (o.contains("phi")) pf.phi = o["phi"].get<double>();
    if (o.contains("vp_file")) pf.vp_file = o["vp_file"].get<std::string>();
  }

  if (!pf.system && !pf.data && !pf.generation) {
    throw std::invalid_argument(path + ": need a 'system' block or a 'data'/'generation' block");
  }
  if (pf.generation && !pf.system) {
    throw std::invalid_argument(path + ": 'generation' needs a 'system' block to simulate");
  }

  try {
    pf.horizons.validate();
    pf.weights.validate();
    pf.constraints.validate();
    if (pf.system) pf.system->validate();
    if (pf.data) pf.data->validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
  if (pf.system && pf.system->m() != m) {
    throw std::invalid_argument(path + ": system input count disagrees with M_u columns");
  }
  if (pf.system && pf.system->p() != p) {
    throw std::invalid_argument(path + ": system output count disagrees with M_y columns");
  }
  return pf;
}

Matrix load_matrix_file(const std::string& path) {
  const json doc = parse_document(path, read_file(path));
  return to_matrix(doc, path);
}

void write_solution_json(const ExplicitSolution& sol, const std::string& path) {
  json doc;
  doc["d_z"] = sol.d_z;
  doc["d_theta"] = sol.d_theta;
  doc["s"] = sol.s();
  doc["domain"] = {{"A", from_matrix(sol.domain.A)}, {"b", from_vector(sol.domain.b)}};
  doc["stats"] = {{"qp_solves", sol.stats.qp_solves},
                  {"licq_skips", sol.stats.licq_skips},
                  {"empty_discarded", sol.stats.empty_discarded},
                  {"seeds_tried", sol.stats.seeds_tried}};
  json regions = json::array();
  for (const CriticalRegion& r : sol.regions) {
    json jr;
    jr["active_set"] = r.active_set;
    jr["L"] = from_matrix(r.L);
    jr["c"] = from_vector(r.c);
    jr["lambda_gain"] = from_matrix(r.lambda_gain);
    jr["lambda_offset"] = from_vector(r.lambda_offset);
    jr["region"] = {{"A", from_matrix(r.region.A)}, {"b", from_vector(r.region.b)}};
    regions.push_back(std::move(jr));
  }
  doc["regions"] = std::move(regions);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument(path + ": cannot write file");
  out << doc.dump(1) << "\n";
}

ExplicitSolution read_solution_json(const std::string& path) {
  const json doc = parse_document(path, read_file(path));
  ExplicitSolution sol;
  sol.d_z = require(doc, "d_z", path).get<Index>();
  sol.d_theta = require(doc, "d_theta", path).get<Index>();
  const json& dom = require(doc, "domain", path);
  sol.domain.A = to_matrix(require(dom, "A", path + ": domain"), path + ": domain.A");
  sol.domain.b = to_vector(require(dom, "b", path + ": domain"), path + ": domain.b");
  if (doc.contains("stats")) {
    const json& st = doc["stats"];
    sol.stats.qp_solves = st.value("qp_solves", Index{0});
    sol.stats.licq_skips = st.value("licq_skips", Index{0});
    sol.stats.empty_discarded = st.value("empty_discarded", Index{0});
    sol.stats.seeds_tried = st.value("seeds_tried", Index{0});
  }
  for (const json& jr : require(doc, "regions", path)) {
    CriticalRegion r;
    r.active_set = jr.at("active_set").get<IndexSet>();
    r.L = to_matrix(jr.at("L"), path + ": region L");
    r.c = to_vector(jr.at("c"), path + ": region c");
    r.lambda_gain = jr.contains("lambda_gain") && !jr["lambda_gain"].empty()
                        ? to_matrix(jr["lambda_gain"], path + ": lambda_gain")
                        : Matrix::Zero(0, sol.d_theta);
    r.lambda_offset = jr.contains("lambda_offset")
                          ? to_vector(jr["lambda_offset"], path + ": lambda_offset")
                          : Vector::Zero(0);
    const json& reg = jr.at("region");
    r.region.A = to_matrix(reg.at("A"), path + ": region.A");
    r.region.b = to_vector(reg.at("b"), path + ": region.b");
    sol.regions.push_back(std::move(r));
  }
  return sol;
}

void write_partition_csv(const ExplicitSolution& sol, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (out == nullptr) throw std::invalid_argument(path + ": cannot write file");
  std::fprintf(out, "region_id,kind,row,col,value\n");
  for (Index id = 0; id < sol.s(); ++id) {
    const CriticalRegion& r = sol.regions[id];
    for (Index i = 0; i < r.region.rows(); ++i) {
      for (Index k = 0; k < r.region.dim(); ++k) {
        std::fprintf(out, "%ld,halfspace,%ld,%ld,%.17g\n", static_cast<long>(id),
                     static_cast<long>(i), static_cast<long>(k), r.region.A(i, k));
      }
      std::fprintf(out, "%ld,halfspace,%ld,%ld,%.17g\n", static_cast<long>(id),
                   static_cast<long>(i), static_cast<long>(r.region.dim()), r.region.b(i));
    }
    for (Index i = 0; i < r.L.rows(); ++i) {
      for (Index k = 0; k < r.L.cols(); ++k) {
        std::fprintf(out, "%ld,gain,%ld,%ld,%.17g\n", static_cast<long>(id),
                     static_cast<long>(i), static_cast<long>(k), r.L(i, k));
      }
    }
    for (Index i = 0; i < r.c.size(); ++i) {
      std::fprintf(out, "%ld,offset,%ld,0,%.17g\n", static_cast<long>(id),
                   static_cast<long>(i), r.c(i));
    }
  }
  std::fclose(out);
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (out == nullptr) throw std::invalid_argument(path + ": cannot write file");
  const Index n = traj.states.rows();
  const Index m = traj.inputs.rows();
  const Index p = traj.outputs.rows();
  const Index steps = traj.inputs.cols();

  std::fprintf(out, "step");
  for (Index i = 0; i < n; ++i) std::fprintf(out, ",x%ld", static_cast<long>(i));
  for (Index i = 0; i < m; ++i) std::fprintf(out, ",u%ld", static_cast<long>(i));
  for (Index i = 0; i < p; ++i) std::fprintf(out, ",y%ld", static_cast<long>(i));
  std::fprintf(out, "\n");

  for (Index k = 0; k < steps; ++k) {
    std::fprintf(out, "%ld", static_cast<long>(k));
    for (Index i = 0; i < n; ++i) std::fprintf(out, ",%.17g", traj.states(i, k));
    for (Index i = 0; i < m; ++i) std::fprintf(out, ",%.17g", traj.inputs(i, k));
    for (Index i = 0; i < p; ++i) std::fprintf(out, ",%.17g", traj.outputs(i, k));
    std::fprintf(out, "\n");
  }
  std::fprintf(out, "%ld", static_cast<long>(steps));
  for (Index i = 0; i < n; ++i) std::fprintf(out, ",%.17g", traj.states(i, steps));
  for (Index i = 0; i < m + p; ++i) std::fprintf(out, ",");
  std::fprintf(out, "\n");
  std::fclose(out);
}

} // namespace ddpc::cli
