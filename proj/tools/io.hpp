#pragma once

#include "ddpc/condense.hpp"
#include "ddpc/data_matrices.hpp"
#include "ddpc/equivalence.hpp"
#include "ddpc/explicit_solution.hpp"
#include "ddpc/system_model.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace ddpc::cli {

// In-memory form of the JSON problem document. Either a system block or a
// data/generation block must be present; the DPC pipeline runs model-free.
struct ProblemFile {
  std::optional<SystemModel> system;
  std::optional<DataRecord> data;

  struct Generation {
    Index N_d = 0;
    std::uint64_t seed = 0;
    double amplitude = 1.0;
  };
  std::optional<Generation> generation;

  HorizonSpec horizons;
  CostWeights weights;
  ConstraintSet constraints;

  double tol_rank = -1.0; // <0: library default
  double tol_opt = 1e-9;
  std::optional<Vector> domain_bounds; // per-coordinate half-widths of a symmetric box
  std::optional<double> phi;           // Phi = phi * identity
  std::optional<std::string> vp_file;  // V_p basis override
};

// Parses and validates the problem document. Schema violations throw
// std::invalid_argument with a "path:line:" prefix where applicable.
ProblemFile load_problem(const std::string& path);

// Reads one matrix stored as a row-major nested JSON array.
Matrix load_matrix_file(const std::string& path);

// Explicit-solution persistence. JSON carries full precision (shortest
// round-trip decimals), so re-imported solutions evaluate bit-for-bit.
void write_solution_json(const ExplicitSolution& sol, const std::string& path);
ExplicitSolution read_solution_json(const std::string& path);

// Flat partition table: region_id, kind in {halfspace, gain, offset}, row,
// col, value. Halfspace rows store the normal entries at col 0..d_theta-1 and
// the right-hand side at col d_theta.
void write_partition_csv(const ExplicitSolution& sol, const std::string& path);

// Trajectory table: step, state, input, output columns; the terminal state
// appears as a final row with empty input/output cells.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

} // namespace ddpc::cli
