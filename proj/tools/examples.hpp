#pragma once

#include "ddpc/condense.hpp"
#include "ddpc/data_matrices.hpp"
#include "ddpc/polyhedron.hpp"
#include "ddpc/system_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>

namespace ddpc::cli {

// The box {theta : |theta_j| <= half_widths_j}.
Polyhedron symmetric_box(const Vector& half_widths);

// A fully-specified built-in scenario: plant, tuning, recorded (or generated)
// data, optional published reduction bases, and the exploration boxes.
struct BuiltinSetup {
  SystemModel model;
  CostWeights weights;
  ConstraintSet constraints;
  HorizonSpec horizons;
  DataRecord data;
  std::optional<Matrix> V_p;
  std::optional<Matrix> Phi;
  Vector mpc_domain; // per-coordinate half-widths for the x0 box
  Vector dpc_domain; // per-coordinate half-widths for the xi box
};

// Scalar plant with the published 7-sample record and reduction bases.
BuiltinSetup example1_setup();

// Double integrator with seeded excitation data of length N_d.
BuiltinSetup example2_setup(std::uint64_t seed, Index N_d = 17);

// Run the built-in scenarios end to end, print the headline numbers, and
// check them against the published references. Return a process exit code
// (0 ok, 1 when a reference check fails).
int run_example1(std::ostream& out);
int run_example2(std::ostream& out, std::uint64_t seed);

} // namespace ddpc::cli
