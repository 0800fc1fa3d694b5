#include "CLI11.hpp"
#include "ddpc/equivalence.hpp"
#include "ddpc/explicit_solution.hpp"
#include "ddpc/rng.hpp"
#include "examples.hpp"
#include "io.hpp"
#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace ddpc::cli {
namespace {

// Per-invocation knobs shared by the problem-file subcommands.
struct Flags {
  std::string problem;
  std::string out;
  std::vector<double> domain;
  double tol_rank = -2.0; // sentinel: not passed
  double tol_opt = -2.0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double phi = 0.0;
  bool phi_given = false;
  std::string vp_file;
};

void add_common_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--problem", f.problem, "JSON problem file")->required();
  cmd->add_option("--tol-rank", f.tol_rank, "rank-decision tolerance");
  cmd->add_option("--tol-opt", f.tol_opt, "optimality/feasibility tolerance");
}

Vector half_widths_from(const std::vector<double>& values, Index dim, const char* what) {
  if (values.size() == 1) return Vector::Constant(dim, values.front());
  if (static_cast<Index>(values.size()) != dim) {
    throw std::invalid_argument(std::string(what) + ": expected 1 or " + std::to_string(dim) +
                                " bounds, got " + std::to_string(values.size()));
  }
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = values[static_cast<std::size_t>(i)];
  return v;
}

// Exploration box for the state parameter: flag, then problem options; there
// is no constraint-implied default for x0, so one of them is required.
Polyhedron mpc_domain(const ProblemFile& pf, const Flags& f, Index dim) {
  if (!f.domain.empty()) return symmetric_box(half_widths_from(f.domain, dim, "--domain"));
  if (pf.domain_bounds) {
    return symmetric_box(half_widths_from(
        std::vector<double>(pf.domain_bounds->data(), pf.domain_bounds->data() + pf.domain_bounds->size()),
        dim, "options.domain"));
  }
  throw std::invalid_argument(
      "no exploration box for x0: pass --domain or set options.domain in the problem file");
}

// Exploration box for the past window: flag, then problem options (when their
// length fits the window; an x0-sized options.domain is left to the MPC side),
// then the constraint-implied default |u| <= max(v_u), |y| <= max(v_y).
Polyhedron dpc_domain(const ProblemFile& pf, const Flags& f, Index m, Index p, Index N_p) {
  const Index dim = (m + p) * N_p;
  if (!f.domain.empty()) return symmetric_box(half_widths_from(f.domain, dim, "--domain"));
  if (pf.domain_bounds &&
      (pf.domain_bounds->size() == dim || pf.domain_bounds->size() == 1)) {
    return symmetric_box(half_widths_from(
        std::vector<double>(pf.domain_bounds->data(), pf.domain_bounds->data() + pf.domain_bounds->size()),
        dim, "options.domain"));
  }
  Vector hw(dim);
  hw.head(m * N_p).setConstant(pf.constraints.v_u.maxCoeff());
  hw.tail(p * N_p).setConstant(pf.constraints.v_y.maxCoeff());
  return symmetric_box(hw);
}

double tol_rank_of(const ProblemFile& pf, const Flags& f) {
  return f.tol_rank > -1.5 ? f.tol_rank : pf.tol_rank;
}

MpqpOptions mpqp_options(const ProblemFile& pf, const Flags& f) {
  MpqpOptions opt;
  const double tol = f.tol_opt > -1.5 ? f.tol_opt : pf.tol_opt;
  opt.qp.tol_feas = tol;
  opt.tol_contain = tol;
  return opt;
}

DataRecord resolve_data(const ProblemFile& pf, const Flags& f) {
  if (pf.data) return *pf.data;
  if (!pf.generation) {
    throw std::invalid_argument("the problem file has no 'data' or 'generation' block");
  }
  const std::uint64_t seed = f.seed_given ? f.seed : pf.generation->seed;
  return generate_excitation(*pf.system, pf.generation->N_d, seed, pf.generation->amplitude);
}

struct DpcPipeline {
  DataRecord data;
  HankelPartition part;
  ReductionMaps maps;
  ParametricQP beta_qp;
};

DpcPipeline build_dpc(const ProblemFile& pf, const Flags& f) {
  DpcPipeline pl;
  pl.data = resolve_data(pf, f);
  pl.part = partition(pl.data, pf.horizons, tol_rank_of(pf, f));

  std::optional<Matrix> V_p;
  const std::string vp_path = !f.vp_file.empty() ? f.vp_file : pf.vp_file.value_or("");
  if (!vp_path.empty()) V_p = load_matrix_file(vp_path);

  std::optional<Matrix> Phi;
  const std::optional<double> phi =
      f.phi_given ? std::optional<double>(f.phi) : pf.phi;
  if (phi) Phi = *phi * Matrix::Identity(pl.data.m * pf.horizons.N_f, pl.data.m * pf.horizons.N_f);

  pl.maps = build_reduction_maps(pl.part, V_p, Phi, tol_rank_of(pf, f));
  const DpcRawQP raw = build_dpc_raw(pl.part, pf.weights, pf.constraints);
  pl.beta_qp = reduce_to_beta(raw, pl.maps);
  return pl;
}

ParametricQP build_mpc(const ProblemFile& pf) {
  if (!pf.system) throw std::invalid_argument("this subcommand needs a 'system' block");
  return condense_mpc(*pf.system, pf.weights, pf.constraints, pf.horizons.N_f);
}

int run_check_data(const Flags& f) {
  const ProblemFile pf = load_problem(f.problem);
  const DataRecord data = resolve_data(pf, f);
  const double tol_rank = tol_rank_of(pf, f);

  const Index required = pf.horizons.N_e();
  Index achieved = 0;
  for (Index order = 1; order * data.m <= data.N_d; ++order) {
    if (!is_persistently_exciting(data.u_d, data.m, order, tol_rank)) break;
    achieved = order;
  }

  const HankelPartition part = partition(data, pf.horizons, tol_rank);
  const ReductionMaps maps = build_reduction_maps(part, std::nullopt, std::nullopt, tol_rank);
  const RankReport rr =
      rank_report(part, maps, data.m, pf.horizons.n, pf.horizons.N_p, pf.horizons.N_f);

  std::cout << "N_d = " << data.N_d << ", required excitation order N_e = " << required
            << ", achieved order = " << achieved << "\n";
  std::cout << "persistently exciting at N_e: " << (part.pe_satisfied ? "yes" : "no") << "\n";
  std::cout << "l = " << rr.l << ", rank(W_p) = " << rr.rank_Wp << " (expected "
            << data.m * pf.horizons.N_p + pf.horizons.n << "), nu = " << rr.nu << "\n";
  std::cout << "rank(U_f V_p) = " << rr.rank_UfVp << " (expected " << data.m * pf.horizons.N_f
            << ")\n";
  std::cout << "past-window lemma: " << (rr.wp_lemma_ok ? "ok" : "FAILED")
            << ", input-reachability lemma: " << (rr.ufvp_lemma_ok ? "ok" : "FAILED") << "\n";
  return (part.pe_satisfied && rr.wp_lemma_ok && rr.ufvp_lemma_ok) ? 0 : 2;
}

int run_explicit(const Flags& f, bool dpc) {
  const ProblemFile pf = load_problem(f.problem);
  ExplicitSolution sol;
  if (dpc) {
    const DpcPipeline pl = build_dpc(pf, f);
    sol = explicit_solve(pl.beta_qp,
                         dpc_domain(pf, f, pl.data.m, pl.data.p, pf.horizons.N_p),
                         mpqp_options(pf, f));
  } else {
    const ParametricQP qp = build_mpc(pf);
    sol = explicit_solve(qp, mpc_domain(pf, f, qp.parameter_dim()), mpqp_options(pf, f));
  }
  const std::string prefix = !f.out.empty() ? f.out : (dpc ? "explicit_dpc" : "explicit_mpc");
  write_solution_json(sol, prefix + ".json");
  write_partition_csv(sol, prefix + ".csv");
  std::cout << "s = " << sol.s() << " regions (" << sol.stats.qp_solves << " QP solves, "
            << sol.stats.licq_skips << " degenerate probes skipped)\n";
  std::cout << "wrote " << prefix << ".json and " << prefix << ".csv\n";
  return 0;
}

int run_compare(const Flags& f, Index samples) {
  const ProblemFile pf = load_problem(f.problem);
  if (!pf.system) throw std::invalid_argument("compare needs a 'system' block");
  const DpcPipeline pl = build_dpc(pf, f);
  const ParametricQP mpc_qp = build_mpc(pf);
  const MpqpOptions opts = mpqp_options(pf, f);

  const Polyhedron dpc_box = dpc_domain(pf, f, pl.data.m, pl.data.p, pf.horizons.N_p);
  const ExplicitSolution dpc_sol = explicit_solve(pl.beta_qp, dpc_box, opts);

  // Without an explicit x0 box, explore where the past windows map to.
  Polyhedron mpc_box{Matrix(), Vector()};
  try {
    mpc_box = mpc_domain(pf, f, mpc_qp.parameter_dim());
  } catch (const std::invalid_argument&) {
    const Matrix Gamma = gamma_matrix(*pf.system, pf.horizons.N_p, tol_rank_of(pf, f));
    Vector hw = Vector::Zero(mpc_qp.parameter_dim());
    Vector corner(dpc_box.dim());
    for (Index bits = 0; bits < (Index{1} << dpc_box.dim()); ++bits) {
      for (Index j = 0; j < dpc_box.dim(); ++j) {
        const double bound = dpc_box.b(2 * j);
        corner(j) = (bits >> j) & 1 ? bound : -bound;
      }
      hw = hw.cwiseMax((Gamma * corner).cwiseAbs());
    }
    mpc_box = symmetric_box(hw);
  }
  const ExplicitSolution mpc_sol = explicit_solve(mpc_qp, mpc_box, opts);

  const std::uint64_t seed = f.seed_given ? f.seed : 1;
  const EquivalenceReport eq = sampled_equivalence(mpc_sol, dpc_sol, pl.maps, pl.part,
                                                   *pf.system, samples, seed);

  // Coupling residuals at sampled past windows.
  Index coupling_samples = 0, degenerate = 0, failed = 0;
  double max_uf = 0.0, max_lambda = 0.0;
  {
    Rng rng(seed + 1);
    const Index want = std::min<Index>(100, samples > 0 ? samples : 100);
    for (Index k = 0; k < want; ++k) {
      Vector xi(dpc_box.dim());
      for (Index j = 0; j < dpc_box.dim(); ++j) {
        const double bound = dpc_box.b(2 * j);
        xi(j) = rng.uniform(-bound, bound);
      }
      const CouplingReport cr =
          check_kkt_coupling(mpc_qp, pl.beta_qp, pl.maps, pl.part, *pf.system, xi, 1e-6);
      if (!std::isfinite(cr.uf_residual)) {
        ++failed;
        continue;
      }
      ++coupling_samples;
      max_uf = std::max(max_uf, cr.uf_residual);
      if (cr.degenerate) {
        ++degenerate;
      } else {
        max_lambda = std::max(max_lambda, cr.lambda_residual);
      }
    }
  }

  std::cout << "s_MPC = " << mpc_sol.s() << ", s_DPC = " << dpc_sol.s()
            << (mpc_sol.s() == dpc_sol.s() ? " (equal)" : " (NOT equal)") << "\n";
  std::cout << "sampled equivalence: max |u_f deviation| = " << eq.max_uf_deviation << " over "
            << eq.compared << "/" << eq.samples << " samples\n";
  std::cout << "coupling residuals over " << coupling_samples << " windows (" << failed
            << " infeasible, " << degenerate << " degenerate): max u_f = " << max_uf
            << ", max lambda = " << max_lambda << "\n";

  if (!f.out.empty()) {
    nlohmann::json rep;
    rep["s_mpc"] = mpc_sol.s();
    rep["s_dpc"] = dpc_sol.s();
    rep["counts_equal"] = mpc_sol.s() == dpc_sol.s();
    rep["sampled_equivalence"] = {{"max_uf_deviation", eq.max_uf_deviation},
                                  {"samples", eq.samples},
                                  {"compared", eq.compared}};
    rep["coupling"] = {{"samples", coupling_samples},
                       {"infeasible", failed},
                       {"degenerate", degenerate},
                       {"max_uf_residual", max_uf},
                       {"max_lambda_residual", max_lambda}};
    std::ofstream out(f.out, std::ios::binary);
    if (!out) throw std::invalid_argument(f.out + ": cannot write file");
    out << rep.dump(1) << "\n";
    std::cout << "wrote " << f.out << "\n";
  }
  return 0;
}

int run_simulate(const Flags& f, const std::string& kind, const std::vector<double>& x0_values,
                 Index steps) {
  const ProblemFile pf = load_problem(f.problem);
  if (!pf.system) throw std::invalid_argument("simulate needs a 'system' block for the plant");
  const SystemModel& model = *pf.system;
  if (static_cast<Index>(x0_values.size()) != model.n()) {
    throw std::invalid_argument("--x0 must have " + std::to_string(model.n()) + " entries");
  }
  Vector x0(model.n());
  for (Index i = 0; i < x0.size(); ++i) x0(i) = x0_values[static_cast<std::size_t>(i)];

  Controller ctrl;
  ParametricQP mpc_qp, beta_qp;
  ExplicitSolution sol;
  DpcPipeline pl;
  const MpqpOptions opts = mpqp_options(pf, f);

  if (kind == "explicit-mpc" || kind == "numeric-mpc") {
    mpc_qp = build_mpc(pf);
    if (kind == "explicit-mpc") {
      sol = explicit_solve(mpc_qp, mpc_domain(pf, f, mpc_qp.parameter_dim()), opts);
      ctrl.kind = ControllerKind::ExplicitMpc;
      ctrl.solution = &sol;
    } else {
      ctrl.kind = ControllerKind::NumericMpc;
      ctrl.qp = &mpc_qp;
    }
  } else {
    pl = build_dpc(pf, f);
    ctrl.maps = &pl.maps;
    ctrl.part = &pl.part;
    if (kind == "explicit-dpc") {
      sol = explicit_solve(pl.beta_qp,
                           dpc_domain(pf, f, pl.data.m, pl.data.p, pf.horizons.N_p), opts);
      ctrl.kind = ControllerKind::ExplicitDpc;
      ctrl.solution = &sol;
    } else {
      ctrl.kind = ControllerKind::NumericDpc;
      ctrl.qp = &pl.beta_qp;
    }
  }

  const Trajectory traj = closed_loop(model, ctrl, x0, steps, pf.horizons.N_p);
  const std::string out = !f.out.empty() ? f.out : "trajectory.csv";
  write_trajectory_csv(traj, out);
  std::cout << "simulated " << steps << " steps; wrote " << out << "\n";
  return 0;
}

} // namespace
} // namespace ddpc::cli

int main(int argc, char** argv) {
  using namespace ddpc::cli;

  CLI::App app{"explicit data-driven predictive control toolkit"};
  app.require_subcommand(1);

  Flags f;
  ddpc::Index samples = 1000;
  ddpc::Index steps = 30;
  std::string controller = "explicit-mpc";
  std::vector<double> x0_values;
  std::uint64_t example_seed = 42;

  CLI::App* check = app.add_subcommand("check-data", "excitation and rank diagnostics");
  add_common_flags(check, f);
  check->add_option("--seed", f.seed, "seed for generated data")->each([&](const std::string&) {
    f.seed_given = true;
  });

  auto add_explicit_flags = [&](CLI::App* cmd) {
    add_common_flags(cmd, f);
    cmd->add_option("--out", f.out, "output prefix/path");
    cmd->add_option("--domain", f.domain, "per-coordinate box bounds")->delimiter(',');
    cmd->add_option("--seed", f.seed, "seed for generated data")->each([&](const std::string&) {
      f.seed_given = true;
    });
    cmd->add_option("--phi", f.phi, "Phi = phi * identity")->each([&](const std::string&) {
      f.phi_given = true;
    });
    cmd->add_option("--vp-file", f.vp_file, "V_p basis override (JSON matrix)");
  };

  CLI::App* mpc = app.add_subcommand("mpc-explicit", "explicit model-based controller");
  add_explicit_flags(mpc);
  CLI::App* dpc = app.add_subcommand("dpc-explicit", "explicit data-driven controller");
  add_explicit_flags(dpc);

  CLI::App* compare = app.add_subcommand("compare", "region counts, equivalence, coupling");
  add_explicit_flags(compare);
  compare->add_option("--samples", samples, "equivalence sample count");

  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop run to CSV");
  add_explicit_flags(simulate);
  simulate->add_option("--controller", controller, "controller kind")
      ->check(CLI::IsMember({"explicit-mpc", "explicit-dpc", "numeric-mpc", "numeric-dpc"}));
  simulate->add_option("--x0", x0_values, "initial state")->delimiter(',')->required();
  simulate->add_option("--steps", steps, "number of steps");

  CLI::App* ex1 = app.add_subcommand("example1", "built-in scalar scenario");
  CLI::App* ex2 = app.add_subcommand("example2", "built-in double-integrator scenario");
  ex2->add_option("--seed", example_seed, "excitation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return run_check_data(f);
    if (mpc->parsed()) return run_explicit(f, false);
    if (dpc->parsed()) return run_explicit(f, true);
    if (compare->parsed()) return run_compare(f, samples);
    if (simulate->parsed()) return run_simulate(f, controller, x0_values, steps);
    if (ex1->parsed()) return run_example1(std::cout);
    if (ex2->parsed()) return run_example2(std::cout, example_seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
