#pragma once

#include "ddpc/system_model.hpp"
#include "ddpc/types.hpp"

namespace ddpc {

// A recorded input/output experiment of N_d steps.
struct DataRecord {
  Vector u_d; // stacked, length m * N_d
  Vector y_d; // stacked, length p * N_d
  Index N_d = 0;
  Index m = 0;
  Index p = 0;

  void validate() const;
};

// Past-window length, prediction horizon, and the assumed state dimension.
struct HorizonSpec {
  Index N_p = 0;
  Index N_f = 0;
  Index n = 0;

  Index N_e() const { return N_p + N_f + n; }
  void validate() const;
};

// The W_p / U_f / Y_f blocks carved from the depth-(N_p+N_f) Hankel matrices.
struct HankelPartition {
  Matrix W_p; // (m+p)*N_p x l : past inputs stacked over past outputs
  Matrix U_f; // m*N_f x l
  Matrix Y_f; // p*N_f x l
  Index l = 0;
  bool pe_satisfied = true; // excitation of order N_e held at partition time
};

// Block-Hankel matrix of depth `depth` from a stacked sequence with block
// size b; column j holds blocks j..j+depth-1.
Matrix hankel(const Vector& seq, Index b, Index depth);

// True iff the depth-`order` Hankel matrix of u_d has full row rank m*order.
bool is_persistently_exciting(const Vector& u_d, Index m, Index order,
                              double tol_rank = -1.0);

// Minimum N_d for excitation of order N_e = N_p + N_f + n: (m+1)*N_e - 1.
Index min_data_length(Index m, Index N_p, Index N_f, Index n);

// Splits the data into W_p, U_f, Y_f. Insufficient data throws; a persistency
// violation only clears pe_satisfied so degenerate data can still be studied.
HankelPartition partition(const DataRecord& data, const HorizonSpec& horizons,
                          double tol_rank = -1.0);

// Uniform seeded excitation in [-amplitude, amplitude], simulated from x0 = 0,
// re-drawn (bounded retries) until excitation of order floor((N_d+1)/(m+1)) holds.
DataRecord generate_excitation(const SystemModel& model, Index N_d,
                               std::uint64_t seed, double amplitude);

} // namespace ddpc
