#include "ddpc/data_matrices.hpp"

#include "ddpc/linalg.hpp"
#include "ddpc/rng.hpp"

#include <stdexcept>

namespace ddpc {

void DataRecord::validate() const {
  if (N_d < 1 || m < 1 || p < 1) {
    throw std::invalid_argument("DataRecord: N_d, m, p must all be at least 1");
  }
  if (u_d.size() != m * N_d) throw std::invalid_argument("DataRecord: u_d length must be m*N_d");
  if (y_d.size() != p * N_d) throw std::invalid_argument("DataRecord: y_d length must be p*N_d");
}

void HorizonSpec::validate() const {
  if (N_p < 1 || N_f < 1 || n < 1) {
    throw std::invalid_argument("HorizonSpec: N_p, N_f, n must all be at least 1");
  }
}

Matrix hankel(const Vector& seq, Index b, Index depth) {
  if (b < 1) throw std::invalid_argument("hankel: block size must be at least 1");
  if (depth < 1) throw std::invalid_argument("hankel: depth must be at least 1");
  if (seq.size() % b != 0) {
    throw std::invalid_argument("hankel: sequence length must be a multiple of the block size");
  }
  const Index blocks = seq.size() / b;
  if (blocks < depth) throw std::invalid_argument("hankel: depth exceeds the sequence length");
  const Index cols = blocks - depth + 1;
  Matrix H(b * depth, cols);
  for (Index j = 0; j < cols; ++j) {
    H.col(j) = seq.segment(j * b, b * depth);
  }
  return H;
}

bool is_persistently_exciting(const Vector& u_d, Index m, Index order, double tol_rank) {
  if (order < 1) throw std::invalid_argument("is_persistently_exciting: order must be at least 1");
  if (u_d.size() % m != 0) {
    throw std::invalid_argument("is_persistently_exciting: input length must be a multiple of m");
  }
  const Index blocks = u_d.size() / m;
  if (blocks < order) return false;
  const Matrix H = hankel(u_d, m, order);
  if (H.cols() < H.rows()) return false; // fewer windows than rows: rank cannot be full
  return numerical_rank(H, tol_rank) == m * order;
}

Index min_data_length(Index m, Index N_p, Index N_f, Index n) {
  if (m < 1 || N_p < 1 || N_f < 1 || n < 1) {
    throw std::invalid_argument("min_data_length: all arguments must be at least 1");
  }
  return (m + 1) * (N_p + N_f + n) - 1;
}

HankelPartition partition(const DataRecord& data, const HorizonSpec& horizons,
                          double tol_rank) {
  data.validate();
  horizons.validate();
  const Index depth = horizons.N_p + horizons.N_f;
  if (data.N_d < depth) {
    throw std::invalid_argument("partition: need at least N_p + N_f data points");
  }
  const Matrix Hu = hankel(data.u_d, data.m, depth);
  const Matrix Hy = hankel(data.y_d, data.p, depth);

  HankelPartition part;
  part.l = data.N_d - depth + 1;
  part.W_p.resize((data.m + data.p) * horizons.N_p, part.l);
  part.W_p.topRows(data.m * horizons.N_p) = Hu.topRows(data.m * horizons.N_p);
  part.W_p.bottomRows(data.p * horizons.N_p) = Hy.topRows(data.p * horizons.N_p);
  part.U_f = Hu.bottomRows(data.m * horizons.N_f);
  part.Y_f = Hy.bottomRows(data.p * horizons.N_f);
  part.pe_satisfied =
      is_persistently_exciting(data.u_d, data.m, horizons.N_e(), tol_rank);
  return part;
}

DataRecord generate_excitation(const SystemModel& model, Index N_d,
                               std::uint64_t seed, double amplitude) {
  model.validate();
  if (N_d < 1) throw std::invalid_argument("generate_excitation: N_d must be at least 1");

  // Deepest excitation order a length-N_d sequence can support:
  // the depth-N Hankel needs at least as many columns as rows.
  const Index target_order = (N_d + 1) / (model.m() + 1);

  Rng rng(seed);
  constexpr int kMaxRetries = 32;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    DataRecord data;
    data.N_d = N_d;
    data.m = model.m();
    data.p = model.p();
    data.u_d.resize(model.m() * N_d);
    for (Index i = 0; i < data.u_d.size(); ++i) {
      data.u_d(i) = rng.uniform(-amplitude, amplitude);
    }
    data.y_d = simulate(model, Vector::Zero(model.n()), data.u_d);
    if (target_order < 1 || is_persistently_exciting(data.u_d, model.m(), target_order)) {
      return data;
    }
  }
  throw std::runtime_error("generate_excitation: excitation not achieved within the retry budget");
}

} // namespace ddpc
