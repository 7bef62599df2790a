#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "heatlayer/grids.hpp"
#include "heatlayer/kernels.hpp"

namespace heatlayer {

struct SolverConfig {
  double tolerance = 1e-8;  // relative residual target
  int max_iterations = 200;
  int level = 1;  // iteration level l of the equation handed to Picard
  enum class Method { neumann_series, time_marching } method = Method::neumann_series;
};

/// Per-iteration record of the successive-approximation solve. `increment` at
/// row k is the sup norm of the k-th Neumann term; `theory_bound` is the
/// factorial ceiling ||g_l|| (|N_l| |S| T)^k / k! evaluated with the discrete
/// sup-norm estimate of the iterated kernel.
struct ConvergenceReport {
  struct Row {
    int iter = 0;
    double increment = 0.0;
    double theory_bound = 0.0;
    double residual = 0.0;
  };
  std::vector<Row> rows;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  double norm_g = 0.0;
  double kernel_sup = 0.0;   // |N_l| estimate used for the ceiling
  double surface_measure = 0.0;
  double horizon = 0.0;

  std::string to_csv() const;  // columns: iter, increment_norm, theory_bound, residual
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, ConvergenceReport report)
      : std::runtime_error(what), report(std::move(report)) {}
  ConvergenceReport report;
};

/// Causal linear operator mu -> int_0^t int_S N_l mu, block lower triangular in
/// the time index. `level` selects the l-fold composition A^l of the level-1
/// discrete operator; `iterated` (optional) supplies the |N_l| estimate for
/// convergence ceilings.
struct DiscreteOperator {
  const KernelTable* level1 = nullptr;
  const KernelTable* iterated = nullptr;  // may be null; used for reporting only
  const SurfaceQuadrature* quad = nullptr;
  const TimeGrid* grid = nullptr;
  int level = 1;

  DensityField apply(const DensityField& f) const;       // A^level f
  DensityField apply_base(const DensityField& f) const;  // A f
};

DiscreteOperator assemble(const KernelTable& level1, const SurfaceQuadrature& quad,
                          const TimeGrid& grid, int level = 1,
                          const KernelTable* iterated = nullptr);

/// Successive approximations mu_{k+1} = g_l + A^l mu_k from mu_0 = 0 (or the
/// supplied initial guess), summed as the partial sums of the Neumann series.
/// Throws SolveError (carrying the report) when max_iterations is exhausted.
std::pair<DensityField, ConvergenceReport> picard_solve(
    const DiscreteOperator& op, const DensityField& g_l, const SolverConfig& cfg,
    const DensityField* initial_guess = nullptr);

/// Exact forward solve of the original discrete system (I - A) mu = g by
/// marching the block lower-triangular structure, factoring the diagonal
/// block once. Throws std::runtime_error when I - diag block is singular
/// (reduce dt).
DensityField time_march_solve(const DiscreteOperator& op, const DensityField& g);

/// Sup-norm residual ||mu - g_l - A^level mu|| over the grid.
double residual(const DiscreteOperator& op, const DensityField& mu,
                const DensityField& g_l);

}  // namespace heatlayer
