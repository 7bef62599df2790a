#include "heatlayer/bie_solver.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "heatlayer/util.hpp"

namespace heatlayer {

std::string ConvergenceReport::to_csv() const {
  CsvBuilder csv({"iter", "increment_norm", "theory_bound", "residual"});
  for (const Row& r : rows)
    csv.add_row({static_cast<double>(r.iter), r.increment, r.theory_bound,
                 r.residual});
  return csv.str();
}

DensityField DiscreteOperator::apply_base(const DensityField& f) const {
  return apply_causal_operator(*level1, *quad, *grid, f);
}

DensityField DiscreteOperator::apply(const DensityField& f) const {
  DensityField out = apply_base(f);
  for (int j = 1; j < level; ++j) out = apply_base(out);
  return out;
}

DiscreteOperator assemble(const KernelTable& level1, const SurfaceQuadrature& quad,
                          const TimeGrid& grid, int level,
                          const KernelTable* iterated) {
  if (level1.level != 1)
    throw std::invalid_argument("assemble: needs the level-1 kernel table");
  if (level1.nodes != quad.node_count() || level1.steps != grid.steps)
    throw std::invalid_argument("assemble: inconsistent grids");
  if (level < 1) throw std::invalid_argument("assemble: level must be >= 1");
  if (iterated && iterated->level != level)
    throw std::invalid_argument("assemble: iterated table level mismatch");
  DiscreteOperator op;
  op.level1 = &level1;
  op.iterated = iterated;
  op.quad = &quad;
  op.grid = &grid;
  op.level = level;
  return op;
}

std::pair<DensityField, ConvergenceReport> picard_solve(
    const DiscreteOperator& op, const DensityField& g_l, const SolverConfig& cfg,
    const DensityField* initial_guess) {
  if (!(cfg.tolerance > 0.0))
    throw std::invalid_argument("picard_solve: tolerance must be > 0");

  ConvergenceReport report;
  report.norm_g = g_l.max_abs();
  report.kernel_sup = op.iterated ? op.iterated->sup_norm : op.level1->sup_norm;
  report.surface_measure = op.quad->total_weight();
  report.horizon = op.grid->horizon;

  const int M = g_l.nodes;
  const int K = g_l.steps;

  if (report.norm_g == 0.0) {
    report.converged = true;
    return {DensityField::zeros(M, K, g_l.dt), report};
  }

  const double contraction = report.kernel_sup * report.surface_measure *
                             report.horizon;
  auto bound = [&](int k) {
    double b = report.norm_g;
    for (int j = 1; j <= k; ++j) b *= contraction / j;
    return b;
  };

  DensityField mu = initial_guess ? *initial_guess
                                  : DensityField::zeros(M, K, g_l.dt);
  DensityField delta = g_l;
  if (initial_guess) {
    DensityField a = op.apply(mu);
    delta += a;
    delta -= mu;
  }
  mu += delta;

  report.rows.push_back({0, delta.max_abs(), bound(0), 0.0});

  bool converged = false;
  for (int k = 1; k <= cfg.max_iterations; ++k) {
    delta = op.apply(delta);
    const double inc = delta.max_abs();
    mu += delta;
    report.rows.push_back({k, inc, bound(k), 0.0});
    report.iterations = k;
    if (inc <= cfg.tolerance * report.norm_g) {
      converged = true;
      break;
    }
  }

  {
    DensityField a = op.apply(mu);
    double r = 0.0;
    for (std::size_t i = 0; i < mu.values.size(); ++i)
      r = std::max(r,
                   std::abs(mu.values[i] - g_l.values[i] - a.values[i]));
    report.final_residual = r;
  }
  for (std::size_t i = 0; i + 1 < report.rows.size(); ++i)
    report.rows[i].residual = report.rows[i + 1].increment;
  if (!report.rows.empty()) report.rows.back().residual = report.final_residual;
  report.converged = converged;

  if (!converged)
    throw SolveError("picard_solve: no convergence within max_iterations",
                     report);
  return {mu, report};
}

DensityField time_march_solve(const DiscreteOperator& op, const DensityField& g) {
  const KernelTable& t = *op.level1;
  const SurfaceQuadrature& quad = *op.quad;
  const int M = t.nodes;
  const int K = t.steps;
  if (g.nodes != M || g.steps != K)
    throw std::invalid_argument("time_march_solve: field grid mismatch");

  // Diagonal block: coupling of mu(t_m) through the last subinterval.
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j)
      A(i, j) -= 0.5 * t.interval_integral(0, i, j) * quad.weights[j];

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double umin = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  const double umax = lu.matrixLU().diagonal().cwiseAbs().maxCoeff();
  if (!(umin > 1e-13 * std::max(umax, 1.0)))
    throw std::runtime_error(
        "time_march_solve: singular diagonal time block; reduce the time step");

  DensityField mu = DensityField::zeros(M, K, g.dt);
  for (int j = 0; j < M; ++j) mu.at(0, j) = g.at(0, j);

  // hav(a, j) = w_j * (mu(a) + mu(a+1))/2 for completed rows a <= m-2.
  std::vector<double> hav(static_cast<std::size_t>(K) * M, 0.0);
  std::vector<double> rhs(M);
  for (int m = 1; m <= K; ++m) {
    parallel_for(static_cast<std::size_t>(M), [&](std::size_t ii) {
      const int i = static_cast<int>(ii);
      double acc = g.at(m, i);
      for (int a = 0; a <= m - 2; ++a) {
        const int k = m - 1 - a;
        const double* trow =
            &t.interval_integrals[(static_cast<std::size_t>(k) * M + i) * M];
        const double* h = &hav[static_cast<std::size_t>(a) * M];
        double s = 0.0;
        for (int j = 0; j < M; ++j) s += trow[j] * h[j];
        acc += s;
      }
      // Known half of the last subinterval's average.
      const double* trow0 = &t.interval_integrals[static_cast<std::size_t>(i) * M];
      double s0 = 0.0;
      for (int j = 0; j < M; ++j)
        s0 += trow0[j] * quad.weights[j] * 0.5 * mu.at(m - 1, j);
      rhs[i] = acc + s0;
    });
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), M);
    Eigen::VectorXd x = lu.solve(b);
    for (int j = 0; j < M; ++j) mu.at(m, j) = x(j);
    for (int j = 0; j < M; ++j)
      hav[static_cast<std::size_t>(m - 1) * M + j] =
          quad.weights[j] * 0.5 * (mu.at(m - 1, j) + mu.at(m, j));
  }
  return mu;
}

double residual(const DiscreteOperator& op, const DensityField& mu,
                const DensityField& g_l) {
  DensityField a = op.apply(mu);
  double r = 0.0;
  for (std::size_t i = 0; i < mu.values.size(); ++i)
    r = std::max(r, std::abs(mu.values[i] - g_l.values[i] - a.values[i]));
  return r;
}

}  // namespace heatlayer
