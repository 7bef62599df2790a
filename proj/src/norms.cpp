#include "heatlayer/norms.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "heatlayer/util.hpp"

namespace heatlayer {

namespace {

constexpr double kPi = std::numbers::pi;

bool q_inf(double q) { return std::isinf(q); }

double powp(double x, double p) {
  x = std::abs(x);
  if (p == 1.0) return x;
  if (p == 2.0) return x * x;
  return std::pow(x, p);
}

double rootp(double x, double p) {
  if (p == 1.0) return x;
  if (p == 2.0) return std::sqrt(x);
  return std::pow(x, 1.0 / p);
}

void check_params(const NormParams& np) {
  if (np.r < 0.0 || np.s < 0.0)
    throw std::invalid_argument("NormParams: r and s must be >= 0");
  if (np.p < 1.0 || std::isinf(np.p))
    throw std::invalid_argument("NormParams: p must lie in [1, inf)");
  if (np.q < 1.0) throw std::invalid_argument("NormParams: q must be >= 1");
  if (np.alpha < 0.0 || np.alpha >= 1.0 / np.p)
    throw std::invalid_argument("NormParams: alpha must satisfy 0 <= alpha < 1/p");
}

std::vector<double> trapezoid_weights(int nodes, double h) {
  std::vector<double> w(nodes, h);
  w.front() = 0.5 * h;
  w.back() = 0.5 * h;
  return w;
}

// First-derivative samples along one structured axis; one-sided second-order
// stencils at non-periodic edges.
void axis_derivative(const double* v, int n, int stride, double h, bool periodic,
                     double* out, int out_stride) {
  auto at = [&](int k) { return v[k * stride]; };
  for (int k = 0; k < n; ++k) {
    double d;
    if (periodic) {
      const int kp = (k + 1) % n, km = (k - 1 + n) % n;
      d = (at(kp) - at(km)) / (2.0 * h);
    } else if (k == 0) {
      d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    } else if (k == n - 1) {
      d = (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    } else {
      d = (at(k + 1) - at(k - 1)) / (2.0 * h);
    }
    out[k * out_stride] = d;
  }
}

// All first-derivative components of the spatial slice m (Cartesian components
// for planar layouts, the arclength derivative for curves).
std::vector<std::vector<double>> spatial_derivatives(const GridFunction& f, int m) {
  const int ns = f.spatial_count();
  const double* slice = &f.values[static_cast<std::size_t>(m) * ns];
  std::vector<std::vector<double>> out;

  switch (f.layout) {
    case SpatialLayout::interval:
    case SpatialLayout::circle: {
      if (ns < 3)
        throw std::invalid_argument("wrs_norm: grid too small for derivatives");
      std::vector<double> d(ns);
      axis_derivative(slice, ns, 1, f.spacing[0],
                      f.layout == SpatialLayout::circle, d.data(), 1);
      out.push_back(std::move(d));
      break;
    }
    case SpatialLayout::box2d: {
      const int n0 = f.shape[0], n1 = f.shape[1];
      if (n0 < 3 || n1 < 3)
        throw std::invalid_argument("wrs_norm: grid too small for derivatives");
      std::vector<double> dx(ns), dy(ns);
      for (int j = 0; j < n1; ++j)
        axis_derivative(slice + j, n0, n1, f.spacing[0], false, dx.data() + j, n1);
      for (int i = 0; i < n0; ++i)
        axis_derivative(slice + static_cast<std::size_t>(i) * n1, n1, 1,
                        f.spacing[1], false,
                        dy.data() + static_cast<std::size_t>(i) * n1, 1);
      out.push_back(std::move(dx));
      out.push_back(std::move(dy));
      break;
    }
    case SpatialLayout::polar_disk: {
      const int n0 = f.shape[0], n1 = f.shape[1];
      if (n0 < 3 || n1 < 3)
        throw std::invalid_argument("wrs_norm: grid too small for derivatives");
      std::vector<double> dr(ns), dth(ns);
      for (int j = 0; j < n1; ++j)
        axis_derivative(slice + j, n0, n1, f.spacing[0], false, dr.data() + j, n1);
      for (int i = 0; i < n0; ++i)
        axis_derivative(slice + static_cast<std::size_t>(i) * n1, n1, 1,
                        f.spacing[1], true,
                        dth.data() + static_cast<std::size_t>(i) * n1, 1);
      std::vector<double> dx(ns), dy(ns);
      for (int i = 0; i < n0; ++i) {
        const double r = f.rcoord[i];
        for (int j = 0; j < n1; ++j) {
          const int idx = i * n1 + j;
          const double th = (j + 0.5) * f.spacing[1];
          const double c = std::cos(th), s = std::sin(th);
          dx[idx] = c * dr[idx] - s / r * dth[idx];
          dy[idx] = s * dr[idx] + c / r * dth[idx];
        }
      }
      out.push_back(std::move(dx));
      out.push_back(std::move(dy));
      break;
    }
  }
  return out;
}

std::vector<double> time_derivative(const GridFunction& f) {
  const int ns = f.spatial_count();
  const int nt = f.time_count();
  if (nt < 3)
    throw std::invalid_argument("wrs_norm: time grid too small for derivatives");
  const double ht = f.tnodes[1] - f.tnodes[0];
  std::vector<double> out(f.values.size());
  for (int i = 0; i < ns; ++i)
    axis_derivative(f.values.data() + i, nt, ns, ht, false, out.data() + i, ns);
  return out;
}

// (int_0^T a_m^q dt)^{1/q} over the per-time values a_m >= 0; max for q = inf.
double combine_time(const GridFunction& f, const std::vector<double>& a, double q) {
  if (q_inf(q)) {
    double m = 0.0;
    for (double v : a) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  for (int m = 0; m < f.time_count(); ++m) s += f.tweights[m] * powp(a[m], q);
  return rootp(s, q);
}

double spatial_lp(const GridFunction& f, const double* slice, double p) {
  double s = 0.0;
  for (int i = 0; i < f.spatial_count(); ++i)
    s += f.weights[i] * powp(slice[i], p);
  return rootp(s, p);
}

// Fractional seminorm integrand at one time slice:
// sum_{i != j} w_i w_j |g_i - g_j|^p / |x_i - x_j|^{sdim + p*frac}.
double seminorm_slice_p(const GridFunction& f, const double* g, double p,
                        double frac) {
  const int ns = f.spatial_count();
  const double expo = f.sdim + p * frac;
  std::vector<double> rows(ns, 0.0);
  parallel_for(static_cast<std::size_t>(ns), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    double acc = 0.0;
    for (int j = 0; j < ns; ++j) {
      if (j == i) continue;
      const double dist = (f.coords[i] - f.coords[j]).norm();
      acc += f.weights[j] * powp(g[i] - g[j], p) / std::pow(dist, expo);
    }
    rows[i] = f.weights[i] * acc;
  });
  double s = 0.0;
  for (double r : rows) s += r;
  return s;
}

double lpq_of_samples(const GridFunction& f, const std::vector<double>& samples,
                      double p, double q) {
  std::vector<double> per_time(f.time_count());
  for (int m = 0; m < f.time_count(); ++m)
    per_time[m] =
        spatial_lp(f, samples.data() + static_cast<std::size_t>(m) * f.spatial_count(), p);
  return combine_time(f, per_time, q);
}

}  // namespace

GridFunction make_interval_grid(double a, double b, int nodes, double T,
                                int steps) {
  if (nodes < 2 || steps < 1)
    throw std::invalid_argument("make_interval_grid: empty grid");
  GridFunction g;
  g.layout = SpatialLayout::interval;
  g.sdim = 1;
  const double h = (b - a) / (nodes - 1);
  for (int i = 0; i < nodes; ++i) g.coords.push_back(Vec(a + i * h));
  g.weights = trapezoid_weights(nodes, h);
  g.shape = {nodes, 1};
  g.spacing = {h, 0.0};
  const double ht = T / steps;
  for (int m = 0; m <= steps; ++m) g.tnodes.push_back(m * ht);
  g.tweights = trapezoid_weights(steps + 1, ht);
  g.values.assign(static_cast<std::size_t>(steps + 1) * nodes, 0.0);
  return g;
}

GridFunction make_circle_grid(double radius, int nodes, double T, int steps) {
  if (nodes < 3 || steps < 1)
    throw std::invalid_argument("make_circle_grid: empty grid");
  GridFunction g;
  g.layout = SpatialLayout::circle;
  g.sdim = 1;
  for (int j = 0; j < nodes; ++j) {
    const double th = 2.0 * kPi * j / nodes;
    g.coords.push_back(Vec{radius * std::cos(th), radius * std::sin(th)});
    g.weights.push_back(2.0 * kPi * radius / nodes);
  }
  g.shape = {nodes, 1};
  g.spacing = {2.0 * kPi * radius / nodes, 0.0};
  const double ht = T / steps;
  for (int m = 0; m <= steps; ++m) g.tnodes.push_back(m * ht);
  g.tweights = trapezoid_weights(steps + 1, ht);
  g.values.assign(static_cast<std::size_t>(steps + 1) * nodes, 0.0);
  return g;
}

GridFunction make_box_grid(double x0, double x1, int nx, double y0, double y1,
                           int ny, double T, int steps) {
  if (nx < 2 || ny < 2 || steps < 1)
    throw std::invalid_argument("make_box_grid: empty grid");
  GridFunction g;
  g.layout = SpatialLayout::box2d;
  g.sdim = 2;
  const double dx = (x1 - x0) / nx, dy = (y1 - y0) / ny;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      g.coords.push_back(Vec{x0 + (i + 0.5) * dx, y0 + (j + 0.5) * dy});
      g.weights.push_back(dx * dy);
    }
  g.shape = {nx, ny};
  g.spacing = {dx, dy};
  const double ht = T / steps;
  for (int m = 0; m <= steps; ++m) g.tnodes.push_back(m * ht);
  g.tweights = trapezoid_weights(steps + 1, ht);
  g.values.assign(static_cast<std::size_t>(steps + 1) * nx * ny, 0.0);
  return g;
}

GridFunction make_polar_disk_grid(double r0, double r1, int nr, int ntheta,
                                  double T, int steps) {
  if (nr < 2 || ntheta < 3 || steps < 1 || !(r0 > 0.0) || !(r1 > r0))
    throw std::invalid_argument("make_polar_disk_grid: bad grid");
  GridFunction g;
  g.layout = SpatialLayout::polar_disk;
  g.sdim = 2;
  const double dr = (r1 - r0) / nr, dth = 2.0 * kPi / ntheta;
  for (int i = 0; i < nr; ++i) {
    const double r = r0 + (i + 0.5) * dr;
    g.rcoord.push_back(r);
    for (int j = 0; j < ntheta; ++j) {
      const double th = (j + 0.5) * dth;
      g.coords.push_back(Vec{r * std::cos(th), r * std::sin(th)});
      g.weights.push_back(r * dr * dth);
    }
  }
  g.shape = {nr, ntheta};
  g.spacing = {dr, dth};
  const double ht = T / steps;
  for (int m = 0; m <= steps; ++m) g.tnodes.push_back(m * ht);
  g.tweights = trapezoid_weights(steps + 1, ht);
  g.values.assign(static_cast<std::size_t>(steps + 1) * nr * ntheta, 0.0);
  return g;
}

void fill_grid(GridFunction& g, const std::function<double(const Vec&, double)>& f) {
  for (int m = 0; m < g.time_count(); ++m)
    for (int i = 0; i < g.spatial_count(); ++i)
      g.at(m, i) = f(g.coords[i], g.tnodes[m]);
}

double lpq_norm(const GridFunction& f, double p, double q) {
  if (f.spatial_count() == 0 || f.time_count() == 0)
    throw std::invalid_argument("lpq_norm: empty grid");
  return lpq_of_samples(f, f.values, p, q);
}

double lq_walpha_norm(const GridFunction& f, double p, double q, double alpha) {
  if (alpha == 0.0) return lpq_norm(f, p, q);
  const int ns = f.spatial_count();
  std::vector<double> per_time(f.time_count());
  for (int m = 0; m < f.time_count(); ++m) {
    const double* slice = &f.values[static_cast<std::size_t>(m) * ns];
    per_time[m] =
        spatial_lp(f, slice, p) + rootp(seminorm_slice_p(f, slice, p, alpha), p);
  }
  return combine_time(f, per_time, q);
}

double lq_w1p_norm(const GridFunction& f, double p, double q) {
  const int ns = f.spatial_count();
  std::vector<double> per_time(f.time_count());
  for (int m = 0; m < f.time_count(); ++m) {
    const double* slice = &f.values[static_cast<std::size_t>(m) * ns];
    double nm = spatial_lp(f, slice, p);
    for (const auto& d : spatial_derivatives(f, m)) nm += spatial_lp(f, d.data(), p);
    per_time[m] = nm;
  }
  return combine_time(f, per_time, q);
}

NormBreakdown wrs_norm(const GridFunction& f, const NormParams& np) {
  check_params(np);
  const int fr = static_cast<int>(std::floor(np.r));
  const int fs = static_cast<int>(std::floor(np.s));
  if (fr > 1 || fs > 1)
    throw std::invalid_argument(
        "wrs_norm: derivative orders above 1 are not supported on this grid");
  const double rfrac = np.r - fr;
  const double sfrac = np.s - fs;
  const int ns = f.spatial_count();
  const int nt = f.time_count();

  NormBreakdown out;

  // Term 1: spatial-derivative L_{p,q} sums up to floor(r).
  out.term1 = lpq_norm(f, np.p, np.q);
  std::vector<std::vector<std::vector<double>>> dcomp;  // [m][component][i]
  if (fr >= 1) {
    dcomp.resize(nt);
    for (int m = 0; m < nt; ++m) dcomp[m] = spatial_derivatives(f, m);
    const std::size_t ncomp = dcomp[0].size();
    for (std::size_t c = 0; c < ncomp; ++c) {
      std::vector<double> per_time(nt);
      for (int m = 0; m < nt; ++m)
        per_time[m] = spatial_lp(f, dcomp[m][c].data(), np.p);
      out.term1 += combine_time(f, per_time, np.q);
    }
  }

  // Term 2: spatial fractional seminorm of D^{floor(r)} f (skipped for
  // integer r, where the exponent degenerates).
  if (rfrac > 0.0) {
    const std::size_t ncomp = fr == 0 ? 1 : dcomp[0].size();
    for (std::size_t c = 0; c < ncomp; ++c) {
      std::vector<double> per_time(nt);
      for (int m = 0; m < nt; ++m) {
        const double* g = fr == 0
                              ? &f.values[static_cast<std::size_t>(m) * ns]
                              : dcomp[m][c].data();
        per_time[m] = rootp(seminorm_slice_p(f, g, np.p, rfrac), np.p);
      }
      out.term2 += combine_time(f, per_time, np.q);
    }
  }

  // Term 3: time-derivative L_{p,q} sums up to floor(s). The order-zero term
  // already lives in term 1, so the sum here starts at s' = 1.
  out.term3 = 0.0;
  std::vector<double> dtv;
  if (fs >= 1) {
    dtv = time_derivative(f);
    out.term3 += lpq_of_samples(f, dtv, np.p, np.q);
  }

  // Term 4: time fractional seminorm (nested spatial integral), diagonal
  // excluded; for q = inf the sup over time-pair quotients is reported.
  if (sfrac > 0.0) {
    const std::vector<double>& g = fs == 0 ? f.values : dtv;
    if (q_inf(np.q)) {
      double worst = 0.0;
      for (int m = 0; m < nt; ++m)
        for (int w = 0; w < nt; ++w) {
          if (w == m) continue;
          double inner = 0.0;
          for (int i = 0; i < ns; ++i)
            inner += f.weights[i] *
                     powp(g[static_cast<std::size_t>(m) * ns + i] -
                              g[static_cast<std::size_t>(w) * ns + i],
                          np.p);
          worst = std::max(worst, rootp(inner, np.p) /
                                      std::pow(std::abs(f.tnodes[m] - f.tnodes[w]),
                                               sfrac));
        }
      out.term4 = worst;
    } else {
      std::vector<double> rows(nt, 0.0);
      parallel_for(static_cast<std::size_t>(nt), [&](std::size_t mm) {
        const int m = static_cast<int>(mm);
        double acc = 0.0;
        for (int w = 0; w < nt; ++w) {
          if (w == m) continue;
          double inner = 0.0;
          for (int i = 0; i < ns; ++i)
            inner += f.weights[i] *
                     powp(g[static_cast<std::size_t>(m) * ns + i] -
                              g[static_cast<std::size_t>(w) * ns + i],
                          np.p);
          acc += f.tweights[w] *
                 powp(rootp(inner, np.p), np.q) /
                 std::pow(std::abs(f.tnodes[m] - f.tnodes[w]), 1.0 + np.q * sfrac);
        }
        rows[m] = f.tweights[m] * acc;
      });
      double s = 0.0;
      for (double r : rows) s += r;
      out.term4 = rootp(s, np.q);
    }
  }

  out.total = out.term1 + out.term2 + out.term3 + out.term4;
  return out;
}

std::pair<double, double> minkowski_check(const GridFunction& f, double p) {
  if (p < 1.0 || std::isinf(p))
    throw std::invalid_argument("minkowski_check: p in [1, inf)");
  const int ns = f.spatial_count();
  const int nt = f.time_count();

  double lhs_acc = 0.0;
  for (int i = 0; i < ns; ++i) {
    double inner = 0.0;
    for (int m = 0; m < nt; ++m) inner += f.tweights[m] * f.at(m, i);
    lhs_acc += f.weights[i] * powp(inner, p);
  }
  const double lhs = rootp(lhs_acc, p);

  double rhs = 0.0;
  for (int m = 0; m < nt; ++m) {
    double inner = 0.0;
    for (int i = 0; i < ns; ++i) inner += f.weights[i] * powp(f.at(m, i), p);
    rhs += f.tweights[m] * rootp(inner, p);
  }
  return {lhs, rhs};
}

std::string NormBreakdown::to_csv(const NormParams& np) const {
  CsvBuilder csv({"term1", "term2", "term3", "term4", "total", "r", "s", "p", "q",
                  "alpha"});
  csv.add_row({term1, term2, term3, term4, total, np.r, np.s, np.p, np.q,
               np.alpha});
  return csv.str();
}

}  // namespace heatlayer
