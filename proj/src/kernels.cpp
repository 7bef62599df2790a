#include "heatlayer/kernels.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "heatlayer/util.hpp"

namespace heatlayer {

namespace {

constexpr double kPi = std::numbers::pi;
// Exponents below this underflow to an exact 0 instead of a denormal trap.
constexpr double kExpClamp = -700.0;

double clamped_exp(double z) { return z < kExpClamp ? 0.0 : std::exp(z); }

void check_grid_match(const KernelTable& t, const SurfaceQuadrature& quad,
                      const TimeGrid& grid, const char* who) {
  if (t.nodes != quad.node_count() || t.steps != grid.steps ||
      std::abs(t.dt - grid.dt()) > 1e-14 * grid.dt())
    throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

}  // namespace

double gamma(const Vec& x, double t) {
  if (t <= 0.0) return 0.0;
  const int n = x.dim;
  const double pref = std::pow(4.0 * kPi * t, -0.5 * n);
  return pref * clamped_exp(-x.norm2() / (4.0 * t));
}

double gamma_derivative(const Vec& x, double t, int time_order,
                        const SpaceMultiIndex& s) {
  const int space_order = s.total();
  if (time_order < 0 || space_order < 0 || time_order + space_order > 2)
    throw std::invalid_argument(
        "gamma_derivative: only orders with r + |s| <= 2 are supported");
  for (int i = 0; i < 3; ++i)
    if (s.orders[i] > 0 && i >= x.dim)
      throw std::invalid_argument("gamma_derivative: axis outside dimension");
  if (t <= 0.0) return 0.0;

  const double g = gamma(x, t);
  const int n = x.dim;
  const double q = x.norm2() / (4.0 * t * t) - n / (2.0 * t);

  if (time_order == 0 && space_order == 0) return g;

  // Axes carrying the space derivatives (an axis may repeat).
  int ax[2] = {-1, -1};
  int pos = 0;
  for (int i = 0; i < 3; ++i)
    for (int r = 0; r < s.orders[i]; ++r) ax[pos++] = i;

  if (time_order == 0 && space_order == 1) return g * (-x[ax[0]] / (2.0 * t));
  if (time_order == 0 && space_order == 2) {
    const double delta = ax[0] == ax[1] ? 1.0 : 0.0;
    return g * (x[ax[0]] * x[ax[1]] / (4.0 * t * t) - delta / (2.0 * t));
  }
  if (time_order == 1 && space_order == 0) return g * q;
  if (time_order == 1 && space_order == 1)
    return g * x[ax[0]] * (1.0 / (2.0 * t * t) - q / (2.0 * t));
  // time_order == 2
  return g * (q * q - x.norm2() / (2.0 * t * t * t) + n / (2.0 * t * t));
}

double double_layer_kernel(const Vec& xi, const Vec& n_eta, const Vec& eta,
                           double lag) {
  if (lag <= 0.0) return 0.0;
  const Vec r = xi - eta;
  const double b = dot(r, n_eta);
  if (b == 0.0) return 0.0;
  return b / lag * gamma(r, lag);
}

double dlp_time_integral(double b, double d2, double s1, double s2, int n) {
  if (s2 <= 0.0 || s2 <= s1) return 0.0;
  if (s1 < 0.0) s1 = 0.0;
  if (b == 0.0 || d2 == 0.0) return 0.0;

  const double inf = std::numeric_limits<double>::infinity();
  const double a1 = s1 > 0.0 ? d2 / (4.0 * s1) : inf;  // a1 >= a2
  const double a2 = d2 / (4.0 * s2);

  if (n == 2) {
    // int (b/2s) Gamma_2(d,s) ds = b/(2 pi d^2) * (exp(-a2) - exp(-a1)).
    const double e2 = clamped_exp(-a2);
    double diff;
    if (std::isinf(a1))
      diff = e2;
    else
      diff = -e2 * std::expm1(a2 - a1);
    return b / (2.0 * kPi * d2) * diff;
  }
  if (n == 3) {
    // int (b/2s) Gamma_3(d,s) ds = b/(2 pi^{3/2} d^3) * (g(a1) - g(a2)),
    // g(v) = sqrt(pi)/2 erf(sqrt(v)) - sqrt(v) exp(-v)  (lower gamma(3/2, v)).
    auto lower_gamma_32 = [](double v) {
      if (std::isinf(v)) return 0.5 * std::sqrt(kPi);
      const double sv = std::sqrt(v);
      return 0.5 * std::sqrt(kPi) * std::erf(sv) - sv * clamped_exp(-v);
    };
    const double d3 = d2 * std::sqrt(d2);
    return b / (2.0 * std::pow(kPi, 1.5) * d3) *
           (lower_gamma_32(a1) - lower_gamma_32(a2));
  }
  throw std::invalid_argument("dlp_time_integral: n must be 2 or 3");
}

double sup_exponential_identity(double r) {
  if (r < 0.0) throw std::invalid_argument("sup_exponential_identity: r >= 0");
  if (r == 0.0) return 1.0;
  return std::exp(r * std::log(r) - r);
}

KernelTable build_kernel_table(const SurfaceQuadrature& quad, const TimeGrid& grid,
                               int dim) {
  if (dim != 2 && dim != 3)
    throw std::invalid_argument("build_kernel_table: n must be 2 or 3");
  const int M = quad.node_count();
  const int K = grid.steps;
  const double dt = grid.dt();

  KernelTable t;
  t.level = 1;
  t.dim = dim;
  t.nodes = M;
  t.steps = K;
  t.dt = dt;
  t.values.assign(static_cast<std::size_t>(M) * M * K, 0.0);
  t.interval_integrals.assign(static_cast<std::size_t>(M) * M * K, 0.0);

  std::vector<double> sups(M, 0.0);
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    double sup = 0.0;
    for (int j = 0; j < M; ++j) {
      const Vec r = quad.nodes[i] - quad.nodes[j];
      const double b = dot(r, quad.normals[j]);
      const double d2 = r.norm2();
      for (int k = 0; k < K; ++k) {
        const double lag = (k + 0.5) * dt;
        double v = 0.0;
        if (d2 > 0.0 && b != 0.0) v = b / lag * gamma(r, lag);
        t.values[(static_cast<std::size_t>(i) * M + j) * K + k] = v;
        sup = std::max(sup, std::abs(v));
        // The BIE kernel N is twice the representation kernel.
        t.interval_integrals[(static_cast<std::size_t>(k) * M + i) * M + j] =
            2.0 * dlp_time_integral(b, d2, k * dt, (k + 1) * dt, dim);
      }
      if (j == i) {
        // The lag integral over [0, dt] keeps a finite diagonal limit:
        // (b/d^2) -> diag_ratio while exp(-d^2/4s)|_{s=dt} -> 1, so the n = 2
        // entry is diag_ratio/pi. On a 2-surface the integrated kernel behaves
        // like diag_ratio/(2 pi d); the diagonal cell of radius sqrt(w/pi)
        // carries diag_ratio * sqrt(w/pi), spread over the cell weight.
        const double c = quad.diag_ratio[i];
        t.interval_integrals[static_cast<std::size_t>(i) * M + i] =
            dim == 2 ? c / kPi : c / std::sqrt(kPi * quad.weights[i]);
      }
    }
    sups[i] = sup;
  });
  for (double s : sups) t.sup_norm = std::max(t.sup_norm, s);
  return t;
}

KernelTable iterate_kernel(const KernelTable& prev, const KernelTable& base,
                           const SurfaceQuadrature& quad, const TimeGrid& grid) {
  check_grid_match(prev, quad, grid, "iterate_kernel(prev)");
  check_grid_match(base, quad, grid, "iterate_kernel(base)");
  if (base.level != 1)
    throw std::invalid_argument("iterate_kernel: base must be the level-1 table");
  if (prev.dim != base.dim)
    throw std::invalid_argument("iterate_kernel: dimension mismatch");

  const int M = prev.nodes;
  const int K = prev.steps;
  const double dt = prev.dt;
  const int n = prev.dim;

  KernelTable next;
  next.level = prev.level + 1;
  next.dim = n;
  next.nodes = M;
  next.steps = K;
  next.dt = dt;
  next.values.assign(static_cast<std::size_t>(M) * M * K, 0.0);

  // Fresh kernel matrices at integer lags b*dt (b = 1..K) and at dt/4,
  // plus the weighted previous-level slices G_a[alpha, j] = w_alpha * N_prev.
  std::vector<double> fresh(static_cast<std::size_t>(K + 1) * M * M, 0.0);
  std::vector<double> fresh_quarter(static_cast<std::size_t>(M) * M, 0.0);
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int a = 0; a < M; ++a) {
      for (int bidx = 1; bidx <= K; ++bidx)
        fresh[(static_cast<std::size_t>(bidx) * M + i) * M + a] =
            double_layer_kernel(quad.nodes[i], quad.normals[a], quad.nodes[a],
                                bidx * dt);
      fresh_quarter[static_cast<std::size_t>(i) * M + a] = double_layer_kernel(
          quad.nodes[i], quad.normals[a], quad.nodes[a], 0.25 * dt);
    }
  });

  std::vector<double> gpack(static_cast<std::size_t>(K) * M * M);
  for (int a = 0; a < K; ++a)
    for (int al = 0; al < M; ++al)
      for (int j = 0; j < M; ++j)
        gpack[(static_cast<std::size_t>(a) * M + al) * M + j] =
            quad.weights[al] * prev.value(al, j, a);

  std::vector<double> sups(M, 0.0);
  std::vector<double> gq(static_cast<std::size_t>(M) * M);
  for (int k = 0; k < K; ++k) {
    // Previous-level kernel interpolated to lag (k + 1/4) dt.
    for (int al = 0; al < M; ++al)
      for (int j = 0; j < M; ++j)
        gq[static_cast<std::size_t>(al) * M + j] =
            quad.weights[al] * (k >= 1 ? 0.25 * prev.value(al, j, k - 1) +
                                             0.75 * prev.value(al, j, k)
                                       : prev.value(al, j, 0));

    parallel_for(static_cast<std::size_t>(M), [&](std::size_t ii) {
      const int i = static_cast<int>(ii);
      std::vector<double> acc(M, 0.0);
      for (int a = 0; a < k; ++a) {
        const double* frow = &fresh[(static_cast<std::size_t>(k - a) * M + i) * M];
        const double* g = &gpack[static_cast<std::size_t>(a) * M * M];
        for (int al = 0; al < M; ++al) {
          const double f = frow[al];
          if (f == 0.0) continue;
          const double* grow = &g[static_cast<std::size_t>(al) * M];
          for (int j = 0; j < M; ++j) acc[j] += f * grow[j];
        }
      }
      for (int j = 0; j < M; ++j) acc[j] *= dt;
      const double* fq = &fresh_quarter[static_cast<std::size_t>(i) * M];
      for (int al = 0; al < M; ++al) {
        const double f = 0.5 * dt * fq[al];
        if (f == 0.0) continue;
        const double* grow = &gq[static_cast<std::size_t>(al) * M];
        for (int j = 0; j < M; ++j) acc[j] += f * grow[j];
      }
      double sup = sups[i];
      for (int j = 0; j < M; ++j) {
        next.values[(static_cast<std::size_t>(i) * M + j) * K + k] = acc[j];
        sup = std::max(sup, std::abs(acc[j]));
      }
      sups[i] = sup;
    });
  }
  for (double s : sups) next.sup_norm = std::max(next.sup_norm, s);
  return next;
}

DensityField apply_causal_operator(const KernelTable& level1,
                                   const SurfaceQuadrature& quad,
                                   const TimeGrid& grid, const DensityField& f) {
  check_grid_match(level1, quad, grid, "apply_causal_operator");
  if (level1.level != 1)
    throw std::invalid_argument("apply_causal_operator: needs the level-1 table");
  if (f.nodes != level1.nodes || f.steps != level1.steps)
    throw std::invalid_argument("apply_causal_operator: field grid mismatch");

  const int M = level1.nodes;
  const int K = level1.steps;

  // Endpoint-averaged density per subinterval, with the surface weight folded in.
  std::vector<double> favg(static_cast<std::size_t>(K) * M);
  for (int a = 0; a < K; ++a)
    for (int j = 0; j < M; ++j)
      favg[static_cast<std::size_t>(a) * M + j] =
          0.5 * (f.at(a, j) + f.at(a + 1, j)) * quad.weights[j];

  DensityField out = DensityField::zeros(M, K, f.dt);
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int m = 1; m <= K; ++m) {
      double acc = 0.0;
      for (int a = 0; a < m; ++a) {
        const int k = m - 1 - a;
        const double* trow =
            &level1.interval_integrals[(static_cast<std::size_t>(k) * M + i) * M];
        const double* frow = &favg[static_cast<std::size_t>(a) * M];
        double s = 0.0;
        for (int j = 0; j < M; ++j) s += trow[j] * frow[j];
        acc += s;
      }
      out.at(m, i) = acc;
    }
  });
  return out;
}

DensityField iterated_rhs(const DensityField& g, const KernelTable& level1,
                          const SurfaceQuadrature& quad, const TimeGrid& grid,
                          int level) {
  if (level < 1) throw std::invalid_argument("iterated_rhs: level must be >= 1");
  DensityField gl = g;
  for (int j = 2; j <= level; ++j) {
    DensityField a = apply_causal_operator(level1, quad, grid, gl);
    gl = g;
    gl += a;
  }
  return gl;
}

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((u >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b), 8);
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void dump_kernel_table(const KernelTable& table, std::ostream& out) {
  out.write("HLKT", 4);
  put_u32(out, 1);  // version
  put_u32(out, static_cast<std::uint32_t>(table.dim));
  put_u32(out, static_cast<std::uint32_t>(table.level));
  put_u32(out, static_cast<std::uint32_t>(table.nodes));
  put_u32(out, static_cast<std::uint32_t>(table.steps));
  for (double v : table.values) put_f64(out, v);
}

void dump_kernel_table(const KernelTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  dump_kernel_table(table, out);
}

KernelTable load_kernel_table(std::istream& in) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "HLKT")
    throw std::runtime_error("load_kernel_table: bad magic");
  const std::uint32_t version = get_u32(in);
  if (version != 1) throw std::runtime_error("load_kernel_table: bad version");
  KernelTable t;
  t.dim = static_cast<int>(get_u32(in));
  t.level = static_cast<int>(get_u32(in));
  t.nodes = static_cast<int>(get_u32(in));
  t.steps = static_cast<int>(get_u32(in));
  t.values.resize(static_cast<std::size_t>(t.nodes) * t.nodes * t.steps);
  for (double& v : t.values) v = get_f64(in);
  if (!in) throw std::runtime_error("load_kernel_table: truncated file");
  for (double v : t.values) t.sup_norm = std::max(t.sup_norm, std::abs(v));
  return t;
}

KernelTable load_kernel_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return load_kernel_table(in);
}

}  // namespace heatlayer
