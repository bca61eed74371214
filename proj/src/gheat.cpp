#include "sublin/gheat.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "sublin/numeric.hpp"

namespace sublin {

double g_function(double a, const GParams& params) {
    params.validate();
    if (a >= 0.0) return 0.5 * params.sigma_hi * params.sigma_hi * a;
    return 0.5 * params.sigma_lo * params.sigma_lo * a;
}

GridSpec GridSpec::make(double half_width, int nx, double t_final, const GParams& params,
                        int max_slices) {
    GridSpec g;
    g.half_width = half_width;
    g.nx = nx;
    g.t_final = t_final;
    g.max_slices = max_slices;
    const double dt_max = 0.5 * g.dx() * g.dx() / (params.sigma_hi * params.sigma_hi);
    if (t_final > 0.0) {
        const auto steps = static_cast<long>(std::ceil(t_final / dt_max - 1e-12));
        g.dt = t_final / static_cast<double>(std::max(steps, 1L));
    } else {
        g.dt = dt_max;
    }
    g.validate(params);
    return g;
}

long GridSpec::n_steps() const {
    if (t_final <= 0.0) return 0;
    return std::lround(t_final / dt);
}

void GridSpec::validate(const GParams& params) const {
    params.validate();
    if (nx < 101 || nx % 2 == 0) throw std::invalid_argument("nx must be odd and >= 101");
    if (!(half_width > 0.0)) throw std::invalid_argument("half_width must be positive");
    if (t_final < 0.0) throw std::invalid_argument("t_final must be nonnegative");
    if (half_width + 1e-12 < 6.0 * params.sigma_hi * std::sqrt(t_final))
        throw std::invalid_argument("domain too narrow: need half_width >= 6*sigma_hi*sqrt(t)");
    const double dt_max = 0.5 * dx() * dx() / (params.sigma_hi * params.sigma_hi);
    if (t_final > 0.0 && dt > dt_max * (1.0 + 1e-12)) throw std::invalid_argument("unstable step");
}

void GridSolution::write_csv(std::ostream& os) const {
    os << "t,x,u\n";
    for (std::size_t j = 0; j < times.size(); ++j)
        for (int i = 0; i < grid.nx; ++i)
            os << format_full(times[j]) << ',' << format_full(xs[i]) << ','
               << format_full(values[j][i]) << '\n';
}

GridSolution solve_gheat(const TestFunction& f, const GParams& params, const GridSpec& grid) {
    grid.validate(params);

    GridSolution sol;
    sol.grid = grid;
    sol.params = params;
    sol.xs.resize(grid.nx);
    const double dx = grid.dx();
    // nodes placed symmetrically about the center so that x = 0 is exact
    // and xs[i] == -xs[nx-1-i] bit-for-bit
    const int mid = (grid.nx - 1) / 2;
    for (int i = 0; i < grid.nx; ++i) sol.xs[i] = static_cast<double>(i - mid) * dx;

    std::vector<double> u(grid.nx);
    for (int i = 0; i < grid.nx; ++i) u[i] = f(sol.xs[i]);

    const long steps = grid.n_steps();
    long stride = 1;
    if (grid.max_slices > 1 && steps > grid.max_slices - 1)
        stride = (steps + grid.max_slices - 2) / (grid.max_slices - 1);

    sol.times.push_back(0.0);
    sol.values.push_back(u);

    const double chi = 0.5 * params.sigma_hi * params.sigma_hi;
    const double clo = 0.5 * params.sigma_lo * params.sigma_lo;
    const double inv_dx2 = 1.0 / (dx * dx);
    std::vector<double> next(grid.nx);

    for (long s = 1; s <= steps; ++s) {
        next[0] = u[0];
        next[grid.nx - 1] = u[grid.nx - 1];
        for (int i = 1; i < grid.nx - 1; ++i) {
            const double d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv_dx2;
            next[i] = u[i] + grid.dt * (d2 >= 0.0 ? chi * d2 : clo * d2);
        }
        u.swap(next);
        if (s % 1024 == 0 || s == steps) {
            for (double v : u)
                if (!std::isfinite(v)) throw std::runtime_error("blow-up");
        }
        if (s == steps || s % stride == 0) {
            sol.times.push_back(static_cast<double>(s) * grid.dt);
            sol.values.push_back(u);
        }
    }
    return sol;
}

ResolutionCapError::ResolutionCapError(double coarse, double fine)
    : std::runtime_error("resolution cap exceeded: estimates " + format_full(coarse) + " and " +
                         format_full(fine)),
      coarse_estimate(coarse),
      fine_estimate(fine) {}

namespace {

double solve_at_origin(const TestFunction& f, const GParams& params, double t, int nx) {
    const double half_width = std::max(6.0 * params.sigma_hi * std::sqrt(t), 1.0);
    const GridSpec grid = GridSpec::make(half_width, nx, t, params, 2);
    return solve_gheat(f, params, grid).at_origin();
}

}  // namespace

double g_expect(const TestFunction& f, const GParams& params, double t, double tol) {
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");
    if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
    constexpr int kMaxNx = 6401;

    int nx = 201;
    double coarse = solve_at_origin(f, params, t, nx);
    while (true) {
        const int finer_nx = 2 * nx - 1;
        const double fine = solve_at_origin(f, params, t, finer_nx);
        if (std::abs(fine - coarse) < tol) return fine;
        if (finer_nx >= kMaxNx) throw ResolutionCapError(coarse, fine);
        nx = finer_nx;
        coarse = fine;
    }
}

namespace {

// Best rational approximation p/q of r in (0,1] with q <= q_max.
void snap_ratio(double r, int q_max, int& p_out, int& q_out) {
    double best_err = 2.0;
    for (int q = 1; q <= q_max; ++q) {
        int p = static_cast<int>(std::lround(r * q));
        p = std::clamp(p, 1, q);
        const double err = std::abs(static_cast<double>(p) / q - r);
        if (err < best_err - 1e-15) {
            best_err = err;
            p_out = p;
            q_out = q;
        }
        if (best_err == 0.0) break;
    }
}

}  // namespace

double lattice_expect(const TestFunction& f, const GParams& params, double t, int n_steps) {
    params.validate();
    if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
    if (!(t > 0.0)) throw std::invalid_argument("t must be positive");

    int p = 1, q = 1;
    snap_ratio(params.sigma_lo / params.sigma_hi, 64, p, q);

    const double dt = t / n_steps;
    const double h = params.sigma_hi * std::sqrt(dt) / q;
    const long center = static_cast<long>(n_steps) * q;
    const long width = 2 * center + 1;

    std::vector<double> value(width);
    for (long j = 0; j < width; ++j) value[j] = f(static_cast<double>(j - center) * h);

    std::vector<double> next(width);
    for (int k = n_steps - 1; k >= 0; --k) {
        const long reach = static_cast<long>(k) * q;
        for (long j = center - reach; j <= center + reach; ++j) {
            const double v_lo = 0.5 * (value[j + p] + value[j - p]);
            const double v_hi = 0.5 * (value[j + q] + value[j - q]);
            next[j] = std::max(v_lo, v_hi);
        }
        value.swap(next);
    }
    return value[center];
}

MeanCertaintyReport is_mean_certain(const TestFunction& f, const GParams& params, double eps_h,
                                    double tol) {
    if (!(eps_h >= 4.0 * tol))
        throw std::invalid_argument("eps_h must be at least 4x the solver tolerance");
    MeanCertaintyReport rep;
    rep.eps_h = eps_h;
    rep.e_plus = g_expect(f, params, 1.0, tol);
    rep.e_minus = g_expect(f.negated(), params, 1.0, tol);
    rep.gap = rep.e_plus + rep.e_minus;
    rep.in_h = std::abs(rep.gap) <= eps_h;
    return rep;
}

}  // namespace sublin
