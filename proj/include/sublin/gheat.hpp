#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "sublin/params.hpp"
#include "sublin/test_function.hpp"

namespace sublin {

// G(a) = (sigma_hi^2 * a^+ - sigma_lo^2 * a^-) / 2.
// Nondecreasing and positively homogeneous in a.
double g_function(double a, const GParams& params);

// Space-time grid for the explicit scheme on [-L, L]. nx must be odd so
// that x = 0 is a node; dt is bounded by the monotonicity/stability limit
// 0.5*dx^2/sigma_hi^2.
struct GridSpec {
    double half_width = 6.0;
    int nx = 201;
    double t_final = 1.0;
    double dt = 0.0;
    // Number of stored time slices (first and last always kept).
    // 0 keeps every step.
    int max_slices = 129;

    static GridSpec make(double half_width, int nx, double t_final, const GParams& params,
                         int max_slices = 129);

    [[nodiscard]] double dx() const { return 2.0 * half_width / (nx - 1); }
    [[nodiscard]] long n_steps() const;
    void validate(const GParams& params) const;
};

struct GridSolution {
    GridSpec grid;
    GParams params;
    std::vector<double> xs;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  // [stored time][x]

    [[nodiscard]] double at_origin() const { return values.back()[(grid.nx - 1) / 2]; }
    void write_csv(std::ostream& os) const;  // columns t,x,u
};

// Explicit monotone finite differences for u_t = G(u_xx), u(0,.) = f.
// The second difference is taken as 0 at the two edge nodes. Throws
// "unstable step" if dt violates the scheme limit and "blow-up" if values
// stop being finite (unreachable under the limit).
GridSolution solve_gheat(const TestFunction& f, const GParams& params, const GridSpec& grid);

struct ResolutionCapError : std::runtime_error {
    ResolutionCapError(double coarse, double fine);
    double coarse_estimate;
    double fine_estimate;
};

// u(t, 0) with the grid refined (nx -> 2nx-1) until two consecutive
// resolutions agree within tol; returns the finer value. Throws
// ResolutionCapError when the refinement cap is reached first.
double g_expect(const TestFunction& f, const GParams& params, double t, double tol = 1e-4);

// Independent oracle: backward dynamic programming on a recombining
// lattice where each step picks the variance in {sigma_lo, sigma_hi}
// maximizing the one-step average. sigma_lo/sigma_hi is snapped to the
// best rational p/q with q <= 64 so that both increments live on one
// integer lattice; the acceptance ratios (1, 2/3, 1/2) are exact.
double lattice_expect(const TestFunction& f, const GParams& params, double t, int n_steps);

struct MeanCertaintyReport {
    double e_plus = 0.0;   // g_expect(f)
    double e_minus = 0.0;  // g_expect(-f)
    double gap = 0.0;      // e_plus + e_minus
    bool in_h = false;
    double eps_h = 0.0;
};

// Tests membership in H = {f : E[f(xi)] = -E[-f(xi)]} at tolerance eps_h.
// Requires eps_h >= 4*tol.
MeanCertaintyReport is_mean_certain(const TestFunction& f, const GParams& params,
                                    double eps_h = 1e-3, double tol = 1e-4);

}  // namespace sublin
