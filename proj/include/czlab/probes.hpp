#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "czlab/grid.hpp"

namespace czlab {

/** A function of one real variable with its derivative and a support interval. */
struct AnalyticFunction {
    std::function<cplx(double)> value;
    std::function<cplx(double)> derivative;
    double support_lo = -1e300;
    double support_hi = 1e300;

    cplx operator()(double x) const { return value(x); }
    GridFunction sample(const Grid& grid) const { return GridFunction::sample(grid, value); }
};

/// exp(-1/(1-t^2)) on |t| < 1.
double smooth_bump(double t);
double smooth_bump_derivative(double t);

/// amplitude * bump((x - centre)/radius).
AnalyticFunction bump(double centre, double radius, cplx amplitude = 1.0);
/// sin(freq x + phase) * bump((x - centre)/radius).
AnalyticFunction oscillation(double centre, double radius, double freq, double phase = 0.0);
/// Sum of analytic functions with coefficients.
AnalyticFunction combine(const std::vector<AnalyticFunction>& parts, const std::vector<cplx>& coeffs);
/// Random Fourier series with spectral decay m^-(delta + 1/2), windowed; Hoelder of order delta.
AnalyticFunction holder_random(double delta, double radius, int modes, std::uint64_t seed);

/**
 * Makes phi mean-zero against b by subtracting a multiple of psi:
 * phi - (<b, phi>/<b, psi>) psi. The result satisfies pairing(b, result) = 0 on the grid.
 */
GridFunction project_mean_zero(const GridFunction& b, const GridFunction& phi, const GridFunction& psi);

struct ProbeSpec {
    std::string family = "bump";  // bump | holder_random | oscillation | mean_zero_pair
    int count = 8;
    double delta = 0.5;
    double freq = 4.0;
    std::uint64_t seed = 1;
};

/// Seeded probe functions; identical parameters give identical functions on any grid.
std::vector<AnalyticFunction> probe_functions(const ProbeSpec& spec, double half_length, int modes = 256);
std::vector<GridFunction> gen_probes(const ProbeSpec& spec, const Grid& grid);
/// As above; mean_zero_pair probes are then projected to pairing(b, probe) = 0.
std::vector<GridFunction> gen_probes(const ProbeSpec& spec, const Grid& grid, const GridFunction& b);

/// Mean-zero (against b) bumps at several centres and widths, used to test reproducing formulas.
std::vector<GridFunction> mean_zero_bumps(const GridFunction& b, int count, double spread,
                                          std::uint64_t seed = 3);

/// Cutoff eta_R(x) = eta(|x|/R): 1 on [0, 1], a taper on (1, 2), 0 beyond. Variant 0 tapers with
/// cos^2, variant 1 with a smooth-bump transition.
double cutoff_profile(double t, int variant = 0);
double cutoff_profile_derivative(double t, int variant = 0);
GridFunction cutoff(const Grid& grid, double R, int variant = 0);

/// Hoelder seminorm of order delta over all pairs within distance 1 plus a far set.
double holder_seminorm(const GridFunction& f, double delta, double near_distance = 1.0);

}  // namespace czlab
