#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "czlab/accretive.hpp"
#include "czlab/grid.hpp"

namespace czlab {

struct KernelConstants {
    double A = 1.0;
    double N = 2.0;
    double gamma = 1.0;
};

/// Decay exponent reported when no sampled tail value is above round-off (compact support).
inline constexpr double kCompactDecay = 64.0;

/**
 * Linear family theta_k(x, y). The evaluator may be analytic or read off a grid; `step` is the
 * smallest meaningful displacement (the grid step for grid families, 0 for analytic ones).
 */
struct LinearKernelFamily {
    std::function<cplx(int k, double x, double y)> eval;
    int k_min = 0;
    int k_max = 0;
    double domain_lo = -1.0;
    double domain_hi = 1.0;
    double step = 0.0;
    KernelConstants declared;
    bool smooth = false;  // also check regularity in x
};

/** Bilinear family theta_k(x, y1, y2). */
struct BilinearKernelFamily {
    std::function<cplx(int k, double x, double y1, double y2)> eval;
    int k_min = 0;
    int k_max = 0;
    double domain_lo = -1.0;
    double domain_hi = 1.0;
    double step = 0.0;
    KernelConstants declared;
    bool smooth = false;
};

struct KernelReport {
    double A_size = 0.0;
    double A_regularity = 0.0;    // in the y variables
    double A_x_regularity = 0.0;  // only for smooth families
    double A_fit = 0.0;
    double N_fit = 0.0;           // fitted decay exponent minus the declared gamma
    double gamma_fit = 0.0;
    double worst_violation = 0.0; // A_fit / declared A
    bool within_declared = false;
    double alt_A_fit = 0.0;       // constant in the flat alternative conditions
    bool alt_forward = false;     // alternative constant within 2 A_fit
    bool alt_backward = false;    // converted constants recover the original conditions
    bool verdicts_agree = false;
    std::string classification;   // LPK, SLPK, BLPK or SBLPK when the fit succeeds
    int samples = 0;
};

KernelReport verify_kernel_family(const LinearKernelFamily& fam, int n_samples, std::uint64_t seed = 1);
KernelReport verify_kernel_family(const BilinearKernelFamily& fam, int n_samples, std::uint64_t seed = 1);

/// Halton low-discrepancy coordinate.
double halton(std::uint64_t index, int base);

/// theta_k = D_k read off a difference family.
LinearKernelFamily difference_kernel_family(const DifferenceFamily& D, KernelConstants declared);
/// theta_k(x, y1, y2) = h sum_u d_k(x, u) b(u) s_k(u, y1) s_k(u, y2).
BilinearKernelFamily paraproduct_kernel_family(const DifferenceFamily& D, KernelConstants declared);
/// Analytic smoothed-bump family 2^{2k} psi(2^k(x - y1)) psi(2^k(x - y2)).
BilinearKernelFamily smooth_bump_bilinear_family(int k_min, int k_max, double half_width);
/// Product of two linear families, theta(x, y1, y2) = a_k(x, y1) c_k(x, y2).
BilinearKernelFamily product_family(const LinearKernelFamily& a, const LinearKernelFamily& c);

/// int |theta_j(x, y1, y2) - theta_j(x, u, y2)| Phi_k^{N+gamma}(u - y1) du on the grid.
double kernel_ao_integral(const BilinearKernelFamily& fam, int j, int k, double x, double y1, double y2,
                          const Grid& grid);

enum class AoMode { Linear, AdjointBilinear, Bilinear };

struct AoReport {
    std::vector<int> gaps;
    std::vector<double> norms;              // largest operator norm at each gap
    std::vector<double> majorant_ratios;    // largest |output| / maximal-function majorant
    double slope = 0.0;                     // log2 norm against gap
    double gamma_fit = 0.0;
    bool passes = false;                    // slope <= -gamma_fit + 0.2
};

/**
 * Almost-orthogonality decay for Theta_j = D_j (linear) or the paraproduct-type bilinear family
 * Theta_j(f1, f2) = D_j M_b[(S_j f1)(S_j f2)], against Lambda_k = D_k.
 */
AoReport operator_ao_decay(const DifferenceFamily& D, AoMode mode, int max_gap, double gamma_fit,
                           int probes = 6, std::uint64_t seed = 5);

}  // namespace czlab
