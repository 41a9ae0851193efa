#pragma once

#include <vector>

#include "czlab/accretive.hpp"
#include "czlab/grid.hpp"

namespace czlab {

struct H1Norm {
    double value = 0.0;        // ||f||_1 + ||Hf||_1
    cplx mean = 0.0;           // integral of f
    bool mean_nonzero = false; // |mean| > 1e-6 ||f||_1: the value is then not an H^1 norm
};

H1Norm h1_norm(const GridFunction& f);

struct H1Growth {
    std::vector<int> gaps;
    std::vector<double> norms;
    double exponent = 0.0;  // e in the least-squares fit norm = a + c gap^e
    bool sublinear = false; // exponent <= 1.15
};

/// H^1 norms of Phi_j^N - c Phi_{j+g}^N with c making the grid mean zero, for g = 0..max_gap.
/// Throws ScaleUnresolvable when 2^-(j + max_gap) is below two grid cells.
H1Growth h1_growth_experiment(const Grid& grid, int j, int max_gap, double N);

/// sup over dyadic grid intervals with at least two cells of the mean oscillation.
double bmo_norm(const GridFunction& f);

/**
 * sup over dyadic I of |I|^-1 sum_{k : 2^-k <= |I|} h sum_{x in I} a_k(x), with a[i] the
 * density at scale k_min + i.
 */
double carleson_norm(const std::vector<GridFunction>& a, int k_min);

struct ConvergenceReport {
    std::vector<int> scales;
    std::vector<double> errors;
    bool monotone = false;
    double slope = 0.0;  // log2 error against k
};

/// ||S_k M_b f - f||_p for increasing k (towards_identity) or ||S_k M_b f||_p for decreasing k.
ConvergenceReport approx_identity_convergence(const ApproxIdentity& approx, const GridFunction& f, double p,
                                              bool towards_identity);

struct ReproducingConvergence {
    std::vector<int> radii;           // partial sums over |k - k_centre| <= M
    std::vector<double> l2_errors;
    bool monotone = false;
    std::vector<int> scales;
    std::vector<double> term_h1;      // H^1 norm of M_b Dt_k M_b D_k M_b phi
    int envelope_centre = 0;          // scale of the largest term; the envelope is fitted around it
    double gamma_fit = 0.0;           // from the (1 + |k - centre|) 2^{-|k - centre| gamma} envelope
};

/// Partial sums are centred at k_centre. Errors are relative to ||b phi||_2 unless that vanishes.
ReproducingConvergence reproducing_convergence(const ReproducingFamily& fam, const GridFunction& phi,
                                               int k_centre);

}  // namespace czlab
