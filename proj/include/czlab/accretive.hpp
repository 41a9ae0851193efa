#pragma once

#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Cholesky>

#include "czlab/grid.hpp"

namespace czlab {

/**
 * min over dyadic grid-aligned Q of max over grid-aligned R in Q (at least
 * `min_subinterval_cells` cells) of |integral_R b| / |Q|.
 */
double para_accretivity_constant(const GridFunction& b, int min_subinterval_cells = 1);

/// Unnormalised profile exp(-1/(1-(8x)^2)) on |x| < 1/8.
double mollifier_profile(double x);

/// Finest scale k with 2^-k / 8 >= 2h.
int finest_resolvable_scale(const Grid& grid);

/// phi_k(x) = 2^k phi(2^k x) sampled at the grid points, normalised so that h sum phi_k = 1.
GridFunction build_mollifier(const Grid& grid, int k);

/**
 * Convolution with phi_k, reading f through its even reflection across +-L.
 * The operator is symmetric and reproduces constants on the whole grid.
 */
DenseOperator mollifier_operator(const Grid& grid, int k);

struct ApproxIdentity {
    GridFunction b;
    int k_min = 0;
    int k_max = 0;
    std::vector<DenseOperator> P;      // P_k, k = k_min..k_max
    std::vector<DenseOperator> S;      // S_k = P_k M_{1/P_k b} P_k
    std::vector<GridFunction> Pb;      // P_k b

    const DenseOperator& s(int k) const { return S.at(k - k_min); }
    const DenseOperator& p(int k) const { return P.at(k - k_min); }
    int scales() const { return k_max - k_min + 1; }
};

/// Default scale range: k_min = -2 and k_max the finest resolvable scale.
std::pair<int, int> default_scale_range(const Grid& grid);

std::shared_ptr<const ApproxIdentity> build_approx_identity(const GridFunction& b, int k_min, int k_max,
                                                           double eps0 = 0.1);

struct DifferenceFamily {
    std::shared_ptr<const ApproxIdentity> approx;
    std::vector<DenseOperator> D;  // D_k = S_{k+1} - S_k, k = k_min..k_max-1

    int k_min() const { return approx->k_min; }
    int k_max() const { return approx->k_max - 1; }
    const DenseOperator& d(int k) const { return D.at(k - k_min()); }
    const GridFunction& b() const { return approx->b; }
};

std::shared_ptr<const DifferenceFamily> build_differences(std::shared_ptr<const ApproxIdentity> approx);

/**
 * Reproducing family built from E = sum_k D_k M_b D_k M_b and a Tikhonov pseudo-inverse E+
 * whose range is the b-mean-zero subspace. With Dt_k = E+ D_k,
 *   sum_k M_b Dt_k M_b D_k M_b f = b f   for pairing(b, f) = 0,
 * and Dt_k(b) = Dt_k^T(b) = 0.
 */
class ReproducingFamily {
public:
    ReproducingFamily(std::shared_ptr<const DifferenceFamily> diffs, double regularization);

    const DifferenceFamily& differences() const { return *diffs_; }
    const GridFunction& b() const { return diffs_->b(); }
    const Grid& grid() const { return diffs_->b().grid(); }
    const DenseOperator& E() const { return E_; }
    double regularization() const { return alpha_; }
    double e_norm() const { return e_norm_; }

    /// E+ g and (E+)^T g on sample vectors.
    Vec pinv(const Vec& g) const;
    Vec pinv_transpose(const Vec& g) const;

    /// Dt_k f and Dt_k^T f.
    GridFunction dtilde_apply(int k, const GridFunction& f) const;
    GridFunction dtilde_transpose_apply(int k, const GridFunction& f) const;
    DenseOperator dtilde(int k) const;

    /// sum over the given scales of M_b Dt_k M_b D_k M_b f.
    GridFunction reproduce(const GridFunction& f, int k_lo, int k_hi) const;
    GridFunction reproduce(const GridFunction& f) const;
    /// One term M_b Dt_k M_b D_k M_b f.
    GridFunction term(int k, const GridFunction& f) const;

    /// max over probes of ||reproduce(f) - b f||_2 / ||b f||_2.
    double residual(const std::vector<GridFunction>& probes) const;

    /// Singular values of E above `relative` * ||E|| restricted to the b-mean-zero subspace.
    int numerical_rank(double relative) const;

private:
    std::shared_ptr<const DifferenceFamily> diffs_;
    DenseOperator E_;
    double alpha_ = 0.0;
    double e_norm_ = 0.0;
    Eigen::LLT<Mat> normal_;  // (A^H A + alpha^2 I), A = h E.coeffs
    Mat A_;
    cplx b_mass_;             // pairing(b, 1)
};

std::shared_ptr<const ReproducingFamily> build_reproducing_family(std::shared_ptr<const DifferenceFamily> diffs,
                                                                 double regularization = 1e-6);

/**
 * ||S_N M_b f - f||_delta for each N in [k_lo, k_hi] and the fitted log2 slope against N.
 */
struct HolderConvergence {
    std::vector<int> scales;
    std::vector<double> errors;
    double slope = 0.0;
};

HolderConvergence holder_convergence(const ApproxIdentity& approx, const GridFunction& f, double delta,
                                     int k_lo, int k_hi);

}  // namespace czlab
