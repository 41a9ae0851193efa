#pragma once

#include <memory>
#include <vector>

#include "czlab/accretive.hpp"
#include "czlab/grid.hpp"
#include "czlab/kernels.hpp"

namespace czlab {

/**
 * L(f1, f2) = sum_k D_k M_{b0}[beta_k (S_k^{b1} f1)(S_k^{b2} f2)],  beta_k = Dt_k^T M_{b0} beta,
 * summed over the scales of the b0 difference family.
 */
class Paraproduct {
public:
    Paraproduct(std::shared_ptr<const ReproducingFamily> fam0, std::shared_ptr<const ApproxIdentity> s1,
                std::shared_ptr<const ApproxIdentity> s2, GridFunction beta);

    const Grid& grid() const { return beta_.grid(); }
    int k_min() const { return fam0_->differences().k_min(); }
    int k_max() const { return fam0_->differences().k_max(); }
    const GridFunction& b0() const { return fam0_->b(); }
    const GridFunction& b1() const { return s1_->b; }
    const GridFunction& b2() const { return s2_->b; }
    const GridFunction& beta() const { return beta_; }
    const ReproducingFamily& family() const { return *fam0_; }
    const GridFunction& beta_k(int k) const { return beta_k_.at(k - k_min()); }
    /// Carleson norm of the densities |beta_k|^2.
    double carleson() const { return carleson_; }

    GridFunction apply(const GridFunction& f1, const GridFunction& f2) const;
    /// <L(f1, f2), f0> = <L*1(f0, f2), f1> = <L*2(f1, f0), f2>.
    GridFunction transpose1(const GridFunction& f0, const GridFunction& f2) const;
    GridFunction transpose2(const GridFunction& f1, const GridFunction& f0) const;
    cplx form(const GridFunction& f1, const GridFunction& f2, const GridFunction& f0) const;

    /// One scale of the kernel, read off at the nearest grid points.
    cplx kernel_term(int k, double x, double y1, double y2) const;
    /// Sum over scales. Throws InvalidArgument when x, y1, y2 share one grid cell.
    cplx kernel(double x, double y1, double y2) const;

private:
    std::shared_ptr<const ReproducingFamily> fam0_;
    std::shared_ptr<const ApproxIdentity> s1_, s2_;
    GridFunction beta_;
    std::vector<GridFunction> beta_k_;
    std::vector<Vec> weight_;  // b0 * beta_k
    double carleson_ = 0.0;
};

std::shared_ptr<const Paraproduct> build_paraproduct(std::shared_ptr<const ReproducingFamily> fam0,
                                                     std::shared_ptr<const ApproxIdentity> s1,
                                                     std::shared_ptr<const ApproxIdentity> s2,
                                                     const GridFunction& beta);

/// The per-scale kernels l_k as a bilinear family for verify_kernel_family.
BilinearKernelFamily paraproduct_kernel_terms(std::shared_ptr<const Paraproduct> P, KernelConstants declared);

struct CzKernelFit {
    double size_constant = 0.0;        // max |l| (|x - y1| + |x - y2|)^2
    double regularity_constant = 0.0;  // max |l(x) - l(x')| (|x - y1| + |x - y2|)^(2 + gamma) / |x - x'|^gamma
    double gamma = 1.0;
    int samples = 0;
};

/// Size and regularity constants of the summed kernel over Halton triples at least `min_cells` cells apart.
CzKernelFit cz_kernel_fit(const Paraproduct& P, int n_samples, double gamma = 1.0, int min_cells = 4);

struct TestingReport {
    std::vector<double> radii;
    std::vector<double> e0;       // max over probes |<L(b1 eta, b2 eta), b0 phi> - <beta, b0 phi>|
    std::vector<double> e0_rel;   // the same divided by |<beta, b0 phi>|
    std::vector<double> e1;       // max over probes |<L*1(b0 eta, b2 eta), b1 phi>|
    std::vector<double> e2;       // max over probes |<L*2(b1 eta, b0 eta), b2 phi>|
    bool e0_decreasing = false;
    double slope1 = 0.0;          // log2 e1 against log2 R over values above the floor
    double slope2 = 0.0;
    bool e1_vanished = false;     // reached the round-off floor at some R
    bool e2_vanished = false;
};

/**
 * Testing conditions with cutoffs eta_R. Each probe is made mean-zero against the relevant b by
 * subtracting a multiple of a unit bump at the origin. Requires 2R <= L.
 */
TestingReport verify_testing_conditions(const Paraproduct& P, const std::vector<double>& radii,
                                        const std::vector<GridFunction>& probes, int cutoff_variant = 0);

/// max over ordered probe pairs of ||L(f1, f2)||_p / (||f1||_p1 ||f2||_p2) with 1/p = 1/p1 + 1/p2.
double boundedness_ratio(const Paraproduct& P, double p1, double p2, const std::vector<GridFunction>& probes);

}  // namespace czlab
