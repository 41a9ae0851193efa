#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "czlab/accretive.hpp"
#include "czlab/curve.hpp"
#include "czlab/grid.hpp"
#include "czlab/kernels.hpp"
#include "czlab/paraproduct.hpp"

namespace czlab {

using BilinearOperator = std::function<GridFunction(const GridFunction&, const GridFunction&)>;

/**
 * <T(g1, g2), g0>. Forms are given by their bilinear operator when one is available; `form` is
 * always set. The optional kernel describes the form off the triple diagonal.
 */
struct TrilinearForm {
    std::string name;
    std::function<cplx(const GridFunction&, const GridFunction&, const GridFunction&)> form;
    BilinearOperator apply;
    std::function<cplx(double x, double y1, double y2)> kernel;
    double gamma = 1.0;

    cplx operator()(const GridFunction& g1, const GridFunction& g2, const GridFunction& g0) const {
        return form(g1, g2, g0);
    }
    bool has_apply() const { return static_cast<bool>(apply); }
};

TrilinearForm form_from_operator(std::string name, BilinearOperator apply,
                                 std::function<cplx(double, double, double)> kernel = {}, double gamma = 1.0);
/// <g1 g2, g0>, kernel-free.
TrilinearForm pointwise_product_form(const Grid& grid);
TrilinearForm zero_form();
/// <P(g1, g2), g0>.
TrilinearForm paraproduct_form(std::shared_ptr<const Paraproduct> P);
/// <C~_1(g1, g2), g0> on the grid.
TrilinearForm riesz_form(std::shared_ptr<const RieszGridOperator> op);
/// T*1 with <T*1(g0, g2), g1> = <T(g1, g2), g0>, and T*2 likewise. No operator is attached.
TrilinearForm transpose1(const TrilinearForm& T);
TrilinearForm transpose2(const TrilinearForm& T);
/// T - sum of the others, with an operator when every term has one.
TrilinearForm difference(const TrilinearForm& T, const std::vector<TrilinearForm>& others);

struct FormChecks {
    double linearity = 0.0;        // worst relative defect of additivity and homogeneity in each slot
    double kernel_agreement = 0.0; // |form - kernel quadrature| / kernel quadrature of |.|, disjoint supports
    bool kernel_checked = false;
};

FormChecks check_form(const TrilinearForm& T, const Grid& grid, std::uint64_t seed = 17);

/** Normalized bump of order m: profile((x - centre)/radius) with all derivatives up to m at most 1. */
class NormalizedBump {
public:
    static constexpr int kProfiles = 5;
    static constexpr int kOrders = 3;  // m = 1, 2, 3

    NormalizedBump(double centre, double radius, int order, int profile);

    double centre() const { return centre_; }
    double radius() const { return radius_; }
    int order() const { return order_; }
    int profile() const { return profile_; }
    double operator()(double x) const;
    GridFunction sample(const Grid& grid) const;

    /// Raw profile on |t| < 1 before normalization.
    static double raw_profile(int profile, double t);
    /// max over j <= order of sup |d^j raw_profile|, computed on a fine lattice.
    static double derivative_bound(int profile, int order);
    /// sup over |t| <= 1 and j <= order of |d^j profile| after normalization; at most 1.
    double certified_bound() const;

private:
    double centre_, radius_;
    int order_, profile_;
    double scale_;
};

struct WbpReport {
    std::vector<double> radii;
    std::vector<double> constants;  // per R: max |pairing| / R over the library and centres
    double C_wbp = 0.0;
    double scatter = 0.0;           // max / min of the per-R constants
    int evaluations = 0;
};

/// Bump library: every profile and order in all three slots, plus cyclic profile triples.
WbpReport wbp_constant(const TrilinearForm& T, const GridFunction& b0, const GridFunction& b1,
                       const GridFunction& b2, const std::vector<double>& radii, const std::vector<double>& centres);

struct DisplacedReport {
    std::vector<double> separations;  // t, in units of R
    std::vector<double> constants;    // max |pairing| / R at each t
    double exponent = 0.0;            // log of constant against log(1 + t)
    int order = 1;                    // smallest bump order used
};

/// phi1 at x + tR, phi2 at x - tR, phi0 at x.
DisplacedReport displaced_bump_growth(const TrilinearForm& T, const GridFunction& b0, const GridFunction& b1,
                                      const GridFunction& b2, double R, const std::vector<double>& separations,
                                      const std::vector<double>& centres);

/**
 * theta_k(x, y1, y2) = <T(b1 s_k^{b1}(., y1), b2 s_k^{b2}(., y2)), b0 d_k^{b0}(x, .)> with columns
 * computed on demand and cached per (k, y1, y2).
 */
class ThetaExtractor {
public:
    ThetaExtractor(TrilinearForm T, std::shared_ptr<const DifferenceFamily> d0, std::shared_ptr<const ApproxIdentity> s1,
                   std::shared_ptr<const ApproxIdentity> s2);

    const Grid& grid() const { return d0_->b().grid(); }
    int k_min() const;
    int k_max() const;
    /// theta_k(., y1, y2) on the grid.
    const GridFunction& column(int k, int j1, int j2) const;
    cplx operator()(int k, double x, double y1, double y2) const;
    /// |h sum_x theta b0| / h sum_x |theta b0| at grid indices j1, j2.
    double cancellation(int k, int j1, int j2) const;
    BilinearKernelFamily family(KernelConstants declared) const;
    std::size_t cached() const;

private:
    TrilinearForm T_;
    std::shared_ptr<const DifferenceFamily> d0_;
    std::shared_ptr<const ApproxIdentity> s1_, s2_;
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

struct ThetaReport {
    double cancellation = 0.0;  // worst over the sampled interior (k, y1, y2)
    int cancellation_samples = 0;
    KernelReport kernel;
    double max_abs = 0.0;
};

ThetaReport extract_theta(const ThetaExtractor& theta, int samples, KernelConstants declared, std::uint64_t seed = 3);

struct DualBoundReport {
    double bound_ratio = 0.0;         // max over probes of S / (||f1||_p1 ||f2||_p2 ||f0||_p')
    double max_sum = 0.0;
    double x_cancellation = 0.0;      // max_k |h sum Theta_k(g1, g2) b0| / h sum |Theta_k(g1, g2) b0|
    double y_cancellation = 0.0;      // max_k ||Theta_k(b1, b2)|| / ||Theta_k||-scale
    bool hypotheses_ok = false;       // both at most 1e-4
    int triples = 0;
};

/// S(f) = sum_k |<Theta_k(b1 f1, b2 f2), b0 f0>|, with 1/p = 1/p1 + 1/p2 and p0 = p'.
DualBoundReport dual_sum_bound(const std::vector<BilinearOperator>& theta, const GridFunction& b0,
                               const GridFunction& b1, const GridFunction& b2, double p, double p1, double p2,
                               const std::vector<GridFunction>& f1s, const std::vector<GridFunction>& f2s,
                               const std::vector<GridFunction>& f0s);
/// The sum for one triple.
double dual_sum(const std::vector<BilinearOperator>& theta, const GridFunction& b0, const GridFunction& b1,
                const GridFunction& b2, const GridFunction& f1, const GridFunction& f2, const GridFunction& f0);

struct TbPairing {
    std::vector<double> radii;
    std::vector<cplx> values;   // per R, with the kernel correction
    cplx value = 0.0;           // at the last R
    double tail = 0.0;          // |last - previous|
    bool converged = false;     // tail <= tol (1 + |value|)
    cplx correction = 0.0;      // at the last R
};

/**
 * <T(b1 f1, b2 f2), b0 f0> through cutoffs eta_R over the given radii, minus the kernel
 * correction against eta_R - eta_{R0} with R0 the first radius. The correction factors through
 * h sum b0 f0 and is skipped when that vanishes.
 */
TbPairing tb_pairing(const TrilinearForm& T, const GridFunction& b0, const GridFunction& b1, const GridFunction& b2,
                     const GridFunction& f1, const GridFunction& f2, const GridFunction& f0,
                     const std::vector<double>& radii, double tol, int cutoff_variant = 0);
/// The same for many f0 at once; T(b1 f1 eta_R, b2 f2 eta_R) is formed once per R when T has an operator.
std::vector<TbPairing> tb_pairings(const TrilinearForm& T, const GridFunction& b0, const GridFunction& b1,
                                   const GridFunction& b2, const GridFunction& f1, const GridFunction& f2,
                                   const std::vector<GridFunction>& f0s, const std::vector<double>& radii, double tol,
                                   int cutoff_variant = 0);

/// <T(S~_hi f1, S~_hi f2), S~_hi f0> - <T(S~_lo ...), S~_lo f0> against the telescoped three-term
/// sum, S~_k = M_b S_k^b M_b. Returns the relative defect.
double telescoping_defect(const TrilinearForm& T, const ApproxIdentity& s0, const ApproxIdentity& s1,
                          const ApproxIdentity& s2, const GridFunction& f1, const GridFunction& f2,
                          const GridFunction& f0, int k_lo, int k_hi);

struct ReductionInputs {
    std::shared_ptr<const ReproducingFamily> fam0, fam1, fam2;  // one per b
    std::vector<GridFunction> probes0, probes1, probes2;         // b_i-mean-zero probes, at least 32 each
    std::vector<double> radii;                                   // R sweep for the testing pairings
    double tol = 1e-3;
    std::vector<GridFunction> ratio_probes;                      // for the boundedness ratios
    double p1 = 4.0, p2 = 4.0;
};

struct ReductionReport {
    explicit ReductionReport(const Grid& g)
        : beta0(GridFunction::zero(g)), beta1(GridFunction::zero(g)), beta2(GridFunction::zero(g)) {}

    GridFunction beta0, beta1, beta2;
    std::vector<cplx> t0, t1, t2;       // measured testing values of T on each probe set
    double fit_residual = 0.0;          // worst |<beta_i, b_i phi> - t| over the largest |t|
    double s_e0 = 0.0, s_e1 = 0.0, s_e2 = 0.0;  // S's testing residuals over the largest |t|
    double reproducing_residual = 0.0;  // max over the three families on their probe sets
    double ratio_T = 0.0, ratio_S = 0.0;
    bool sweeps_converged = false;
    double worst_tail = 0.0;
    TrilinearForm S;
    std::shared_ptr<const Paraproduct> L0, L1, L2;
};

ReductionReport reduce_and_test(const TrilinearForm& T, const ReductionInputs& in);

/// max over probes of |<beta_fit - beta, b0 phi>| / (h1_norm(b0 phi) bmo_norm(beta)).
double beta_roundtrip_error(const GridFunction& fitted, const GridFunction& planted, const GridFunction& b0,
                            const std::vector<GridFunction>& probes);

/// Boundedness ratio of any bilinear operator over ordered probe pairs.
double operator_ratio(const BilinearOperator& op, double p1, double p2, const std::vector<GridFunction>& probes);

}  // namespace czlab
