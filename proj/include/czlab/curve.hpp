#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "czlab/grid.hpp"
#include "czlab/probes.hpp"

namespace czlab {

/**
 * gamma(x) = x + i L(x) with |L'| <= lambda < 1 and L' equal to c0 outside [-compact_radius, compact_radius].
 * Inside, L is the exact antiderivative of a piecewise Chebyshev fit of L', so gamma and gamma' agree
 * to rounding.
 */
class LipschitzCurve {
public:
    LipschitzCurve(std::string kind, double lambda, double c0, double compact_radius,
                   std::function<double(double)> slope);

    static LipschitzCurve flat();
    /// L' = lambda tanh(kappa sin(omega x)) / tanh(kappa), windowed to 0 beyond 2 * plateau.
    static LipschitzCurve sawtooth(double lambda, double plateau, double omega = 2.0, double kappa = 3.0);
    /// L' = lambda/2 + (lambda/2) sin(omega x) window(x), so L' -> lambda/2 beyond 2 * plateau.
    static LipschitzCurve s_curve(double lambda, double plateau, double omega = 1.5);
    /// By name: "flat", "sawtooth" or "s_curve".
    static LipschitzCurve make(const std::string& kind, double lambda, double plateau);

    const std::string& kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double c0() const { return c0_; }
    double compact_radius() const { return compact_; }

    /// L' from the Chebyshev fit, consistent with profile() to rounding.
    double slope(double x) const;
    double profile(double x) const;
    cplx gamma(double x) const { return {x, profile(x)}; }
    cplx gamma_prime(double x) const { return {1.0, slope(x)}; }
    /// gamma(x) - gamma(y).
    cplx chord(double x, double y) const;

    /// max |L'| over a dense sample, for certifying lambda.
    double sampled_lambda(int samples = 20001) const;
    /// max |L' - d/dx L| at panel test points.
    double fit_error() const { return fit_error_; }
    bool is_flat() const { return compact_ == 0.0 && c0_ == 0.0; }

private:
    std::string kind_;
    double lambda_, c0_, compact_;
    std::function<double(double)> slope_;
    static constexpr int kDegree = 24;
    double panel_ = 1.0 / 32.0;
    std::vector<double> coeffs_;  // kDegree antiderivative coefficients per panel
    std::vector<double> dcoeffs_; // kDegree coefficients of L' per panel
    std::vector<double> base_;    // L at each panel's left end
    double fit_error_ = 0.0;
};

/** F~, K~_j and the branch-safety check on every evaluation. */
class CurveKernels {
public:
    explicit CurveKernels(std::shared_ptr<const LipschitzCurve> curve) : curve_(std::move(curve)) {}

    const LipschitzCurve& curve() const { return *curve_; }

    cplx potential(double x, double y1, double y2) const;
    /// j = 0, 1, 2. Throws BranchViolation if the square-root argument leaves the right half plane.
    cplx kernel(int j, double x, double y1, double y2) const;
    /// K~_0 from 2 gamma(x) - gamma(y1) - gamma(y2), without going through K~_1 and K~_2.
    cplx kernel0_direct(double x, double y1, double y2) const;

private:
    cplx sq(double x, double y1, double y2, cplx& c1, cplx& c2) const;
    std::shared_ptr<const LipschitzCurve> curve_;
};

/// Number of branch-safety checks performed and failed since process start.
long long branch_checks();
long long branch_violations();

/// eps gamma'(x) (F~(x, x - eps, x - eps y2) - F~(x, x + eps, x - eps y2)).
cplx h_epsilon(const CurveKernels& K, double x, double y2, double eps);

struct CurveKernelEstimates {
    double size = 0.0;        // max |F~| (|x - y1| + |x - y2|) (1 - lambda)^(1/2); at most sqrt 2
    double kernel = 0.0;      // max |K~_1| r^2 (1 - lambda)^(3/2) / ||gamma'||_inf, r^2 = (x-y1)^2 + (x-y2)^2
    double gradient = 0.0;    // max |d_y2 K~_1| r^3 (1 - lambda)^(5/2) / (3 ||gamma'||_inf^3)
    double identity = 0.0;    // max |K~_0 - K~_1 - K~_2| / (|K~_1| + |K~_2|)
    double h_envelope = 0.0;  // max |h_eps(x, y2)| (1 + |y2|)^3 (1 - lambda)^(3/2)
    int samples = 0;
};

/// Sampled constants of the size, smoothness and boundary-term bounds.
CurveKernelEstimates curve_kernel_estimates(const CurveKernels& K, int samples, std::uint64_t seed = 11);

struct PvReport {
    std::vector<double> eps;
    std::vector<cplx> values;
    cplx limit = 0.0;
    double error_estimate = 0.0;
    bool cauchy = true;  // successive differences shrink
};

/**
 * M_{gamma'} C~_j(gamma' f1, gamma' f2)(x) truncated to |x - y1|, |x - y2| > eps, for each eps, and the
 * eps -> 0 limit fitted with 1, eps log(1/eps), eps.
 */
PvReport riesz_pv(const CurveKernels& K, int j, const AnalyticFunction& f1, const AnalyticFunction& f2, double x,
                  const std::vector<double>& eps);

/// The absolutely convergent form of M_{gamma'} C~_j(gamma' f1, gamma' f2)(x), j = 1 or 2.
cplx riesz_ibp(const CurveKernels& K, int j, const AnalyticFunction& f1, const AnalyticFunction& f2, double x);
GridFunction riesz_ibp(const CurveKernels& K, int j, const AnalyticFunction& f1, const AnalyticFunction& f2,
                       const Grid& grid);

/// <C~_j(gamma' f1, gamma' f2), gamma' f0> through the absolutely convergent forms, j = 0, 1, 2.
cplx riesz_ibp_pairing(const CurveKernels& K, int j, const AnalyticFunction& f0, const AnalyticFunction& f1,
                       const AnalyticFunction& f2);

/// Truncated parameterized Cauchy integral int_a^b f(y) dy / (gamma(y) + i eps - gamma(x)).
cplx cauchy_truncated(const LipschitzCurve& c, const AnalyticFunction& f, double a, double b, double x, double eps);
/// pv int f(y) dy / (gamma(y) - gamma(x)) over the support of f.
cplx cauchy_pv(const LipschitzCurve& c, const AnalyticFunction& f, double x);
/// eps -> 0 limits: pv - i pi f(x)/gamma'(x) (forward) and -pv - i pi f(x)/gamma'(x) (transpose).
cplx cauchy_limit(const LipschitzCurve& c, const AnalyticFunction& f, double x, bool transpose);

/// phi - c psi with int gamma' (phi - c psi) = 0, both bumps centred at the origin.
AnalyticFunction curve_mean_zero_probe(const LipschitzCurve& c, double radius);
/// Same, but odd, so the first moment does not vanish.
AnalyticFunction curve_dipole_probe(const LipschitzCurve& c, double radius);

struct SweepReport {
    std::vector<double> radii;
    std::vector<double> forward;    // |pairing| / scale
    std::vector<double> transpose;
    double forward_slope = 0.0;     // log2 against log2 R
    double transpose_slope = 0.0;
    double scale = 0.0;             // int |gamma' phi|
};

/// <C~(gamma' eta_R), gamma' phi> and the transpose, for a gamma'-mean-zero phi.
SweepReport cauchy_sanity(const LipschitzCurve& c, const AnalyticFunction& phi, const std::vector<double>& radii);

struct TestingPairings {
    cplx t0 = 0.0;  // <C~1(gamma' eta, gamma' eta), gamma' phi>
    cplx t1 = 0.0;  // <C~1*1(gamma' eta, gamma' eta), gamma' phi>
    cplx t2 = 0.0;  // <C~1*2(gamma' eta, gamma' eta), gamma' phi>
};

/// The three pairings at one R, with the derivative on eta_R. Requires supp phi inside B(0, R/2).
TestingPairings riesz_testing_pairings(const CurveKernels& K, const AnalyticFunction& phi, double R,
                                       int cutoff_variant = 0);

struct FlatTestingReport {
    std::vector<double> radii;
    std::vector<double> t0, t1, t2;     // |pairing| / scale for the gamma'-mean-zero phi
    std::vector<double> riesz_control;  // max of the three pairings for the nonzero-mean phi, / its scale
    std::vector<double> control;        // |<C~(gamma' eta_R), gamma' phi>| for the nonzero-mean phi, / its scale
    double slope0 = 0.0, slope1 = 0.0, slope2 = 0.0;
    double scale = 0.0;
};

/**
 * Testing pairings of C~_1 over an R sweep. phi must be gamma'-mean-zero; phi_control has nonzero
 * mean and feeds the controls.
 */
FlatTestingReport flat_testing_conditions(const LipschitzCurve& c, const AnalyticFunction& phi,
                                          const AnalyticFunction& phi_control, const std::vector<double>& radii);

/**
 * C~_1 on a grid through its absolutely convergent form:
 * out(x_i) = -h^2 sum F~(x_i, y_j1, y_j2) d1[j1] g2[j2], where d1 is the derivative of g1 / gamma'.
 * The diagonal cell uses the cell average of F~.
 */
class RieszGridOperator {
public:
    RieszGridOperator(std::shared_ptr<const LipschitzCurve> curve, Grid grid);

    const Grid& grid() const { return grid_; }
    std::shared_ptr<const LipschitzCurve> curve() const { return curve_; }
    const GridFunction& gamma_prime() const { return gp_; }
    GridFunction apply_derivative_form(const GridFunction& d1, const GridFunction& g2) const;
    /// Central differences of g1 / gamma'.
    GridFunction apply(const GridFunction& g1, const GridFunction& g2) const;
    cplx potential(int i, int j1, int j2) const;

private:
    std::shared_ptr<const LipschitzCurve> curve_;
    Grid grid_;
    GridFunction gp_;
    std::vector<cplx> gam_;
    std::vector<double> flat_;  // F(|a|, |b|) on the lattice when the curve is flat
};

struct LpSweepRow {
    double lambda = 0.0;
    double ratio = 0.0;           // max over probes of ||T(f1, f2)||_p / (||f1||_p1 ||f2||_p2)
    double curve_ratio = 0.0;     // the same in L^p(|gamma'| dx)
    double transfer_factor = 0.0; // ||gamma'||_inf^(1/p) ||1/gamma'||_inf^(1/p)
    double transfer_slack = 0.0;  // min over probes of flat * factor - curve (>= -1e-10 required)
    double normalized = 0.0;      // ratio (1 - lambda)^(3/2) / ratio at lambda = 0
};

/// T(f1, f2) = C~_1(gamma' f1, gamma' f2) on a grid, derivatives taken from the analytic probes.
std::vector<LpSweepRow> lp_sweep(const std::string& curve_kind, const std::vector<double>& lambdas, const Grid& grid,
                                 double p1, double p2, const std::vector<AnalyticFunction>& probes);

}  // namespace czlab
