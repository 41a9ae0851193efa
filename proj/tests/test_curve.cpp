#include <gtest/gtest.h>

#include <cmath>

#include "czlab/curve.hpp"
#include "czlab/error.hpp"
#include "czlab/rng.hpp"

using namespace czlab;

namespace {

std::shared_ptr<const LipschitzCurve> curve(const std::string& kind, double lambda) {
    return std::make_shared<const LipschitzCurve>(LipschitzCurve::make(kind, lambda, 0.5));
}

AnalyticFunction constant_one() {
    AnalyticFunction f;
    f.value = [](double) { return cplx(1.0); };
    f.derivative = [](double) { return cplx(0.0); };
    return f;
}

const std::vector<double> kEps = {16.0 / 512, 8.0 / 512, 4.0 / 512, 2.0 / 512, 1.0 / 512};

}  // namespace

TEST(LipschitzCurve, SlopeCertifiedAndConsistent) {
    for (const char* kind : {"sawtooth", "s_curve"})
        for (double lam : {0.2, 0.6}) {
            const auto c = curve(kind, lam);
            EXPECT_LE(c->sampled_lambda(), lam * (1 + 1e-12)) << kind;
            EXPECT_LE(c->fit_error(), 1e-10);
            const double d = 1e-5;
            for (double x : {-1.7, -0.3, 0.0, 0.41, 1.2, 3.0}) {
                const double fd = (c->profile(x + d) - c->profile(x - d)) / (2 * d);
                EXPECT_NEAR(fd, c->slope(x), 1e-7) << kind << " x=" << x;
                EXPECT_EQ(c->gamma_prime(x).real(), 1.0);
            }
        }
    EXPECT_TRUE(LipschitzCurve::flat().is_flat());
    EXPECT_EQ(LipschitzCurve::flat().profile(2.5), 0.0);
    EXPECT_THROW(LipschitzCurve::make("sawtooth", 1.0, 0.5), InvalidArgument);
    EXPECT_THROW(LipschitzCurve::make("helix", 0.2, 0.5), InvalidArgument);
}

TEST(CurveKernels, FlatClosedForms) {
    const CurveKernels K(curve("flat", 0.0));
    Rng rng(5);
    for (int s = 0; s < 200; ++s) {
        const double x = rng.uniform(-3, 3), y1 = rng.uniform(-3, 3), y2 = rng.uniform(-3, 3);
        const double a = x - y1, b = x - y2, r2 = a * a + b * b;
        const double F = 1.0 / std::sqrt(r2), K1 = a / (r2 * std::sqrt(r2)), K2 = b / (r2 * std::sqrt(r2));
        EXPECT_NEAR(std::abs(K.potential(x, y1, y2) - F), 0.0, 1e-13 * F);
        EXPECT_NEAR(std::abs(K.kernel(1, x, y1, y2) - K1), 0.0, 1e-13 * std::abs(F * F * F * r2));
        EXPECT_NEAR(std::abs(K.kernel(2, x, y1, y2) - K2), 0.0, 1e-13 * std::abs(F * F * F * r2));
    }
    EXPECT_THROW(K.kernel(3, 0.0, 1.0, 2.0), InvalidArgument);
}

TEST(CurveKernels, SumIdentityAndSizeBound) {
    const long long v0 = branch_violations(), c0 = branch_checks();
    for (const char* kind : {"sawtooth", "s_curve"})
        for (double lam : {0.2, 0.6}) {
            const CurveKernels K(curve(kind, lam));
            Rng rng(9);
            for (int s = 0; s < 200; ++s) {
                const double x = rng.uniform(-2, 2), y1 = rng.uniform(-2, 2), y2 = rng.uniform(-2, 2);
                const cplx k1 = K.kernel(1, x, y1, y2), k2 = K.kernel(2, x, y1, y2);
                EXPECT_LE(std::abs(K.kernel0_direct(x, y1, y2) - k1 - k2), 1e-12 * (std::abs(k1) + std::abs(k2)));
            }
            const CurveKernelEstimates e = curve_kernel_estimates(K, 2000);
            EXPECT_LE(e.size, std::sqrt(2.0) * (1 + 1e-9));
            EXPECT_LE(e.identity, 1e-12);
            EXPECT_TRUE(std::isfinite(e.h_envelope));
            EXPECT_TRUE(std::isfinite(e.kernel));
            EXPECT_TRUE(std::isfinite(e.gradient));
        }
    EXPECT_EQ(branch_violations(), v0);
    EXPECT_GT(branch_checks(), c0);
}

TEST(RieszPv, ZeroInputAndMirrorParity) {
    const CurveKernels K(curve("flat", 0.0));
    const AnalyticFunction zero = bump(0.0, 1.0, 0.0), f = bump(0.0, 1.0);
    EXPECT_EQ(std::abs(riesz_pv(K, 1, zero, f, 0.2, kEps).limit), 0.0);
    // K~_1(0, y1, y2) is odd in y1; with both inputs even the truncated integrals vanish at x = 0.
    const PvReport r = riesz_pv(K, 1, f, f, 0.0, kEps);
    for (const cplx& v : r.values) EXPECT_LE(std::abs(v), 1e-10);
    EXPECT_THROW(riesz_pv(K, 1, f, f, 0.0, {0.1, 0.05}), InvalidArgument);
    EXPECT_THROW(riesz_pv(K, 1, f, f, 0.0, {0.01, 0.05, 0.1}), InvalidArgument);
}

TEST(RieszPv, AgreesWithAbsolutelyConvergentForm) {
    const AnalyticFunction f1 = bump(0.3, 1.0), f2 = bump(-0.2, 0.8);
    for (const char* kind : {"flat", "sawtooth"}) {
        const CurveKernels K(curve(kind, 0.4));
        for (int j : {1, 2})
            for (double x : {0.1, 0.5}) {
                const cplx pv = riesz_pv(K, j, f1, f2, x, kEps).limit;
                const cplx ibp = riesz_ibp(K, j, f1, f2, x);
                EXPECT_LE(std::abs(pv - ibp), 0.01 * std::abs(ibp)) << kind << " j=" << j << " x=" << x;
            }
    }
}

TEST(RieszIbp, PairingsAddUp) {
    const AnalyticFunction f0 = bump(0.1, 0.7), f1 = bump(0.3, 1.0), f2 = bump(-0.2, 0.8);
    const CurveKernels K(curve("sawtooth", 0.4));
    const cplx p0 = riesz_ibp_pairing(K, 0, f0, f1, f2);
    const cplx p1 = riesz_ibp_pairing(K, 1, f0, f1, f2), p2 = riesz_ibp_pairing(K, 2, f0, f1, f2);
    EXPECT_LE(std::abs(p0 - p1 - p2), 1e-8 * (std::abs(p1) + std::abs(p2)));
}

TEST(Cauchy, FlatTruncatedIntegralClosedForm) {
    const LipschitzCurve flat = LipschitzCurve::flat();
    const AnalyticFunction one = constant_one();
    for (double eps : {0.1, 0.01, 0.001})
        for (double x : {0.3, -0.9}) {
            const cplx exact = std::log(cplx(2.0 - x, eps) / cplx(-1.0 - x, eps));
            EXPECT_LE(std::abs(cauchy_truncated(flat, one, -1.0, 2.0, x, eps) - exact), 1e-6 * std::abs(exact));
        }
    EXPECT_THROW(cauchy_truncated(flat, one, -1.0, 2.0, 0.0, 0.0), InvalidArgument);
}

TEST(Cauchy, TruncationApproachesForwardLimit) {
    const auto c = curve("sawtooth", 0.4);
    const AnalyticFunction f = bump(0.1, 1.0);
    const cplx lim = cauchy_limit(*c, f, 0.2, false);
    const double e1 = std::abs(cauchy_truncated(*c, f, f.support_lo, f.support_hi, 0.2, 1e-2) - lim);
    const double e2 = std::abs(cauchy_truncated(*c, f, f.support_lo, f.support_hi, 0.2, 1e-4) - lim);
    EXPECT_LT(e2, e1);
    EXPECT_LE(e2, 5e-3 * std::abs(lim));
}

TEST(Cauchy, MeanZeroProbes) {
    const auto c = curve("s_curve", 0.6);
    auto moment = [&](const AnalyticFunction& f) {
        cplx s = 0.0;
        const int n = 20000;
        const double h = (f.support_hi - f.support_lo) / n;
        for (int i = 0; i < n; ++i) {
            const double x = f.support_lo + (i + 0.5) * h;
            s += f.value(x) * c->gamma_prime(x) * h;
        }
        return s;
    };
    EXPECT_LE(std::abs(moment(curve_mean_zero_probe(*c, 0.5))), 1e-8);
    EXPECT_LE(std::abs(moment(curve_dipole_probe(*c, 0.5))), 1e-8);
}

TEST(LpSweep, TransferSlackAndRejects) {
    const Grid g(4.0, 128);
    const std::vector<AnalyticFunction> probes = {bump(-0.3, 0.6), oscillation(0.0, 0.8, 5.0, 0.3)};
    const auto rows = lp_sweep("sawtooth", {0.0, 0.4}, g, 2.0, 2.0, probes);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_GT(r.ratio, 0.0);
        EXPECT_GE(r.transfer_slack, -1e-10);
    }
    EXPECT_NEAR(rows[0].normalized, 1.0, 1e-12);
    EXPECT_THROW(lp_sweep("sawtooth", {1.0}, g, 2.0, 2.0, probes), InvalidArgument);
    EXPECT_THROW(lp_sweep("sawtooth", {0.2}, g, 0.5, 2.0, probes), InvalidArgument);
    EXPECT_THROW(lp_sweep("sawtooth", {0.2}, g, 2.0, 2.0, {}), InvalidArgument);
}
