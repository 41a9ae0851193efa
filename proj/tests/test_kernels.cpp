#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "czlab/accretive.hpp"
#include "czlab/error.hpp"
#include "czlab/fit.hpp"
#include "czlab/kernels.hpp"

using namespace czlab;

namespace {

LinearKernelFamily decay_family(double M, double half_width) {
    LinearKernelFamily f;
    f.eval = [M](int k, double x, double y) { return cplx(decay_profile(k, M, x - y)); };
    f.k_min = -2;
    f.k_max = 4;
    f.domain_lo = -half_width;
    f.domain_hi = half_width;
    f.declared = {1.0, M - 1.0, 1.0};
    return f;
}

LinearKernelFamily gaussian_family() {
    LinearKernelFamily f;
    f.eval = [](int k, double x, double y) {
        const double s = std::ldexp(1.0, k);
        return cplx(s * std::exp(-std::pow(s * (x - y), 2)), 0.0);
    };
    f.k_min = -1;
    f.k_max = 3;
    f.domain_lo = -4;
    f.domain_hi = 4;
    f.declared = {6.0, 2.0, 1.0};
    f.smooth = true;
    return f;
}

BilinearKernelFamily flat_family(double half_width) {
    BilinearKernelFamily f;
    f.eval = [](int k, double, double, double) { return cplx(std::ldexp(1.0, 2 * k), 0.0); };
    f.k_min = 0;
    f.k_max = 2;
    f.domain_lo = -half_width;
    f.domain_hi = half_width;
    f.declared = {1.0, 2.0, 1.0};
    return f;
}

}  // namespace

TEST(Halton, LowDiscrepancyUnitInterval) {
    std::set<double> seen;
    for (std::uint64_t i = 1; i < 200; ++i) {
        const double u = halton(i, 3);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
        seen.insert(u);
    }
    EXPECT_EQ(seen.size(), 199u);
}

TEST(VerifyKernel, SelfComparisonLinear) {
    const KernelReport r = verify_kernel_family(decay_family(3.0, 4.0), 2000);
    EXPECT_LE(r.A_size, 1.0 + 1e-6);
    EXPECT_GT(r.A_size, 0.99);
    EXPECT_GT(r.samples, 1000);
}

TEST(VerifyKernel, SelfComparisonBilinear) {
    BilinearKernelFamily f;
    f.eval = [](int k, double x, double y1, double y2) {
        return cplx(decay_profile(k, 3.0, x - y1) * decay_profile(k, 3.0, x - y2));
    };
    f.k_min = -1;
    f.k_max = 3;
    f.domain_lo = -4;
    f.domain_hi = 4;
    f.declared = {1.0, 2.0, 1.0};
    EXPECT_LE(verify_kernel_family(f, 2000).A_size, 1.0 + 1e-6);
}

TEST(VerifyKernel, ProductOfLpkIsBlpk) {
    const LinearKernelFamily a = gaussian_family();
    const KernelReport ra = verify_kernel_family(a, 1500);
    ASSERT_TRUE(ra.within_declared);
    EXPECT_EQ(ra.classification, "SLPK");
    EXPECT_TRUE(ra.verdicts_agree);
    const BilinearKernelFamily p = product_family(a, a);
    const KernelReport rp = verify_kernel_family(p, 1500);
    EXPECT_TRUE(rp.within_declared);
    EXPECT_NE(rp.classification.find("BLPK"), std::string::npos);
    EXPECT_LE(rp.A_fit, ra.A_fit * ra.A_fit * (1 + 1e-9) + 1e-12);
    EXPECT_TRUE(rp.verdicts_agree);
}

TEST(VerifyKernel, NonDecayingFamilyViolatesMoreOnWiderSpans) {
    const KernelReport narrow = verify_kernel_family(flat_family(1.0), 500);
    const KernelReport wide = verify_kernel_family(flat_family(64.0), 500);
    EXPECT_GT(wide.worst_violation, 10.0 * narrow.worst_violation);
    EXPECT_FALSE(wide.within_declared);
    EXPECT_EQ(wide.classification, "none");
    EXPECT_THROW(verify_kernel_family(flat_family(1.0), 4), InvalidArgument);
}

TEST(KernelAo, DiagonalValueBounded) {
    const BilinearKernelFamily f = smooth_bump_bilinear_family(-1, 6, 8.0);
    const Grid g(8.0, 2048);
    for (int j = 0; j <= 3; ++j) {
        // |theta_j(x,x,x) - theta_j(x,u,x)| <= 2^{2j} and the decay profile has unit mass.
        const double v = kernel_ao_integral(f, j, j, 0.0, 0.0, 0.0, g);
        EXPECT_GT(v, 0.0);
        EXPECT_LE(v, 1.01 * std::ldexp(1.0, 2 * j));
    }
}

TEST(KernelAo, GapZeroRefinement) {
    const BilinearKernelFamily f = smooth_bump_bilinear_family(-1, 6, 8.0);
    const double x = 0.1, y1 = 0.35, y2 = -0.2;
    const double coarse = kernel_ao_integral(f, 1, 1, x, y1, y2, Grid(8.0, 1024));
    const double fine = kernel_ao_integral(f, 1, 1, x, y1, y2, Grid(8.0, 4096));
    EXPECT_LE(std::abs(coarse - fine), 0.01 * fine);
}

TEST(KernelAo, DecaysWithGap) {
    const BilinearKernelFamily f = smooth_bump_bilinear_family(-1, 8, 8.0);
    const Grid g(8.0, 8192);
    std::vector<double> gaps, vals;
    for (int gap = 0; gap <= 6; ++gap) {
        gaps.push_back(gap);
        vals.push_back(kernel_ao_integral(f, 0, gap, 0.0, 0.2, -0.1, g));
        if (gap > 0) EXPECT_LE(vals[gap], 1.1 * vals[gap - 1]);
    }
    const double gamma = f.declared.gamma;
    EXPECT_LE(fit_log2_decay(gaps, vals, 0.0).slope, -gamma + 0.2);
}

TEST(OperatorAo, LinearDecayOnSmallGrid) {
    const Grid g(2.0, 256);
    const auto D = build_differences(build_approx_identity(GridFunction::constant(g, 1.0), -2, finest_resolvable_scale(g)));
    const AoReport r = operator_ao_decay(*D, AoMode::Linear, 3, 1.0, 4);
    ASSERT_EQ(r.norms.size(), 4u);
    for (double v : r.majorant_ratios) EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(r.norms[0], 0.0);
    EXPECT_LT(r.norms[3], r.norms[0]);
    EXPECT_LT(r.slope, 0.0);
}
