#include <gtest/gtest.h>

#include <cmath>

#include "czlab/error.hpp"
#include "czlab/paraproduct.hpp"
#include "czlab/probes.hpp"
#include "czlab/rng.hpp"
#include "support.hpp"

using namespace czlab;

namespace {

struct Families {
    std::shared_ptr<const ReproducingFamily> fam0;
    std::shared_ptr<const ApproxIdentity> s1, s2;
};

Families families(const Grid& g, int k_min, int k_max) {
    const GridFunction b0 = GridFunction::sample(g, [](double x) { return cplx(1.0, 0.4 * std::sin(x)); });
    const GridFunction b1 = GridFunction::sample(g, [](double x) { return cplx(1.0 + 0.3 * std::cos(0.7 * x), 0.0); });
    const GridFunction b2 = GridFunction::constant(g, 1.0);
    Families f;
    f.fam0 = build_reproducing_family(build_differences(build_approx_identity(b0, k_min, k_max)));
    f.s1 = build_approx_identity(b1, k_min, k_max);
    f.s2 = build_approx_identity(b2, k_min, k_max);
    return f;
}

GridFunction oscillating_beta(const Grid& g, double amp = 1.0) {
    return GridFunction::sample(g, [amp](double x) { return cplx(amp * std::cos(1.3 * x), amp * 0.5 * std::sin(0.4 * x)); });
}

}  // namespace

class ParaproductTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        grid_ = new Grid(8.0, 512);
        fams_ = new Families(families(*grid_, -2, 1));
        P_ = new std::shared_ptr<const Paraproduct>(build_paraproduct(fams_->fam0, fams_->s1, fams_->s2, oscillating_beta(*grid_)));
    }
    static void TearDownTestSuite() {
        delete P_;
        delete fams_;
        delete grid_;
    }
    static Grid* grid_;
    static Families* fams_;
    static std::shared_ptr<const Paraproduct>* P_;
};
Grid* ParaproductTest::grid_ = nullptr;
Families* ParaproductTest::fams_ = nullptr;
std::shared_ptr<const Paraproduct>* ParaproductTest::P_ = nullptr;

TEST_F(ParaproductTest, ZeroSymbolGivesZeroOperator) {
    const Grid& g = *grid_;
    const auto Z = build_paraproduct(fams_->fam0, fams_->s1, fams_->s2, GridFunction::zero(g));
    const GridFunction f1 = bump(0.3, 1.0).sample(g), f2 = bump(-0.2, 2.0).sample(g);
    EXPECT_EQ(lp_norm(Z->apply(f1, f2), INFINITY), 0.0);
    EXPECT_EQ(Z->carleson(), 0.0);
    const auto probes = gen_probes(ProbeSpec{"bump", 4, 0.5, 4.0, 3}, g);
    EXPECT_EQ(boundedness_ratio(*Z, 4.0, 4.0, probes), 0.0);
    const auto phis = mean_zero_bumps(Z->b0(), 3, 1.0, 5);
    const TestingReport t = verify_testing_conditions(*Z, {0.5, 1.0, 2.0}, phis);
    for (std::size_t i = 0; i < t.radii.size(); ++i) {
        EXPECT_LE(t.e0[i], 1e-10);
        EXPECT_LE(t.e1[i], 1e-10);
        EXPECT_LE(t.e2[i], 1e-10);
    }
}

TEST_F(ParaproductTest, Bilinear) {
    const Paraproduct& P = **P_;
    const Grid& g = *grid_;
    const GridFunction f1 = czlab::test::random_interior(g, 1, 5.0), g1 = czlab::test::random_interior(g, 2, 5.0);
    const GridFunction f2 = czlab::test::random_interior(g, 3, 5.0);
    const cplx c(0.7, -2.0);
    const GridFunction lhs = P.apply(f1 * c + g1, f2);
    const GridFunction rhs = P.apply(f1, f2) * c + P.apply(g1, f2);
    EXPECT_LE(lp_norm(lhs - rhs, 2.0), 1e-12 * lp_norm(lhs, 2.0));
    const GridFunction lhs2 = P.apply(f2, f1 * c + g1);
    const GridFunction rhs2 = P.apply(f2, f1) * c + P.apply(f2, g1);
    EXPECT_LE(lp_norm(lhs2 - rhs2, 2.0), 1e-12 * lp_norm(lhs2, 2.0));
}

TEST_F(ParaproductTest, TransposesAgreeWithForm) {
    const Paraproduct& P = **P_;
    const Grid& g = *grid_;
    for (std::uint64_t s = 1; s <= 3; ++s) {
        const GridFunction f0 = czlab::test::random_function(g, 10 * s), f1 = czlab::test::random_function(g, 10 * s + 1),
                           f2 = czlab::test::random_function(g, 10 * s + 2);
        const cplx v = pairing(P.apply(f1, f2), f0);
        EXPECT_LE(std::abs(pairing(P.transpose1(f0, f2), f1) - v), 1e-10 * std::abs(v));
        EXPECT_LE(std::abs(pairing(P.transpose2(f1, f0), f2) - v), 1e-10 * std::abs(v));
        EXPECT_LE(std::abs(P.form(f1, f2, f0) - v), 1e-10 * std::abs(v));
    }
}

TEST_F(ParaproductTest, LinearInSymbol) {
    const Grid& g = *grid_;
    const auto P2 = build_paraproduct(fams_->fam0, fams_->s1, fams_->s2, oscillating_beta(g, 2.0));
    const auto probes = gen_probes(ProbeSpec{"bump", 4, 0.5, 4.0, 3}, g);
    const double r1 = boundedness_ratio(**P_, 4.0, 4.0, probes), r2 = boundedness_ratio(*P2, 4.0, 4.0, probes);
    EXPECT_GT(r1, 0.0);
    EXPECT_NEAR(r2, 2 * r1, 1e-12 * r1);
    EXPECT_NEAR(P2->carleson(), 4 * (*P_)->carleson(), 1e-12 * P2->carleson());
}

TEST_F(ParaproductTest, KernelVanishesBeyondSupport) {
    const Paraproduct& P = **P_;
    // Each term has support |x - y_i| <= 2^-k + 2^-k; the coarsest scale is k_min = -2.
    const double reach = std::ldexp(1.0, 1 - P.k_min());
    EXPECT_EQ(P.kernel(-7.5, 7.5, -7.0), cplx(0.0));
    EXPECT_GT(15.0, reach);
    EXPECT_NE(P.kernel(0.0, 0.5, -0.3), cplx(0.0));
    EXPECT_THROW(P.kernel(0.01, 0.012, 0.011), InvalidArgument);
}

TEST_F(ParaproductTest, KernelMatchesEvaluator) {
    const Paraproduct& P = **P_;
    const Grid& g = *grid_;
    Rng rng(21);
    for (int t = 0; t < 10; ++t) {
        const double c1 = rng.uniform(-3, 3), c2 = rng.uniform(-3, 3), r = rng.uniform(0.3, 0.6);
        const GridFunction f1 = bump(c1, r).sample(g), f2 = bump(c2, r).sample(g);
        const double x = c1 + (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(r + 0.2, 2.0);
        const int i = g.nearest_index(x);
        cplx sum = 0.0;
        for (int j1 = 0; j1 < g.size(); ++j1) {
            if (f1[j1] == cplx(0.0)) continue;
            for (int j2 = 0; j2 < g.size(); ++j2)
                if (f2[j2] != cplx(0.0)) sum += P.kernel(g.x(i), g.x(j1), g.x(j2)) * f1[j1] * f2[j2];
        }
        sum *= g.step() * g.step();
        const cplx direct = P.apply(f1, f2)[i];
        EXPECT_LE(std::abs(sum - direct), 1e-6 * std::max(std::abs(direct), 1e-3 * lp_norm(P.apply(f1, f2), INFINITY)))
            << "triple " << t;
    }
}

TEST_F(ParaproductTest, CzSizeFitFinite) {
    const CzKernelFit fit = cz_kernel_fit(**P_, 200);
    EXPECT_GT(fit.size_constant, 0.0);
    EXPECT_TRUE(std::isfinite(fit.size_constant));
    EXPECT_TRUE(std::isfinite(fit.regularity_constant));
    EXPECT_EQ(fit.samples, 200);
}

TEST(Paraproduct, RatioStableUnderRefinement) {
    const Grid coarse(8.0, 256), fine(8.0, 512);
    auto ratio = [](const Grid& g) {
        const Families f = families(g, -2, 0);
        const auto P = build_paraproduct(f.fam0, f.s1, f.s2, oscillating_beta(g));
        return boundedness_ratio(*P, 4.0, 4.0, gen_probes(ProbeSpec{"bump", 4, 0.5, 4.0, 3}, g));
    };
    const double a = ratio(coarse), b = ratio(fine);
    EXPECT_LE(std::abs(a - b), 0.2 * b);
}

TEST(Paraproduct, RejectsMismatchedFamilies) {
    const Families a = families(Grid(8.0, 256), -2, 0);
    const Families b = families(Grid(8.0, 128), -2, -1);
    EXPECT_THROW(build_paraproduct(a.fam0, b.s1, a.s2, GridFunction::zero(Grid(8.0, 256))), InvalidArgument);
}
