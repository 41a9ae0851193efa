#include <gtest/gtest.h>

#include <cmath>

#include "czlab/error.hpp"
#include "czlab/probes.hpp"
#include "czlab/tb.hpp"
#include "support.hpp"

using namespace czlab;

namespace {

GridFunction b_sin(const Grid& g) { return GridFunction::sample(g, [](double x) { return cplx(1.0, 0.4 * std::sin(x)); }); }
GridFunction b_cos(const Grid& g) {
    return GridFunction::sample(g, [](double x) { return cplx(1.0 + 0.3 * std::cos(0.7 * x), 0.0); });
}

struct TbSetup {
    Grid g;
    GridFunction b0, b1, b2;
    std::shared_ptr<const ReproducingFamily> fam0, fam1, fam2;
    std::shared_ptr<const Paraproduct> P;

    TbSetup(double L, int n, int k_min, int k_max)
        : g(L, n), b0(b_sin(g)), b1(b_cos(g)), b2(GridFunction::constant(g, 1.0)) {
        fam0 = build_reproducing_family(build_differences(build_approx_identity(b0, k_min, k_max)));
        fam1 = build_reproducing_family(build_differences(build_approx_identity(b1, k_min, k_max)));
        fam2 = build_reproducing_family(build_differences(build_approx_identity(b2, k_min, k_max)));
        const GridFunction beta = GridFunction::sample(g, [](double x) { return cplx(std::cos(1.3 * x), 0.2); });
        P = build_paraproduct(fam0, fam1->differences().approx, fam2->differences().approx, beta);
    }
};

}  // namespace

class TbTest : public ::testing::Test {
protected:
    static void SetUpTestSuite() { s_ = new TbSetup(4.0, 256, -3, 1); }
    static void TearDownTestSuite() { delete s_; }
    static TbSetup* s_;
};
TbSetup* TbTest::s_ = nullptr;

TEST(NormalizedBump, CertifiedAndSupported) {
    const Grid g(2.0, 512);
    for (int p = 0; p < NormalizedBump::kProfiles; ++p)
        for (int m = 1; m <= NormalizedBump::kOrders; ++m) {
            const NormalizedBump phi(0.25, 0.5, m, p);
            EXPECT_LE(phi.certified_bound(), 1.0 + 1e-12) << "profile " << p << " order " << m;
            EXPECT_GT(phi.certified_bound(), 0.0);
            EXPECT_EQ(phi(0.25 + 0.5), 0.0);
            EXPECT_EQ(phi(-0.3), 0.0);
            const GridFunction v = phi.sample(g);
            for (int i = 0; i < g.size(); ++i)
                if (std::abs(g.x(i) - 0.25) >= 0.5) EXPECT_EQ(v[i], cplx(0.0));
        }
}

TEST(Wbp, PointwiseProductBoundedBySupportLength) {
    const Grid g(4.0, 256);
    const GridFunction one = GridFunction::constant(g, 1.0);
    const WbpReport r = wbp_constant(pointwise_product_form(g), one, one, one, {0.25, 0.5, 1.0}, {0.0, 0.3});
    ASSERT_EQ(r.constants.size(), 3u);
    // |phi_i| <= 1 on an interval of length 2R.
    EXPECT_LE(r.C_wbp, 2.0 + 1e-12);
    EXPECT_GT(r.C_wbp, 0.0);
    EXPECT_LE(r.scatter, 1.5);
    EXPECT_THROW(wbp_constant(pointwise_product_form(g), one, one, one, {g.step()}, {0.0}), ScaleUnresolvable);
    EXPECT_THROW(wbp_constant(pointwise_product_form(g), one, one, one, {1.0}, {3.5}), InvalidArgument);
}

TEST(Wbp, ZeroForm) {
    const Grid g(4.0, 256);
    const GridFunction one = GridFunction::constant(g, 1.0);
    const WbpReport r = wbp_constant(zero_form(), one, one, one, {0.25, 1.0}, {0.0});
    EXPECT_EQ(r.C_wbp, 0.0);
    EXPECT_GT(r.evaluations, 0);
}

TEST(DisplacedBumps, PointwiseProductVanishesOnceSeparated) {
    const Grid g(8.0, 512);
    const GridFunction one = GridFunction::constant(g, 1.0);
    const DisplacedReport r = displaced_bump_growth(pointwise_product_form(g), one, one, one, 0.5, {0.0, 1.0, 2.0, 4.0}, {0.0});
    ASSERT_EQ(r.constants.size(), 4u);
    EXPECT_GT(r.constants[0], 0.0);
    for (std::size_t i = 1; i < r.constants.size(); ++i) EXPECT_EQ(r.constants[i], 0.0);
}

TEST_F(TbTest, ParaproductFormChecks) {
    const TrilinearForm T = paraproduct_form(s_->P);
    const FormChecks c = check_form(T, s_->g);
    EXPECT_LE(c.linearity, 1e-12);
    ASSERT_TRUE(c.kernel_checked);
    EXPECT_LE(c.kernel_agreement, 1e-6);
    const FormChecks t1 = check_form(transpose1(T), s_->g);
    EXPECT_LE(t1.linearity, 1e-12);
}

TEST_F(TbTest, TransposesPermuteSlots) {
    const TrilinearForm T = paraproduct_form(s_->P);
    const GridFunction g0 = czlab::test::random_interior(s_->g, 1, 1.5), g1 = czlab::test::random_interior(s_->g, 2, 1.5),
                       g2 = czlab::test::random_interior(s_->g, 3, 1.5);
    const cplx v = T(g1, g2, g0);
    EXPECT_LE(std::abs(transpose1(T)(g0, g2, g1) - v), 1e-12 * std::abs(v));
    EXPECT_LE(std::abs(transpose2(T)(g1, g0, g2) - v), 1e-12 * std::abs(v));
    const TrilinearForm d = difference(T, {T});
    EXPECT_TRUE(d.has_apply());
    EXPECT_LE(std::abs(d(g1, g2, g0)), 1e-12 * std::abs(v));
}

TEST_F(TbTest, WbpOfTransposesComparable) {
    const TrilinearForm T = paraproduct_form(s_->P);
    const std::vector<double> radii = {0.25, 0.5}, centres = {0.0, 0.4};
    const double c = wbp_constant(T, s_->b0, s_->b1, s_->b2, radii, centres).C_wbp;
    const double c1 = wbp_constant(transpose1(T), s_->b1, s_->b0, s_->b2, radii, centres).C_wbp;
    const double c2 = wbp_constant(transpose2(T), s_->b2, s_->b1, s_->b0, radii, centres).C_wbp;
    EXPECT_GT(c, 0.0);
    for (double x : {c1, c2}) {
        EXPECT_GT(x, c / 4);
        EXPECT_LT(x, 4 * c);
    }
}

TEST_F(TbTest, TelescopingIsExact) {
    const auto& s0 = *s_->fam0->differences().approx;
    const auto& s1 = *s_->fam1->differences().approx;
    const auto& s2 = *s_->fam2->differences().approx;
    const GridFunction f0 = czlab::test::random_function(s_->g, 4), f1 = czlab::test::random_function(s_->g, 5),
                       f2 = czlab::test::random_function(s_->g, 6);
    EXPECT_LE(telescoping_defect(paraproduct_form(s_->P), s0, s1, s2, f1, f2, f0, -3, 1), 1e-10);
    EXPECT_LE(telescoping_defect(pointwise_product_form(s_->g), s0, s1, s2, f1, f2, f0, -2, 1), 1e-10);
}

TEST(TbPairing, CutoffVariantDoesNotMatterOnceConverged) {
    const TbSetup s(16.0, 512, -3, 0);
    const TrilinearForm T = paraproduct_form(s.P);
    const GridFunction one = GridFunction::constant(s.g, 1.0);
    const std::vector<double> radii = {2.0, 4.0, 8.0};
    for (const auto& f0 : mean_zero_bumps(s.b0, 3, 0.8, 11)) {
        const TbPairing a = tb_pairing(T, s.b0, s.b1, s.b2, one, one, f0, radii, 1e-3, 0);
        const TbPairing b = tb_pairing(T, s.b0, s.b1, s.b2, one, one, f0, radii, 1e-3, 1);
        EXPECT_LE(std::abs(a.value - b.value), 0.01 * std::abs(a.value));
        EXPECT_EQ(a.correction, cplx(0.0));
    }
    EXPECT_THROW(tb_pairing(T, s.b0, s.b1, s.b2, one, one, one, {9.0}, 1e-3), InvalidArgument);
}

TEST_F(TbTest, ThetaOfZeroFormVanishes) {
    const ThetaExtractor theta(zero_form(), build_differences(s_->fam0->differences().approx), s_->fam1->differences().approx,
                               s_->fam2->differences().approx);
    for (int k = theta.k_min(); k <= theta.k_max(); ++k) EXPECT_EQ(lp_norm(theta.column(k, 100, 130), INFINITY), 0.0);
}

TEST(DualSum, ZeroAndSingleScale) {
    const Grid g(4.0, 256);
    const GridFunction b0 = b_sin(g), b1 = b_cos(g), b2 = GridFunction::constant(g, 1.0);
    const BilinearOperator prod = [](const GridFunction& a, const GridFunction& b) { return a * b; };
    const GridFunction f0 = czlab::test::random_function(g, 1), f1 = czlab::test::random_function(g, 2),
                       f2 = czlab::test::random_function(g, 3);
    EXPECT_EQ(dual_sum({prod}, b0, b1, b2, GridFunction::zero(g), f2, f0), 0.0);
    const double direct = std::abs(pairing(b1 * f1 * b2 * f2, b0 * f0));
    EXPECT_NEAR(dual_sum({prod}, b0, b1, b2, f1, f2, f0), direct, 1e-12 * direct);
    EXPECT_NEAR(dual_sum({prod, prod}, b0, b1, b2, f1, f2, f0), 2 * direct, 1e-12 * direct);
    EXPECT_THROW(dual_sum_bound({prod}, b0, b1, b2, 2.0, 4.0, 3.0, {f1}, {f2}, {f0}), InvalidArgument);
    EXPECT_THROW(dual_sum_bound({prod}, b0, b1, b2, 1.0, 2.0, 2.0, {f1}, {f2}, {f0}), InvalidArgument);
    EXPECT_NO_THROW(dual_sum_bound({prod}, b0, b1, b2, 2.0, 4.0, 4.0, {f1}, {f2}, {f0}));
}

TEST(Reduction, ZeroFormReducesToZero) {
    const TbSetup s(4.0, 128, -3, 0);
    ReductionInputs in;
    in.fam0 = s.fam0;
    in.fam1 = s.fam1;
    in.fam2 = s.fam2;
    in.probes0 = mean_zero_bumps(s.b0, 32, 1.0, 1);
    in.probes1 = mean_zero_bumps(s.b1, 32, 1.0, 2);
    in.probes2 = mean_zero_bumps(s.b2, 32, 1.0, 3);
    in.radii = {0.5, 1.0, 2.0};
    in.ratio_probes = gen_probes(ProbeSpec{"bump", 3, 0.5, 4.0, 7}, s.g);
    const ReductionReport r = reduce_and_test(zero_form(), in);
    EXPECT_EQ(lp_norm(r.beta0, INFINITY), 0.0);
    EXPECT_EQ(lp_norm(r.beta1, INFINITY), 0.0);
    EXPECT_EQ(lp_norm(r.beta2, INFINITY), 0.0);
    EXPECT_EQ(r.ratio_T, 0.0);
    EXPECT_EQ(r.ratio_S, 0.0);
    EXPECT_TRUE(r.sweeps_converged);

    in.probes0.erase(in.probes0.begin() + 8, in.probes0.end());
    EXPECT_THROW(reduce_and_test(zero_form(), in), InvalidArgument);
}
