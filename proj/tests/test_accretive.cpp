#include <gtest/gtest.h>

#include <cmath>

#include "czlab/accretive.hpp"
#include "czlab/curve.hpp"
#include "czlab/error.hpp"
#include "czlab/probes.hpp"
#include "support.hpp"

using namespace czlab;

namespace {

// Straight from the definition: dyadic Q, any grid-aligned R inside, no prefix sums.
double brute_para_accretivity(const GridFunction& b) {
    const int n = b.size();
    const double h = b.grid().step();
    double worst = INFINITY;
    for (int m = n; m >= 1; m /= 2)
        for (int q = 0; q < n; q += m) {
            double best = 0.0;
            for (int a = q; a < q + m; ++a)
                for (int e = a; e < q + m; ++e) {
                    cplx s = 0.0;
                    for (int i = a; i <= e; ++i) s += b[i];
                    best = std::max(best, std::abs(s) * h / (m * h));
                }
            worst = std::min(worst, best);
        }
    return worst;
}

GridFunction sin_b(const Grid& g, double amp = 0.4, double freq = 2.0) {
    return GridFunction::sample(g, [=](double x) { return cplx(1.0, amp * std::sin(freq * x)); });
}

bool interior(const Grid& g, int i, int k_min) { return std::abs(g.x(i)) <= g.half_length() - std::ldexp(1.0, -k_min); }

}  // namespace

TEST(ParaAccretivity, ConstantOne) {
    EXPECT_NEAR(para_accretivity_constant(GridFunction::constant(Grid(1.0, 64), 1.0)), 1.0, 1e-12);
}

TEST(ParaAccretivity, CurveDerivativeAtLeastOne) {
    const Grid g(2.0, 64);
    for (double lam : {0.2, 0.6}) {
        const LipschitzCurve c = LipschitzCurve::sawtooth(lam, 0.5);
        const GridFunction b = GridFunction::sample(g, [&](double x) { return c.gamma_prime(x); });
        const double c0 = para_accretivity_constant(b);
        EXPECT_GE(c0, 1.0 - 1e-12);
        EXPECT_NEAR(c0, brute_para_accretivity(b), 1e-12);
    }
}

TEST(ParaAccretivity, AlternatingSignsMatchExhaustiveScan) {
    const Grid g(1.0, 32);
    Vec v(32);
    for (int i = 0; i < 32; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
    const GridFunction b(g, v);
    const double c0 = para_accretivity_constant(b);
    EXPECT_LT(c0, 1.0);
    EXPECT_NEAR(c0, brute_para_accretivity(b), 1e-14);
    v[5] = 0.0;
    EXPECT_THROW(para_accretivity_constant(GridFunction(g, v)), NotAccretive);
}

TEST(Mollifier, NormalisedCompactEven) {
    const Grid g(2.0, 512);
    for (int k = -1; k <= finest_resolvable_scale(g); ++k) {
        const GridFunction phi = build_mollifier(g, k);
        EXPECT_NEAR(pairing(phi, GridFunction::constant(g, 1.0)).real(), 1.0, 1e-14);
        for (int i = 0; i < g.size(); ++i) {
            if (std::abs(g.x(i)) > std::ldexp(1.0, -k) / 8) EXPECT_EQ(phi[i], cplx(0.0));
            EXPECT_EQ(phi[i], phi[g.size() - 1 - i]);
        }
    }
}

TEST(Mollifier, UnresolvableScaleCarriesFinest) {
    const Grid g(2.0, 512);
    const int kf = finest_resolvable_scale(g);
    EXPECT_EQ(kf, 3);  // 2^-k / 8 >= 2h with h = 1/128
    try {
        build_mollifier(g, kf + 1);
        FAIL() << "expected ScaleUnresolvable";
    } catch (const ScaleUnresolvable& e) {
        EXPECT_EQ(e.max_scale(), kf);
    }
}

TEST(ApproxIdentity, ReproducesConstantsForOne) {
    const Grid g(4.0, 256);
    const auto S = build_approx_identity(GridFunction::constant(g, 1.0), -1, finest_resolvable_scale(g));
    const GridFunction one = GridFunction::constant(g, 1.0);
    for (int k = S->k_min; k <= S->k_max; ++k) {
        const GridFunction s1 = S->s(k).apply(one);
        for (int i = 0; i < g.size(); ++i)
            if (interior(g, i, S->k_min)) EXPECT_NEAR(std::abs(s1[i] - 1.0), 0.0, 1e-10);
    }
}

TEST(ApproxIdentity, RowSumsSupportAndSymmetry) {
    const Grid g(4.0, 256);
    const GridFunction b = sin_b(g);
    const auto S = build_approx_identity(b, -1, finest_resolvable_scale(g));
    for (int k = S->k_min; k <= S->k_max; ++k) {
        const DenseOperator& s = S->s(k);
        const GridFunction rows = s.apply(b), cols = s.transpose().apply(b);
        const Mat& c = s.coeffs();
        double asym = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            if (!interior(g, i, S->k_min)) continue;
            EXPECT_LE(std::abs(rows[i] - 1.0), 1e-8) << "k=" << k << " i=" << i;
            EXPECT_LE(std::abs(cols[i] - 1.0), 1e-8);
            for (int j = 0; j < g.size(); ++j) {
                if (interior(g, j, S->k_min) && std::abs(g.x(i) - g.x(j)) > std::ldexp(1.0, -k))
                    EXPECT_EQ(c(i, j), cplx(0.0));
                asym = std::max(asym, std::abs(c(i, j) - c(j, i)));
            }
        }
        EXPECT_LE(asym, 1e-12 * c.cwiseAbs().maxCoeff());
    }
}

TEST(ApproxIdentity, RejectsSmallAverages) {
    const Grid g(4.0, 256);
    const GridFunction step = GridFunction::sample(g, [](double x) { return cplx(x < 0 ? 1.0 : -1.0, 0.0); });
    EXPECT_THROW(build_approx_identity(step, -3, 1), NotAccretive);
    EXPECT_THROW(build_approx_identity(sin_b(g), 2, 1), InvalidArgument);
    EXPECT_THROW(build_approx_identity(sin_b(g), -1, finest_resolvable_scale(g) + 1), ScaleUnresolvable);
}

TEST(Differences, AnnihilateBAndTelescope) {
    const Grid g(4.0, 256);
    const GridFunction b = sin_b(g);
    const auto D = build_differences(build_approx_identity(b, -1, finest_resolvable_scale(g)));
    const GridFunction one = GridFunction::constant(g, 1.0);
    Mat sum = Mat::Zero(g.size(), g.size());
    for (int k = D->k_min(); k <= D->k_max(); ++k) {
        const GridFunction db = D->d(k).apply(b), dtb = D->d(k).transpose().apply(b);
        for (int i = 0; i < g.size(); ++i)
            if (interior(g, i, D->k_min())) {
                EXPECT_LE(std::abs(db[i]), 1e-8);
                EXPECT_LE(std::abs(dtb[i]), 1e-8);
            }
        sum += D->d(k).coeffs();
    }
    const Mat tele = D->approx->s(D->approx->k_max).coeffs() - D->approx->s(D->approx->k_min).coeffs();
    EXPECT_LE((sum - tele).cwiseAbs().maxCoeff(), 1e-12 * tele.cwiseAbs().maxCoeff());

    const auto D1 = build_differences(build_approx_identity(one, -1, 1));
    for (int k = D1->k_min(); k <= D1->k_max(); ++k) {
        const GridFunction d1 = D1->d(k).apply(one);
        for (int i = 0; i < g.size(); ++i)
            if (interior(g, i, D1->k_min())) EXPECT_LE(std::abs(d1[i]), 1e-12);
    }
}

class Reproducing : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        const Grid g(4.0, 256);
        b_ = new GridFunction(sin_b(g));
        fam_ = new std::shared_ptr<const ReproducingFamily>(
            build_reproducing_family(build_differences(build_approx_identity(*b_, -4, finest_resolvable_scale(g))), 1e-6));
    }
    static void TearDownTestSuite() {
        delete fam_;
        delete b_;
    }
    static GridFunction* b_;
    static std::shared_ptr<const ReproducingFamily>* fam_;
};
GridFunction* Reproducing::b_ = nullptr;
std::shared_ptr<const ReproducingFamily>* Reproducing::fam_ = nullptr;

TEST_F(Reproducing, DtildeKillsB) {
    const ReproducingFamily& fam = **fam_;
    const double nb = lp_norm(*b_, 2.0);
    for (int k = fam.differences().k_min(); k <= fam.differences().k_max(); ++k) {
        EXPECT_LE(lp_norm(fam.dtilde_apply(k, *b_), 2.0), 1e-10 * nb);
        EXPECT_LE(lp_norm(fam.dtilde_transpose_apply(k, *b_), 2.0), 0.05 * nb);
    }
}

TEST_F(Reproducing, ResidualOnMeanZeroBumps) {
    const ReproducingFamily& fam = **fam_;
    const auto probes = mean_zero_bumps(*b_, 12, 1.5, 3);
    for (const auto& p : probes) EXPECT_LE(std::abs(pairing(*b_, p)), 1e-12);
    EXPECT_LE(fam.residual(probes), 0.05);
    EXPECT_GE(fam.numerical_rank(1e-8), static_cast<int>(0.9 * (b_->size() - 1)) / 4);
}

TEST_F(Reproducing, TermsSumToReproduction) {
    const ReproducingFamily& fam = **fam_;
    const GridFunction f = mean_zero_bumps(*b_, 1, 1.5, 9).front();
    GridFunction sum = GridFunction::zero(b_->grid());
    for (int k = fam.differences().k_min(); k <= fam.differences().k_max(); ++k) sum = sum + fam.term(k, f);
    // The regularised normal equations amplify rounding by roughly 1/alpha.
    EXPECT_LE(lp_norm(sum - fam.reproduce(f), 2.0), 1e-3 * lp_norm(sum, 2.0));
}

TEST(ReproducingFamily, RejectsBadRegularisation) {
    const Grid g(4.0, 64);
    const auto D = build_differences(build_approx_identity(GridFunction::constant(g, 1.0), -3, -1));
    EXPECT_THROW(build_reproducing_family(D, 0.0), InvalidArgument);
}
