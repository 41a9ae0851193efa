#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "czlab/error.hpp"
#include "czlab/grid.hpp"
#include "support.hpp"

using namespace czlab;
using czlab::test::random_function;
using czlab::test::random_interior;

TEST(Grid, MidpointNodesAvoidZero) {
    const Grid g(1.0, 64);
    EXPECT_DOUBLE_EQ(g.step(), 2.0 / 64);
    EXPECT_DOUBLE_EQ(g.x(0), -1.0 + g.step() / 2);
    for (int i = 0; i < g.size(); ++i) EXPECT_NE(g.x(i), 0.0);
    EXPECT_EQ(g.nearest_index(g.x(17) + 0.2 * g.step()), 17);
}

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(Grid(1.0, 100), InvalidArgument);
    EXPECT_THROW(Grid(-1.0, 64), InvalidArgument);
    const Grid g(1.0, 8);
    Vec v = Vec::Zero(8);
    v[3] = cplx(std::nan(""), 0.0);
    EXPECT_THROW(GridFunction(g, v), InvalidArgument);
    EXPECT_THROW(GridFunction(g, Vec::Zero(4)), InvalidArgument);
}

TEST(LpNorm, ConstantOnUnitInterval) {
    const Grid g(1.0, 256);
    EXPECT_NEAR(lp_norm(GridFunction::constant(g, 1.0), 2.0), std::sqrt(2.0), 1e-12);
    EXPECT_EQ(lp_norm(GridFunction::zero(g), 3.0), 0.0);
    EXPECT_THROW(lp_norm(GridFunction::zero(g), 0.5), InvalidArgument);
}

TEST(LpNorm, MatchesDirectRiemannSum) {
    const Grid g(3.0, 512);
    const GridFunction f = random_function(g, 11);
    long double acc = 0.0L;
    long double top = 0.0L;
    for (int i = g.size() - 1; i >= 0; --i) {
        const long double a = std::hypot(f[i].real(), f[i].imag());
        acc += a * a * a;
        top = std::max(top, a);
    }
    const double oracle = static_cast<double>(std::cbrt(acc * g.step()));
    EXPECT_NEAR(lp_norm(f, 3.0), oracle, 1e-12 * oracle);
    EXPECT_DOUBLE_EQ(lp_norm(f, INFINITY), static_cast<double>(top));
}

TEST(Pairing, BilinearNoConjugation) {
    const Grid g(1.0, 128);
    EXPECT_NEAR(std::abs(pairing(GridFunction::constant(g, 1.0), GridFunction::constant(g, 1.0)) - 2.0), 0.0, 1e-12);
    const GridFunction odd = GridFunction::sample(g, [](double x) { return cplx(x * std::exp(-x * x), 0.0); });
    const GridFunction even = GridFunction::sample(g, [](double x) { return cplx(std::cos(3 * x), x * x); });
    EXPECT_LT(std::abs(pairing(odd, even)), 1e-12);
    const GridFunction f = random_function(g, 1), h = random_function(g, 2);
    EXPECT_EQ(pairing(f, h), pairing(h, f));
    const GridFunction i1 = GridFunction::constant(g, cplx(0.0, 1.0));
    EXPECT_NEAR(std::abs(pairing(i1, i1) + 2.0), 0.0, 1e-12);
    EXPECT_THROW(pairing(f, GridFunction::zero(Grid(1.0, 64))), InvalidArgument);
}

TEST(Pairing, MidpointRuleOrders) {
    // Polynomial times the indicator of the domain: exact to O(h) (in fact O(h^2) for the midpoint rule).
    auto poly_error = [](int n) {
        const Grid g(1.0, n);
        const GridFunction f = GridFunction::sample(g, [](double x) { return cplx(x * x * x + x * x, 0.0); });
        return std::abs(pairing(f, GridFunction::constant(g, 1.0)) - 2.0 / 3.0);
    };
    EXPECT_LT(poly_error(64), 2.0 / 64);
    // Smooth compactly supported: O(h^2) and no worse.
    auto bump_error = [](int n) {
        const Grid g(2.0, n);
        const GridFunction f = GridFunction::sample(g, [](double x) { return cplx(std::pow(std::cos(M_PI * x / 4), 4), 0.0); });
        return std::abs(lp_norm(f, 2.0) * lp_norm(f, 2.0) - 35.0 / 32.0);
    };
    EXPECT_LT(bump_error(64), 1e-10);  // periodic smooth integrand: the midpoint rule is spectrally exact
    EXPECT_LT(poly_error(128), poly_error(64) / 3.5);
}

TEST(Convolve, GaussiansAddVariances) {
    const Grid g(8.0, 1024);
    const double s1 = 0.5, s2 = 0.7;
    auto gauss = [](double s) {
        return [s](double x) { return cplx(std::exp(-x * x / (2 * s * s)) / std::sqrt(2 * M_PI * s * s), 0.0); };
    };
    const GridFunction c = convolve(GridFunction::sample(g, gauss(s1)), GridFunction::sample(g, gauss(s2)));
    const GridFunction exact = GridFunction::sample(g, gauss(std::hypot(s1, s2)));
    EXPECT_LT(lp_norm(c - exact, 2.0), 1e-6);
    EXPECT_EQ(lp_norm(convolve(GridFunction::zero(g), GridFunction::sample(g, gauss(s1))), INFINITY), 0.0);
}

TEST(Convolve, NarrowBumpIsApproximateIdentity) {
    const Grid g(4.0, 512);
    const double r = 4 * g.step();
    GridFunction phi = GridFunction::sample(g, [r](double x) {
        const double t = x / r;
        return cplx(std::abs(t) < 1 ? std::exp(-1 / (1 - t * t)) : 0.0, 0.0);
    });
    phi = phi * (1.0 / pairing(phi, GridFunction::constant(g, 1.0)));
    const GridFunction f = GridFunction::sample(g, [](double x) { return cplx(std::abs(x - 0.3) + std::sin(x), 0.0); });
    const GridFunction c = convolve(f, phi);
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i)
        if (std::abs(g.x(i)) < 3.0) worst = std::max(worst, std::abs(c[i] - f[i]));
    EXPECT_LE(worst, 2.0 * r);  // Lipschitz constant 2, mass within r
}

TEST(Hilbert, CauchyDensityClosedForm) {
    const Grid g(64.0, 2048);
    const GridFunction f = GridFunction::sample(g, [](double x) { return cplx(1 / (1 + x * x), 0.0); });
    const GridFunction hf = hilbert_transform(f);
    double worst = 0.0;
    for (int i = 0; i < g.size(); ++i) {
        const double x = g.x(i);
        worst = std::max(worst, std::abs(hf[i] - x / (1 + x * x)));
    }
    EXPECT_LE(worst, 1e-3);
    EXPECT_EQ(lp_norm(hilbert_transform(GridFunction::zero(g)), INFINITY), 0.0);
}

TEST(Hilbert, SquareIsMinusIdentityOnMeanZero) {
    // Mean zero keeps the 1/x tail of Hf, which the finite grid cuts off, out of the way.
    const Grid g(32.0, 2048);
    const GridFunction f = GridFunction::sample(g, [](double x) { return cplx(x * std::exp(-x * x), 0.0); });
    const GridFunction hhf = hilbert_transform(hilbert_transform(f));
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.size(); ++i)
        if (std::abs(g.x(i)) < 16.0) {
            num += std::norm(hhf[i] + f[i]);
            den += std::norm(f[i]);
        }
    EXPECT_LE(std::sqrt(num / den), 1e-2);
}

TEST(Hilbert, Antisymmetry) {
    const Grid g(8.0, 512);
    for (std::uint64_t s = 1; s <= 4; ++s) {
        const GridFunction f = random_interior(g, s, 4.0), h = random_interior(g, 100 + s, 4.0);
        const cplx a = pairing(hilbert_transform(f), h), b = pairing(f, hilbert_transform(h));
        EXPECT_LE(std::abs(a + b), 1e-10 * std::abs(a));
    }
}

TEST(Hilbert, Linear) {
    const Grid g(4.0, 256);
    const GridFunction f = random_interior(g, 3, 2.0), h = random_interior(g, 4, 2.0);
    const cplx c(0.3, -1.7);
    const GridFunction lhs = hilbert_transform(f * c + h);
    const GridFunction rhs = hilbert_transform(f) * c + hilbert_transform(h);
    EXPECT_LE(lp_norm(lhs - rhs, 2.0), 1e-12 * lp_norm(lhs, 2.0));
}

namespace {

// Every grid-aligned interval containing cell i.
std::vector<double> brute_maximal(const GridFunction& f) {
    const int n = f.size();
    std::vector<double> out(n, 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            double s = 0.0;
            for (int j = a; j <= b; ++j) s += std::abs(f[j]);
            for (int i = a; i <= b; ++i) out[i] = std::max(out[i], s / (b - a + 1));
        }
    return out;
}

}  // namespace

TEST(Maximal, ConstantAndBounds) {
    const Grid g(2.0, 64);
    const GridFunction c = maximal_function(GridFunction::constant(g, cplx(0.0, -2.5)));
    for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(c[i].real(), 2.5, 1e-14);
    const GridFunction f = random_function(g, 5);
    const GridFunction mf = maximal_function(f), mmf = maximal_function(mf);
    EXPECT_LE(lp_norm(mf, INFINITY), lp_norm(f, INFINITY) * (1 + 1e-14));
    for (int i = 0; i < g.size(); ++i) {
        EXPECT_GE(mf[i].real(), std::abs(f[i]) * (1 - 1e-14));
        EXPECT_GE(mmf[i].real(), mf[i].real() * (1 - 1e-14));
    }
}

TEST(Maximal, AgreesWithBruteForce) {
    const Grid g(2.0, 64);
    const GridFunction f = random_function(g, 9);
    const GridFunction mf = maximal_function(f);
    const auto oracle = brute_maximal(f);
    for (int i = 0; i < g.size(); ++i) EXPECT_NEAR(mf[i].real(), oracle[i], 1e-12);
}

TEST(Maximal, IndicatorFarFromSupport) {
    // The best interval through x = 3 is [0, 3]: average 1/3.
    const Grid g(8.0, 256);
    const GridFunction f = GridFunction::sample(g, [](double x) { return cplx(x > 0 && x < 1 ? 1.0 : 0.0, 0.0); });
    const GridFunction mf = maximal_function(f);
    const int i = g.nearest_index(3.0);
    const auto oracle = brute_maximal(f);
    EXPECT_NEAR(mf[i].real(), oracle[i], 1e-12);
    EXPECT_NEAR(mf[i].real(), 1.0 / 3.0, 1.0 / 3.0 * g.step() / 2.0);
}

TEST(Operators, TransposeIdentity) {
    const Grid g(2.0, 64);
    for (std::uint64_t s = 1; s <= 5; ++s) {
        const DenseOperator A = czlab::test::random_operator(g, s);
        const GridFunction f = random_function(g, 10 * s), h = random_function(g, 10 * s + 1);
        const cplx lhs = pairing(A.apply(f), h), rhs = pairing(f, A.transpose().apply(h));
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::abs(lhs));
    }
}

TEST(Operators, ComposeAndMultiply) {
    const Grid g(1.0, 32);
    const DenseOperator A = czlab::test::random_operator(g, 1), B = czlab::test::random_operator(g, 2);
    const GridFunction f = random_function(g, 3), b = random_function(g, 4);
    EXPECT_LE(lp_norm(A.compose(B).apply(f) - A.apply(B.apply(f)), 2.0), 1e-12 * lp_norm(A.apply(B.apply(f)), 2.0));
    EXPECT_LE(lp_norm(A.left_multiply(b).apply(f) - b * A.apply(f), 2.0), 1e-12 * lp_norm(b * A.apply(f), 2.0));
    EXPECT_LE(lp_norm(A.right_multiply(b).apply(f) - A.apply(b * f), 2.0), 1e-12 * lp_norm(A.apply(b * f), 2.0));
    EXPECT_LE(lp_norm(DenseOperator::multiplication(b).apply(f) - b * f, 2.0), 1e-13 * lp_norm(b * f, 2.0));
}

TEST(OperatorNorm, IdentityZeroAndDiagonal) {
    const Grid g(1.0, 64);
    const DenseOperator I = DenseOperator::multiplication(GridFunction::constant(g, 1.0));
    EXPECT_NEAR(operator_norm(I, 2, 2, 8), 1.0, 1e-9);
    EXPECT_EQ(operator_norm(DenseOperator(g, Mat::Zero(64, 64)), 2, 2, 8), 0.0);
    const GridFunction b = GridFunction::sample(g, [](double x) { return cplx(1 + 0.5 * std::cos(5 * x), 0.3 * x); });
    const double exact = lp_norm(b, INFINITY);
    const double est = operator_norm(DenseOperator::multiplication(b), 3, 3, 64);
    EXPECT_LE(est, exact * (1 + 1e-12));
    EXPECT_GE(est, 0.98 * exact);
    EXPECT_THROW(operator_norm(I, 0.5, 2, 1), InvalidArgument);
}

TEST(DecayProfile, PositiveAndMonotone) {
    for (int k : {-2, 0, 3})
        for (double N : {1.5, 3.0}) {
            EXPECT_NEAR(decay_profile(k, N, 0.0), std::ldexp(1.0, k), 1e-14 * std::ldexp(1.0, k));
            double prev = INFINITY;
            for (double x = 0.0; x < 20; x += 0.37) {
                const double v = decay_profile(k, N, x);
                EXPECT_GT(v, 0.0);
                EXPECT_LT(v, prev);
                EXPECT_EQ(v, decay_profile(k, N, -x));
                prev = v;
            }
        }
}
