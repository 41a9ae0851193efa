#include "czlab/curve.hpp"

#include <algorithm>
#include <atomic>
#include <cassert>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "czlab/error.hpp"
#include "czlab/fit.hpp"
#include "czlab/quadrature.hpp"
#include "czlab/rng.hpp"

namespace czlab {

namespace {

std::atomic<long long> g_checks{0};
std::atomic<long long> g_violations{0};

const cplx kI(0.0, 1.0);

[[noreturn]] void branch_fail(double x, double y1, double y2, cplx w) {
    ++g_violations;
    std::ostringstream os;
    os.precision(17);
    os << "square-root argument " << w << " outside the right half plane at (x, y1, y2) = (" << x << ", " << y1
       << ", " << y2 << ")";
    throw BranchViolation(os.str());
}

// w = (gx - g1)^2 + (gx - g2)^2 with the branch check.
cplx checked_sum(cplx c1, cplx c2, double x, double y1, double y2) {
    ++g_checks;
    const cplx w = c1 * c1 + c2 * c2;
    if (!(w.real() > 0.0)) branch_fail(x, y1, y2, w);
    return w;
}

double chebev(const double* c, int m, double t) {
    double d = 0.0, dd = 0.0;
    const double t2 = 2.0 * t;
    for (int j = m - 1; j >= 1; --j) {
        const double sv = d;
        d = t2 * d - dd + c[j];
        dd = sv;
    }
    return t * d - dd + 0.5 * c[0];
}

cplx integrate(const std::function<cplx(double)>& f, double a, double b, int panels, int order) {
    if (!(b > a)) return 0.0;
    std::vector<double> br;
    for (int p = 0; p <= panels; ++p) br.push_back(a + (b - a) * p / panels);
    const QuadRule q = composite_rule(br, order);
    cplx s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q.w[i] * f(q.x[i]);
    return s;
}

struct Piece {
    std::function<cplx(double)> f;
    double lo, hi;
};

constexpr int kThetaNodes = 256;
constexpr int kRadialPanels = 8;
constexpr int kRadialOrder = 16;
constexpr int kOuterPanels = 24;
constexpr int kOuterOrder = 20;

// int int F~(x, y1, y2) A(y1) B(y2) dy1 dy2 in polar coordinates about (x, x), where r F~ is smooth.
cplx polar_inner(const CurveKernels& K, double x, const Piece& A, const Piece& B) {
    const LipschitzCurve& c = K.curve();
    const cplx gx = c.gamma(x);
    const QuadRule ref = gauss_legendre(0.0, 1.0, kRadialOrder);
    cplx total = 0.0;
    for (int m = 0; m < kThetaNodes; ++m) {
        const double th = 2.0 * M_PI * (m + 0.5) / kThetaNodes;
        const double ct = std::cos(th), st = std::sin(th);
        double rlo = 0.0, rhi = std::numeric_limits<double>::infinity();
        auto clip = [&](double cs, double lo, double hi) {
            if (std::abs(cs) < 1e-15) {
                if (lo > 0.0 || hi < 0.0) rhi = -1.0;
                return;
            }
            double a = lo / cs, b = hi / cs;
            if (a > b) std::swap(a, b);
            rlo = std::max(rlo, a);
            rhi = std::min(rhi, b);
        };
        clip(ct, A.lo - x, A.hi - x);
        clip(st, B.lo - x, B.hi - x);
        if (!(rhi > rlo)) continue;
        const double span = (rhi - rlo) / kRadialPanels;
        cplx ray = 0.0;
        for (int p = 0; p < kRadialPanels; ++p) {
            for (std::size_t q = 0; q < ref.size(); ++q) {
                const double r = rlo + span * (p + ref.x[q]);
                const double y1 = x + r * ct, y2 = x + r * st;
                const cplx a = A.f(y1);
                if (a == 0.0) continue;
                const cplx b = B.f(y2);
                if (b == 0.0) continue;
                const cplx w = checked_sum(gx - c.gamma(y1), gx - c.gamma(y2), x, y1, y2);
                ray += span * ref.w[q] * r / std::sqrt(w) * a * b;
            }
        }
        total += ray;
    }
    return total * (2.0 * M_PI / kThetaNodes);
}

Piece derivative_piece(const AnalyticFunction& f) {
    if (!f.derivative) throw InvalidArgument("riesz_ibp: missing analytic derivative");
    return {f.derivative, f.support_lo, f.support_hi};
}

Piece weighted_piece(const LipschitzCurve& c, const AnalyticFunction& f) {
    return {[&c, f](double y) { return f.value(y) * c.gamma_prime(y); }, f.support_lo, f.support_hi};
}

void check_support(const AnalyticFunction& f, const char* who) {
    if (!(f.support_hi - f.support_lo < 1e6))
        throw InvalidArgument(std::string(who) + ": functions must have compact support");
}

// sum over a tensor rule of wx(x) w1(y1) w2(y2) F~(x, y1, y2)
cplx tensor_potential(const LipschitzCurve& c, const QuadRule& rx, const std::function<cplx(double)>& wx,
                      const QuadRule& r1, const std::function<cplx(double)>& w1, const QuadRule& r2,
                      const std::function<cplx(double)>& w2) {
    auto prep = [&c](const QuadRule& r, const std::function<cplx(double)>& w, std::vector<cplx>& g,
                     std::vector<cplx>& v) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            g.push_back(c.gamma(r.x[i]));
            v.push_back(r.w[i] * w(r.x[i]));
        }
    };
    std::vector<cplx> gx, vx, g1, v1, g2, v2;
    prep(rx, wx, gx, vx);
    prep(r1, w1, g1, v1);
    prep(r2, w2, g2, v2);
    const int nx = static_cast<int>(gx.size());
    std::vector<cplx> part(nx, 0.0);
    std::atomic<bool> bad{false};
    double bx = 0, by1 = 0, by2 = 0;
    cplx bw = 0.0;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < nx; ++i) {
        if (vx[i] == 0.0) continue;
        cplx acc = 0.0;
        long long checks = 0;
        for (std::size_t j = 0; j < g1.size(); ++j) {
            if (v1[j] == 0.0) continue;
            const cplx a = gx[i] - g1[j];
            const cplx a2 = a * a;
            cplx inner = 0.0;
            for (std::size_t k = 0; k < g2.size(); ++k) {
                if (v2[k] == 0.0) continue;
                const cplx b = gx[i] - g2[k];
                const cplx w = a2 + b * b;
                ++checks;
                if (!(w.real() > 0.0)) {
#pragma omp critical
                    {
                        if (!bad) {
                            bx = rx.x[i];
                            by1 = r1.x[j];
                            by2 = r2.x[k];
                            bw = w;
                        }
                        bad = true;
                    }
                    continue;
                }
                inner += v2[k] / std::sqrt(w);
            }
            acc += v1[j] * inner;
        }
        g_checks += checks;
        part[i] = vx[i] * acc;
    }
    if (bad) branch_fail(bx, by1, by2, bw);
    cplx s = 0.0;
    for (const cplx& p : part) s += p;
    return s;
}

QuadRule panels(const std::vector<double>& breaks, double width, int order) {
    std::vector<double> pts;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1];
        const int m = std::max(1, static_cast<int>(std::ceil((b - a) / width - 1e-9)));
        for (int p = 0; p < m; ++p) pts.push_back(a + (b - a) * p / m);
    }
    pts.push_back(breaks.back());
    return composite_rule(pts, order);
}

double max_extent(const AnalyticFunction& f) { return std::max(std::abs(f.support_lo), std::abs(f.support_hi)); }

}  // namespace

long long branch_checks() { return g_checks.load(); }
long long branch_violations() { return g_violations.load(); }

// ---------------------------------------------------------------------------------------------
// LipschitzCurve

LipschitzCurve::LipschitzCurve(std::string kind, double lambda, double c0, double compact_radius,
                               std::function<double(double)> slope)
    : kind_(std::move(kind)), lambda_(lambda), c0_(c0), compact_(compact_radius), slope_(std::move(slope)) {
    if (!(lambda_ >= 0.0 && lambda_ < 1.0)) throw InvalidArgument("curve: lambda must lie in [0, 1)");
    if (std::abs(c0_) > lambda_) throw InvalidArgument("curve: |c0| exceeds lambda");
    if (!(compact_ >= 0.0)) throw InvalidArgument("curve: compact radius must be non-negative");
    if (!slope_) throw InvalidArgument("curve: missing slope");
    if (compact_ == 0.0) return;

    const int np = static_cast<int>(std::ceil(2.0 * compact_ / panel_ - 1e-9));
    panel_ = 2.0 * compact_ / np;
    coeffs_.assign(static_cast<std::size_t>(np) * kDegree, 0.0);
    dcoeffs_.assign(static_cast<std::size_t>(np) * kDegree, 0.0);
    base_.assign(np, 0.0);
    const int N = kDegree;
    std::vector<double> f(N), c(N);
    double left = -c0_ * compact_;
    for (int p = 0; p < np; ++p) {
        const double a = -compact_ + p * panel_, b = a + panel_;
        for (int j = 0; j < N; ++j) {
            const double t = std::cos(M_PI * (j + 0.5) / N);
            f[j] = slope_(0.5 * (a + b) + 0.5 * (b - a) * t);
        }
        for (int k = 0; k < N; ++k) {
            double s = 0.0;
            for (int j = 0; j < N; ++j) s += f[j] * std::cos(M_PI * k * (j + 0.5) / N);
            c[k] = 2.0 * s / N;
        }
        for (int j = 0; j < 9; ++j) {
            const double y = a + (b - a) * (j + 0.5) / 9.0;
            const double t = (2.0 * y - a - b) / (b - a);
            fit_error_ = std::max(fit_error_, std::abs(chebev(c.data(), N, t) - slope_(y)));
        }
        std::copy(c.begin(), c.end(), dcoeffs_.begin() + static_cast<std::ptrdiff_t>(p) * N);
        double* ci = &coeffs_[static_cast<std::size_t>(p) * N];
        const double con = 0.25 * (b - a);
        double sum = 0.0, fac = 1.0;
        for (int j = 1; j <= N - 2; ++j) {
            ci[j] = con * (c[j - 1] - c[j + 1]) / j;
            sum += fac * ci[j];
            fac = -fac;
        }
        ci[N - 1] = con * c[N - 2] / (N - 1);
        sum += fac * ci[N - 1];
        ci[0] = 2.0 * sum;
        base_[p] = left;
        left += chebev(ci, N, 1.0);
    }
}

double LipschitzCurve::profile(double x) const {
    if (compact_ == 0.0) return c0_ * x;
    if (x <= -compact_) return c0_ * x;
    const int np = static_cast<int>(base_.size());
    if (x >= compact_) {
        const double* ci = &coeffs_[static_cast<std::size_t>(np - 1) * kDegree];
        return base_[np - 1] + chebev(ci, kDegree, 1.0) + c0_ * (x - compact_);
    }
    const int p = std::clamp(static_cast<int>((x + compact_) / panel_), 0, np - 1);
    const double a = -compact_ + p * panel_;
    const double t = (2.0 * (x - a) - panel_) / panel_;
    return base_[p] + chebev(&coeffs_[static_cast<std::size_t>(p) * kDegree], kDegree, t);
}

double LipschitzCurve::slope(double x) const {
    if (compact_ == 0.0 || x <= -compact_ || x >= compact_) return c0_;
    const int np = static_cast<int>(base_.size());
    const int p = std::clamp(static_cast<int>((x + compact_) / panel_), 0, np - 1);
    const double a = -compact_ + p * panel_;
    const double t = (2.0 * (x - a) - panel_) / panel_;
    return chebev(&dcoeffs_[static_cast<std::size_t>(p) * kDegree], kDegree, t);
}

cplx LipschitzCurve::chord(double x, double y) const { return {x - y, profile(x) - profile(y)}; }

double LipschitzCurve::sampled_lambda(int samples) const {
    const double R = compact_ + 1.0;
    double m = std::abs(c0_);
    for (int i = 0; i < samples; ++i) m = std::max(m, std::abs(slope_(-R + 2.0 * R * i / (samples - 1))));
    return m;
}

LipschitzCurve LipschitzCurve::flat() {
    return LipschitzCurve("flat", 0.0, 0.0, 0.0, [](double) { return 0.0; });
}

LipschitzCurve LipschitzCurve::sawtooth(double lambda, double plateau, double omega, double kappa) {
    if (!(plateau > 0.0)) throw InvalidArgument("sawtooth: plateau must be positive");
    const double norm = std::tanh(kappa);
    return LipschitzCurve("sawtooth", lambda, 0.0, 2.0 * plateau, [=](double x) {
        return lambda * std::tanh(kappa * std::sin(omega * x)) / norm * cutoff_profile(x / plateau, 1);
    });
}

LipschitzCurve LipschitzCurve::s_curve(double lambda, double plateau, double omega) {
    if (!(plateau > 0.0)) throw InvalidArgument("s_curve: plateau must be positive");
    const double h = 0.5 * lambda;
    return LipschitzCurve("s_curve", lambda, h, 2.0 * plateau,
                          [=](double x) { return h + h * std::sin(omega * x) * cutoff_profile(x / plateau, 1); });
}

LipschitzCurve LipschitzCurve::make(const std::string& kind, double lambda, double plateau) {
    if (!(lambda >= 0.0 && lambda < 1.0)) throw InvalidArgument("curve: lambda must lie in [0, 1)");
    if (kind == "flat") return flat();
    if (kind == "sawtooth") return sawtooth(lambda, plateau);
    if (kind == "s_curve") return s_curve(lambda, plateau);
    throw InvalidArgument("unknown curve kind: " + kind);
}

// ---------------------------------------------------------------------------------------------
// Kernels

cplx CurveKernels::sq(double x, double y1, double y2, cplx& c1, cplx& c2) const {
    c1 = curve_->chord(x, y1);
    c2 = curve_->chord(x, y2);
    return checked_sum(c1, c2, x, y1, y2);
}

cplx CurveKernels::potential(double x, double y1, double y2) const {
    cplx c1, c2;
    const cplx F = 1.0 / std::sqrt(sq(x, y1, y2, c1, c2));
#ifndef NDEBUG
    assert(std::abs(F) * (std::abs(x - y1) + std::abs(x - y2)) * std::sqrt(1.0 - curve_->lambda()) <=
           std::sqrt(2.0) * (1.0 + 1e-9));
#endif
    return F;
}

cplx CurveKernels::kernel(int j, double x, double y1, double y2) const {
    if (j < 0 || j > 2) throw InvalidArgument("curve kernel index must be 0, 1 or 2");
    cplx c1, c2;
    const cplx w = sq(x, y1, y2, c1, c2);
    const cplx w32 = w * std::sqrt(w);
    if (j == 1) return c1 / w32;
    if (j == 2) return c2 / w32;
    return (c1 + c2) / w32;
}

cplx CurveKernels::kernel0_direct(double x, double y1, double y2) const {
    cplx c1, c2;
    const cplx w = sq(x, y1, y2, c1, c2);
    const cplx num = 2.0 * curve_->gamma(x) - curve_->gamma(y1) - curve_->gamma(y2);
    return num / (w * std::sqrt(w));
}

cplx h_epsilon(const CurveKernels& K, double x, double y2, double eps) {
    const double z = x - eps * y2;
    return eps * K.curve().gamma_prime(x) * (K.potential(x, x - eps, z) - K.potential(x, x + eps, z));
}

CurveKernelEstimates curve_kernel_estimates(const CurveKernels& K, int samples, std::uint64_t seed) {
    const LipschitzCurve& c = K.curve();
    const double lam = c.lambda();
    const double gmax = std::sqrt(1.0 + c.sampled_lambda() * c.sampled_lambda());
    const double span = std::max(4.0, c.compact_radius() + 2.0);
    Rng rng(seed);
    CurveKernelEstimates out;
    for (int s = 0; s < samples; ++s) {
        const double x = rng.uniform(-span, span);
        const double u1 = (rng.uniform() < 0.5 ? -1 : 1) * std::pow(10.0, rng.uniform(-3.0, 1.0));
        const double u2 = (rng.uniform() < 0.5 ? -1 : 1) * std::pow(10.0, rng.uniform(-3.0, 1.0));
        const double y1 = x - u1, y2 = x - u2;
        const double r2 = u1 * u1 + u2 * u2, r = std::sqrt(r2);
        out.size = std::max(out.size, std::abs(K.potential(x, y1, y2)) * (std::abs(u1) + std::abs(u2)) *
                                          std::sqrt(1.0 - lam));
        const cplx k1 = K.kernel(1, x, y1, y2), k2 = K.kernel(2, x, y1, y2);
        out.kernel = std::max(out.kernel, std::abs(k1) * r2 * std::pow(1.0 - lam, 1.5) / gmax);
        cplx c1, c2;
        const cplx w = c.chord(x, y1) * c.chord(x, y1) + c.chord(x, y2) * c.chord(x, y2);
        c1 = c.chord(x, y1);
        c2 = c.chord(x, y2);
        const cplx d2 = 3.0 * c1 * c2 * c.gamma_prime(y2) / (w * w * std::sqrt(w));
        out.gradient = std::max(out.gradient, std::abs(d2) * r2 * r * std::pow(1.0 - lam, 2.5) / (3.0 * std::pow(gmax, 3)));
        const cplx k0 = K.kernel0_direct(x, y1, y2);
        out.identity = std::max(out.identity, std::abs(k0 - k1 - k2) / (std::abs(k1) + std::abs(k2)));

        const double yy = (rng.uniform() < 0.5 ? -1 : 1) * std::pow(10.0, rng.uniform(-2.0, 3.0));
        const double eps = std::pow(10.0, rng.uniform(-3.0, 0.0));
        out.h_envelope = std::max(out.h_envelope, std::abs(h_epsilon(K, x, yy, eps)) *
                                                      std::pow(1.0 + std::abs(yy), 3) * std::pow(1.0 - lam, 1.5));
        ++out.samples;
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Principal values and integrated-by-parts forms

PvReport riesz_pv(const CurveKernels& K, int j, const AnalyticFunction& f1, const AnalyticFunction& f2, double x,
                  const std::vector<double>& eps) {
    if (j < 0 || j > 2) throw InvalidArgument("riesz_pv: j must be 0, 1 or 2");
    if (eps.size() < 3) throw InvalidArgument("riesz_pv: needs at least three truncation levels");
    for (std::size_t i = 0; i < eps.size(); ++i)
        if (!(eps[i] > 0.0) || (i > 0 && !(eps[i] < eps[i - 1])))
            throw InvalidArgument("riesz_pv: truncation levels must be positive and decreasing");
    check_support(f1, "riesz_pv");
    check_support(f2, "riesz_pv");
    const LipschitzCurve& c = K.curve();
    const cplx gx = c.gamma(x), gpx = c.gamma_prime(x);

    PvReport out;
    out.eps = eps;
    for (double e : eps) {
        auto sides = [&](const AnalyticFunction& f) {
            std::vector<QuadRule> rs;
            const double lo = f.support_lo, hi = f.support_hi;
            if (lo < x - e) {
                const double b = std::min(hi, x - e);
                if (b > lo) rs.push_back(graded_rule(lo, b, {b}, 0.5 * e, 12, 0.5));
            }
            if (hi > x + e) {
                const double a = std::max(lo, x + e);
                if (hi > a) rs.push_back(graded_rule(a, hi, {a}, 0.5 * e, 12, 0.5));
            }
            return rs;
        };
        cplx total = 0.0;
        for (const QuadRule& r1 : sides(f1)) {
            std::vector<cplx> g1, v1;
            for (std::size_t i = 0; i < r1.size(); ++i) {
                g1.push_back(c.gamma(r1.x[i]));
                v1.push_back(r1.w[i] * f1.value(r1.x[i]) * c.gamma_prime(r1.x[i]));
            }
            for (const QuadRule& r2 : sides(f2)) {
                for (std::size_t k = 0; k < r2.size(); ++k) {
                    const cplx v2 = r2.w[k] * f2.value(r2.x[k]) * c.gamma_prime(r2.x[k]);
                    if (v2 == 0.0) continue;
                    const cplx b = gx - c.gamma(r2.x[k]);
                    for (std::size_t i = 0; i < g1.size(); ++i) {
                        if (v1[i] == 0.0) continue;
                        const cplx a = gx - g1[i];
                        const cplx w = checked_sum(a, b, x, r1.x[i], r2.x[k]);
                        const cplx num = j == 1 ? a : (j == 2 ? b : a + b);
                        total += num / (w * std::sqrt(w)) * v1[i] * v2;
                    }
                }
            }
        }
        out.values.push_back(total * gpx);
    }

    // V(eps) = V0 + c1 eps log(1/eps) + c2 eps, and the same fit without the coarsest level as a check.
    auto fit = [&](std::size_t first, bool with_log) {
        const int m = static_cast<int>(eps.size() - first);
        const int cols = with_log ? 3 : 2;
        Eigen::MatrixXcd A(m, cols);
        Eigen::VectorXcd y(m);
        for (int i = 0; i < m; ++i) {
            const double e = eps[first + i];
            A(i, 0) = 1.0;
            A(i, 1) = e;
            if (with_log) A(i, 2) = e * std::log(1.0 / e);
            y(i) = out.values[first + i];
        }
        return cplx(A.colPivHouseholderQr().solve(y)(0));
    };
    out.limit = fit(0, true);
    out.error_estimate = std::abs(out.limit - fit(0, false));
    if (eps.size() >= 4) out.error_estimate = std::max(out.error_estimate, std::abs(out.limit - fit(1, true)));
    double scale = 0.0;
    for (const cplx& v : out.values) scale = std::max(scale, std::abs(v));
    out.cauchy = true;
    for (std::size_t i = 2; i < out.values.size(); ++i) {
        const double d0 = std::abs(out.values[i - 1] - out.values[i - 2]);
        const double d1 = std::abs(out.values[i] - out.values[i - 1]);
        if (d1 > d0 * (1.0 + 1e-9) + 1e-13 * (1.0 + scale)) out.cauchy = false;
    }
    return out;
}

cplx riesz_ibp(const CurveKernels& K, int j, const AnalyticFunction& f1, const AnalyticFunction& f2, double x) {
    if (j != 1 && j != 2) throw InvalidArgument("riesz_ibp: pointwise form exists for j = 1, 2; use the pairing for j = 0");
    check_support(f1, "riesz_ibp");
    check_support(f2, "riesz_ibp");
    const LipschitzCurve& c = K.curve();
    const cplx inner = j == 1 ? polar_inner(K, x, derivative_piece(f1), weighted_piece(c, f2))
                              : polar_inner(K, x, weighted_piece(c, f1), derivative_piece(f2));
    return -c.gamma_prime(x) * inner;
}

GridFunction riesz_ibp(const CurveKernels& K, int j, const AnalyticFunction& f1, const AnalyticFunction& f2,
                       const Grid& grid) {
    Vec v(grid.size());
    for (int i = 0; i < grid.size(); ++i) v[i] = riesz_ibp(K, j, f1, f2, grid.x(i));
    return {grid, v};
}

cplx riesz_ibp_pairing(const CurveKernels& K, int j, const AnalyticFunction& f0, const AnalyticFunction& f1,
                       const AnalyticFunction& f2) {
    if (j < 0 || j > 2) throw InvalidArgument("riesz_ibp_pairing: j must be 0, 1 or 2");
    for (const auto* f : {&f0, &f1, &f2}) check_support(*f, "riesz_ibp_pairing");
    const LipschitzCurve& c = K.curve();
    Piece A, B;
    std::function<cplx(double)> outer;
    double sign = -1.0;
    if (j == 0) {
        // K~_0 gamma'(x) = -d/dx F~, so the x-derivative lands on f0 with a plus sign.
        A = weighted_piece(c, f1);
        B = weighted_piece(c, f2);
        if (!f0.derivative) throw InvalidArgument("riesz_ibp_pairing: missing analytic derivative");
        outer = f0.derivative;
        sign = 1.0;
    } else {
        A = j == 1 ? derivative_piece(f1) : weighted_piece(c, f1);
        B = j == 1 ? weighted_piece(c, f2) : derivative_piece(f2);
        outer = [&c, &f0](double x) { return f0.value(x) * c.gamma_prime(x); };
    }
    const QuadRule rx = composite_rule(
        [&] {
            std::vector<double> b;
            for (int p = 0; p <= kOuterPanels; ++p)
                b.push_back(f0.support_lo + (f0.support_hi - f0.support_lo) * p / kOuterPanels);
            return b;
        }(),
        kOuterOrder);
    std::vector<cplx> part(rx.size(), 0.0);
    const int n = static_cast<int>(rx.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        const cplx o = outer(rx.x[i]);
        if (o == 0.0) continue;
        part[i] = rx.w[i] * o * polar_inner(K, rx.x[i], A, B);
    }
    cplx s = 0.0;
    for (const cplx& p : part) s += p;
    return sign * s;
}

// ---------------------------------------------------------------------------------------------
// Cauchy integral

namespace {

cplx cauchy_pv_impl(const LipschitzCurve& c, const std::function<cplx(double)>& f, double a, double b, double x,
                    const std::vector<double>& breaks) {
    const cplx gx = c.gamma(x);
    if (x <= a || x >= b) {
        const double d = x <= a ? a - x : x - b;
        const QuadRule q = graded_rule(a, b, {std::clamp(x, a, b)}, std::max(0.5 * d, 1e-6 * (b - a)), 16, 0.25,
                                       breaks);
        cplx s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) s += q.w[i] * f(q.x[i]) / (c.gamma(q.x[i]) - gx);
        return s;
    }
    const cplx fx = f(x) / c.gamma_prime(x);
    const QuadRule q = graded_rule(a, b, {x}, 1e-3 * (b - a), 16, 0.25, breaks);
    cplx s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double y = q.x[i];
        s += q.w[i] * (f(y) - fx * c.gamma_prime(y)) / (c.gamma(y) - gx);
    }
    return s + fx * (std::log(c.gamma(b) - gx) - std::log(gx - c.gamma(a)));
}

cplx cauchy_limit_impl(const LipschitzCurve& c, const std::function<cplx(double)>& f, double a, double b, double x,
                       bool transpose, const std::vector<double>& breaks) {
    const cplx pv = cauchy_pv_impl(c, f, a, b, x, breaks);
    const cplx jump = (x > a && x < b) ? -kI * M_PI * f(x) / c.gamma_prime(x) : cplx(0.0);
    return (transpose ? -pv : pv) + jump;
}

}  // namespace

cplx cauchy_pv(const LipschitzCurve& c, const AnalyticFunction& f, double x) {
    check_support(f, "cauchy_pv");
    return cauchy_pv_impl(c, f.value, f.support_lo, f.support_hi, x, {});
}

cplx cauchy_limit(const LipschitzCurve& c, const AnalyticFunction& f, double x, bool transpose) {
    check_support(f, "cauchy_limit");
    return cauchy_limit_impl(c, f.value, f.support_lo, f.support_hi, x, transpose, {});
}

cplx cauchy_truncated(const LipschitzCurve& c, const AnalyticFunction& f, double a, double b, double x,
                      double eps) {
    if (!(eps > 0.0)) throw InvalidArgument("cauchy_truncated: eps must be positive");
    if (!(b > a)) throw InvalidArgument("cauchy_truncated: empty interval");
    const cplx gx = c.gamma(x);
    const QuadRule q = graded_rule(a, b, {std::clamp(x, a, b)}, 0.25 * eps, 16, 0.25);
    cplx s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q.w[i] * f.value(q.x[i]) / (c.gamma(q.x[i]) + kI * eps - gx);
    return s;
}

AnalyticFunction curve_mean_zero_probe(const LipschitzCurve& c, double radius) {
    const AnalyticFunction phi = bump(0.0, radius), psi = bump(0.0, 2.0 * radius);
    auto mean = [&](const AnalyticFunction& f) {
        return integrate([&](double x) { return f.value(x) * c.gamma_prime(x); }, f.support_lo, f.support_hi, 8, 16);
    };
    return combine({phi, psi}, {1.0, -mean(phi) / mean(psi)});
}

AnalyticFunction curve_dipole_probe(const LipschitzCurve& c, double radius) {
    const AnalyticFunction phi = combine({bump(-0.5 * radius, 0.5 * radius), bump(0.5 * radius, 0.5 * radius)}, {1.0, -1.0});
    const AnalyticFunction psi = bump(0.0, radius);
    auto mean = [&](const AnalyticFunction& f) {
        return integrate([&](double x) { return f.value(x) * c.gamma_prime(x); }, f.support_lo, f.support_hi, 8, 16);
    };
    return combine({phi, psi}, {1.0, -mean(phi) / mean(psi)});
}

namespace {

double curve_l1(const LipschitzCurve& c, const AnalyticFunction& f) {
    return integrate([&](double x) { return cplx(std::abs(f.value(x) * c.gamma_prime(x))); }, f.support_lo,
                     f.support_hi, 8, 16)
        .real();
}

cplx cauchy_cutoff_pairing(const LipschitzCurve& c, const AnalyticFunction& phi, double R, bool transpose) {
    auto g = [&c, R](double y) { return c.gamma_prime(y) * cutoff_profile(y / R, 0); };
    const std::vector<double> br{-R, R};
    return integrate(
        [&](double x) {
            const cplx p = phi.value(x);
            if (p == 0.0) return cplx(0.0);
            return p * c.gamma_prime(x) * cauchy_limit_impl(c, g, -2.0 * R, 2.0 * R, x, transpose, br);
        },
        phi.support_lo, phi.support_hi, 8, 16);
}

}  // namespace

SweepReport cauchy_sanity(const LipschitzCurve& c, const AnalyticFunction& phi, const std::vector<double>& radii) {
    check_support(phi, "cauchy_sanity");
    SweepReport out;
    out.scale = curve_l1(c, phi);
    if (!(out.scale > 0.0)) throw InvalidArgument("cauchy_sanity: phi vanishes");
    std::vector<double> lr;
    for (double R : radii) {
        if (!(R > max_extent(phi))) throw InvalidArgument("cauchy_sanity: R must exceed the support of phi");
        out.radii.push_back(R);
        out.forward.push_back(std::abs(cauchy_cutoff_pairing(c, phi, R, false)) / out.scale);
        out.transpose.push_back(std::abs(cauchy_cutoff_pairing(c, phi, R, true)) / out.scale);
        lr.push_back(std::log2(R));
    }
    out.forward_slope = fit_log2_decay(lr, out.forward, 1e-13).slope;
    out.transpose_slope = fit_log2_decay(lr, out.transpose, 1e-13).slope;
    return out;
}

TestingPairings riesz_testing_pairings(const CurveKernels& K, const AnalyticFunction& phi, double R,
                                       int cutoff_variant) {
    check_support(phi, "riesz_testing_pairings");
    if (!(R >= 2.0 * max_extent(phi))) throw InvalidArgument("riesz_testing_pairings: supp phi must lie in B(0, R/2)");
    if (cutoff_variant != 0 && cutoff_variant != 1) throw InvalidArgument("cutoff variant must be 0 or 1");
    const LipschitzCurve& c = K.curve();
    const double width = R / 8.0;
    const int order = 12;
    const QuadRule full = panels({-2.0 * R, -R, R, 2.0 * R}, width, order);
    QuadRule ring = panels({-2.0 * R, -R}, width, order);
    ring.append(panels({R, 2.0 * R}, width, order));
    const QuadRule local = panels({phi.support_lo, phi.support_hi}, (phi.support_hi - phi.support_lo) / 6.0, order);

    auto eta = [R, cutoff_variant](double y) { return cplx(cutoff_profile(y / R, cutoff_variant)); };
    auto deta = [R, cutoff_variant](double y) { return cplx(cutoff_profile_derivative(y / R, cutoff_variant) / R); };
    auto gp = [&c](double y) { return c.gamma_prime(y); };
    auto eta_g = [&](double y) { return eta(y) * gp(y); };
    auto phi_g = [&](double y) { return phi.value(y) * gp(y); };

    TestingPairings t;
    t.t0 = -tensor_potential(c, local, phi_g, ring, deta, full, eta_g);
    t.t1 = tensor_potential(c, ring, deta, local, phi_g, full, eta_g) +
           tensor_potential(c, full, eta_g, local, phi_g, ring, deta);
    t.t2 = -tensor_potential(c, full, eta_g, ring, deta, local, phi_g);
    return t;
}

FlatTestingReport flat_testing_conditions(const LipschitzCurve& curve, const AnalyticFunction& phi,
                                          const AnalyticFunction& phi_control, const std::vector<double>& radii) {
    auto shared = std::make_shared<const LipschitzCurve>(curve);
    const CurveKernels K(shared);
    FlatTestingReport out;
    out.scale = curve_l1(curve, phi);
    const double cscale = curve_l1(curve, phi_control);
    if (!(out.scale > 0.0 && cscale > 0.0)) throw InvalidArgument("flat_testing_conditions: probe vanishes");
    std::vector<double> lr;
    for (double R : radii) {
        const TestingPairings t = riesz_testing_pairings(K, phi, R);
        const TestingPairings tc = riesz_testing_pairings(K, phi_control, R);
        out.radii.push_back(R);
        out.t0.push_back(std::abs(t.t0) / out.scale);
        out.t1.push_back(std::abs(t.t1) / out.scale);
        out.t2.push_back(std::abs(t.t2) / out.scale);
        out.riesz_control.push_back(std::max({std::abs(tc.t0), std::abs(tc.t1), std::abs(tc.t2)}) / cscale);
        out.control.push_back(std::abs(cauchy_cutoff_pairing(curve, phi_control, R, false)) / cscale);
        lr.push_back(std::log2(R));
    }
    out.slope0 = fit_log2_decay(lr, out.t0, 1e-13).slope;
    out.slope1 = fit_log2_decay(lr, out.t1, 1e-13).slope;
    out.slope2 = fit_log2_decay(lr, out.t2, 1e-13).slope;
    return out;
}

// ---------------------------------------------------------------------------------------------
// Grid operator

RieszGridOperator::RieszGridOperator(std::shared_ptr<const LipschitzCurve> curve, Grid grid)
    : curve_(std::move(curve)), grid_(grid), gp_(GridFunction::zero(grid)) {
    if (!curve_) throw InvalidArgument("RieszGridOperator: missing curve");
    const int n = grid_.size();
    for (int i = 0; i < n; ++i) {
        gp_.values()[i] = curve_->gamma_prime(grid_.x(i));
        gam_.push_back(curve_->gamma(grid_.x(i)));
    }
    if (curve_->is_flat()) {
        const double h = grid_.step();
        flat_.resize(static_cast<std::size_t>(n) * n);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                flat_[static_cast<std::size_t>(a) * n + b] = (a == 0 && b == 0)
                                                                 ? 4.0 * std::log(1.0 + std::sqrt(2.0)) / h
                                                                 : 1.0 / (h * std::sqrt(double(a) * a + double(b) * b));
    }
}

cplx RieszGridOperator::potential(int i, int j1, int j2) const {
    const int n = grid_.size();
    if (!flat_.empty()) return flat_[static_cast<std::size_t>(std::abs(i - j1)) * n + std::abs(i - j2)];
    if (i == j1 && i == j2) return 4.0 * std::log(1.0 + std::sqrt(2.0)) / (grid_.step() * gp_[i]);
    const cplx a = gam_[i] - gam_[j1], b = gam_[i] - gam_[j2];
    return 1.0 / std::sqrt(checked_sum(a, b, grid_.x(i), grid_.x(j1), grid_.x(j2)));
}

GridFunction RieszGridOperator::apply_derivative_form(const GridFunction& d1, const GridFunction& g2) const {
    if (d1.grid() != grid_ || g2.grid() != grid_) throw InvalidArgument("RieszGridOperator: grid mismatch");
    const int n = grid_.size();
    const double h = grid_.step();
    std::vector<int> nz1, nz2;
    for (int j = 0; j < n; ++j) {
        if (d1[j] != 0.0) nz1.push_back(j);
        if (g2[j] != 0.0) nz2.push_back(j);
    }
    Vec out = Vec::Zero(n);
    std::atomic<bool> bad{false};
    int bi = 0, bj1 = 0, bj2 = 0;
    const cplx diag_num = 4.0 * std::log(1.0 + std::sqrt(2.0)) / h;
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < n; ++i) {
        cplx acc = 0.0;
        if (!flat_.empty()) {
            for (int j1 : nz1) {
                const double* row = &flat_[static_cast<std::size_t>(std::abs(i - j1)) * n];
                cplx inner = 0.0;
                for (int j2 : nz2) inner += row[std::abs(i - j2)] * g2[j2];
                acc += d1[j1] * inner;
            }
        } else {
            std::vector<cplx> b2(nz2.size());
            for (std::size_t k = 0; k < nz2.size(); ++k) {
                const cplx b = gam_[i] - gam_[nz2[k]];
                b2[k] = b * b;
            }
            long long checks = 0;
            for (int j1 : nz1) {
                const cplx a = gam_[i] - gam_[j1];
                const cplx a2 = a * a;
                cplx inner = 0.0;
                for (std::size_t k = 0; k < nz2.size(); ++k) {
                    const int j2 = nz2[k];
                    if (j1 == i && j2 == i) {
                        inner += diag_num / gp_[i] * g2[j2];
                        continue;
                    }
                    const cplx w = a2 + b2[k];
                    ++checks;
                    if (!(w.real() > 0.0)) {
#pragma omp critical
                        {
                            bi = i;
                            bj1 = j1;
                            bj2 = j2;
                            bad = true;
                        }
                        continue;
                    }
                    inner += g2[j2] / std::sqrt(w);
                }
                acc += d1[j1] * inner;
            }
            g_checks += checks;
        }
        out[i] = -h * h * acc;
    }
    if (bad) {
        const cplx a = gam_[bi] - gam_[bj1], b = gam_[bi] - gam_[bj2];
        branch_fail(grid_.x(bi), grid_.x(bj1), grid_.x(bj2), a * a + b * b);
    }
    return {grid_, out};
}

GridFunction RieszGridOperator::apply(const GridFunction& g1, const GridFunction& g2) const {
    const int n = grid_.size();
    const double h = grid_.step();
    const GridFunction f1 = g1 / gp_;
    Vec d(n);
    for (int i = 0; i < n; ++i) {
        const cplx lo = i > 0 ? f1[i - 1] : cplx(0.0);
        const cplx hi = i + 1 < n ? f1[i + 1] : cplx(0.0);
        d[i] = (hi - lo) / (2.0 * h);
    }
    return apply_derivative_form(GridFunction(grid_, d), g2);
}

// ---------------------------------------------------------------------------------------------
// L^p sweep

std::vector<LpSweepRow> lp_sweep(const std::string& curve_kind, const std::vector<double>& lambdas, const Grid& grid,
                                 double p1, double p2, const std::vector<AnalyticFunction>& probes) {
    if (!(p1 >= 1.0 && p2 >= 1.0)) throw InvalidArgument("lp_sweep: exponents must be >= 1");
    const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
    if (p < 1.0) throw InvalidArgument("lp_sweep: target exponent below 1");
    if (probes.empty()) throw InvalidArgument("lp_sweep needs probes");
    const double h = grid.step();
    auto weighted = [h](const GridFunction& f, const Vec& w, double q) {
        double s = 0.0;
        for (int i = 0; i < f.size(); ++i) s += std::pow(std::abs(f[i]), q) * w[i].real();
        return std::pow(h * s, 1.0 / q);
    };
    std::vector<GridFunction> vals, ders;
    for (const auto& f : probes) {
        if (!f.derivative) throw InvalidArgument("lp_sweep: probes need analytic derivatives");
        vals.push_back(f.sample(grid));
        ders.push_back(GridFunction::sample(grid, f.derivative));
    }
    std::vector<LpSweepRow> rows;
    for (double lam : lambdas) {
        if (!(lam >= 0.0 && lam < 1.0)) throw InvalidArgument("lp_sweep: lambda must lie in [0, 1)");
        auto curve = std::make_shared<const LipschitzCurve>(
            lam == 0.0 ? LipschitzCurve::flat() : LipschitzCurve::make(curve_kind, lam, 0.25 * grid.half_length()));
        const RieszGridOperator op(curve, grid);
        const GridFunction& gp = op.gamma_prime();
        Vec absw(grid.size());
        double gmax = 0.0, imax = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            const double a = std::abs(gp[i]);
            absw[i] = a;
            gmax = std::max(gmax, a);
            imax = std::max(imax, 1.0 / a);
        }
        LpSweepRow row;
        row.lambda = lam;
        row.transfer_factor = std::pow(gmax, 1.0 / p) * std::pow(imax, 1.0 / p);
        row.transfer_slack = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < probes.size(); ++a) {
            for (std::size_t b = 0; b < probes.size(); ++b) {
                const double n1 = lp_norm(vals[a], p1), n2 = lp_norm(vals[b], p2);
                if (n1 == 0.0 || n2 == 0.0) continue;
                const GridFunction out = op.apply_derivative_form(ders[a], gp * vals[b]);
                const double flat = lp_norm(out, p) / (n1 * n2);
                const double curved =
                    weighted(out, absw, p) / (weighted(vals[a], absw, p1) * weighted(vals[b], absw, p2));
                row.ratio = std::max(row.ratio, flat);
                row.curve_ratio = std::max(row.curve_ratio, curved);
                row.transfer_slack = std::min(row.transfer_slack, flat * row.transfer_factor - curved);
            }
        }
        rows.push_back(row);
    }
    double r0 = rows.front().ratio;
    for (const auto& r : rows)
        if (r.lambda == 0.0) r0 = r.ratio;
    for (auto& r : rows) r.normalized = r0 > 0.0 ? r.ratio * std::pow(1.0 - r.lambda, 1.5) / r0 : 0.0;
    return rows;
}

}  // namespace czlab
