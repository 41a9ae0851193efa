#include "czlab/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "czlab/error.hpp"
#include "czlab/fit.hpp"
#include "czlab/rng.hpp"

namespace czlab {

double halton(std::uint64_t index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

namespace {

constexpr double kTiny = 1e-300;
// The Hoelder exponent is read off displacements 2^-k 2^-m, m in [5, 12], well below the kernel's scale.
constexpr int kRegularityFinest = 12;
constexpr int kRegularityCoarsest = 5;

double phi(int k, double M, double d) { return decay_profile(k, M, d); }

struct Sampler {
    double lo, hi, step;
    std::uint64_t offset;

    double snap(double x) const {
        if (step <= 0.0) return x;
        const double i = std::floor((x - lo) / step);
        return lo + (i + 0.5) * step;
    }
    bool inside(double x) const { return x > lo && x < hi; }
    double u(std::uint64_t i, int dim) const {
        static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
        return halton(i + offset, primes[dim]);
    }
    // Signed offset 2^-k 2^t with t in [t_lo, t_hi], at least one step.
    double offset_at(int k, double ut, double us, double t_lo, double t_hi) const {
        double d = std::ldexp(1.0, -k) * std::exp2(t_lo + (t_hi - t_lo) * ut);
        if (step > 0.0) d = std::max(step, std::round(d / step) * step);
        return us < 0.5 ? -d : d;
    }
};

// Upper-envelope slope: bin the x coordinate, keep the largest y per bin, fit a line.
double envelope_slope(const std::vector<double>& xs, const std::vector<double>& ys, int bins = 12) {
    if (xs.size() < 4) return 0.0;
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    const double a = *mn, w = (*mx - *mn) / bins;
    if (w <= 0.0) return 0.0;
    std::map<int, std::pair<double, double>> best;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const int bin = std::min(bins - 1, static_cast<int>((xs[i] - a) / w));
        auto it = best.find(bin);
        if (it == best.end() || ys[i] > it->second.second) best[bin] = {xs[i], ys[i]};
    }
    std::vector<double> bx, by;
    for (auto& [bin, p] : best) {
        bx.push_back(p.first);
        by.push_back(p.second);
    }
    return bx.size() >= 2 ? fit_line(bx, by).slope : 0.0;
}

struct Accum {
    double size = 0, reg = 0, xreg = 0, alt_size = 0, alt_reg = 0, back = 0;
    double max_abs = 0.0;
    std::vector<std::pair<double, double>> tail;  // (log2 distance factor, log2 normalised value)
};

KernelReport finish(const Accum& acc, const KernelConstants& decl, bool smooth, bool bilinear, int samples) {
    KernelReport r;
    r.samples = samples;
    r.A_size = acc.size;
    r.A_regularity = acc.reg;
    r.A_x_regularity = acc.xreg;
    r.A_fit = std::max({acc.size, acc.reg, smooth ? acc.xreg : 0.0});
    r.worst_violation = r.A_fit / decl.A;
    r.within_declared = r.worst_violation <= 1.0 + 1e-9;

    std::vector<double> tx, ty;
    for (auto& [x, y] : acc.tail)
        if (x >= std::log2(3.0) && y > std::log2(std::max(kTiny, 1e-13 * acc.max_abs))) {
            tx.push_back(x);
            ty.push_back(y);
        }
    r.N_fit = tx.size() >= 3 ? -envelope_slope(tx, ty) - decl.gamma : kCompactDecay;
    r.alt_A_fit = std::max(acc.alt_size, acc.alt_reg);
    r.alt_forward = r.alt_A_fit <= 2.0 * r.A_fit * (1.0 + 1e-9) + kTiny;
    r.alt_backward = acc.back <= 2.0 * r.alt_A_fit * (1.0 + 1e-9) + kTiny;
    r.verdicts_agree = r.alt_forward && r.alt_backward;
    if (r.within_declared) r.classification = std::string(smooth ? "S" : "") + (bilinear ? "BLPK" : "LPK");
    else r.classification = "none";
    return r;
}

// Constants of the ordinary conditions recovered from the flat ones.
void converted(const KernelConstants& d, double& N1, double& g1) {
    const double N2 = d.N + d.gamma;
    const double eta = std::clamp((N2 - 1.0) / (2.0 * (N2 + d.gamma)), 0.05, 0.95);
    g1 = eta * d.gamma;
    N1 = N2 * (1.0 - eta) - eta * d.gamma;
}

// Slope of log |g(d) - g(0)| against log d over the displacement ladder; NaN when under-resolved.
double local_exponent(const std::function<cplx(double)>& g, double scale_len, double step) {
    std::vector<double> xs, ys;
    const cplx g0 = g(0.0);
    double last = -1.0;
    for (int m = kRegularityFinest; m >= kRegularityCoarsest; --m) {
        double d = scale_len * std::exp2(-m);
        if (step > 0.0) d = std::round(d / step) * step;
        if (d <= 0.0 || d == last) continue;
        last = d;
        const double dt = std::abs(g(d) - g0);
        if (dt <= 1e-14 * std::abs(g0)) continue;
        xs.push_back(std::log2(d));
        ys.push_back(std::log2(dt));
    }
    return xs.size() >= 3 ? fit_line(xs, ys).slope : std::nan("");
}

double median_exponent(std::vector<double> v) {
    v.erase(std::remove_if(v.begin(), v.end(), [](double t) { return std::isnan(t); }), v.end());
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size();
    return std::min(1.0, m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]));
}

constexpr double kBaseOffsets[] = {0.03, 0.07, 0.11};

}  // namespace

KernelReport verify_kernel_family(const LinearKernelFamily& fam, int n_samples, std::uint64_t seed) {
    if (n_samples < 16) throw InvalidArgument("verify_kernel_family needs at least 16 samples");
    const auto& d = fam.declared;
    const double M = d.N + d.gamma;
    double N1, g1;
    converted(d, N1, g1);
    const Sampler S{fam.domain_lo, fam.domain_hi, fam.step, 1 + 1000 * seed};
    const int K = fam.k_max - fam.k_min + 1;
    Accum acc;
    int used = 0;
    for (int i = 0; used < n_samples && i < 50 * n_samples; ++i) {
        const int k = fam.k_min + std::min(K - 1, static_cast<int>(S.u(i, 0) * K));
        const double x = S.snap(fam.domain_lo + (fam.domain_hi - fam.domain_lo) * S.u(i, 1));
        const double y = S.snap(x + S.offset_at(k, S.u(i, 2), S.u(i, 3), -4.0, 6.0));
        const double s = S.offset_at(k, S.u(i, 4), S.u(i, 5), -10.0, 0.0);
        const double y2 = S.snap(y + s);
        const double x2 = S.snap(x + s);
        if (!S.inside(x) || !S.inside(y) || !S.inside(y2) || !S.inside(x2)) continue;
        ++used;
        const double sc = std::ldexp(1.0, k);
        const cplx t = fam.eval(k, x, y);
        const double at = std::abs(t);
        acc.max_abs = std::max(acc.max_abs, at);
        acc.size = std::max(acc.size, at / phi(k, M, x - y));
        acc.alt_size = acc.size;
        acc.tail.emplace_back(std::log2(1.0 + sc * std::abs(x - y)), std::log2(at / sc + kTiny));

        const double dy = std::abs(y2 - y);
        if (dy > 0.0) {
            const double dt = std::abs(t - fam.eval(k, x, y2));
            const double pw = std::pow(sc * dy, d.gamma);
            const double env = phi(k, M, x - y) + phi(k, M, x - y2);
            acc.reg = std::max(acc.reg, dt / (pw * env));
            acc.alt_reg = std::max(acc.alt_reg, dt / (sc * pw));
            acc.back = std::max(acc.back, dt / (std::pow(sc * dy, g1) * (phi(k, N1 + g1, x - y) + phi(k, N1 + g1, x - y2))));
        }
        const double dx = std::abs(x2 - x);
        if (fam.smooth && dx > 0.0) {
            const double dt = std::abs(t - fam.eval(k, x2, y));
            const double pw = std::pow(sc * dx, d.gamma);
            acc.xreg = std::max(acc.xreg, dt / (pw * (phi(k, M, x - y) + phi(k, M, x2 - y))));
            acc.alt_reg = std::max(acc.alt_reg, dt / (sc * pw));
        }
    }
    KernelReport r = finish(acc, d, fam.smooth, false, used);
    std::vector<double> ex;
    const double x0 = S.snap(0.5 * (fam.domain_lo + fam.domain_hi));
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        const double len = std::ldexp(1.0, -k);
        for (double a : kBaseOffsets) {
            const double y = S.snap(x0 + a * len);
            ex.push_back(local_exponent([&](double t) { return fam.eval(k, x0, y + t); }, len, fam.step));
        }
    }
    r.gamma_fit = median_exponent(ex);
    return r;
}

KernelReport verify_kernel_family(const BilinearKernelFamily& fam, int n_samples, std::uint64_t seed) {
    if (n_samples < 16) throw InvalidArgument("verify_kernel_family needs at least 16 samples");
    const auto& d = fam.declared;
    const double M = d.N + d.gamma;
    double N1, g1;
    converted(d, N1, g1);
    const Sampler S{fam.domain_lo, fam.domain_hi, fam.step, 7 + 1000 * seed};
    const int K = fam.k_max - fam.k_min + 1;
    Accum acc;
    int used = 0;
    for (int i = 0; used < n_samples && i < 50 * n_samples; ++i) {
        const int k = fam.k_min + std::min(K - 1, static_cast<int>(S.u(i, 0) * K));
        const double x = S.snap(fam.domain_lo + (fam.domain_hi - fam.domain_lo) * S.u(i, 1));
        const double y1 = S.snap(x + S.offset_at(k, S.u(i, 2), S.u(i, 3), -4.0, 6.0));
        const double y2 = S.snap(x + S.offset_at(k, S.u(i, 4), S.u(i, 5), -4.0, 6.0));
        const double s = S.offset_at(k, S.u(i, 6), S.u(i, 7), -10.0, 0.0);
        const int which = static_cast<int>(S.u(i, 8) * 3.0);  // 0: y1, 1: y2, 2: x
        double xs = x, a1 = y1, a2 = y2;
        if (which == 0) a1 = S.snap(y1 + s);
        else if (which == 1) a2 = S.snap(y2 + s);
        else xs = S.snap(x + s);
        if (!S.inside(x) || !S.inside(y1) || !S.inside(y2) || !S.inside(xs) || !S.inside(a1) || !S.inside(a2))
            continue;
        ++used;
        const double sc = std::ldexp(1.0, k);
        const cplx t = fam.eval(k, x, y1, y2);
        const double at = std::abs(t);
        acc.max_abs = std::max(acc.max_abs, at);
        acc.size = std::max(acc.size, at / (phi(k, M, x - y1) * phi(k, M, x - y2)));
        acc.alt_size = acc.size;
        acc.tail.emplace_back(std::log2((1.0 + sc * std::abs(x - y1)) * (1.0 + sc * std::abs(x - y2))),
                              std::log2(at / (sc * sc) + kTiny));

        if (which == 2 && !fam.smooth) continue;
        const double disp = which == 0 ? std::abs(a1 - y1) : which == 1 ? std::abs(a2 - y2) : std::abs(xs - x);
        if (disp <= 0.0) continue;
        const double dt = std::abs(t - fam.eval(k, xs, a1, a2));
        const double pw = std::pow(sc * disp, d.gamma);
        double env, env_back;
        if (which == 0) {
            env = (phi(k, M, x - y1) + phi(k, M, x - a1)) * phi(k, M, x - y2);
            env_back = (phi(k, N1 + g1, x - y1) + phi(k, N1 + g1, x - a1)) * phi(k, N1 + g1, x - y2);
        } else if (which == 1) {
            env = phi(k, M, x - y1) * (phi(k, M, x - y2) + phi(k, M, x - a2));
            env_back = phi(k, N1 + g1, x - y1) * (phi(k, N1 + g1, x - y2) + phi(k, N1 + g1, x - a2));
        } else {
            env = (phi(k, M, x - y1) + phi(k, M, xs - y1)) * (phi(k, M, x - y2) + phi(k, M, xs - y2));
            env_back = (phi(k, N1 + g1, x - y1) + phi(k, N1 + g1, xs - y1)) *
                       (phi(k, N1 + g1, x - y2) + phi(k, N1 + g1, xs - y2));
        }
        const double ratio = dt / (pw * env);
        if (which == 2) acc.xreg = std::max(acc.xreg, ratio);
        else acc.reg = std::max(acc.reg, ratio);
        acc.alt_reg = std::max(acc.alt_reg, dt / (sc * sc * pw));
        acc.back = std::max(acc.back, dt / (std::pow(sc * disp, g1) * env_back));
    }
    KernelReport r = finish(acc, d, fam.smooth, true, used);
    std::vector<double> ex;
    const double x0 = S.snap(0.5 * (fam.domain_lo + fam.domain_hi));
    for (int k = fam.k_min; k <= fam.k_max; ++k) {
        const double len = std::ldexp(1.0, -k);
        for (double a : kBaseOffsets) {
            const double y1 = S.snap(x0 + a * len), y2 = S.snap(x0 - 0.5 * a * len);
            ex.push_back(local_exponent([&](double t) { return fam.eval(k, x0, y1 + t, y2); }, len, fam.step));
            ex.push_back(local_exponent([&](double t) { return fam.eval(k, x0, y1, y2 + t); }, len, fam.step));
        }
    }
    r.gamma_fit = median_exponent(ex);
    return r;
}

namespace {

int grid_index(const Grid& g, double x) { return g.nearest_index(x); }

}  // namespace

LinearKernelFamily difference_kernel_family(const DifferenceFamily& D, KernelConstants declared) {
    const Grid g = D.b().grid();
    const DifferenceFamily* dp = &D;
    LinearKernelFamily fam;
    fam.eval = [dp, g](int k, double x, double y) {
        return dp->d(k).coeffs()(grid_index(g, x), grid_index(g, y));
    };
    fam.k_min = D.k_min();
    fam.k_max = D.k_max();
    fam.domain_lo = -g.half_length();
    fam.domain_hi = g.half_length();
    fam.step = g.step();
    fam.declared = declared;
    fam.smooth = true;
    return fam;
}

BilinearKernelFamily paraproduct_kernel_family(const DifferenceFamily& D, KernelConstants declared) {
    const Grid g = D.b().grid();
    const DifferenceFamily* dp = &D;
    BilinearKernelFamily fam;
    fam.eval = [dp, g](int k, double x, double y1, double y2) {
        const int i = grid_index(g, x), j1 = grid_index(g, y1), j2 = grid_index(g, y2);
        const auto& d = dp->d(k).coeffs();
        const auto& s = dp->approx->s(k).coeffs();
        const Vec& b = dp->b().values();
        cplx acc = 0.0;
        for (int u = 0; u < g.size(); ++u) {
            const cplx du = d(i, u);
            if (du == 0.0) continue;
            acc += du * b[u] * s(u, j1) * s(u, j2);
        }
        return g.step() * acc;
    };
    fam.k_min = D.k_min();
    fam.k_max = D.k_max();
    fam.domain_lo = -g.half_length();
    fam.domain_hi = g.half_length();
    fam.step = g.step();
    fam.declared = declared;
    fam.smooth = true;
    return fam;
}

BilinearKernelFamily smooth_bump_bilinear_family(int k_min, int k_max, double half_width) {
    BilinearKernelFamily fam;
    fam.eval = [](int k, double x, double y1, double y2) {
        const double s = std::ldexp(1.0, k);
        auto psi = [](double t) { return std::exp(-t * t); };
        return cplx(s * s * psi(s * (x - y1)) * psi(s * (x - y2)));
    };
    fam.k_min = k_min;
    fam.k_max = k_max;
    fam.domain_lo = -half_width;
    fam.domain_hi = half_width;
    fam.declared = {8.0, 2.0, 1.0};
    fam.smooth = true;
    return fam;
}

BilinearKernelFamily product_family(const LinearKernelFamily& a, const LinearKernelFamily& c) {
    BilinearKernelFamily fam;
    auto ea = a.eval;
    auto ec = c.eval;
    fam.eval = [ea, ec](int k, double x, double y1, double y2) { return ea(k, x, y1) * ec(k, x, y2); };
    fam.k_min = std::max(a.k_min, c.k_min);
    fam.k_max = std::min(a.k_max, c.k_max);
    fam.domain_lo = std::max(a.domain_lo, c.domain_lo);
    fam.domain_hi = std::min(a.domain_hi, c.domain_hi);
    fam.step = std::max(a.step, c.step);
    fam.declared = {a.declared.A * c.declared.A, std::min(a.declared.N, c.declared.N),
                    std::min(a.declared.gamma, c.declared.gamma)};
    fam.smooth = a.smooth && c.smooth;
    return fam;
}

double kernel_ao_integral(const BilinearKernelFamily& fam, int j, int k, double x, double y1, double y2,
                          const Grid& grid) {
    const double M = fam.declared.N + fam.declared.gamma;
    const cplx base = fam.eval(j, x, y1, y2);
    double acc = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double u = grid.x(i);
        acc += std::abs(base - fam.eval(j, x, u, y2)) * decay_profile(k, M, u - y1);
    }
    return grid.step() * acc;
}

AoReport operator_ao_decay(const DifferenceFamily& D, AoMode mode, int max_gap, double gamma_fit, int probes,
                           std::uint64_t seed) {
    const Grid& g = D.b().grid();
    const int n = g.size();
    const double h = g.step();
    const Vec& b = D.b().values();
    const int kmin = D.k_min(), kmax = D.k_max();
    max_gap = std::min(max_gap, kmax - kmin);
    if (max_gap < 1) throw InvalidArgument("operator_ao_decay needs at least two scales");

    Rng rng(seed);
    std::vector<Vec> pr;
    for (int t = 0; t < probes; ++t) {
        Vec f(n);
        if (t % 2 == 0) {
            for (int i = 0; i < n; ++i) f[i] = cplx(rng.normal(), rng.normal());
        } else {
            const double c = rng.uniform(-0.5, 0.5) * g.half_length();
            const double r = std::ldexp(1.0, -kmin - t % 5);
            for (int i = 0; i < n; ++i) f[i] = std::exp(-std::pow((g.x(i) - c) / r, 2)) * std::polar(1.0, rng.uniform(0, 6.28));
        }
        pr.push_back(f);
    }
    std::vector<Vec> maxf;
    for (auto& f : pr) maxf.push_back(maximal_function(GridFunction(g, f)).values());

    auto Dm = [&](int k, const Vec& v) -> Vec { return h * (D.d(k).coeffs() * v); };
    auto DTm = [&](int k, const Vec& v) -> Vec { return h * (D.d(k).coeffs().transpose() * v); };
    auto Sm = [&](int k, const Vec& v) -> Vec { return h * (D.approx->s(k).coeffs() * v); };

    AoReport rep;
    rep.gamma_fit = gamma_fit;
    rep.norms.assign(max_gap + 1, 0.0);
    rep.majorant_ratios.assign(max_gap + 1, 0.0);
    for (int gap = 0; gap <= max_gap; ++gap) rep.gaps.push_back(gap);

    for (int j = kmin; j <= kmax; ++j) {
        for (int k = kmin; k <= kmax; ++k) {
            const int gap = std::abs(j - k);
            if (gap > max_gap) continue;
            double& norm = rep.norms[gap];
            double& maj = rep.majorant_ratios[gap];
            if (mode == AoMode::Linear) {
                const LinearMap op{[&](const Vec& v) -> Vec { return Dm(j, Vec(b.cwiseProduct(DTm(k, v)))); },
                                   [&](const Vec& v) -> Vec {
                                       const Vec w = h * (D.d(j).coeffs().adjoint() * v);
                                       return h * (D.d(k).coeffs().conjugate() * Vec(b.conjugate().cwiseProduct(w)));
                                   }};
                norm = std::max(norm, l2_norm_power(op, n, 80, seed + 31 * j + k));
                for (std::size_t p = 0; p < pr.size(); ++p) {
                    const Vec out = op.apply(pr[p]);
                    for (int i = 0; i < n; ++i)
                        if (maxf[p][i].real() > 0) maj = std::max(maj, std::abs(out[i]) / maxf[p][i].real());
                }
            } else {
                for (std::size_t p = 0; p + 1 < pr.size(); p += 2) {
                    const Vec& f1 = pr[p];
                    const Vec& f2 = pr[p + 1];
                    Vec out, majorant;
                    if (mode == AoMode::AdjointBilinear) {
                        const Vec theta = Dm(j, Vec(b.cwiseProduct(Sm(j, f1).cwiseProduct(Sm(j, f2)))));
                        out = Dm(k, Vec(b.cwiseProduct(theta)));
                        majorant = maximal_function(GridFunction(g, maxf[p].cwiseProduct(maxf[p + 1]))).values();
                    } else {
                        const Vec g1 = b.cwiseProduct(DTm(k, f1));
                        const Vec g2 = b.cwiseProduct(DTm(k, f2));
                        out = Dm(j, Vec(b.cwiseProduct(Sm(j, g1).cwiseProduct(Sm(j, g2)))));
                        majorant = maxf[p].cwiseProduct(maxf[p + 1]);
                    }
                    const double den = lp_norm(f1, h, 4.0) * lp_norm(f2, h, 4.0);
                    norm = std::max(norm, lp_norm(out, h, 2.0) / den);
                    for (int i = 0; i < n; ++i)
                        if (majorant[i].real() > 0) maj = std::max(maj, std::abs(out[i]) / majorant[i].real());
                }
            }
        }
    }
    std::vector<double> xs(rep.gaps.begin(), rep.gaps.end());
    rep.slope = fit_log2_decay(xs, rep.norms, 0.0).slope;
    rep.passes = rep.slope <= -gamma_fit + 0.2;
    return rep;
}

}  // namespace czlab
