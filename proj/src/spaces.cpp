#include "czlab/spaces.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "czlab/error.hpp"
#include "czlab/fit.hpp"

namespace czlab {

H1Norm h1_norm(const GridFunction& f) {
    H1Norm out;
    const double l1 = lp_norm(f, 1.0);
    out.mean = f.grid().step() * f.values().sum();
    out.mean_nonzero = std::abs(out.mean) > 1e-6 * l1;
    out.value = l1 + lp_norm(hilbert_transform(f), 1.0);
    return out;
}

H1Growth h1_growth_experiment(const Grid& grid, int j, int max_gap, double N) {
    if (max_gap < 2) throw InvalidArgument("h1_growth_experiment needs max_gap >= 2");
    const int finest = static_cast<int>(std::floor(std::log2(1.0 / (2.0 * grid.step()))));
    if (j + max_gap > finest)
        throw ScaleUnresolvable("h1_growth_experiment: scale " + std::to_string(j + max_gap) +
                                    " is below two grid cells",
                                finest);
    H1Growth out;
    const GridFunction pj = GridFunction::sample(grid, [&](double x) { return cplx(decay_profile(j, N, x)); });
    const double mj = grid.step() * pj.values().real().sum();
    std::vector<double> xs, ys;
    for (int g = 0; g <= max_gap; ++g) {
        const int k = j + g;
        const GridFunction pk = GridFunction::sample(grid, [&](double x) { return cplx(decay_profile(k, N, x)); });
        const double mk = grid.step() * pk.values().real().sum();
        const double v = h1_norm(pj - pk * (mj / mk)).value;
        out.gaps.push_back(g);
        out.norms.push_back(v);
        xs.push_back(g);
        ys.push_back(v);
    }
    out.exponent = fit_power_plus_constant(xs, ys).exponent;
    out.sublinear = out.exponent <= 1.15;
    return out;
}

double bmo_norm(const GridFunction& f) {
    const int n = f.size();
    double best = 0.0;
    for (int m = n; m >= 2; m /= 2) {
        for (int a = 0; a < n; a += m) {
            const cplx avg = f.values().segment(a, m).mean();
            double osc = 0.0;
            for (int i = a; i < a + m; ++i) osc += std::abs(f[i] - avg);
            best = std::max(best, osc / m);
        }
    }
    return best;
}

double carleson_norm(const std::vector<GridFunction>& a, int k_min) {
    if (a.empty()) throw InvalidArgument("carleson_norm needs at least one scale");
    const Grid& g = a.front().grid();
    const int n = g.size();
    const double h = g.step();
    std::vector<std::vector<double>> prefix(a.size(), std::vector<double>(n + 1, 0.0));
    for (std::size_t s = 0; s < a.size(); ++s) {
        if (a[s].grid() != g) throw InvalidArgument("carleson_norm: grid mismatch");
        for (int i = 0; i < n; ++i) prefix[s][i + 1] = prefix[s][i] + h * std::abs(a[s][i]);
    }
    double best = 0.0;
    for (int m = n; m >= 2; m /= 2) {
        const double len = m * h;
        for (int lo = 0; lo < n; lo += m) {
            double mass = 0.0;
            for (std::size_t s = 0; s < a.size(); ++s) {
                const int k = k_min + static_cast<int>(s);
                if (std::ldexp(1.0, -k) <= len * (1.0 + 1e-12)) mass += prefix[s][lo + m] - prefix[s][lo];
            }
            best = std::max(best, mass / len);
        }
    }
    return best;
}

ConvergenceReport approx_identity_convergence(const ApproxIdentity& approx, const GridFunction& f, double p,
                                              bool towards_identity) {
    ConvergenceReport out;
    const GridFunction bf = approx.b * f;
    std::vector<double> xs;
    for (int t = 0; t < approx.scales(); ++t) {
        const int k = towards_identity ? approx.k_min + t : approx.k_max - t;
        const GridFunction Pf = approx.s(k).apply(bf);
        out.scales.push_back(k);
        out.errors.push_back(towards_identity ? lp_norm(Pf - f, p) : lp_norm(Pf, p));
        xs.push_back(k);
    }
    out.monotone = true;
    for (std::size_t i = 1; i < out.errors.size(); ++i)
        if (out.errors[i] > out.errors[i - 1] * (1.0 + 1e-9)) out.monotone = false;
    out.slope = fit_log2_decay(xs, out.errors, 0.0).slope;
    return out;
}

ReproducingConvergence reproducing_convergence(const ReproducingFamily& fam, const GridFunction& phi,
                                               int k_centre) {
    ReproducingConvergence out;
    const auto& D = fam.differences();
    const GridFunction target = fam.b() * phi;
    const double scale = lp_norm(target, 2.0);
    const int reach = std::max(k_centre - D.k_min(), D.k_max() - k_centre);
    for (int M = 0; M <= reach; ++M) {
        out.radii.push_back(M);
        const GridFunction partial = fam.reproduce(phi, k_centre - M, k_centre + M);
        const double err = lp_norm(partial - target, 2.0);
        out.l2_errors.push_back(scale > 0.0 ? err / scale : err);
    }
    out.monotone = true;
    for (std::size_t i = 1; i < out.l2_errors.size(); ++i)
        if (out.l2_errors[i] > out.l2_errors[i - 1] * (1.0 + 1e-9)) out.monotone = false;

    for (int k = D.k_min(); k <= D.k_max(); ++k) {
        out.scales.push_back(k);
        out.term_h1.push_back(h1_norm(fam.term(k, phi)).value);
    }
    const auto peak = std::max_element(out.term_h1.begin(), out.term_h1.end()) - out.term_h1.begin();
    out.envelope_centre = out.scales[peak];
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < out.scales.size(); ++i) {
        if (out.term_h1[i] <= 0.0) continue;
        const int gap = std::abs(out.scales[i] - out.envelope_centre);
        xs.push_back(gap);
        ys.push_back(std::log2(out.term_h1[i] / (1.0 + gap)));
    }
    if (xs.size() >= 2) out.gamma_fit = -fit_line(xs, ys).slope;
    return out;
}

}  // namespace czlab
