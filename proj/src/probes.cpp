#include "czlab/probes.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "czlab/error.hpp"
#include "czlab/rng.hpp"

namespace czlab {

double smooth_bump(double t) {
    const double a = 1.0 - t * t;
    return a > 0.0 ? std::exp(-1.0 / a) : 0.0;
}

double smooth_bump_derivative(double t) {
    const double a = 1.0 - t * t;
    return a > 0.0 ? std::exp(-1.0 / a) * (-2.0 * t / (a * a)) : 0.0;
}

AnalyticFunction bump(double centre, double radius, cplx amplitude) {
    if (!(radius > 0.0)) throw InvalidArgument("bump radius must be positive");
    AnalyticFunction f;
    f.value = [=](double x) { return amplitude * smooth_bump((x - centre) / radius); };
    f.derivative = [=](double x) { return amplitude * smooth_bump_derivative((x - centre) / radius) / radius; };
    f.support_lo = centre - radius;
    f.support_hi = centre + radius;
    return f;
}

AnalyticFunction oscillation(double centre, double radius, double freq, double phase) {
    AnalyticFunction f;
    f.value = [=](double x) {
        return cplx(std::sin(freq * x + phase) * smooth_bump((x - centre) / radius));
    };
    f.derivative = [=](double x) {
        const double t = (x - centre) / radius;
        return cplx(freq * std::cos(freq * x + phase) * smooth_bump(t) +
                    std::sin(freq * x + phase) * smooth_bump_derivative(t) / radius);
    };
    f.support_lo = centre - radius;
    f.support_hi = centre + radius;
    return f;
}

AnalyticFunction combine(const std::vector<AnalyticFunction>& parts, const std::vector<cplx>& coeffs) {
    if (parts.size() != coeffs.size() || parts.empty()) throw InvalidArgument("combine: bad arguments");
    auto p = std::make_shared<std::vector<AnalyticFunction>>(parts);
    auto c = std::make_shared<std::vector<cplx>>(coeffs);
    AnalyticFunction f;
    f.value = [p, c](double x) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < p->size(); ++i) s += (*c)[i] * (*p)[i].value(x);
        return s;
    };
    f.derivative = [p, c](double x) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < p->size(); ++i) s += (*c)[i] * (*p)[i].derivative(x);
        return s;
    };
    f.support_lo = parts.front().support_lo;
    f.support_hi = parts.front().support_hi;
    for (const auto& q : parts) {
        f.support_lo = std::min(f.support_lo, q.support_lo);
        f.support_hi = std::max(f.support_hi, q.support_hi);
    }
    return f;
}

AnalyticFunction holder_random(double delta, double radius, int modes, std::uint64_t seed) {
    if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("holder_random requires delta in (0, 1]");
    Rng rng(seed);
    auto a = std::make_shared<std::vector<double>>(modes);
    auto ph = std::make_shared<std::vector<double>>(modes);
    for (int m = 0; m < modes; ++m) {
        (*a)[m] = rng.normal() * std::pow(m + 1.0, -(delta + 0.5));
        (*ph)[m] = rng.uniform(0.0, 2.0 * M_PI);
    }
    const double period = 2.0 * radius;
    AnalyticFunction f;
    f.value = [=](double x) {
        const double w = smooth_bump(x / radius);
        if (w == 0.0) return cplx(0.0);
        double s = 0.0;
        for (int m = 0; m < modes; ++m) s += (*a)[m] * std::cos(2.0 * M_PI * (m + 1) * x / period + (*ph)[m]);
        return cplx(s * w);
    };
    f.derivative = [=](double x) {
        const double w = smooth_bump(x / radius);
        if (w == 0.0) return cplx(0.0);
        double s = 0.0, ds = 0.0;
        for (int m = 0; m < modes; ++m) {
            const double om = 2.0 * M_PI * (m + 1) / period;
            s += (*a)[m] * std::cos(om * x + (*ph)[m]);
            ds -= (*a)[m] * om * std::sin(om * x + (*ph)[m]);
        }
        return cplx(ds * w + s * smooth_bump_derivative(x / radius) / radius);
    };
    f.support_lo = -radius;
    f.support_hi = radius;
    return f;
}

GridFunction project_mean_zero(const GridFunction& b, const GridFunction& phi, const GridFunction& psi) {
    const cplx den = pairing(b, psi);
    if (std::abs(den) < 1e-14) throw InvalidArgument("project_mean_zero: <b, psi> vanishes");
    return phi - psi * (pairing(b, phi) / den);
}

std::vector<AnalyticFunction> probe_functions(const ProbeSpec& spec, double half_length, int modes) {
    if (spec.count < 0) throw InvalidArgument("probe count must be non-negative");
    if (!(spec.delta > 0.0 && spec.delta <= 1.0)) throw InvalidArgument("probe delta must lie in (0, 1]");
    Rng rng(spec.seed);
    const double span = 0.5 * half_length;
    std::vector<AnalyticFunction> out;
    for (int t = 0; t < spec.count; ++t) {
        if (spec.family == "bump") {
            const double r = rng.uniform(0.25, 1.5);
            out.push_back(bump(rng.uniform(-span + r, span - r), r, 1.0));
        } else if (spec.family == "holder_random") {
            out.push_back(holder_random(spec.delta, std::min(2.0, span), modes, spec.seed * 7919 + t));
        } else if (spec.family == "oscillation") {
            const double r = rng.uniform(0.5, 1.5);
            out.push_back(oscillation(rng.uniform(-span + r, span - r), r, spec.freq, rng.uniform(0.0, 2.0 * M_PI)));
        } else if (spec.family == "mean_zero_pair") {
            const double r = rng.uniform(0.25, 1.0);
            const double c = rng.uniform(-span + 3 * r, span - 3 * r);
            out.push_back(combine({bump(c - r, r), bump(c + r, r)}, {1.0, -1.0}));
        } else {
            throw InvalidArgument("unknown probe family: " + spec.family);
        }
    }
    return out;
}

std::vector<GridFunction> gen_probes(const ProbeSpec& spec, const Grid& grid) {
    std::vector<GridFunction> out;
    for (const auto& f : probe_functions(spec, grid.half_length(), std::max(8, grid.size() / 2)))
        out.push_back(f.sample(grid));
    return out;
}

std::vector<GridFunction> gen_probes(const ProbeSpec& spec, const Grid& grid, const GridFunction& b) {
    if (b.grid() != grid) throw InvalidArgument("gen_probes: b lives on another grid");
    auto out = gen_probes(spec, grid);
    if (spec.family != "mean_zero_pair") return out;
    const GridFunction psi = bump(0.0, std::min(1.0, 0.25 * grid.half_length())).sample(grid);
    for (auto& f : out) f = project_mean_zero(b, f, psi);
    return out;
}

std::vector<GridFunction> mean_zero_bumps(const GridFunction& b, int count, double spread, std::uint64_t seed) {
    const Grid& g = b.grid();
    const GridFunction psi = bump(0.0, spread).sample(g);
    Rng rng(seed);
    std::vector<GridFunction> out;
    for (int t = 0; t < count; ++t) {
        const double r = rng.uniform(0.3, 0.5 * spread);
        const double c = rng.uniform(-spread + r, spread - r);
        out.push_back(project_mean_zero(b, bump(c, r).sample(g), psi));
    }
    return out;
}

double cutoff_profile(double t, int variant) {
    t = std::abs(t);
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    if (variant == 0) {
        const double c = std::cos(0.5 * M_PI * (t - 1.0));
        return c * c;
    }
    auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    return f(2.0 - t) / (f(t - 1.0) + f(2.0 - t));
}

double cutoff_profile_derivative(double t, int variant) {
    const double a = std::abs(t);
    if (a <= 1.0 || a >= 2.0) return 0.0;
    const double sgn = t < 0.0 ? -1.0 : 1.0;
    if (variant == 0) return -sgn * 0.5 * M_PI * std::sin(M_PI * (a - 1.0));
    auto f = [](double s) { return std::exp(-1.0 / s); };
    auto df = [&](double s) { return f(s) / (s * s); };
    const double A = f(2.0 - a), B = f(a - 1.0);
    const double dA = -df(2.0 - a), dB = df(a - 1.0);
    return sgn * (dA * B - A * dB) / ((A + B) * (A + B));
}

GridFunction cutoff(const Grid& grid, double R, int variant) {
    if (!(R > 0.0)) throw InvalidArgument("cutoff radius must be positive");
    if (variant != 0 && variant != 1) throw InvalidArgument("cutoff variant must be 0 or 1");
    return GridFunction::sample(grid, [&](double x) { return cplx(cutoff_profile(x / R, variant)); });
}

double holder_seminorm(const GridFunction& f, double delta, double near_distance) {
    if (!(delta > 0.0 && delta <= 1.0)) throw InvalidArgument("holder_seminorm requires delta in (0, 1]");
    const Grid& g = f.grid();
    const int n = g.size();
    const double h = g.step();
    const int near = std::max(1, static_cast<int>(std::floor(near_distance / h + 1e-9)));
    const int far_stride = std::max(1, n / 64);
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n && j - i <= near; ++j)
            best = std::max(best, std::abs(f[i] - f[j]) / std::pow((j - i) * h, delta));
        for (int j = i + near + 1; j < n; j += far_stride)
            best = std::max(best, std::abs(f[i] - f[j]) / std::pow((j - i) * h, delta));
    }
    return best;
}

}  // namespace czlab
