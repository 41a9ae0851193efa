#include "czlab/tb.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <Eigen/QR>

#include "czlab/error.hpp"
#include "czlab/fit.hpp"
#include "czlab/probes.hpp"
#include "czlab/rng.hpp"
#include "czlab/spaces.hpp"

namespace czlab {

// ---------------------------------------------------------------------------------------------
// Forms

TrilinearForm form_from_operator(std::string name, BilinearOperator apply,
                                 std::function<cplx(double, double, double)> kernel, double gamma) {
    TrilinearForm T;
    T.name = std::move(name);
    T.apply = std::move(apply);
    T.form = [op = T.apply](const GridFunction& g1, const GridFunction& g2, const GridFunction& g0) {
        return pairing(op(g1, g2), g0);
    };
    T.kernel = std::move(kernel);
    T.gamma = gamma;
    return T;
}

TrilinearForm pointwise_product_form(const Grid& grid) {
    (void)grid;
    return form_from_operator("pointwise", [](const GridFunction& g1, const GridFunction& g2) { return g1 * g2; });
}

TrilinearForm zero_form() {
    return form_from_operator("zero", [](const GridFunction& g1, const GridFunction&) {
        return GridFunction::zero(g1.grid());
    }, [](double, double, double) { return cplx(0.0); });
}

TrilinearForm paraproduct_form(std::shared_ptr<const Paraproduct> P) {
    if (!P) throw InvalidArgument("paraproduct_form: missing paraproduct");
    return form_from_operator(
        "paraproduct", [P](const GridFunction& g1, const GridFunction& g2) { return P->apply(g1, g2); },
        [P](double x, double y1, double y2) { return P->kernel(x, y1, y2); });
}

TrilinearForm riesz_form(std::shared_ptr<const RieszGridOperator> op) {
    if (!op) throw InvalidArgument("riesz_form: missing operator");
    auto K = std::make_shared<const CurveKernels>(op->curve());
    return form_from_operator(
        "riesz_" + op->curve()->kind(),
        [op](const GridFunction& g1, const GridFunction& g2) { return op->apply(g1, g2); },
        [K](double x, double y1, double y2) { return K->kernel(1, x, y1, y2); });
}

TrilinearForm transpose1(const TrilinearForm& T) {
    TrilinearForm out;
    out.name = T.name + "*1";
    out.form = [f = T.form](const GridFunction& g1, const GridFunction& g2, const GridFunction& g0) {
        return f(g0, g2, g1);
    };
    if (T.kernel) out.kernel = [k = T.kernel](double x, double y1, double y2) { return k(y1, x, y2); };
    out.gamma = T.gamma;
    return out;
}

TrilinearForm transpose2(const TrilinearForm& T) {
    TrilinearForm out;
    out.name = T.name + "*2";
    out.form = [f = T.form](const GridFunction& g1, const GridFunction& g2, const GridFunction& g0) {
        return f(g1, g0, g2);
    };
    if (T.kernel) out.kernel = [k = T.kernel](double x, double y1, double y2) { return k(y2, y1, x); };
    out.gamma = T.gamma;
    return out;
}

TrilinearForm difference(const TrilinearForm& T, const std::vector<TrilinearForm>& others) {
    TrilinearForm out;
    out.name = T.name + "-reduced";
    out.gamma = T.gamma;
    out.form = [T, others](const GridFunction& g1, const GridFunction& g2, const GridFunction& g0) {
        cplx v = T.form(g1, g2, g0);
        for (const auto& o : others) v -= o.form(g1, g2, g0);
        return v;
    };
    bool ops = T.has_apply(), kers = static_cast<bool>(T.kernel);
    for (const auto& o : others) {
        ops = ops && o.has_apply();
        kers = kers && static_cast<bool>(o.kernel);
    }
    if (ops) {
        out.apply = [T, others](const GridFunction& g1, const GridFunction& g2) {
            GridFunction v = T.apply(g1, g2);
            for (const auto& o : others) v = v - o.apply(g1, g2);
            return v;
        };
        out.form = [op = out.apply](const GridFunction& g1, const GridFunction& g2, const GridFunction& g0) {
            return pairing(op(g1, g2), g0);
        };
    }
    if (kers)
        out.kernel = [T, others](double x, double y1, double y2) {
            cplx v = T.kernel(x, y1, y2);
            for (const auto& o : others) v -= o.kernel(x, y1, y2);
            return v;
        };
    return out;
}

FormChecks check_form(const TrilinearForm& T, const Grid& grid, std::uint64_t seed) {
    Rng rng(seed);
    const double span = 0.25 * grid.half_length();
    auto rb = [&]() {
        const double r = rng.uniform(0.1, 0.5) * span;
        return bump(rng.uniform(-span, span), r, cplx(rng.normal(), rng.normal())).sample(grid);
    };
    FormChecks out;
    for (int trial = 0; trial < 3; ++trial) {
        const GridFunction a = rb(), c = rb(), g1 = rb(), g2 = rb(), g0 = rb();
        const cplx s(1.3, -0.4);
        const std::array<std::array<cplx, 3>, 3> v = {{
            {T(a + c, g2, g0), T(a, g2, g0), T(c, g2, g0)},
            {T(g1, a + c, g0), T(g1, a, g0), T(g1, c, g0)},
            {T(g1, g2, a + c), T(g1, g2, a), T(g1, g2, c)},
        }};
        for (const auto& r : v) {
            const double sc = std::abs(r[1]) + std::abs(r[2]) + 1e-300;
            out.linearity = std::max(out.linearity, std::abs(r[0] - r[1] - r[2]) / sc);
        }
        const cplx base = T(g1, g2, g0);
        const double sc = std::abs(base) + 1e-300;
        out.linearity = std::max(out.linearity, std::abs(T(g1 * s, g2, g0) - s * base) / sc);
        out.linearity = std::max(out.linearity, std::abs(T(g1, g2 * s, g0) - s * base) / sc);
        out.linearity = std::max(out.linearity, std::abs(T(g1, g2, g0 * s) - s * base) / sc);
    }
    if (T.kernel) {
        const double r = 0.1 * grid.half_length();
        const GridFunction g0 = bump(0.0, r).sample(grid);
        const GridFunction g1 = bump(-3.0 * r, r).sample(grid);
        const GridFunction g2 = bump(3.5 * r, r, cplx(0.5, 1.0)).sample(grid);
        const double h = grid.step();
        cplx q = 0.0;
        double qa = 0.0;
        for (int i = 0; i < grid.size(); ++i) {
            if (g0[i] == 0.0) continue;
            for (int j1 = 0; j1 < grid.size(); ++j1) {
                if (g1[j1] == 0.0) continue;
                for (int j2 = 0; j2 < grid.size(); ++j2) {
                    if (g2[j2] == 0.0) continue;
                    const cplx t = T.kernel(grid.x(i), grid.x(j1), grid.x(j2)) * g0[i] * g1[j1] * g2[j2];
                    q += t;
                    qa += std::abs(t);
                }
            }
        }
        q *= h * h * h;
        qa *= h * h * h;
        out.kernel_agreement = std::abs(T(g1, g2, g0) - q) / (qa + 1e-300);
        out.kernel_checked = true;
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Bumps

double NormalizedBump::raw_profile(int profile, double t) {
    if (std::abs(t) >= 1.0) return 0.0;
    switch (profile) {
        case 0: return smooth_bump(t);
        case 1: return std::pow(1.0 - t * t, 4);
        case 2: return t * smooth_bump(t);
        case 3: return smooth_bump(t) * std::cos(2.0 * t);
        case 4: return smooth_bump(2.0 * t);
        default: throw InvalidArgument("NormalizedBump: unknown profile");
    }
}

namespace {

double lattice_bound(int profile, int order, double scale, int points, double offset) {
    const double d = 2.0 / points;
    std::vector<double> v(points + 7);
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] = scale * NormalizedBump::raw_profile(profile, -1.0 - 3.0 * d + (i + offset) * d);
    double best = 0.0;
    for (int j = 0; j <= order; ++j) {
        for (double x : v) best = std::max(best, std::abs(x));
        std::vector<double> w(v.size() - 1);
        for (std::size_t i = 0; i + 1 < v.size(); ++i) w[i] = (v[i + 1] - v[i]) / d;
        v.swap(w);
    }
    return best;
}

}  // namespace

double NormalizedBump::derivative_bound(int profile, int order) {
    if (profile < 0 || profile >= kProfiles || order < 1 || order > kOrders)
        throw InvalidArgument("NormalizedBump: profile or order out of range");
    static std::once_flag once;
    static std::array<std::array<double, kOrders>, kProfiles> table;
    std::call_once(once, [] {
        for (int p = 0; p < kProfiles; ++p)
            for (int m = 1; m <= kOrders; ++m) table[p][m - 1] = lattice_bound(p, m, 1.0, 4000, 0.0);
    });
    return table[profile][order - 1];
}

NormalizedBump::NormalizedBump(double centre, double radius, int order, int profile)
    : centre_(centre), radius_(radius), order_(order), profile_(profile) {
    if (!(radius > 0.0)) throw InvalidArgument("NormalizedBump: radius must be positive");
    scale_ = 1.0 / (1.01 * derivative_bound(profile, order));
}

double NormalizedBump::operator()(double x) const { return scale_ * raw_profile(profile_, (x - centre_) / radius_); }

GridFunction NormalizedBump::sample(const Grid& grid) const {
    return GridFunction::sample(grid, [this](double x) { return cplx((*this)(x)); });
}

double NormalizedBump::certified_bound() const { return lattice_bound(profile_, order_, scale_, 9000, 0.37); }

namespace {

struct LibraryEntry {
    int p1, p2, p0, order;
};

std::vector<LibraryEntry> bump_library() {
    std::vector<LibraryEntry> lib;
    for (int m = 1; m <= NormalizedBump::kOrders; ++m)
        for (int p = 0; p < NormalizedBump::kProfiles; ++p) {
            lib.push_back({p, p, p, m});
            lib.push_back({p, (p + 1) % NormalizedBump::kProfiles, (p + 2) % NormalizedBump::kProfiles, m});
        }
    return lib;
}

void check_resolved(const Grid& g, double R, const char* who) {
    if (R < 4.0 * g.step()) throw ScaleUnresolvable(std::string(who) + ": bump radius below four grid cells", 0);
}

}  // namespace

WbpReport wbp_constant(const TrilinearForm& T, const GridFunction& b0, const GridFunction& b1, const GridFunction& b2,
                       const std::vector<double>& radii, const std::vector<double>& centres) {
    const Grid& g = b0.grid();
    if (radii.empty() || centres.empty()) throw InvalidArgument("wbp_constant needs radii and centres");
    const auto lib = bump_library();
    WbpReport out;
    for (double R : radii) {
        check_resolved(g, R, "wbp_constant");
        double best = 0.0;
        for (double x : centres) {
            if (std::abs(x) + R > g.half_length()) throw InvalidArgument("wbp_constant: bump leaves the grid");
            for (const auto& e : lib) {
                const GridFunction p1 = NormalizedBump(x, R, e.order, e.p1).sample(g);
                const GridFunction p2 = NormalizedBump(x, R, e.order, e.p2).sample(g);
                const GridFunction p0 = NormalizedBump(x, R, e.order, e.p0).sample(g);
                best = std::max(best, std::abs(T(b1 * p1, b2 * p2, b0 * p0)) / R);
                ++out.evaluations;
            }
        }
        out.radii.push_back(R);
        out.constants.push_back(best);
    }
    const auto [lo, hi] = std::minmax_element(out.constants.begin(), out.constants.end());
    out.C_wbp = *hi;
    out.scatter = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    return out;
}

DisplacedReport displaced_bump_growth(const TrilinearForm& T, const GridFunction& b0, const GridFunction& b1,
                                      const GridFunction& b2, double R, const std::vector<double>& separations,
                                      const std::vector<double>& centres) {
    const Grid& g = b0.grid();
    check_resolved(g, R, "displaced_bump_growth");
    const auto lib = bump_library();
    DisplacedReport out;
    out.order = 1;
    std::vector<double> lx, ly;
    for (double t : separations) {
        double best = 0.0;
        for (double x : centres) {
            if (std::abs(x) + (t + 1.0) * R > g.half_length())
                throw InvalidArgument("displaced_bump_growth: bump leaves the grid");
            for (const auto& e : lib) {
                const GridFunction p1 = NormalizedBump(x + t * R, R, e.order, e.p1).sample(g);
                const GridFunction p2 = NormalizedBump(x - t * R, R, e.order, e.p2).sample(g);
                const GridFunction p0 = NormalizedBump(x, R, e.order, e.p0).sample(g);
                best = std::max(best, std::abs(T(b1 * p1, b2 * p2, b0 * p0)) / R);
            }
        }
        out.separations.push_back(t);
        out.constants.push_back(best);
        if (best > 0.0) {
            lx.push_back(std::log(1.0 + t));
            ly.push_back(std::log(best));
        }
    }
    out.exponent = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;
    return out;
}

// ---------------------------------------------------------------------------------------------
// theta_k

struct ThetaExtractor::Cache {
    std::mutex m;
    std::map<std::tuple<int, int, int>, GridFunction> columns;
};

ThetaExtractor::ThetaExtractor(TrilinearForm T, std::shared_ptr<const DifferenceFamily> d0,
                               std::shared_ptr<const ApproxIdentity> s1, std::shared_ptr<const ApproxIdentity> s2)
    : T_(std::move(T)), d0_(std::move(d0)), s1_(std::move(s1)), s2_(std::move(s2)), cache_(std::make_shared<Cache>()) {
    if (!d0_ || !s1_ || !s2_) throw InvalidArgument("ThetaExtractor: missing family");
    if (!T_.has_apply()) throw InvalidArgument("ThetaExtractor: the form needs an operator");
    const Grid& g = d0_->b().grid();
    if (s1_->b.grid() != g || s2_->b.grid() != g) throw InvalidArgument("ThetaExtractor: families on different grids");
    for (const auto* s : {s1_.get(), s2_.get()})
        if (s->k_min > d0_->k_min() || s->k_max < d0_->k_max())
            throw InvalidArgument("ThetaExtractor: S family does not cover the difference scales");
}

int ThetaExtractor::k_min() const { return d0_->k_min(); }
int ThetaExtractor::k_max() const { return d0_->k_max(); }

const GridFunction& ThetaExtractor::column(int k, int j1, int j2) const {
    const auto key = std::make_tuple(k, j1, j2);
    {
        std::lock_guard<std::mutex> lock(cache_->m);
        auto it = cache_->columns.find(key);
        if (it != cache_->columns.end()) return it->second;
    }
    if (k < k_min() || k > k_max()) throw InvalidArgument("ThetaExtractor: scale out of range");
    const Grid& g = grid();
    const GridFunction g1(g, Vec(s1_->b.values().cwiseProduct(s1_->s(k).coeffs().col(j1))));
    const GridFunction g2(g, Vec(s2_->b.values().cwiseProduct(s2_->s(k).coeffs().col(j2))));
    const GridFunction F = T_.apply(g1, g2);
    GridFunction theta = d0_->d(k).apply(d0_->b() * F);
    std::lock_guard<std::mutex> lock(cache_->m);
    return cache_->columns.emplace(key, std::move(theta)).first->second;
}

cplx ThetaExtractor::operator()(int k, double x, double y1, double y2) const {
    const Grid& g = grid();
    return column(k, g.nearest_index(y1), g.nearest_index(y2))[g.nearest_index(x)];
}

double ThetaExtractor::cancellation(int k, int j1, int j2) const {
    const GridFunction& t = column(k, j1, j2);
    const Vec& b0 = d0_->b().values();
    cplx s = 0.0;
    double a = 0.0;
    for (int i = 0; i < t.size(); ++i) {
        s += t[i] * b0[i];
        a += std::abs(t[i] * b0[i]);
    }
    return a > 0.0 ? std::abs(s) / a : 0.0;
}

BilinearKernelFamily ThetaExtractor::family(KernelConstants declared) const {
    BilinearKernelFamily fam;
    const Grid& g = grid();
    fam.eval = [self = *this](int k, double x, double y1, double y2) { return self(k, x, y1, y2); };
    fam.k_min = k_min();
    fam.k_max = k_max();
    fam.domain_lo = -0.5 * g.half_length();
    fam.domain_hi = 0.5 * g.half_length();
    fam.step = g.step();
    fam.declared = declared;
    fam.smooth = true;
    return fam;
}

std::size_t ThetaExtractor::cached() const {
    std::lock_guard<std::mutex> lock(cache_->m);
    return cache_->columns.size();
}

ThetaReport extract_theta(const ThetaExtractor& theta, int samples, KernelConstants declared, std::uint64_t seed) {
    const Grid& g = theta.grid();
    Rng rng(seed);
    ThetaReport out;
    const double half = 0.5 * g.half_length();
    for (int s = 0; s < samples; ++s) {
        const int k = rng.integer(theta.k_min(), theta.k_max());
        const double reach = std::min(half, std::ldexp(2.0, -k));
        const double y1 = rng.uniform(-0.5 * half, 0.5 * half);
        const double y2 = std::clamp(y1 + rng.uniform(-reach, reach), -half, half);
        const int j1 = g.nearest_index(y1), j2 = g.nearest_index(y2);
        out.cancellation = std::max(out.cancellation, theta.cancellation(k, j1, j2));
        for (int i = 0; i < g.size(); ++i) out.max_abs = std::max(out.max_abs, std::abs(theta.column(k, j1, j2)[i]));
        ++out.cancellation_samples;
    }
    out.kernel = verify_kernel_family(theta.family(declared), std::max(16, samples), seed);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Dual-sum bound

namespace {

void check_holder(double p, double p1, double p2) {
    for (double q : {p, p1, p2})
        if (!(q > 1.0 && std::isfinite(q))) throw InvalidArgument("dual_sum_bound: exponents must lie in (1, inf)");
    if (std::abs(1.0 / p - 1.0 / p1 - 1.0 / p2) > 1e-12)
        throw InvalidArgument("dual_sum_bound: exponents violate 1/p = 1/p1 + 1/p2");
}

}  // namespace

double dual_sum(const std::vector<BilinearOperator>& theta, const GridFunction& b0, const GridFunction& b1,
                const GridFunction& b2, const GridFunction& f1, const GridFunction& f2, const GridFunction& f0) {
    double s = 0.0;
    const GridFunction g1 = b1 * f1, g2 = b2 * f2, g0 = b0 * f0;
    for (const auto& t : theta) s += std::abs(pairing(t(g1, g2), g0));
    return s;
}

DualBoundReport dual_sum_bound(const std::vector<BilinearOperator>& theta, const GridFunction& b0,
                               const GridFunction& b1, const GridFunction& b2, double p, double p1, double p2,
                               const std::vector<GridFunction>& f1s, const std::vector<GridFunction>& f2s,
                               const std::vector<GridFunction>& f0s) {
    check_holder(p, p1, p2);
    const double p0 = p / (p - 1.0);
    DualBoundReport out;
    if (theta.empty() || f1s.empty() || f2s.empty() || f0s.empty()) return out;
    const Grid& g = b0.grid();
    const GridFunction e = GridFunction::sample(g, [](double x) { return std::exp(cplx(0.0, 0.7 * x)); });
    double scale = 0.0, ycan = 0.0;
    for (const auto& t : theta) {
        const GridFunction v = t(b1 * e, b2 * e);
        scale = std::max(scale, lp_norm(v, 2.0));
        ycan = std::max(ycan, lp_norm(t(b1, b2), 2.0));
        cplx s = 0.0;
        double a = 0.0;
        for (int i = 0; i < g.size(); ++i) {
            s += v[i] * b0[i];
            a += std::abs(v[i] * b0[i]);
        }
        if (a > 0.0) out.x_cancellation = std::max(out.x_cancellation, std::abs(s) / a);
    }
    out.y_cancellation = scale > 0.0 ? ycan / scale : 0.0;
    out.hypotheses_ok = out.x_cancellation <= 1e-4 && out.y_cancellation <= 1e-4;

    for (const auto& f1 : f1s) {
        const double n1 = lp_norm(f1, p1);
        if (n1 == 0.0) continue;
        for (const auto& f2 : f2s) {
            const double n2 = lp_norm(f2, p2);
            if (n2 == 0.0) continue;
            std::vector<GridFunction> th;
            for (const auto& t : theta) th.push_back(t(b1 * f1, b2 * f2));
            for (const auto& f0 : f0s) {
                const double n0 = lp_norm(f0, p0);
                if (n0 == 0.0) continue;
                const GridFunction g0 = b0 * f0;
                double s = 0.0;
                for (const auto& v : th) s += std::abs(pairing(v, g0));
                out.max_sum = std::max(out.max_sum, s);
                out.bound_ratio = std::max(out.bound_ratio, s / (n0 * n1 * n2));
                ++out.triples;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Testing pairings through cutoffs

std::vector<TbPairing> tb_pairings(const TrilinearForm& T, const GridFunction& b0, const GridFunction& b1,
                                   const GridFunction& b2, const GridFunction& f1, const GridFunction& f2,
                                   const std::vector<GridFunction>& f0s, const std::vector<double>& radii, double tol,
                                   int cutoff_variant) {
    const Grid& g = b0.grid();
    if (radii.empty()) throw InvalidArgument("tb_pairing needs radii");
    if (!(tol > 0.0)) throw InvalidArgument("tb_pairing: tolerance must be positive");
    const double h = g.step();
    std::vector<TbPairing> out(f0s.size());
    std::vector<cplx> mass(f0s.size());
    bool need_kernel = false;
    for (std::size_t i = 0; i < f0s.size(); ++i) {
        const GridFunction g0 = b0 * f0s[i];
        double a = 0.0;
        for (int j = 0; j < g.size(); ++j) a += std::abs(g0[j]);
        mass[i] = pairing(b0, f0s[i]);
        if (std::abs(mass[i]) > 1e-12 * h * a) need_kernel = true;
        else mass[i] = 0.0;
    }
    if (need_kernel && !T.kernel) throw InvalidArgument("tb_pairing: f0 has nonzero mean and the form has no kernel");
    const GridFunction eta0 = cutoff(g, radii.front(), cutoff_variant);
    for (double R : radii) {
        if (!(R > 0.0) || 2.0 * R > g.half_length() + 1e-12)
            throw InvalidArgument("tb_pairing: domain too small for R (need 2R <= L)");
        const GridFunction eta = cutoff(g, R, cutoff_variant);
        const GridFunction g1 = b1 * f1 * eta, g2 = b2 * f2 * eta;
        cplx corr_factor = 0.0;
        if (need_kernel) {
            const GridFunction u1 = b1 * f1 * (eta - eta0), u2 = b2 * f2 * (eta - eta0);
            for (int j1 = 0; j1 < g.size(); ++j1) {
                if (u1[j1] == 0.0) continue;
                cplx inner = 0.0;
                for (int j2 = 0; j2 < g.size(); ++j2)
                    if (u2[j2] != 0.0) inner += T.kernel(0.0, g.x(j1), g.x(j2)) * u2[j2];
                corr_factor += u1[j1] * inner;
            }
            corr_factor *= h * h;
        }
        std::vector<cplx> vals(f0s.size());
        if (T.has_apply()) {
            const GridFunction tv = T.apply(g1, g2);
            for (std::size_t i = 0; i < f0s.size(); ++i) vals[i] = pairing(tv, b0 * f0s[i]);
        } else {
            for (std::size_t i = 0; i < f0s.size(); ++i) vals[i] = T(g1, g2, b0 * f0s[i]);
        }
        for (std::size_t i = 0; i < f0s.size(); ++i) {
            const cplx c = mass[i] * corr_factor;
            out[i].radii.push_back(R);
            out[i].values.push_back(vals[i] - c);
            out[i].correction = c;
        }
    }
    for (auto& o : out) {
        o.value = o.values.back();
        o.tail = o.values.size() >= 2 ? std::abs(o.values.back() - o.values[o.values.size() - 2]) : 0.0;
        o.converged = o.values.size() >= 2 && o.tail <= tol * (1.0 + std::abs(o.value));
    }
    return out;
}

TbPairing tb_pairing(const TrilinearForm& T, const GridFunction& b0, const GridFunction& b1, const GridFunction& b2,
                     const GridFunction& f1, const GridFunction& f2, const GridFunction& f0,
                     const std::vector<double>& radii, double tol, int cutoff_variant) {
    return tb_pairings(T, b0, b1, b2, f1, f2, {f0}, radii, tol, cutoff_variant).front();
}

double telescoping_defect(const TrilinearForm& T, const ApproxIdentity& s0, const ApproxIdentity& s1,
                          const ApproxIdentity& s2, const GridFunction& f1, const GridFunction& f2,
                          const GridFunction& f0, int k_lo, int k_hi) {
    if (k_hi <= k_lo) throw InvalidArgument("telescoping_defect needs k_lo < k_hi");
    for (const auto* s : {&s0, &s1, &s2})
        if (s->k_min > k_lo || s->k_max < k_hi) throw InvalidArgument("telescoping_defect: scales out of range");
    auto St = [](const ApproxIdentity& s, int k, const GridFunction& f) { return s.b * s.s(k).apply(s.b * f); };
    std::vector<GridFunction> A, B, C;
    for (int k = k_lo; k <= k_hi; ++k) {
        A.push_back(St(s1, k, f1));
        B.push_back(St(s2, k, f2));
        C.push_back(St(s0, k, f0));
    }
    const int m = k_hi - k_lo;
    const cplx lhs = T(A[m], B[m], C[m]) - T(A[0], B[0], C[0]);
    cplx rhs = 0.0;
    double mag = std::abs(lhs);
    for (int i = 0; i < m; ++i) {
        const cplx t1 = T(A[i + 1] - A[i], B[i + 1], C[i + 1]);
        const cplx t2 = T(A[i], B[i + 1] - B[i], C[i + 1]);
        const cplx t3 = T(A[i], B[i], C[i + 1] - C[i]);
        rhs += t1 + t2 + t3;
        mag = std::max(mag, std::abs(t1) + std::abs(t2) + std::abs(t3));
    }
    return mag > 0.0 ? std::abs(lhs - rhs) / mag : 0.0;
}

// ---------------------------------------------------------------------------------------------
// Reduction T = S + L0 + L1 + L2

namespace {

GridFunction fit_beta(const GridFunction& b, const std::vector<GridFunction>& probes, const std::vector<cplx>& t) {
    const Grid& g = b.grid();
    Mat A(probes.size(), g.size());
    Vec rhs(probes.size());
    for (std::size_t i = 0; i < probes.size(); ++i) {
        A.row(i) = (g.step() * b.values().cwiseProduct(probes[i].values())).transpose();
        rhs[i] = t[i];
    }
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
    return {g, cod.solve(rhs)};
}

}  // namespace

double operator_ratio(const BilinearOperator& op, double p1, double p2, const std::vector<GridFunction>& probes) {
    if (!(p1 >= 1.0 && p2 >= 1.0)) throw InvalidArgument("operator_ratio: exponents must be >= 1");
    const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
    double best = 0.0;
    for (const auto& f1 : probes) {
        const double n1 = lp_norm(f1, p1);
        if (n1 == 0.0) continue;
        for (const auto& f2 : probes) {
            const double n2 = lp_norm(f2, p2);
            if (n2 == 0.0) continue;
            best = std::max(best, lp_norm(op(f1, f2), p) / (n1 * n2));
        }
    }
    return best;
}

ReductionReport reduce_and_test(const TrilinearForm& T, const ReductionInputs& in) {
    if (!in.fam0 || !in.fam1 || !in.fam2) throw InvalidArgument("reduce_and_test: missing family");
    for (const auto* p : {&in.probes0, &in.probes1, &in.probes2})
        if (p->size() < 32) throw InvalidArgument("reduce_and_test: at least 32 probes per b are required");
    const GridFunction &b0 = in.fam0->b(), &b1 = in.fam1->b(), &b2 = in.fam2->b();
    const Grid& g = b0.grid();
    const GridFunction one = GridFunction::constant(g, 1.0);
    auto a0 = in.fam0->differences().approx, a1 = in.fam1->differences().approx, a2 = in.fam2->differences().approx;

    ReductionReport out(g);
    out.sweeps_converged = true;
    auto measure = [&](const TrilinearForm& F, const GridFunction& c0, const GridFunction& c1, const GridFunction& c2,
                       const std::vector<GridFunction>& probes, std::vector<cplx>& vals, bool track) {
        vals.clear();
        for (const auto& r : tb_pairings(F, c0, c1, c2, one, one, probes, in.radii, in.tol)) {
            vals.push_back(r.value);
            if (track) {
                out.sweeps_converged = out.sweeps_converged && r.converged;
                out.worst_tail = std::max(out.worst_tail, r.tail);
            }
        }
    };
    const TrilinearForm T1 = transpose1(T), T2 = transpose2(T);
    measure(T, b0, b1, b2, in.probes0, out.t0, true);
    measure(T1, b1, b0, b2, in.probes1, out.t1, true);
    measure(T2, b2, b1, b0, in.probes2, out.t2, true);
    double tmax = 0.0;
    for (const auto* v : {&out.t0, &out.t1, &out.t2})
        for (cplx x : *v) tmax = std::max(tmax, std::abs(x));
    const double norm = tmax > 0.0 ? tmax : 1.0;

    out.beta0 = fit_beta(b0, in.probes0, out.t0);
    out.beta1 = fit_beta(b1, in.probes1, out.t1);
    out.beta2 = fit_beta(b2, in.probes2, out.t2);
    auto fit_res = [&](const GridFunction& beta, const GridFunction& b, const std::vector<GridFunction>& probes,
                       const std::vector<cplx>& t) {
        for (std::size_t i = 0; i < probes.size(); ++i)
            out.fit_residual = std::max(out.fit_residual, std::abs(pairing(beta, b * probes[i]) - t[i]) / norm);
    };
    fit_res(out.beta0, b0, in.probes0, out.t0);
    fit_res(out.beta1, b1, in.probes1, out.t1);
    fit_res(out.beta2, b2, in.probes2, out.t2);

    out.L0 = build_paraproduct(in.fam0, a1, a2, out.beta0);
    out.L1 = build_paraproduct(in.fam1, a0, a2, out.beta1);
    out.L2 = build_paraproduct(in.fam2, a1, a0, out.beta2);
    const TrilinearForm F0 = paraproduct_form(out.L0);
    TrilinearForm F1, F2;
    F1.name = "L1";
    F1.apply = [P = out.L1](const GridFunction& g1, const GridFunction& g2) { return P->transpose1(g1, g2); };
    F1.form = [P = out.L1](const GridFunction& g1, const GridFunction& g2, const GridFunction& g0) {
        return pairing(P->apply(g0, g2), g1);
    };
    F2.name = "L2";
    F2.apply = [P = out.L2](const GridFunction& g1, const GridFunction& g2) { return P->transpose2(g1, g2); };
    F2.form = [P = out.L2](const GridFunction& g1, const GridFunction& g2, const GridFunction& g0) {
        return pairing(P->apply(g1, g0), g2);
    };
    out.S = difference(T, {F0, F1, F2});

    std::vector<cplx> r0, r1, r2;
    measure(out.S, b0, b1, b2, in.probes0, r0, false);
    measure(transpose1(out.S), b1, b0, b2, in.probes1, r1, false);
    measure(transpose2(out.S), b2, b1, b0, in.probes2, r2, false);
    for (cplx x : r0) out.s_e0 = std::max(out.s_e0, std::abs(x) / norm);
    for (cplx x : r1) out.s_e1 = std::max(out.s_e1, std::abs(x) / norm);
    for (cplx x : r2) out.s_e2 = std::max(out.s_e2, std::abs(x) / norm);

    out.reproducing_residual = std::max({in.fam0->residual(in.probes0), in.fam1->residual(in.probes1),
                                         in.fam2->residual(in.probes2)});
    if (!in.ratio_probes.empty()) {
        if (T.has_apply()) out.ratio_T = operator_ratio(T.apply, in.p1, in.p2, in.ratio_probes);
        if (out.S.has_apply()) out.ratio_S = operator_ratio(out.S.apply, in.p1, in.p2, in.ratio_probes);
    }
    return out;
}

double beta_roundtrip_error(const GridFunction& fitted, const GridFunction& planted, const GridFunction& b0,
                            const std::vector<GridFunction>& probes) {
    const double bmo = bmo_norm(planted);
    if (!(bmo > 0.0)) throw InvalidArgument("beta_roundtrip_error: planted symbol has zero BMO norm");
    double worst = 0.0;
    for (const auto& f : probes) {
        const GridFunction g = b0 * f;
        const double h1 = h1_norm(g).value;
        if (h1 == 0.0) continue;
        worst = std::max(worst, std::abs(pairing(fitted - planted, g)) / (h1 * bmo));
    }
    return worst;
}

}  // namespace czlab
