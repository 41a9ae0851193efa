#include "czlab/paraproduct.hpp"

#include <algorithm>
#include <cmath>

#include "czlab/error.hpp"
#include "czlab/fit.hpp"
#include "czlab/probes.hpp"
#include "czlab/spaces.hpp"

namespace czlab {

namespace {

Vec apply_transposed(const DenseOperator& A, const Vec& v) {
    return A.grid().step() * (A.coeffs().transpose() * v);
}

}  // namespace

Paraproduct::Paraproduct(std::shared_ptr<const ReproducingFamily> fam0, std::shared_ptr<const ApproxIdentity> s1,
                         std::shared_ptr<const ApproxIdentity> s2, GridFunction beta)
    : fam0_(std::move(fam0)), s1_(std::move(s1)), s2_(std::move(s2)), beta_(std::move(beta)) {
    if (!fam0_ || !s1_ || !s2_) throw InvalidArgument("paraproduct: missing family");
    const Grid& g = beta_.grid();
    if (fam0_->grid() != g || s1_->b.grid() != g || s2_->b.grid() != g)
        throw InvalidArgument("paraproduct: families live on different grids");
    for (const auto* s : {s1_.get(), s2_.get()})
        if (s->k_min > k_min() || s->k_max < k_max())
            throw InvalidArgument("paraproduct: S family does not cover the difference scales");

    const Vec& b0v = b0().values();
    const Vec w = fam0_->pinv_transpose(Vec(b0v.cwiseProduct(beta_.values())));
    std::vector<GridFunction> dens;
    for (int k = k_min(); k <= k_max(); ++k) {
        const Vec bk = apply_transposed(fam0_->differences().d(k), w);
        beta_k_.emplace_back(g, bk);
        weight_.push_back(b0v.cwiseProduct(bk));
        dens.emplace_back(g, Vec(bk.cwiseAbs2().cast<cplx>()));
    }
    carleson_ = carleson_norm(dens, k_min());
}

GridFunction Paraproduct::apply(const GridFunction& f1, const GridFunction& f2) const {
    Vec acc = Vec::Zero(grid().size());
    for (int k = k_min(); k <= k_max(); ++k) {
        const Vec u = s1_->s(k).apply(f1.values());
        const Vec v = s2_->s(k).apply(f2.values());
        acc += fam0_->differences().d(k).apply(Vec(weight_[k - k_min()].cwiseProduct(u).cwiseProduct(v)));
    }
    return {grid(), acc};
}

GridFunction Paraproduct::transpose1(const GridFunction& f0, const GridFunction& f2) const {
    Vec acc = Vec::Zero(grid().size());
    for (int k = k_min(); k <= k_max(); ++k) {
        const Vec u = apply_transposed(fam0_->differences().d(k), f0.values());
        const Vec v = s2_->s(k).apply(f2.values());
        acc += apply_transposed(s1_->s(k), Vec(weight_[k - k_min()].cwiseProduct(u).cwiseProduct(v)));
    }
    return {grid(), acc};
}

GridFunction Paraproduct::transpose2(const GridFunction& f1, const GridFunction& f0) const {
    Vec acc = Vec::Zero(grid().size());
    for (int k = k_min(); k <= k_max(); ++k) {
        const Vec u = apply_transposed(fam0_->differences().d(k), f0.values());
        const Vec v = s1_->s(k).apply(f1.values());
        acc += apply_transposed(s2_->s(k), Vec(weight_[k - k_min()].cwiseProduct(u).cwiseProduct(v)));
    }
    return {grid(), acc};
}

cplx Paraproduct::form(const GridFunction& f1, const GridFunction& f2, const GridFunction& f0) const {
    return pairing(apply(f1, f2), f0);
}

cplx Paraproduct::kernel_term(int k, double x, double y1, double y2) const {
    if (k < k_min() || k > k_max()) return 0.0;
    const Grid& g = grid();
    const int ix = g.nearest_index(x), i1 = g.nearest_index(y1), i2 = g.nearest_index(y2);
    const auto& d = fam0_->differences().d(k).coeffs();
    const auto& c1 = s1_->s(k).coeffs();
    const auto& c2 = s2_->s(k).coeffs();
    const Vec& w = weight_[k - k_min()];
    cplx acc = 0.0;
    for (int u = 0; u < g.size(); ++u) {
        const cplx t = d(ix, u);
        if (t == 0.0) continue;
        acc += t * w[u] * c1(u, i1) * c2(u, i2);
    }
    return g.step() * acc;
}

cplx Paraproduct::kernel(double x, double y1, double y2) const {
    const Grid& g = grid();
    const int ix = g.nearest_index(x);
    if (ix == g.nearest_index(y1) && ix == g.nearest_index(y2))
        throw InvalidArgument("paraproduct kernel: x, y1, y2 lie in one grid cell");
    cplx acc = 0.0;
    for (int k = k_min(); k <= k_max(); ++k) acc += kernel_term(k, x, y1, y2);
    return acc;
}

std::shared_ptr<const Paraproduct> build_paraproduct(std::shared_ptr<const ReproducingFamily> fam0,
                                                     std::shared_ptr<const ApproxIdentity> s1,
                                                     std::shared_ptr<const ApproxIdentity> s2,
                                                     const GridFunction& beta) {
    return std::make_shared<const Paraproduct>(std::move(fam0), std::move(s1), std::move(s2), beta);
}

BilinearKernelFamily paraproduct_kernel_terms(std::shared_ptr<const Paraproduct> P, KernelConstants declared) {
    BilinearKernelFamily fam;
    const Grid& g = P->grid();
    fam.eval = [P](int k, double x, double y1, double y2) { return P->kernel_term(k, x, y1, y2); };
    fam.k_min = P->k_min();
    fam.k_max = P->k_max();
    fam.domain_lo = -0.5 * g.half_length();
    fam.domain_hi = 0.5 * g.half_length();
    fam.step = g.step();
    fam.declared = declared;
    fam.smooth = false;
    return fam;
}

CzKernelFit cz_kernel_fit(const Paraproduct& P, int n_samples, double gamma, int min_cells) {
    if (n_samples < 1) throw InvalidArgument("cz_kernel_fit needs samples");
    const Grid& g = P.grid();
    const double h = g.step();
    const double reach = std::ldexp(1.0, -P.k_min());
    const double lo = min_cells * h;
    if (lo >= reach) throw ScaleUnresolvable("cz_kernel_fit: coarsest kernel scale below min_cells", P.k_max());
    CzKernelFit out;
    out.gamma = gamma;
    const double half = 0.5 * g.half_length();
    for (int s = 1; s <= n_samples; ++s) {
        const double x = -half + 2.0 * half * halton(s, 2);
        const double d1 = lo * std::pow(reach / lo, halton(s, 3));
        const double d2 = lo * std::pow(reach / lo, halton(s, 5));
        const double y1 = x + (halton(s, 7) < 0.5 ? -d1 : d1);
        const double y2 = x + (halton(s, 11) < 0.5 ? -d2 : d2);
        const double xs = g.x(g.nearest_index(x));
        const double dist = std::abs(xs - g.x(g.nearest_index(y1))) + std::abs(xs - g.x(g.nearest_index(y2)));
        const cplx l = P.kernel(xs, y1, y2);
        out.size_constant = std::max(out.size_constant, std::abs(l) * dist * dist);

        const double t = std::max(h, 0.5 * dist * halton(s, 13));
        const double xp = g.x(g.nearest_index(xs + t));
        const double dx = std::abs(xp - xs);
        if (dx == 0.0 || dx > 0.5 * dist) continue;
        const cplx lp = P.kernel(xp, y1, y2);
        out.regularity_constant =
            std::max(out.regularity_constant, std::abs(l - lp) * std::pow(dist, 2.0 + gamma) / std::pow(dx, gamma));
        ++out.samples;
    }
    return out;
}

TestingReport verify_testing_conditions(const Paraproduct& P, const std::vector<double>& radii,
                                        const std::vector<GridFunction>& probes, int cutoff_variant) {
    const Grid& g = P.grid();
    if (probes.empty()) throw InvalidArgument("verify_testing_conditions needs probes");
    const GridFunction psi = bump(0.0, 1.0).sample(g);
    std::vector<GridFunction> phi0, phi1, phi2;
    std::vector<cplx> target;
    double scale = 0.0;
    for (const auto& f : probes) {
        phi0.push_back(P.b0() * project_mean_zero(P.b0(), f, psi));
        phi1.push_back(P.b1() * project_mean_zero(P.b1(), f, psi));
        phi2.push_back(P.b2() * project_mean_zero(P.b2(), f, psi));
        target.push_back(pairing(P.beta(), phi0.back()));
        scale = std::max(scale, std::abs(target.back()));
    }
    const double floor = 1e-11 * (1.0 + scale);

    TestingReport out;
    std::vector<double> lr;
    for (double R : radii) {
        if (!(R > 0.0) || 2.0 * R > g.half_length())
            throw InvalidArgument("verify_testing_conditions: R must satisfy 0 < 2R <= L");
        const GridFunction eta = cutoff(g, R, cutoff_variant);
        const GridFunction L0 = P.apply(P.b1() * eta, P.b2() * eta);
        const GridFunction L1 = P.transpose1(P.b0() * eta, P.b2() * eta);
        const GridFunction L2 = P.transpose2(P.b1() * eta, P.b0() * eta);
        double e0 = 0.0, e0r = 0.0, e1 = 0.0, e2 = 0.0;
        for (std::size_t i = 0; i < probes.size(); ++i) {
            const double d = std::abs(pairing(L0, phi0[i]) - target[i]);
            e0 = std::max(e0, d);
            if (std::abs(target[i]) > 0.0) e0r = std::max(e0r, d / std::abs(target[i]));
            e1 = std::max(e1, std::abs(pairing(L1, phi1[i])));
            e2 = std::max(e2, std::abs(pairing(L2, phi2[i])));
        }
        out.radii.push_back(R);
        out.e0.push_back(e0);
        out.e0_rel.push_back(e0r);
        out.e1.push_back(e1);
        out.e2.push_back(e2);
        lr.push_back(std::log2(R));
    }
    out.e0_decreasing = true;
    for (std::size_t i = 1; i < out.e0.size(); ++i)
        if (out.e0[i] > out.e0[i - 1] * (1.0 + 1e-6) + floor) out.e0_decreasing = false;
    const DecayFit f1 = fit_log2_decay(lr, out.e1, floor);
    const DecayFit f2 = fit_log2_decay(lr, out.e2, floor);
    out.slope1 = f1.slope;
    out.slope2 = f2.slope;
    out.e1_vanished = f1.reached_floor();
    out.e2_vanished = f2.reached_floor();
    return out;
}

double boundedness_ratio(const Paraproduct& P, double p1, double p2, const std::vector<GridFunction>& probes) {
    if (!(p1 >= 1.0 && p2 >= 1.0)) throw InvalidArgument("boundedness_ratio: exponents must be >= 1");
    const double p = 1.0 / (1.0 / p1 + 1.0 / p2);
    if (p < 1.0) throw InvalidArgument("boundedness_ratio: target exponent below 1");
    double best = 0.0;
    for (const auto& f1 : probes) {
        const double n1 = lp_norm(f1, p1);
        if (n1 == 0.0) continue;
        for (const auto& f2 : probes) {
            const double n2 = lp_norm(f2, p2);
            if (n2 == 0.0) continue;
            best = std::max(best, lp_norm(P.apply(f1, f2), p) / (n1 * n2));
        }
    }
    return best;
}

}  // namespace czlab
