#include <algorithm>
#include <cmath>
#include <cstring>

#include "czlab/accretive.hpp"
#include "czlab/curve.hpp"
#include "czlab/error.hpp"
#include "czlab/kernels.hpp"
#include "czlab/paraproduct.hpp"
#include "czlab/probes.hpp"
#include "czlab/spaces.hpp"
#include "czlab/tb.hpp"
#include "czlab/threads.hpp"
#include "suite_detail.hpp"

namespace czlab::detail {

namespace {

double interior_sup(const GridFunction& f, cplx target, double radius) {
    double m = 0.0;
    for (int i = 0; i < f.size(); ++i)
        if (std::abs(f.grid().x(i)) <= radius) m = std::max(m, std::abs(f[i] - target));
    return m;
}

double abs_pairing(const GridFunction& f, const GridFunction& g) {
    return pairing(f.abs(), g.abs()).real();
}

bool same_bits(const GridFunction& a, const GridFunction& b) {
    return a.size() == b.size() &&
           std::memcmp(a.values().data(), b.values().data(), sizeof(cplx) * static_cast<std::size_t>(a.size())) == 0;
}

const char* mode_name(AoMode m) {
    switch (m) {
        case AoMode::Linear: return "linear";
        case AoMode::AdjointBilinear: return "adjoint_bilinear";
        default: return "bilinear";
    }
}

GridFunction default_beta(const Grid& g) {
    return GridFunction::sample(g, [](double x) { return cplx(std::sin(1.3 * x) + 0.5 * std::cos(0.7 * x + 0.3)); });
}

std::uint64_t seed_of(const json& cfg) { return cfg.at("seed").get<std::uint64_t>(); }

// Criterion 9 on its own grid: transposes, the Hilbert transform and determinism across thread counts.
Criterion infrastructure(const json& cfg, const json& b_spec, json& metrics) {
    const json& ic = cfg["infrastructure"];
    const json& tol = cfg["tolerances"];
    Gate gate(9, "infrastructure");
    const Grid g = grid_from(ic);
    const GridFunction b = make_b(b_spec, g);
    const int kmin = cfg["scales"]["k_min"], kmax = finest_resolvable_scale(g);
    const auto A = build_approx_identity(b, kmin, kmax);
    const auto D = build_differences(A);
    const GridFunction f = oscillation(0.4, 3.0, 2.0, 0.3).sample(g);
    const GridFunction h = bump(-0.7, 2.5, cplx(1.0, 0.5)).sample(g);

    double tr = 0.0;
    for (int k = kmin; k <= kmax; ++k) {
        const DenseOperator& S = A->s(k);
        tr = std::max(tr, std::abs(pairing(S.apply(f), h) - pairing(f, S.transpose().apply(h))) / abs_pairing(S.apply(f), h));
        if (k <= D->k_max()) {
            const DenseOperator& Dk = D->d(k);
            const double scale = abs_pairing(Dk.apply(f), h);
            if (scale > 0.0) tr = std::max(tr, std::abs(pairing(Dk.apply(f), h) - pairing(f, Dk.transpose().apply(h))) / scale);
        }
    }
    {
        const Grid gp(ic["paraproduct_L"].get<double>(), ic["paraproduct_n_points"].get<int>());
        const GridFunction bp = make_b(b_spec, gp);
        const int kp = finest_resolvable_scale(gp);
        const auto fam = build_reproducing_family(build_differences(build_approx_identity(bp, -2, kp)), 1e-6);
        const auto s1 = build_approx_identity(GridFunction::constant(gp, 1.0), -2, kp);
        const auto P = build_paraproduct(fam, s1, s1, default_beta(gp));
        const GridFunction f1 = bump(0.3, 1.2).sample(gp), f2 = oscillation(-0.2, 1.5, 3.0).sample(gp),
                           f0 = bump(0.1, 1.0, cplx(0.5, 1.0)).sample(gp);
        const GridFunction L = P->apply(f1, f2);
        const double scale = abs_pairing(L, f0);
        const cplx v = pairing(L, f0);
        tr = std::max(tr, std::abs(v - pairing(P->transpose1(f0, f2), f1)) / scale);
        tr = std::max(tr, std::abs(v - pairing(P->transpose2(f1, f0), f2)) / scale);
    }
    gate.le("transpose_identity", tr, tol["transpose"]);

    const GridFunction u = GridFunction::sample(g, [](double x) { return cplx(std::exp(-x * x / 4.0), 0.3 * std::sin(x) / (1 + x * x)); });
    const GridFunction w = GridFunction::sample(g, [](double x) { return cplx(1.0 / (1.0 + (x - 1) * (x - 1)), 0.0); });
    const double anti = std::abs(pairing(hilbert_transform(u), w) + pairing(u, hilbert_transform(w))) /
                        (lp_norm(u, 2) * lp_norm(w, 2));
    gate.le("hilbert_antisymmetry", anti, tol["hilbert_antisymmetry"]);

    const GridFunction m = GridFunction::sample(g, [](double x) { return cplx(x * std::exp(-x * x)); });
    const GridFunction hh = hilbert_transform(hilbert_transform(m));
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.size(); ++i)
        if (std::abs(g.x(i)) <= 0.5 * g.half_length()) {
            num += std::norm(hh[i] + m[i]);
            den += std::norm(m[i]);
        }
    gate.le("hilbert_square", std::sqrt(num / den), tol["hilbert_square"]);

    const int threads = thread_count();
    auto compute = [&]() {
        const auto A2 = build_approx_identity(b, kmin, kmax);
        GridFunction acc = hilbert_transform(f);
        for (int k = kmin; k <= kmax; ++k) acc = acc + A2->s(k).apply(f * b);
        return acc;
    };
    set_thread_count(1);
    const GridFunction one_thread = compute();
    set_thread_count(std::max(2, threads));
    const GridFunction many = compute();
    set_thread_count(threads);
    const GridFunction again = compute();
    gate.flag("determinism", same_bits(one_thread, many) && same_bits(many, again),
              json{{"threads_compared", json::array({1, std::max(2, threads), threads})}});
    metrics["infrastructure"] = {{"transpose_identity", tr}, {"hilbert_antisymmetry", anti},
                                 {"hilbert_square", std::sqrt(num / den)}};
    return gate.done();
}

}  // namespace

SuiteOutput run_approx_identity(const json& cfg) {
    SuiteOutput out;
    const Grid g = grid_from(cfg["grid"]);
    const int kmin = cfg["scales"]["k_min"], kmax = resolve_k_max(cfg["scales"]["k_max"], g);
    if (kmax <= kmin) throw ConfigError("scales: k_max must exceed k_min");
    const json& tol = cfg["tolerances"];
    const double interior = cfg["interior_fraction"].get<double>() * g.half_length();
    const double d_rough = cfg["holder"]["delta0_rough"];
    Table scales("scales.csv", {"b", "k", "s_b_defect", "d_b_defect", "dt_b_defect"});
    Table holder("holder.csv", {"b", "probe", "delta0", "delta", "k", "error"});
    Table conv("convergence.csv", {"b", "branch", "k", "error"});
    Gate gate(1, "approx_identity");
    double ws = 0.0, wd = 0.0, excess = -1e300;
    json slopes = json::array(), monotone = json::object();
    for (const auto& spec : cfg["b"]) {
        const std::string lab = b_label(spec);
        const GridFunction b = make_b(spec, g);
        const auto A = build_approx_identity(b, kmin, kmax);
        const auto D = build_differences(A);
        for (int k = kmin; k <= kmax; ++k) {
            const double s = interior_sup(A->s(k).apply(b), 1.0, interior);
            double d = 0.0, dt = 0.0;
            if (k <= D->k_max()) {
                d = interior_sup(D->d(k).apply(b), 0.0, interior);
                dt = interior_sup(D->d(k).transpose().apply(b), 0.0, interior);
            }
            scales.row().add(lab).add(k).add(s).add(d).add(dt);
            ws = std::max(ws, s);
            wd = std::max({wd, d, dt});
        }
        const std::vector<std::pair<std::string, std::pair<double, GridFunction>>> probes = {
            {"bump", {1.0, bump(0.2, 1.5).sample(g)}},
            {"holder_random", {d_rough, holder_random(d_rough, std::min(2.0, 0.5 * g.half_length()), g.size() / 2,
                                                      seed_of(cfg)).sample(g)}}};
        for (const auto& [name, pr] : probes) {
            const auto& [d0, f] = pr;
            for (const auto& dj : cfg["holder"]["deltas"]) {
                const double delta = dj.get<double>();
                const HolderConvergence hc = holder_convergence(*A, f, delta, kmin, kmax);
                for (std::size_t i = 0; i < hc.scales.size(); ++i)
                    holder.row().add(lab).add(name).add(d0).add(delta).add(hc.scales[i]).add(hc.errors[i]);
                const double limit = -(d0 - delta) + tol["slope_margin"].get<double>();
                excess = std::max(excess, hc.slope - limit);
                slopes.push_back({{"b", lab}, {"probe", name}, {"delta0", d0}, {"delta", delta}, {"slope", hc.slope},
                                  {"limit", limit}});
            }
        }
        const GridFunction fb = bump(0.2, 1.5).sample(g);
        for (bool up : {true, false}) {
            const ConvergenceReport cr = approx_identity_convergence(*A, fb, 2.0, up);
            for (std::size_t i = 0; i < cr.scales.size(); ++i)
                conv.row().add(lab).add(up ? "to_identity" : "to_zero").add(cr.scales[i]).add(cr.errors[i]);
            monotone[lab + (up ? "/to_identity" : "/to_zero")] = cr.monotone;
        }
    }
    gate.le("s_b_identity", ws, tol["identity"]);
    gate.le("d_b_cancellation", wd, tol["cancellation"]);
    gate.le("holder_slope_excess", excess, 0.0);
    out.metrics["scales"] = {{"k_min", kmin}, {"k_max", kmax}};
    out.metrics["holder_slopes"] = slopes;
    out.metrics["convergence_monotone"] = monotone;
    out.criteria.push_back(gate.done());
    out.criteria.push_back(infrastructure(cfg, cfg["b"].back(), out.metrics));
    out.tables = {scales, holder, conv};
    return out;
}

SuiteOutput run_reproducing(const json& cfg) {
    SuiteOutput out;
    const Grid g = grid_from(cfg["grid"]);
    const int kmin = cfg["scales"]["k_min"], kmax = resolve_k_max(cfg["scales"]["k_max"], g);
    if (kmax <= kmin + 1) throw ConfigError("scales: need at least three scales");
    const json& tol = cfg["tolerances"];
    const GridFunction b = make_b(cfg["b"], g);
    const auto D = build_differences(build_approx_identity(b, kmin, kmax));
    const auto fam = build_reproducing_family(D, cfg["regularization"].get<double>());
    const auto probes = mean_zero_bumps(b, cfg["probes"]["count"], cfg["probes"]["spread"], seed_of(cfg));
    const double residual = fam->residual(probes);

    const double r = cfg["dipole_radius"];
    const GridFunction phi =
        project_mean_zero(b, bump(-r / 2, r / 2).sample(g) - bump(r / 2, r / 2).sample(g), bump(0.0, r).sample(g));
    const int kc = cfg["partial_sum_centre"];
    const ReproducingConvergence rc = reproducing_convergence(*fam, phi, kc);
    const KernelReport kr = verify_kernel_family(difference_kernel_family(*D, {1.0, 2.0, 1.0}), 3000, seed_of(cfg));

    Table errors("errors.csv", {"probe", "M", "l2_error"});
    for (std::size_t i = 0; i < rc.radii.size(); ++i) errors.row().add("dipole").add(rc.radii[i]).add(rc.l2_errors[i]);
    int monotone_probes = 0;
    double probe_final = 0.0;
    for (std::size_t p = 0; p < probes.size(); ++p) {
        const ReproducingConvergence pc = reproducing_convergence(*fam, probes[p], kc);
        monotone_probes += pc.monotone ? 1 : 0;
        probe_final = std::max(probe_final, pc.l2_errors.back());
        for (std::size_t i = 0; i < pc.radii.size(); ++i)
            errors.row().add("bump" + std::to_string(p)).add(pc.radii[i]).add(pc.l2_errors[i]);
    }
    Table terms("terms.csv", {"k", "h1_norm"});
    for (std::size_t i = 0; i < rc.scales.size(); ++i) terms.row().add(rc.scales[i]).add(rc.term_h1[i]);

    Gate gate(2, "reproducing");
    gate.le("residual", residual, tol["residual"]);
    gate.flag("l2_partial_sums_monotone", rc.monotone);
    gate.ge("h1_envelope_gamma", rc.gamma_fit, kr.gamma_fit - tol["gamma_margin"].get<double>());
    gate.info("final_error_over_residual", rc.l2_errors.back() / residual);
    gate.info("probe_final_error_over_residual", probe_final / residual);
    gate.info("monotone_bump_probes", std::to_string(monotone_probes) + "/" + std::to_string(probes.size()));
    out.metrics = {{"residual", residual},   {"gamma_family", kr.gamma_fit}, {"gamma_fit", rc.gamma_fit},
                   {"envelope_centre", rc.envelope_centre}, {"scales", {{"k_min", kmin}, {"k_max", kmax}}},
                   {"numerical_rank", fam->numerical_rank(1e-8)}};
    out.criteria.push_back(gate.done());
    out.tables = {errors, terms};
    return out;
}

SuiteOutput run_almost_orthogonality(const json& cfg) {
    SuiteOutput out;
    const Grid g = grid_from(cfg["grid"]);
    const int kmin = cfg["scales"]["k_min"], kmax = resolve_k_max(cfg["scales"]["k_max"], g);
    const int max_gap = cfg["max_gap"];
    if (kmax - 1 - kmin < max_gap) throw ConfigError("scale range too short for max_gap");
    const double margin = cfg["tolerances"]["slope_margin"];
    Table ao("ao.csv", {"b", "mode", "gap", "norm", "majorant_ratio"});
    Table kern("kernels.csv", {"b", "A_fit", "N_fit", "gamma_fit", "classification", "verdicts_agree"});
    Gate gate(3, "almost_orthogonality");
    json m = json::array();
    for (const auto& spec : cfg["b"]) {
        const std::string lab = b_label(spec);
        const auto D = build_differences(build_approx_identity(make_b(spec, g), kmin, kmax));
        const KernelReport kr =
            verify_kernel_family(difference_kernel_family(*D, {1.0, 2.0, 1.0}), cfg["kernel_samples"], seed_of(cfg));
        kern.row().add(lab).add(kr.A_fit).add(kr.N_fit).add(kr.gamma_fit).add(kr.classification).add(kr.verdicts_agree);
        for (AoMode mode : {AoMode::Linear, AoMode::AdjointBilinear, AoMode::Bilinear}) {
            const AoReport r = operator_ao_decay(*D, mode, max_gap, kr.gamma_fit, cfg["probes"], seed_of(cfg));
            for (std::size_t i = 0; i < r.gaps.size(); ++i)
                ao.row().add(lab).add(mode_name(mode)).add(r.gaps[i]).add(r.norms[i]).add(r.majorant_ratios[i]);
            gate.le(lab + "/" + mode_name(mode) + "/slope", r.slope, -kr.gamma_fit + margin);
            m.push_back({{"b", lab}, {"mode", mode_name(mode)}, {"slope", r.slope}, {"gamma_fit", kr.gamma_fit}});
        }
    }
    out.metrics["decay"] = m;
    out.criteria.push_back(gate.done());
    out.tables = {ao, kern};
    return out;
}

SuiteOutput run_h1_growth(const json& cfg) {
    SuiteOutput out;
    const Grid g = grid_from(cfg["grid"]);
    const H1Growth r = h1_growth_experiment(g, cfg["j"], cfg["max_gap"], cfg["N"]);
    Table t("h1.csv", {"gap", "h1_norm"});
    for (std::size_t i = 0; i < r.gaps.size(); ++i) t.row().add(r.gaps[i]).add(r.norms[i]);
    Gate gate(4, "h1_growth");
    gate.le("growth_exponent", r.exponent, cfg["tolerances"]["exponent"]);
    gate.info("base_case_norm", r.norms.front());
    out.metrics = {{"exponent", r.exponent}, {"norms", r.norms}};
    out.criteria.push_back(gate.done());
    out.tables = {t};
    return out;
}

SuiteOutput run_dual_bound(const json& cfg) {
    SuiteOutput out;
    const json& tol = cfg["tolerances"];
    const int n0 = cfg["grid"]["n_points"];
    const double L = cfg["grid"]["L"];
    Table t("dual.csv", {"n_points", "p", "p1", "p2", "bound_ratio", "max_sum", "x_cancellation", "y_cancellation"});
    std::vector<std::vector<double>> ratios(cfg["exponents"].size());
    double hyp = 0.0;
    for (int n : {n0, 2 * n0}) {
        const Grid g(L, n);
        const GridFunction b0 = make_b(cfg["b0"], g), b1 = make_b(cfg["b1"], g), b2 = make_b(cfg["b2"], g);
        const int kmin = cfg["scales"]["k_min"], kmax = finest_resolvable_scale(g);
        const auto d0 = build_differences(build_approx_identity(b0, kmin, kmax));
        const auto d1 = build_differences(build_approx_identity(b1, kmin, kmax));
        const auto a2 = build_approx_identity(b2, kmin, kmax);
        const GridFunction beta = default_beta(g);
        std::vector<BilinearOperator> theta;
        for (int k = d0->k_min(); k <= d0->k_max(); ++k)
            theta.push_back([=](const GridFunction& g1, const GridFunction& g2) {
                return d0->d(k).apply(b0 * beta * d1->d(k).apply(g1) * a2->s(k).apply(g2));
            });
        std::vector<GridFunction> f1s, f2s, f0s;
        for (const auto& w : cfg["frequencies"]) {
            f1s.push_back(oscillation(0.3, 3.0, w.get<double>(), 0.2).sample(g));
            f0s.push_back(oscillation(-0.2, 3.0, w.get<double>(), 1.1).sample(g));
        }
        for (const auto& r : cfg["radii"]) f2s.push_back(bump(0.1, r.get<double>()).sample(g));
        for (std::size_t e = 0; e < cfg["exponents"].size(); ++e) {
            const json& ex = cfg["exponents"][e];
            const DualBoundReport r = dual_sum_bound(theta, b0, b1, b2, ex[0], ex[1], ex[2], f1s, f2s, f0s);
            t.row().add(n).add(ex[0].get<double>()).add(ex[1].get<double>()).add(ex[2].get<double>()).add(r.bound_ratio)
                .add(r.max_sum).add(r.x_cancellation).add(r.y_cancellation);
            ratios[e].push_back(r.bound_ratio);
            hyp = std::max({hyp, r.x_cancellation, r.y_cancellation});
        }
    }
    Gate gate(5, "dual_bound");
    json m = json::array();
    for (std::size_t e = 0; e < ratios.size(); ++e) {
        const json& ex = cfg["exponents"][e];
        const std::string name = "(" + ex[0].dump() + "," + ex[1].dump() + "," + ex[2].dump() + ")";
        const double change = std::abs(ratios[e][1] / ratios[e][0] - 1.0);
        gate.le(name + "/refinement_change", change, tol["refinement"]);
        gate.flag(name + "/finite_positive", std::isfinite(ratios[e][0]) && ratios[e][0] > 0.0 && std::isfinite(ratios[e][1]));
        m.push_back({{"exponents", ex}, {"ratio_coarse", ratios[e][0]}, {"ratio_fine", ratios[e][1]}, {"change", change}});
    }
    gate.le("hypotheses", hyp, tol["hypotheses"]);
    out.metrics["ratios"] = m;
    out.criteria.push_back(gate.done());
    out.tables = {t};
    return out;
}

SuiteOutput run_paraproduct(const json& cfg) {
    SuiteOutput out;
    const Grid g = grid_from(cfg["grid"]);
    const int kmin = cfg["scales"]["k_min"], kmax = resolve_k_max(cfg["scales"]["k_max"], g);
    const json& tol = cfg["tolerances"];
    std::vector<double> radii;
    for (const auto& r : cfg["radii"]) radii.push_back(r);
    const double margin = tol["slope_margin"];
    const GridFunction one = GridFunction::constant(g, 1.0);
    const auto s1 = build_approx_identity(one, kmin, kmax);
    const GridFunction beta = default_beta(g);
    std::vector<GridFunction> probes;
    for (int i = 0; i < 4; ++i) probes.push_back(bump(-1.0 + 0.6 * i, 0.5 + 0.2 * i).sample(g));
    const auto ratio_probes = gen_probes(ProbeSpec{"bump", cfg["probe_count"], 0.5, 4.0, seed_of(cfg)}, g);

    std::vector<std::pair<std::string, GridFunction>> ensemble = {{"beta", beta}, {"2beta", beta * 2.0}};
    for (double a : {-2.0, 0.0, 3.0}) {
        const double h = g.step();
        ensemble.emplace_back("log|x-" + std::to_string(a).substr(0, 4) + "|", GridFunction::sample(g, [=](double x) {
                                  return cplx(std::log(std::max(std::abs(x - a), 0.5 * h)));
                              }));
    }
    for (double w : {0.5, 2.0, 4.0})
        ensemble.emplace_back("cos(" + std::to_string(w).substr(0, 3) + "x)",
                              GridFunction::sample(g, [=](double x) { return cplx(std::cos(w * x)); }));

    Table testing("testing.csv", {"b0", "R", "e0", "e0_relative", "e1", "e2"});
    Table ratios("ratios.csv", {"b0", "beta", "ratio", "carleson", "ratio_over_sqrt_carleson"});
    Table kern("kernel.csv", {"b0", "A_fit", "N_fit", "gamma_fit", "classification", "cz_size", "cz_regularity"});
    Gate gate(6, "paraproduct");
    json m = json::array();
    for (const auto& spec : cfg["b0"]) {
        const std::string lab = b_label(spec);
        const GridFunction b0 = make_b(spec, g);
        const auto fam = build_reproducing_family(build_differences(build_approx_identity(b0, kmin, kmax)), 1e-6);
        const auto P = build_paraproduct(fam, s1, s1, beta);
        const TestingReport tr = verify_testing_conditions(*P, radii, probes);
        for (std::size_t i = 0; i < tr.radii.size(); ++i)
            testing.row().add(lab).add(tr.radii[i]).add(tr.e0[i]).add(tr.e0_rel[i]).add(tr.e1[i]).add(tr.e2[i]);
        const KernelReport kr = verify_kernel_family(paraproduct_kernel_terms(P, {8.0, 2.0, 1.0}), cfg["kernel_samples"],
                                                     seed_of(cfg));
        const CzKernelFit cz = cz_kernel_fit(*P, 200);
        kern.row().add(lab).add(kr.A_fit).add(kr.N_fit).add(kr.gamma_fit).add(kr.classification).add(cz.size_constant)
            .add(cz.regularity_constant);
        const double gamma = std::min(1.0, kr.gamma_fit);
        gate.le(lab + "/e0_relative_at_max_R", tr.e0_rel.back(), tol["e0_relative"]);
        gate.le(lab + "/e1_slope", tr.e1_vanished ? -1e300 : tr.slope1, -gamma + margin);
        gate.le(lab + "/e2_slope", tr.e2_vanished ? -1e300 : tr.slope2, -gamma + margin);
        gate.ge(lab + "/kernel_N_fit", kr.N_fit, tol["decay_exponent"].get<double>() + 1e-12);

        const GridFunction f1 = probes[0], f2 = probes[1], f0 = bump(0.3, 1.1).sample(g);
        const cplx a = P->form(f1, f2, f0);
        const double tdef = std::max(std::abs(a - pairing(P->transpose1(f0, f2), f1)),
                                     std::abs(a - pairing(P->transpose2(f1, f0), f2))) / std::abs(a);
        gate.le(lab + "/transpose_identity", tdef, tol["transpose"]);

        double worst = 0.0;
        for (const auto& [name, bt] : ensemble) {
            const auto Pb = build_paraproduct(fam, s1, s1, bt);
            const double r = boundedness_ratio(*Pb, 4.0, 4.0, ratio_probes);
            const double q = r / std::sqrt(Pb->carleson());
            ratios.row().add(lab).add(name).add(r).add(Pb->carleson()).add(q);
            worst = std::max(worst, q);
        }
        gate.le(lab + "/ratio_over_sqrt_carleson", worst, cfg["carleson_C"]);
        m.push_back({{"b0", lab}, {"e0_relative", tr.e0_rel.back()}, {"slope1", tr.slope1}, {"slope2", tr.slope2},
                     {"N_fit", kr.N_fit}, {"gamma_fit", kr.gamma_fit}, {"carleson", P->carleson()},
                     {"max_ratio_over_sqrt_carleson", worst}});
    }
    out.metrics["variants"] = m;
    out.criteria.push_back(gate.done());
    out.tables = {testing, ratios, kern};
    return out;
}

SuiteOutput run_tb_audit(const json& cfg) {
    SuiteOutput out;
    const json& tol = cfg["tolerances"];
    const std::uint64_t seed = seed_of(cfg);
    const Grid g = grid_from(cfg["grid"]);
    const auto flat = std::make_shared<const LipschitzCurve>(LipschitzCurve::flat());
    const TrilinearForm T = riesz_form(std::make_shared<const RieszGridOperator>(flat, g));
    const GridFunction one = GridFunction::constant(g, 1.0);
    Gate gate(7, "tb_audit");

    const FormChecks fc = check_form(T, g, seed);
    gate.info("form_linearity", fc.linearity);
    gate.info("form_kernel_agreement", fc.kernel_agreement);

    std::vector<double> radii, centres;
    for (const auto& r : cfg["wbp"]["radii"]) radii.push_back(r);
    for (const auto& c : cfg["wbp"]["centres"]) centres.push_back(c);
    const WbpReport w = wbp_constant(T, one, one, one, radii, centres);
    Table wbp("wbp.csv", {"form", "R", "constant"});
    for (std::size_t i = 0; i < w.radii.size(); ++i) wbp.row().add("riesz").add(w.radii[i]).add(w.constants[i]);
    gate.le("wbp_scatter", w.scatter, tol["wbp_scatter"]);
    const std::vector<double> mid = {radii[radii.size() / 2]};
    const WbpReport w1 = wbp_constant(transpose1(T), one, one, one, mid, {centres.front()});
    const WbpReport w2 = wbp_constant(transpose2(T), one, one, one, mid, {centres.front()});
    const WbpReport wp = wbp_constant(pointwise_product_form(g), one, one, one, mid, {centres.front()});
    wbp.row().add("riesz*1").add(mid[0]).add(w1.C_wbp);
    wbp.row().add("riesz*2").add(mid[0]).add(w2.C_wbp);
    wbp.row().add("pointwise").add(mid[0]).add(wp.C_wbp);

    const json& tc = cfg["theta"];
    Table theta("theta.csv", {"b", "cancellation", "A_fit", "N_fit", "gamma_fit", "classification", "columns"});
    double cancel = 0.0;
    json tm = json::array();
    for (const json& spec : {json{{"type", "one"}}, json{{"type", "sin_imag"}, {"amplitude", 0.4}, {"frequency", 2.0}}}) {
        const GridFunction b = make_b(spec, g);
        const auto ap = build_approx_identity(b, tc["k_min"], tc["k_max"]);
        const ThetaExtractor th(T, build_differences(ap), ap, ap);
        const ThetaReport tr = extract_theta(th, tc["samples"], KernelConstants{8.0, 2.0, 1.0}, seed);
        theta.row().add(b_label(spec)).add(tr.cancellation).add(tr.kernel.A_fit).add(tr.kernel.N_fit)
            .add(tr.kernel.gamma_fit).add(tr.kernel.classification).add(static_cast<int>(th.cached()));
        cancel = std::max(cancel, tr.cancellation);
        tm.push_back({{"b", b_label(spec)}, {"N_fit", tr.kernel.N_fit}, {"gamma_fit", tr.kernel.gamma_fit}});
    }
    gate.le("theta_cancellation", cancel, tol["cancellation"]);

    std::vector<double> seps;
    for (const auto& s : cfg["displaced"]["separations"]) seps.push_back(s);
    const DisplacedReport dr = displaced_bump_growth(T, one, one, one, cfg["displaced"]["R"], seps, {centres.front()});
    Table disp("displaced.csv", {"t", "constant"});
    for (std::size_t i = 0; i < dr.separations.size(); ++i) disp.row().add(dr.separations[i]).add(dr.constants[i]);
    gate.le("displaced_growth_exponent", dr.exponent, 1.0 + 3.0 * dr.order + tol["growth_margin"].get<double>());

    const json& rc = cfg["reduction"];
    const Grid gr(rc["L"].get<double>(), rc["n_points"].get<int>());
    const GridFunction b0 = GridFunction::sample(gr, [](double x) { return cplx(1.0, 0.4 * std::sin(x)); });
    const GridFunction b1 = GridFunction::sample(gr, [](double x) { return cplx(1.0 + 0.3 * std::cos(0.7 * x), 0.0); });
    const int kl = rc["k_min"], kh = finest_resolvable_scale(gr);
    auto mk = [&](const GridFunction& b) {
        return build_reproducing_family(build_differences(build_approx_identity(b, kl, kh)), 1e-6);
    };
    const auto fam0 = mk(b0), fam1 = mk(b1);
    const GridFunction beta = default_beta(gr);
    const auto P = build_paraproduct(fam0, fam1->differences().approx, fam1->differences().approx, beta);
    const TrilinearForm planted = paraproduct_form(P);
    ReductionInputs in;
    in.fam0 = fam0;
    in.fam1 = fam1;
    in.fam2 = fam1;
    const int np = rc["probes"];
    const double spread = rc["spread"];
    in.probes0 = mean_zero_bumps(b0, np, spread, seed);
    in.probes1 = mean_zero_bumps(b1, np, spread, seed + 1);
    in.probes2 = mean_zero_bumps(b1, np, spread, seed + 2);
    for (const auto& r : rc["radii"]) in.radii.push_back(r);
    in.tol = rc["sweep_tol"];
    for (int i = 0; i < 4; ++i) in.ratio_probes.push_back(bump(-3.0 + 2.0 * i, 1.0 + 0.2 * i).sample(gr));
    const ReductionReport red = reduce_and_test(planted, in);
    const double roundtrip = beta_roundtrip_error(red.beta0, beta, b0, in.probes0);
    const double heldout = beta_roundtrip_error(red.beta0, beta, b0, mean_zero_bumps(b0, 16, spread, seed + 88));
    const double s_res = std::max({red.s_e0, red.s_e1, red.s_e2});
    gate.le("beta_roundtrip", roundtrip, tol["roundtrip"]);
    gate.le("s_testing_residual", s_res, tol["residual_factor"].get<double>() * red.reproducing_residual);
    gate.info("beta_roundtrip_heldout", heldout);
    gate.info("sweeps_converged", red.sweeps_converged);

    double eta = 0.0;
    const GridFunction onr = GridFunction::constant(gr, 1.0);
    for (std::size_t i = 0; i < 8 && i < in.probes0.size(); ++i) {
        const TbPairing a = tb_pairing(planted, b0, b1, b1, onr, onr, in.probes0[i], in.radii, in.tol, 0);
        const TbPairing c = tb_pairing(planted, b0, b1, b1, onr, onr, in.probes0[i], in.radii, in.tol, 1);
        eta = std::max(eta, std::abs(a.value - c.value) / std::max(std::abs(a.value), 1e-300));
    }
    Table red_t("reduction.csv", {"quantity", "value"});
    red_t.row().add("fit_residual").add(red.fit_residual);
    red_t.row().add("s_e0").add(red.s_e0);
    red_t.row().add("s_e1").add(red.s_e1);
    red_t.row().add("s_e2").add(red.s_e2);
    red_t.row().add("reproducing_residual").add(red.reproducing_residual);
    red_t.row().add("ratio_T").add(red.ratio_T);
    red_t.row().add("ratio_S").add(red.ratio_S);
    red_t.row().add("worst_tail").add(red.worst_tail);
    red_t.row().add("beta_roundtrip").add(roundtrip);
    red_t.row().add("beta_roundtrip_heldout").add(heldout);
    red_t.row().add("cutoff_invariance").add(eta);

    out.metrics = {{"wbp", {{"C", w.C_wbp}, {"scatter", w.scatter}, {"C_transpose1", w1.C_wbp}, {"C_transpose2", w2.C_wbp},
                            {"C_pointwise", wp.C_wbp}}},
                   {"theta", tm},
                   {"displaced", {{"exponent", dr.exponent}, {"order", dr.order}}},
                   {"reduction", {{"residuals", {red.s_e0, red.s_e1, red.s_e2}},
                                  {"reproducing_residual", red.reproducing_residual},
                                  {"ratios", {{"T", red.ratio_T}, {"S", red.ratio_S}}},
                                  {"cutoff_invariance", eta}}}};
    out.criteria.push_back(gate.done());
    out.tables = {wbp, theta, disp, red_t};
    return out;
}

SuiteOutput run_riesz_curve(const json& cfg) {
    SuiteOutput out;
    const json& tol = cfg["tolerances"];
    const std::uint64_t seed = seed_of(cfg);
    const long long violations0 = branch_violations(), checks0 = branch_checks();
    const double plateau = cfg["plateau"];
    std::vector<std::shared_ptr<const LipschitzCurve>> curves = {std::make_shared<const LipschitzCurve>(LipschitzCurve::flat())};
    for (const char* kind : {"sawtooth", "s_curve"})
        for (const auto& l : cfg["lambdas"])
            if (l.get<double>() > 0.0)
                curves.push_back(std::make_shared<const LipschitzCurve>(LipschitzCurve::make(kind, l.get<double>(), plateau)));
    Gate gate(8, "riesz_curve");

    Table kern("kernels.csv", {"curve", "lambda", "size", "kernel", "gradient", "identity", "h_envelope", "fit_error"});
    Table pv("pv.csv", {"curve", "lambda", "j", "x", "eps", "value@c"});
    Table lim("pv_limits.csv", {"curve", "lambda", "j", "x", "limit@c", "error_estimate", "ibp@c", "relative_gap"});
    Table cauchy("cauchy.csv", {"curve", "lambda", "R", "forward", "transpose"});
    double identity = 0.0, pv_gap = 0.0, cauchy_worst = 0.0;
    int within_estimate = 0, pv_cases = 0;
    const AnalyticFunction f1 = bump(0.3, 1.0), f2 = bump(-0.2, 0.8);
    std::vector<double> eps;
    for (const auto& m : cfg["pv"]["multiples"]) eps.push_back(m.get<int>() * cfg["pv"]["h"].get<double>());
    std::vector<double> tradii;
    for (const auto& r : cfg["testing"]["radii"]) tradii.push_back(r);
    const double pr = cfg["testing"]["probe_radius"];
    for (const auto& c : curves) {
        const CurveKernels K(c);
        const CurveKernelEstimates est = curve_kernel_estimates(K, cfg["kernel_samples"], seed);
        kern.row().add(c->kind()).add(c->lambda()).add(est.size).add(est.kernel).add(est.gradient).add(est.identity)
            .add(est.h_envelope).add(c->fit_error());
        identity = std::max(identity, est.identity);
        for (int j : {1, 2})
            for (const auto& xv : cfg["pv"]["points"]) {
                const double x = xv;
                const PvReport r = riesz_pv(K, j, f1, f2, x, eps);
                const cplx ibp = riesz_ibp(K, j, f1, f2, x);
                for (std::size_t i = 0; i < r.eps.size(); ++i)
                    pv.row().add(c->kind()).add(c->lambda()).add(j).add(x).add(r.eps[i]).add(r.values[i]);
                const double gap = std::abs(r.limit - ibp) / std::abs(ibp);
                lim.row().add(c->kind()).add(c->lambda()).add(j).add(x).add(r.limit).add(r.error_estimate).add(ibp).add(gap);
                pv_gap = std::max(pv_gap, gap);
                within_estimate += std::abs(r.limit - ibp) <= r.error_estimate ? 1 : 0;
                ++pv_cases;
            }
        const SweepReport sw = cauchy_sanity(*c, curve_mean_zero_probe(*c, pr), tradii);
        for (std::size_t i = 0; i < sw.radii.size(); ++i)
            cauchy.row().add(c->kind()).add(c->lambda()).add(sw.radii[i]).add(sw.forward[i]).add(sw.transpose[i]);
        cauchy_worst = std::max({cauchy_worst, sw.forward.back(), sw.transpose.back()});
    }
    gate.le("pv_vs_ibp_relative", pv_gap, tol["pv_relative"]);
    gate.info("pv_within_error_estimate", std::to_string(within_estimate) + "/" + std::to_string(pv_cases));
    gate.le("kernel_identity", identity, tol["identity"]);
    gate.le("cauchy_at_max_R", cauchy_worst, tol["cauchy"]);

    const LipschitzCurve& flat = *curves.front();
    const FlatTestingReport ft =
        flat_testing_conditions(flat, curve_dipole_probe(flat, pr), bump(0.0, cfg["testing"]["control_radius"]), tradii);
    Table testing("testing.csv", {"R", "t0", "t1", "t2", "control", "riesz_control"});
    for (std::size_t i = 0; i < ft.radii.size(); ++i)
        testing.row().add(ft.radii[i]).add(ft.t0[i]).add(ft.t1[i]).add(ft.t2[i]).add(ft.control[i]).add(ft.riesz_control[i]);
    gate.le("flat_testing_at_max_R", std::max({ft.t0.back(), ft.t1.back(), ft.t2.back()}), tol["testing"]);
    gate.ge("negative_control_at_max_R", ft.control.back(), tol["testing"]);

    const Grid g = grid_from(cfg["grid"]);
    const Grid gref(g.half_length(), cfg["refinement_n_points"].get<int>());
    const std::vector<AnalyticFunction> probes = {bump(-0.3, 0.6), bump(0.4, 0.4), oscillation(0.0, 0.8, 5.0, 0.3)};
    std::vector<double> lams = {0.0};
    for (const auto& l : cfg["lambdas"])
        if (l.get<double>() > 0.0) lams.push_back(l);
    Table lp("lp_sweep.csv", {"curve", "lambda", "p1", "p2", "ratio", "curve_ratio", "transfer_factor", "transfer_slack",
                              "normalized"});
    double slack = 1e300;
    json norm = json::object();
    for (const char* kind : {"sawtooth", "s_curve"}) {
        const auto rows = lp_sweep(kind, lams, g, 2.0, 2.0, probes);
        json nk = json::array();
        for (const auto& r : rows) {
            lp.row().add(kind).add(r.lambda).add(2.0).add(2.0).add(r.ratio).add(r.curve_ratio).add(r.transfer_factor)
                .add(r.transfer_slack).add(r.normalized);
            slack = std::min(slack, r.transfer_slack);
            nk.push_back(r.normalized);
        }
        norm[kind] = nk;
    }
    const double r0 = lp_sweep("sawtooth", {0.0}, g, 2.0, 2.0, probes).front().ratio;
    const double r0_ref = lp_sweep("sawtooth", {0.0}, gref, 2.0, 2.0, probes).front().ratio;
    gate.ge("transfer_slack", slack, -tol["transfer"].get<double>());

    const long long violations = branch_violations() - violations0, checks = branch_checks() - checks0;
    gate.flag("branch_safety", violations == 0, json{{"violations", violations}, {"checks", checks}});

    out.metrics = {{"pv_max_relative_gap", pv_gap},
                   {"kernel_identity", identity},
                   {"cauchy_max", cauchy_worst},
                   {"flat_testing", {{"t0", ft.t0.back()}, {"t1", ft.t1.back()}, {"t2", ft.t2.back()},
                                     {"control", ft.control.back()}, {"slopes", {ft.slope0, ft.slope1, ft.slope2}}}},
                   {"lp", {{"r0", r0}, {"r0_refined", r0_ref}, {"refinement_change", std::abs(r0_ref / r0 - 1.0)},
                           {"normalized", norm}, {"min_transfer_slack", slack}}},
                   {"branch_checks", checks}};
    out.criteria.push_back(gate.done());
    out.tables = {kern, pv, lim, cauchy, testing, lp};
    return out;
}

}  // namespace czlab::detail
