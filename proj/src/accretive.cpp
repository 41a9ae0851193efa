#include "czlab/accretive.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>
#include <Eigen/Sparse>

#include "czlab/error.hpp"
#include "czlab/fit.hpp"
#include "czlab/probes.hpp"

namespace czlab {

double para_accretivity_constant(const GridFunction& b, int min_subinterval_cells) {
    const int n = b.size();
    const double h = b.grid().step();
    const double bmax = b.values().cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i)
        if (std::abs(b[i]) <= 1e-14 * std::max(1.0, bmax))
            throw NotAccretive("b vanishes at a grid point");
    min_subinterval_cells = std::max(1, min_subinterval_cells);

    std::vector<cplx> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + b[i] * h;

    double result = std::numeric_limits<double>::infinity();
    for (int m = n; m >= min_subinterval_cells; m /= 2) {
        for (int q0 = 0; q0 < n; q0 += m) {
            double best = 0.0;
            for (int a = q0; a < q0 + m; ++a)
                for (int e = a + min_subinterval_cells; e <= q0 + m; ++e)
                    best = std::max(best, std::abs(prefix[e] - prefix[a]));
            result = std::min(result, best / (m * h));
        }
        if (m == 1) break;
    }
    return result;
}

double mollifier_profile(double x) {
    const double t = 8.0 * x;
    const double a = 1.0 - t * t;
    return a > 0.0 ? std::exp(-1.0 / a) : 0.0;
}

int finest_resolvable_scale(const Grid& grid) {
    return static_cast<int>(std::floor(std::log2(1.0 / (16.0 * grid.step())) + 1e-12));
}

namespace {

void require_resolvable(const Grid& grid, int k) {
    if (std::ldexp(1.0, -k) / 8.0 < 2.0 * grid.step() * (1.0 - 1e-12))
        throw ScaleUnresolvable("scale " + std::to_string(k) + " is finer than the grid resolves",
                                finest_resolvable_scale(grid));
}

// Node-lattice stencil w_m = phi_k(m h) h, normalised to unit sum.
std::vector<double> mollifier_stencil(const Grid& grid, int k, int& radius) {
    const double h = grid.step();
    const double s = std::ldexp(1.0, k);
    radius = static_cast<int>(std::ceil(1.0 / (8.0 * s * h)));
    std::vector<double> w(2 * radius + 1);
    double total = 0.0;
    for (int m = -radius; m <= radius; ++m) {
        w[m + radius] = mollifier_profile(s * m * h);
        total += w[m + radius];
    }
    for (double& v : w) v /= total;
    return w;
}

int reflect(long t, int n) {
    long r = t % (2L * n);
    if (r < 0) r += 2L * n;
    return static_cast<int>(r < n ? r : 2L * n - 1 - r);
}

Eigen::SparseMatrix<cplx> mollifier_sparse(const Grid& grid, int k) {
    require_resolvable(grid, k);
    int radius = 0;
    const auto w = mollifier_stencil(grid, k, radius);
    const int n = grid.size();
    std::vector<Eigen::Triplet<cplx>> trip;
    trip.reserve(static_cast<std::size_t>(n) * w.size());
    for (int i = 0; i < n; ++i)
        for (int m = -radius; m <= radius; ++m)
            if (w[m + radius] != 0.0) trip.emplace_back(i, reflect(static_cast<long>(i) - m, n), w[m + radius]);
    Eigen::SparseMatrix<cplx> P(n, n);
    P.setFromTriplets(trip.begin(), trip.end());  // duplicates are summed
    return P;
}

}  // namespace

GridFunction build_mollifier(const Grid& grid, int k) {
    require_resolvable(grid, k);
    const double s = std::ldexp(1.0, k);
    GridFunction phi = GridFunction::sample(grid, [s](double x) { return cplx(s * mollifier_profile(s * x)); });
    const double mass = grid.step() * phi.values().real().sum();
    return phi * (1.0 / mass);
}

DenseOperator mollifier_operator(const Grid& grid, int k) {
    Mat c = Mat(mollifier_sparse(grid, k)) / grid.step();
    return {grid, std::move(c)};
}

std::pair<int, int> default_scale_range(const Grid& grid) { return {-2, finest_resolvable_scale(grid)}; }

std::shared_ptr<const ApproxIdentity> build_approx_identity(const GridFunction& b, int k_min, int k_max,
                                                           double eps0) {
    if (k_min > k_max) throw InvalidArgument("empty scale range");
    const Grid& grid = b.grid();
    const double h = grid.step();
    auto out = std::make_shared<ApproxIdentity>(ApproxIdentity{b, k_min, k_max, {}, {}, {}});
    for (int k = k_min; k <= k_max; ++k) {
        const auto P = mollifier_sparse(grid, k);
        const Vec pb = P * b.values();
        for (Eigen::Index i = 0; i < pb.size(); ++i)
            if (std::abs(pb[i]) < eps0)
                throw NotAccretive("|P_k b| < eps0 at scale " + std::to_string(k));
        const Vec q = pb.cwiseInverse();
        const Mat Pd(P);
        Mat S = (P * (q.asDiagonal() * Pd)) / h;
        out->P.emplace_back(grid, Pd / h);
        out->S.emplace_back(grid, std::move(S));
        out->Pb.emplace_back(grid, pb);
    }
    return out;
}

std::shared_ptr<const DifferenceFamily> build_differences(std::shared_ptr<const ApproxIdentity> approx) {
    if (approx->scales() < 2) throw InvalidArgument("differences need at least two scales");
    auto out = std::make_shared<DifferenceFamily>();
    out->approx = approx;
    for (int k = approx->k_min; k < approx->k_max; ++k) out->D.push_back(approx->s(k + 1) - approx->s(k));
    return out;
}

ReproducingFamily::ReproducingFamily(std::shared_ptr<const DifferenceFamily> diffs, double regularization)
    : diffs_(std::move(diffs)), E_(diffs_->b().grid(), Mat::Zero(diffs_->b().size(), diffs_->b().size())) {
    if (!(regularization > 0.0)) throw InvalidArgument("regularization must be positive");
    const GridFunction& b = diffs_->b();
    const double h = b.grid().step();
    const int n = b.size();

    A_ = Mat::Zero(n, n);
    for (const auto& D : diffs_->D) {
        const Mat X = h * (D.coeffs() * b.values().asDiagonal());
        A_.noalias() += X * X;
    }
    E_ = DenseOperator(b.grid(), A_ / h);

    const LinearMap map{[this](const Vec& v) -> Vec { return A_ * v; },
                        [this](const Vec& v) -> Vec { return A_.adjoint() * v; }};
    e_norm_ = l2_norm_power(map, n, 400, 11);
    alpha_ = regularization * e_norm_;

    Mat N = A_.adjoint() * A_;
    N.diagonal().array() += alpha_ * alpha_;
    normal_.compute(N);
    if (normal_.info() != Eigen::Success) throw Error("reproducing family: normal equations failed");
    b_mass_ = pairing(b, GridFunction::constant(b.grid(), 1.0));
    if (std::abs(b_mass_) < 1e-12) throw InvalidArgument("reproducing family: b has zero mean");
}

Vec ReproducingFamily::pinv(const Vec& g) const {
    Vec x = normal_.solve(A_.adjoint() * g);
    const double h = grid().step();
    const cplx c = h * (b().values().transpose() * x)(0, 0) / b_mass_;
    x.array() -= c;
    return x;
}

Vec ReproducingFamily::pinv_transpose(const Vec& g) const {
    const double h = grid().step();
    Vec y = g - b().values() * (h * g.sum() / b_mass_);
    return (A_ * normal_.solve(y.conjugate())).conjugate();
}

GridFunction ReproducingFamily::dtilde_apply(int k, const GridFunction& f) const {
    return {grid(), pinv(diffs_->d(k).apply(f.values()))};
}

GridFunction ReproducingFamily::dtilde_transpose_apply(int k, const GridFunction& f) const {
    return {grid(), diffs_->d(k).transpose().apply(pinv_transpose(f.values()))};
}

DenseOperator ReproducingFamily::dtilde(int k) const {
    const Mat& Dc = diffs_->d(k).coeffs();
    Mat out(Dc.rows(), Dc.cols());
    for (Eigen::Index j = 0; j < Dc.cols(); ++j) out.col(j) = pinv(Dc.col(j));
    return {grid(), std::move(out)};
}

GridFunction ReproducingFamily::term(int k, const GridFunction& f) const {
    const Vec& bv = b().values();
    const auto& D = diffs_->d(k);
    const Vec inner = D.apply(Vec(bv.cwiseProduct(D.apply(Vec(bv.cwiseProduct(f.values()))))));
    return {grid(), bv.cwiseProduct(pinv(inner))};
}

GridFunction ReproducingFamily::reproduce(const GridFunction& f, int k_lo, int k_hi) const {
    const Vec& bv = b().values();
    const Vec bf = bv.cwiseProduct(f.values());
    Vec acc = Vec::Zero(bv.size());
    for (int k = std::max(k_lo, diffs_->k_min()); k <= std::min(k_hi, diffs_->k_max()); ++k) {
        const auto& D = diffs_->d(k);
        acc += D.apply(Vec(bv.cwiseProduct(D.apply(bf))));
    }
    return {grid(), bv.cwiseProduct(pinv(acc))};
}

GridFunction ReproducingFamily::reproduce(const GridFunction& f) const {
    return reproduce(f, diffs_->k_min(), diffs_->k_max());
}

double ReproducingFamily::residual(const std::vector<GridFunction>& probes) const {
    double worst = 0.0;
    for (const auto& f : probes) {
        const GridFunction bf = b() * f;
        const double den = lp_norm(bf, 2.0);
        if (den == 0.0) continue;
        worst = std::max(worst, lp_norm(reproduce(f) - bf, 2.0) / den);
    }
    return worst;
}

int ReproducingFamily::numerical_rank(double relative) const {
    Eigen::BDCSVD<Mat> svd(A_);
    const auto& s = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s[i] > relative * s[0]) ++r;
    return r;
}

std::shared_ptr<const ReproducingFamily> build_reproducing_family(std::shared_ptr<const DifferenceFamily> diffs,
                                                                 double regularization) {
    return std::make_shared<const ReproducingFamily>(std::move(diffs), regularization);
}

HolderConvergence holder_convergence(const ApproxIdentity& approx, const GridFunction& f, double delta,
                                     int k_lo, int k_hi) {
    HolderConvergence out;
    const GridFunction bf = approx.b * f;
    std::vector<double> xs;
    for (int k = std::max(k_lo, approx.k_min); k <= std::min(k_hi, approx.k_max); ++k) {
        out.scales.push_back(k);
        out.errors.push_back(holder_seminorm(approx.s(k).apply(bf) - f, delta));
        xs.push_back(k);
    }
    out.slope = fit_log2_decay(xs, out.errors, 0.0).slope;
    return out;
}

}  // namespace czlab
