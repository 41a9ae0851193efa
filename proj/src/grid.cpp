#include "czlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "czlab/error.hpp"
#include "czlab/rng.hpp"

namespace czlab {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const Grid& a, const Grid& b) {
    if (a != b) throw InvalidArgument("grid mismatch");
}

}  // namespace

Grid::Grid(double half_length, int n_points) : L_(half_length), n_(n_points) {
    if (!(half_length > 0.0) || !std::isfinite(half_length))
        throw InvalidArgument("grid half-length must be positive and finite");
    if (!is_power_of_two(n_points) || n_points < 2)
        throw InvalidArgument("grid size must be a power of two >= 2");
    h_ = 2.0 * L_ / n_;
}

std::vector<double> Grid::points() const {
    std::vector<double> xs(n_);
    for (int i = 0; i < n_; ++i) xs[i] = x(i);
    return xs;
}

int Grid::nearest_index(double x) const {
    const int i = static_cast<int>(std::floor((x + L_) / h_));
    return std::clamp(i, 0, n_ - 1);
}

GridFunction::GridFunction(Grid grid, Vec values) : grid_(grid), v_(std::move(values)) {
    if (v_.size() != grid_.size()) throw InvalidArgument("grid function has wrong length");
    for (Eigen::Index i = 0; i < v_.size(); ++i)
        if (!std::isfinite(v_[i].real()) || !std::isfinite(v_[i].imag()))
            throw InvalidArgument("grid function has non-finite samples");
}

GridFunction GridFunction::sample(const Grid& grid, const std::function<cplx(double)>& f) {
    Vec v(grid.size());
    for (int i = 0; i < grid.size(); ++i) v[i] = f(grid.x(i));
    return {grid, std::move(v)};
}

GridFunction GridFunction::constant(const Grid& grid, cplx value) {
    return {grid, Vec::Constant(grid.size(), value)};
}

GridFunction GridFunction::operator+(const GridFunction& o) const {
    require_same_grid(grid_, o.grid_);
    return {grid_, v_ + o.v_};
}

GridFunction GridFunction::operator-(const GridFunction& o) const {
    require_same_grid(grid_, o.grid_);
    return {grid_, v_ - o.v_};
}

GridFunction GridFunction::operator*(const GridFunction& o) const {
    require_same_grid(grid_, o.grid_);
    return {grid_, v_.cwiseProduct(o.v_)};
}

GridFunction GridFunction::operator*(cplx s) const { return {grid_, v_ * s}; }

GridFunction GridFunction::operator/(const GridFunction& o) const {
    require_same_grid(grid_, o.grid_);
    return {grid_, v_.cwiseQuotient(o.v_)};
}

GridFunction GridFunction::conj() const { return {grid_, v_.conjugate()}; }

GridFunction GridFunction::abs() const { return {grid_, v_.cwiseAbs().cast<cplx>()}; }

DenseOperator::DenseOperator(Grid grid, Mat coeffs) : grid_(grid), c_(std::move(coeffs)) {
    if (c_.rows() != grid_.size() || c_.cols() != grid_.size())
        throw InvalidArgument("operator coefficients do not match the grid");
}

DenseOperator DenseOperator::multiplication(const GridFunction& b) {
    Mat c = Mat::Zero(b.size(), b.size());
    c.diagonal() = b.values() / b.grid().step();
    return {b.grid(), std::move(c)};
}

GridFunction DenseOperator::apply(const GridFunction& f) const {
    require_same_grid(grid_, f.grid());
    return {grid_, apply(f.values())};
}

Vec DenseOperator::apply(const Vec& f) const { return grid_.step() * (c_ * f); }

DenseOperator DenseOperator::transpose() const { return {grid_, c_.transpose()}; }

DenseOperator DenseOperator::compose(const DenseOperator& rhs) const {
    require_same_grid(grid_, rhs.grid_);
    Mat c = grid_.step() * (c_ * rhs.c_);
    return {grid_, std::move(c)};
}

DenseOperator DenseOperator::left_multiply(const GridFunction& b) const {
    require_same_grid(grid_, b.grid());
    return {grid_, b.values().asDiagonal() * c_};
}

DenseOperator DenseOperator::right_multiply(const GridFunction& b) const {
    require_same_grid(grid_, b.grid());
    return {grid_, c_ * b.values().asDiagonal()};
}

DenseOperator DenseOperator::operator+(const DenseOperator& o) const {
    require_same_grid(grid_, o.grid_);
    return {grid_, c_ + o.c_};
}

DenseOperator DenseOperator::operator-(const DenseOperator& o) const {
    require_same_grid(grid_, o.grid_);
    return {grid_, c_ - o.c_};
}

LinearMap as_linear_map(const DenseOperator& A) {
    const double h = A.grid().step();
    const Mat* c = &A.coeffs();
    return {[c, h](const Vec& v) -> Vec { return h * ((*c) * v); },
            [c, h](const Vec& v) -> Vec { return h * (c->adjoint() * v); }};
}

double lp_norm(const Vec& v, double h, double p) {
    if (std::isinf(p)) return v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
    if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::abs(v[i]), p);
    return std::pow(h * s, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) { return lp_norm(f.values(), f.grid().step(), p); }

cplx pairing(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid(), g.grid());
    return f.grid().step() * (f.values().transpose() * g.values())(0, 0);
}

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid(), g.grid());
    const Grid& grid = f.grid();
    const int n = grid.size();
    const double h = grid.step();

    // Trigonometric interpolation of g half a cell to the left puts it on the node lattice:
    // node[s + n/2] = g(s h) for |s| < n/2.
    std::vector<cplx> roots(n);
    for (int m = 0; m < n; ++m) roots[m] = std::polar(1.0, -2.0 * M_PI * m / n);
    std::vector<cplx> G(n, 0.0);
    for (int q = 0; q < n; ++q) {
        cplx acc = 0.0;
        for (int m = 0; m < n; ++m) acc += g[m] * roots[(static_cast<long>(q) * m) % n];
        G[q] = acc;
    }
    std::vector<cplx> node(n, 0.0);
    for (int m = 0; m < n; ++m) {
        cplx acc = G[0];
        for (int q = 1; q < n / 2; ++q) {
            const double phase = 2.0 * M_PI * q * (m - 0.5) / n;
            acc += G[q] * std::polar(1.0, phase) + G[n - q] * std::polar(1.0, -phase);
        }
        node[m] = acc / static_cast<double>(n);
    }
    node[0] = 0.0;  // position -L sits on the boundary

    Vec out = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < n; ++j) {
            const int s = i - j;
            if (s <= -n / 2 || s >= n / 2) continue;
            acc += f[j] * node[s + n / 2];
        }
        out[i] = h * acc;
    }
    return {grid, std::move(out)};
}

GridFunction hilbert_transform(const GridFunction& f) {
    const int n = f.size();
    Vec out = Vec::Zero(n);
    const Vec& v = f.values();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        cplx acc = 0.0;
        for (int j = (i + 1) % 2; j < n; j += 2) acc += v[j] / static_cast<double>(i - j);
        out[i] = acc * (2.0 / M_PI);
    }
    return {f.grid(), std::move(out)};
}

GridFunction maximal_function(const GridFunction& f) {
    const int n = f.size();
    std::vector<double> prefix(n + 1, 0.0);
    for (int i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + std::abs(f[i]);
    std::vector<double> best(n, 0.0);
    std::vector<double> suffix(n);
    for (int a = 0; a < n; ++a) {
        // suffix[i] = max over b >= i of the average on cells a..b
        double run = 0.0;
        for (int b = n - 1; b >= a; --b) {
            run = std::max(run, (prefix[b + 1] - prefix[a]) / (b - a + 1));
            suffix[b] = run;
        }
        for (int i = a; i < n; ++i) best[i] = std::max(best[i], suffix[i]);
    }
    Vec out(n);
    for (int i = 0; i < n; ++i) out[i] = best[i];
    return {f.grid(), std::move(out)};
}

double l2_norm_power(const LinearMap& A, int n, int iterations, std::uint64_t seed) {
    Rng rng(seed);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(rng.normal(), rng.normal());
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Vec w = A.apply_adjoint(A.apply(v));
        const double nw = w.norm();
        if (nw == 0.0) return 0.0;
        const double next = std::sqrt(nw);
        v = w / nw;
        if (it > 10 && std::abs(next - sigma) <= 1e-10 * next) {
            sigma = next;
            break;
        }
        sigma = next;
    }
    return A.apply(v).norm();
}

namespace {

double operator_norm_impl(const LinearMap& A, const Grid& grid, double p, double q, int trials,
                          std::uint64_t seed, const std::vector<double>& column_norms) {
    if (!(p >= 1.0) || !(q >= 1.0)) throw InvalidArgument("operator_norm requires p, q >= 1");
    const int n = grid.size();
    const double h = grid.step();
    double best = 0.0;
    auto probe = [&](const Vec& f) {
        const double den = lp_norm(f, h, p);
        if (den > 0.0) best = std::max(best, lp_norm(A.apply(f), h, q) / den);
    };

    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        Vec f(n);
        for (int i = 0; i < n; ++i) f[i] = cplx(rng.normal(), rng.normal());
        probe(f);
    }

    // Spikes at the strongest columns when they are known, otherwise evenly spread.
    std::vector<int> spikes;
    if (!column_norms.empty()) {
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        const int m = std::min(8, n);
        std::partial_sort(order.begin(), order.begin() + m, order.end(), [&](int a, int b) {
            return column_norms[a] > column_norms[b] || (column_norms[a] == column_norms[b] && a < b);
        });
        spikes.assign(order.begin(), order.begin() + m);
    } else {
        for (int s = 0; s < 8; ++s) spikes.push_back((2 * s + 1) * n / 16);
    }
    for (int j : spikes) {
        Vec e = Vec::Zero(n);
        e[j] = 1.0;
        probe(e);
    }

    const int centre = spikes.front();
    for (int w = 2; w <= n / 2; w *= 2) {
        Vec f = Vec::Zero(n);
        for (int i = 0; i < n; ++i) {
            const double t = static_cast<double>(i - centre) / w;
            if (std::abs(t) < 1.0) f[i] = std::exp(-1.0 / (1.0 - t * t));
        }
        probe(f);
    }
    probe(Vec::Ones(n));

    if (p == 2.0 && q == 2.0) best = std::max(best, l2_norm_power(A, n, 300, seed + 1));
    return best;
}

}  // namespace

double operator_norm(const LinearMap& A, const Grid& grid, double p, double q, int trials,
                     std::uint64_t seed) {
    return operator_norm_impl(A, grid, p, q, trials, seed, {});
}

double operator_norm(const DenseOperator& A, double p, double q, int trials, std::uint64_t seed) {
    const int n = A.grid().size();
    const double h = A.grid().step();
    std::vector<double> cols(n);
    for (int j = 0; j < n; ++j) cols[j] = lp_norm(Vec(h * A.coeffs().col(j)), h, q);
    return operator_norm_impl(as_linear_map(A), A.grid(), p, q, trials, seed, cols);
}

double decay_profile(double scale, double N, double x) {
    return scale / std::pow(1.0 + scale * std::abs(x), N);
}

double decay_profile(int k, double N, double x) { return decay_profile(std::ldexp(1.0, k), N, x); }

}  // namespace czlab
