#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace czlab {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

/** Midpoint grid x_i = -L + (i + 1/2) h on [-L, L] with h = 2L/n, n a power of two. */
class Grid {
public:
    Grid(double half_length, int n_points);

    double half_length() const { return L_; }
    int size() const { return n_; }
    double step() const { return h_; }
    double x(int i) const { return -L_ + (i + 0.5) * h_; }
    std::vector<double> points() const;
    int nearest_index(double x) const;

    bool operator==(const Grid& o) const { return n_ == o.n_ && L_ == o.L_; }
    bool operator!=(const Grid& o) const { return !(*this == o); }

private:
    double L_;
    int n_;
    double h_;
};

class GridFunction {
public:
    GridFunction(Grid grid, Vec values);

    static GridFunction sample(const Grid& grid, const std::function<cplx(double)>& f);
    static GridFunction constant(const Grid& grid, cplx value);
    static GridFunction zero(const Grid& grid) { return constant(grid, 0.0); }

    const Grid& grid() const { return grid_; }
    const Vec& values() const { return v_; }
    Vec& values() { return v_; }
    cplx operator[](int i) const { return v_[i]; }
    int size() const { return grid_.size(); }

    GridFunction operator+(const GridFunction& o) const;
    GridFunction operator-(const GridFunction& o) const;
    GridFunction operator*(const GridFunction& o) const;
    GridFunction operator*(cplx s) const;
    GridFunction operator/(const GridFunction& o) const;
    GridFunction conj() const;
    GridFunction abs() const;

private:
    Grid grid_;
    Vec v_;
};

/**
 * Dense integral operator (Af)(x_i) = h * sum_j c_ij f(x_j).
 * The stored coefficients are the kernel samples c_ij = a(x_i, x_j).
 */
class DenseOperator {
public:
    DenseOperator(Grid grid, Mat coeffs);

    static DenseOperator multiplication(const GridFunction& b);

    const Grid& grid() const { return grid_; }
    const Mat& coeffs() const { return c_; }
    Mat& coeffs() { return c_; }
    /// The matrix acting on sample vectors, h * c.
    Mat matrix() const { return grid_.step() * c_; }

    GridFunction apply(const GridFunction& f) const;
    Vec apply(const Vec& f) const;
    /// Kernel transpose a^T(x, y) = a(y, x).
    DenseOperator transpose() const;
    /// this o rhs.
    DenseOperator compose(const DenseOperator& rhs) const;
    /// M_b o this.
    DenseOperator left_multiply(const GridFunction& b) const;
    /// this o M_b.
    DenseOperator right_multiply(const GridFunction& b) const;

    DenseOperator operator+(const DenseOperator& o) const;
    DenseOperator operator-(const DenseOperator& o) const;

private:
    Grid grid_;
    Mat c_;
};

/** A linear map on sample vectors given by callbacks; used for matrix-free norm estimates. */
struct LinearMap {
    std::function<Vec(const Vec&)> apply;
    std::function<Vec(const Vec&)> apply_adjoint;  // Hermitian adjoint of `apply` on C^n
};

LinearMap as_linear_map(const DenseOperator& A);

/// Discrete L^p norm (h sum |f|^p)^(1/p); p = infinity gives max |f|. Rejects p < 1.
double lp_norm(const GridFunction& f, double p);
double lp_norm(const Vec& v, double h, double p);

/// Bilinear pairing h sum f g (no conjugation).
cplx pairing(const GridFunction& f, const GridFunction& g);

/// Direct convolution h sum_j f(x_j) g(x_i - x_j); g is read at node offsets through a
/// half-cell trigonometric shift and shifts leaving [-L, L] contribute zero.
GridFunction convolve(const GridFunction& f, const GridFunction& g);

/// Discrete Hilbert transform with kernel 1/(pi x) on the odd lattice through each point.
GridFunction hilbert_transform(const GridFunction& f);

/// Uncentred maximal function over grid-aligned intervals containing each point.
GridFunction maximal_function(const GridFunction& f);

/// Lower-bound estimate of the L^p -> L^q norm from random, spike and bump probes,
/// plus power iteration when p = q = 2.
double operator_norm(const DenseOperator& A, double p, double q, int trials, std::uint64_t seed = 1);
double operator_norm(const LinearMap& A, const Grid& grid, double p, double q, int trials,
                     std::uint64_t seed = 1);
/// Power iteration estimate of the L^2 operator norm.
double l2_norm_power(const LinearMap& A, int n, int iterations = 200, std::uint64_t seed = 7);

/// Phi_k^N(x) = 2^k / (1 + 2^k |x|)^N.
double decay_profile(int k, double N, double x);
double decay_profile(double scale, double N, double x);

}  // namespace czlab
