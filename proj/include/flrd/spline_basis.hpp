#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <utility>

namespace flrd {

struct Interval {
    double a = 0.0;
    double b = 1.0;
};

/// Gram matrices of the basis under the L and W inner products, together
/// with the orthonormalizing coordinate changes used by the operator layer.
///
/// All integrals are taken on the rescaled domain [0,1]. U_W maps
/// orthonormal W-coordinates to raw coefficients (U_W' G_W U_W = I) and
/// R_W = U_W^{-1} is the upper Cholesky factor of G_W; U_L / R_L play the
/// same role for the L Gram of the derivative basis.
struct GramPair {
    Eigen::MatrixXd G_L;        // k x k, ∫ b_i b_j
    Eigen::MatrixXd G_D;        // k x k, ∫ b_i' b_j'
    Eigen::MatrixXd G_W;        // G_L + G_D
    Eigen::MatrixXd D_coef;     // (k-1) x k derivative coefficient map
    Eigen::MatrixXd G_L_deriv;  // (k-1) x (k-1), L Gram of the derivative basis
    Eigen::MatrixXd U_W;        // k x k
    Eigen::MatrixXd U_L;        // (k-1) x (k-1)
    Eigen::MatrixXd R_W;        // inverse of U_W
    Eigen::MatrixXd R_L;        // inverse of U_L
    Eigen::MatrixXd D_orth;     // derivative map in orthonormal coordinates
};

/// Clamped B-spline basis on a closed interval. The domain is metadata for
/// rescaling data abscissae; knots and all inner products live on [0,1].
/// Immutable; copies share the underlying representation.
class BSplineBasis {
public:
    BSplineBasis() = default;

    double domain_a() const;
    double domain_b() const;
    int degree() const;
    Eigen::Index size() const;  // number of basis functions k
    const Eigen::VectorXd& knots() const;  // on [0,1], ends repeated degree+1 times

    /// Map a data-units abscissa into [0,1]; out-of-domain error outside [a,b].
    double rescale(double t) const;

    /// Dense vector of the k basis values at data-units t.
    Eigen::VectorXd eval(double t) const;

    /// Basis values at an already-rescaled point u in [0,1].
    Eigen::VectorXd eval01(double u) const;

    /// Value of the spline with the given coefficients at rescaled u.
    double value01(const Eigen::VectorXd& coef, double u) const;

    /// Basis of the derivatives (degree-1). Errors for degree 0.
    const BSplineBasis& derivative_basis() const;

    /// Gram matrices and orthonormalizing factors; computed once, cached.
    const GramPair& grams() const;

    bool same_as(const BSplineBasis& other) const;
    explicit operator bool() const { return impl_ != nullptr; }

private:
    friend BSplineBasis build_basis(Interval, Eigen::Index, int);
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

/// Uniform interior knots, clamped ends.
BSplineBasis build_basis(Interval domain, Eigen::Index k, int degree);

/// Basis values at data-units t (out-of-domain error outside the domain).
Eigen::VectorXd eval_basis(const BSplineBasis& basis, double t);

/// Derivative basis and the coefficient map c -> c' such that
/// spline'(t; c) = spline(t; D_coef c) on the derivative basis.
/// Degenerate (zero map into an empty space) for degree 0.
struct DerivativeMap {
    bool degenerate = false;
    std::optional<BSplineBasis> basis;  // unset when degenerate
    Eigen::MatrixXd coef;               // (k-1) x k, 0 x k when degenerate
};
DerivativeMap derivative_map(const BSplineBasis& basis);

/// Exact Gram matrices via fixed Gauss-Legendre quadrature per knot span
/// (order degree+2, exact for the piecewise-polynomial integrands).
GramPair gram_matrices(const BSplineBasis& basis);

/// U with U' G U = I, U the inverse of the upper-triangular Cholesky factor.
/// singular-gram error when G is not positive definite.
Eigen::MatrixXd orthonormal_map(const Eigen::MatrixXd& G);

}  // namespace flrd
