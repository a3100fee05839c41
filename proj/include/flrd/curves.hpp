#pragma once

#include "flrd/spline_basis.hpp"

#include <Eigen/Dense>

#include <vector>

namespace flrd {

/// Raw observation: values sampled at strictly increasing abscissae.
struct SampledCurve {
    Eigen::VectorXd abscissae;
    Eigen::VectorXd values;
};

/// Coefficient vector over a basis (raw, non-orthonormal coordinates).
class Curve {
public:
    Curve() = default;
    Curve(BSplineBasis basis, Eigen::VectorXd coef);

    const BSplineBasis& basis() const { return basis_; }
    const Eigen::VectorXd& coef() const { return coef_; }

    /// Evaluate at a data-units abscissa.
    double operator()(double t) const;

private:
    BSplineBasis basis_;
    Eigen::VectorXd coef_;
};

/// Sample (y_i, X_i, X'_i): coefficient rows per observation, derivative
/// rows kept exactly equal to D_coef applied to the curve rows.
struct FunctionalDataset {
    BSplineBasis basis;
    Eigen::MatrixXd coef;        // n x k
    Eigen::MatrixXd deriv_coef;  // n x (k-1)
    Eigen::VectorXd responses;   // n
    bool centered = false;
    Eigen::VectorXd mean_coef;   // k, zero until centered
    double mean_response = 0.0;

    Eigen::Index size() const { return responses.size(); }
    Curve curve(Eigen::Index i) const;
    Curve derivative(Eigen::Index i) const;
    Curve mean_curve() const;
};

/// Unpenalized least-squares fit of the samples in the basis.
Curve smooth(const SampledCurve& raw, const BSplineBasis& basis);

/// Exact spline derivative via the coefficient map (degree >= 1).
Curve differentiate(const Curve& curve);

double inner_L(const Curve& u, const Curve& v);
double inner_W(const Curve& u, const Curve& v);

FunctionalDataset make_dataset(const BSplineBasis& basis,
                               const std::vector<SampledCurve>& raws,
                               const Eigen::VectorXd& responses);

FunctionalDataset dataset_from_coefficients(const BSplineBasis& basis,
                                            Eigen::MatrixXd coef,
                                            Eigen::VectorXd responses);

/// Subtract empirical means; derivatives are re-derived from the centered
/// coefficients. The means are stored on the result for prediction-time
/// re-centering.
FunctionalDataset center(const FunctionalDataset& dataset);

}  // namespace flrd
