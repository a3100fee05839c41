#pragma once

#include "flrd/curves.hpp"
#include "flrd/operators.hpp"
#include "flrd/spline_basis.hpp"

namespace flrd {

/// Fitted doubly-penalized model: coefficient curves, penalties and the
/// training centering statistics needed at prediction time.
struct FLRDFit {
    Curve phi_hat;   // on the W basis
    Curve psi_hat;   // on the derivative basis
    double alpha = 0.0;
    double beta = 0.0;
    Curve mean_curve;
    double mean_response = 0.0;
    bool degenerate_design = false;  // all curves identical after centering
};

/// Ridge functional linear regression baseline (L inner product only).
struct RidgeFLRFit {
    Curve theta_hat;
    double beta = 0.0;
    Curve mean_curve;
    double mean_response = 0.0;
};

/// phi = (S_phi + beta I)^{-1} u_phi, psi = (S_psi + beta I)^{-1} u_psi in
/// orthonormal coordinates, mapped back to raw basis coefficients.
FLRDFit fit_flrd(const FunctionalDataset& dataset, const GramPair& grams,
                 double alpha, double beta);

/// mean_y + <phi, x - mean>_W + <psi, (x - mean)'>_L
double predict(const FLRDFit& fit, const Curve& x);
Eigen::VectorXd predict(const FLRDFit& fit, const FunctionalDataset& data);

RidgeFLRFit fit_flr_ridge(const FunctionalDataset& dataset, const GramPair& grams, double beta);
double predict(const RidgeFLRFit& fit, const Curve& x);
Eigen::VectorXd predict(const RidgeFLRFit& fit, const FunctionalDataset& data);

/// Mean squared error of predictions on a validation set.
double msep(const FLRDFit& fit, const FunctionalDataset& validation);
double msep(const RidgeFLRFit& fit, const FunctionalDataset& validation);

/// The null-space companion of psi: phi = -D*psi, so that the pair (phi, psi)
/// contributes exactly zero to the predictor for every curve.
Curve make_unidentifiable(const BSplineBasis& basis, const GramPair& grams, const Curve& psi);

}  // namespace flrd
