#pragma once

#include "flrd/curves.hpp"
#include "flrd/spline_basis.hpp"

#include <Eigen/Dense>

namespace flrd {

/// Empirical covariance structure of (X, X') in orthonormal coordinates,
/// where adjoints are plain transposes.
struct CovarianceSet {
    Eigen::Index n = 0;
    Eigen::MatrixXd Gamma;           // k_W x k_W
    Eigen::MatrixXd GammaPrime;      // k_W x k_L, map L -> W
    Eigen::MatrixXd GammaPrimeStar;  // k_L x k_W
    Eigen::MatrixXd GammaPrimePrime; // k_L x k_L
    Eigen::VectorXd delta;           // k_W
    Eigen::VectorXd deltaPrime;      // k_L
};

/// Regularized Schur-complement systems at a given alpha.
struct SchurSystem {
    double alpha = 0.0;
    Eigen::MatrixXd S_phi;  // k_W x k_W
    Eigen::VectorXd u_phi;  // k_W
    Eigen::MatrixXd S_psi;  // k_L x k_L
    Eigen::VectorXd u_psi;  // k_L
};

/// Moment estimates (1/n) sum x x', (1/n) sum y x, ... of a centered dataset.
CovarianceSet empirical_covariances(const FunctionalDataset& dataset, const GramPair& grams);

/// Solve (T + gamma I) w = v for symmetric PSD T, gamma > 0.
Eigen::VectorXd reg_inverse_apply(const Eigen::MatrixXd& T, double gamma,
                                  const Eigen::VectorXd& v);
Eigen::MatrixXd reg_inverse_apply(const Eigen::MatrixXd& T, double gamma,
                                  const Eigen::MatrixXd& V);

SchurSystem schur_systems(const CovarianceSet& cov, double alpha);

/// Symmetric PSD square root via eigendecomposition, negative eigenvalues
/// clamped to zero.
Eigen::MatrixXd operator_sqrt(const Eigen::MatrixXd& T);

/// Largest singular value.
double sup_norm(const Eigen::MatrixXd& T);

}  // namespace flrd
