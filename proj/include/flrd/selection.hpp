#pragma once

#include "flrd/curves.hpp"
#include "flrd/spline_basis.hpp"

#include <Eigen/Dense>

namespace flrd {

/// Leave-one-out cross-validation surface over a penalty grid.
struct CVResult {
    Eigen::VectorXd alpha_grid;
    Eigen::VectorXd beta_grid;
    Eigen::MatrixXd scores;  // |alpha_grid| x |beta_grid|
    double best_alpha = 0.0;
    double best_beta = 0.0;
    double best_score = 0.0;
};

/// (1/n) sum_i (y_i - yhat_{-i}(X_i))^2 with the fold model refit (and
/// re-centered) without observation i. Deterministic: folds run in index
/// order.
double cv_score(const FunctionalDataset& dataset, const GramPair& grams,
                double alpha, double beta);

/// Evaluate cv_score on every grid cell; ties resolved towards the
/// lexicographically smallest (alpha, beta).
CVResult grid_search(const FunctionalDataset& dataset, const GramPair& grams,
                     const Eigen::VectorXd& alpha_grid, const Eigen::VectorXd& beta_grid);

/// 8 logarithmically spaced points in [1e-4, 1], the default search box.
Eigen::VectorXd default_penalty_grid();

}  // namespace flrd
