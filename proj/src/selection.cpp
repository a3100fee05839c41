#include "flrd/selection.hpp"

#include "flrd/errors.hpp"
#include "flrd/estimator.hpp"

#include <cmath>

namespace flrd {

namespace {

FunctionalDataset drop_observation(const FunctionalDataset& dataset, Eigen::Index skip) {
    const Eigen::Index n = dataset.size();
    FunctionalDataset fold;
    fold.basis = dataset.basis;
    fold.coef.resize(n - 1, dataset.coef.cols());
    fold.deriv_coef.resize(n - 1, dataset.deriv_coef.cols());
    fold.responses.resize(n - 1);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (i == skip) continue;
        fold.coef.row(r) = dataset.coef.row(i);
        fold.deriv_coef.row(r) = dataset.deriv_coef.row(i);
        fold.responses[r] = dataset.responses[i];
        ++r;
    }
    fold.centered = false;
    fold.mean_coef = dataset.mean_coef;
    fold.mean_response = dataset.mean_response;
    return fold;
}

}  // namespace

double cv_score(const FunctionalDataset& dataset, const GramPair& grams,
                double alpha, double beta) {
    const Eigen::Index n = dataset.size();
    if (n < 3) raise("too-few-observations", "leave-one-out needs at least 3 observations");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const FunctionalDataset fold = drop_observation(dataset, i);
        const FLRDFit fit = fit_flrd(fold, grams, alpha, beta);
        const double r = dataset.responses[i] - predict(fit, dataset.curve(i));
        acc += r * r;
    }
    return acc / static_cast<double>(n);
}

CVResult grid_search(const FunctionalDataset& dataset, const GramPair& grams,
                     const Eigen::VectorXd& alpha_grid, const Eigen::VectorXd& beta_grid) {
    if (alpha_grid.size() == 0 || beta_grid.size() == 0)
        raise("invalid-penalty", "penalty grids must be nonempty");
    if (alpha_grid.minCoeff() <= 0.0 || beta_grid.minCoeff() <= 0.0)
        raise("invalid-penalty", "penalty grids must be strictly positive");

    CVResult res;
    res.alpha_grid = alpha_grid;
    res.beta_grid = beta_grid;
    res.scores.resize(alpha_grid.size(), beta_grid.size());
    bool first = true;
    for (Eigen::Index ia = 0; ia < alpha_grid.size(); ++ia) {
        for (Eigen::Index ib = 0; ib < beta_grid.size(); ++ib) {
            const double score = cv_score(dataset, grams, alpha_grid[ia], beta_grid[ib]);
            res.scores(ia, ib) = score;
            const bool better =
                first || score < res.best_score ||
                (score == res.best_score &&
                 (alpha_grid[ia] < res.best_alpha ||
                  (alpha_grid[ia] == res.best_alpha && beta_grid[ib] < res.best_beta)));
            if (better) {
                res.best_score = score;
                res.best_alpha = alpha_grid[ia];
                res.best_beta = beta_grid[ib];
                first = false;
            }
        }
    }
    return res;
}

Eigen::VectorXd default_penalty_grid() {
    Eigen::VectorXd grid(8);
    for (int i = 0; i < 8; ++i) grid[i] = std::pow(10.0, -4.0 + 4.0 * i / 7.0);
    return grid;
}

}  // namespace flrd
