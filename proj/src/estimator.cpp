#include "flrd/estimator.hpp"

#include "flrd/errors.hpp"

#include <cmath>
#include <sstream>

namespace flrd {

namespace {

void check_penalty(const char* name, double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be strictly positive, got " << value;
        raise("invalid-penalty", os.str());
    }
}

}  // namespace

FLRDFit fit_flrd(const FunctionalDataset& dataset, const GramPair& grams,
                 double alpha, double beta) {
    check_penalty("alpha", alpha);
    check_penalty("beta", beta);
    if (dataset.size() < 2) raise("too-few-observations", "fit needs at least 2 observations");

    const FunctionalDataset centered = dataset.centered ? dataset : center(dataset);
    const CovarianceSet cov = empirical_covariances(centered, grams);
    const SchurSystem sys = schur_systems(cov, alpha);

    const Eigen::VectorXd phi_orth = reg_inverse_apply(sys.S_phi, beta, sys.u_phi);
    const Eigen::VectorXd psi_orth = reg_inverse_apply(sys.S_psi, beta, sys.u_psi);

    FLRDFit fit;
    fit.phi_hat = Curve(dataset.basis, grams.U_W * phi_orth);
    fit.psi_hat = Curve(dataset.basis.derivative_basis(), grams.U_L * psi_orth);
    fit.alpha = alpha;
    fit.beta = beta;
    fit.mean_curve = Curve(dataset.basis, centered.mean_coef);
    fit.mean_response = centered.mean_response;

    const double mean_scale = centered.mean_coef.cwiseAbs().maxCoeff();
    const double spread = centered.coef.cwiseAbs().maxCoeff();
    fit.degenerate_design = spread <= 1e-12 * (1.0 + mean_scale);
    return fit;
}

double predict(const FLRDFit& fit, const Curve& x) {
    if (!x.basis().same_as(fit.phi_hat.basis()))
        raise("basis-mismatch", "curve basis does not match the fitted model");
    const GramPair& g = x.basis().grams();
    const Eigen::VectorXd dc = x.coef() - fit.mean_curve.coef();
    const double w_part = fit.phi_hat.coef().dot(g.G_W * dc);
    const double l_part = fit.psi_hat.coef().dot(g.G_L_deriv * (g.D_coef * dc));
    return fit.mean_response + w_part + l_part;
}

Eigen::VectorXd predict(const FLRDFit& fit, const FunctionalDataset& data) {
    if (!data.basis.same_as(fit.phi_hat.basis()))
        raise("basis-mismatch", "dataset basis does not match the fitted model");
    const GramPair& g = data.basis.grams();
    const Eigen::MatrixXd dc = data.coef.rowwise() - fit.mean_curve.coef().transpose();
    Eigen::VectorXd out = dc * (g.G_W * fit.phi_hat.coef());
    out += dc * (g.D_coef.transpose() * (g.G_L_deriv * fit.psi_hat.coef()));
    out.array() += fit.mean_response;
    return out;
}

RidgeFLRFit fit_flr_ridge(const FunctionalDataset& dataset, const GramPair& grams, double beta) {
    check_penalty("beta", beta);
    if (dataset.size() < 2) raise("too-few-observations", "fit needs at least 2 observations");

    const FunctionalDataset centered = dataset.centered ? dataset : center(dataset);
    const Eigen::Index n = centered.size();

    // L-orthonormal coordinates of the main basis (FLR has no derivative term)
    const Eigen::MatrixXd U = orthonormal_map(grams.G_L);
    const Eigen::MatrixXd R =
        U.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(U.rows(), U.cols()));
    const Eigen::MatrixXd V = centered.coef * R.transpose();
    Eigen::MatrixXd GammaL = (V.transpose() * V) / static_cast<double>(n);
    GammaL = 0.5 * (GammaL + GammaL.transpose()).eval();
    const Eigen::VectorXd deltaL = (V.transpose() * centered.responses) / static_cast<double>(n);

    RidgeFLRFit fit;
    fit.theta_hat = Curve(dataset.basis, U * reg_inverse_apply(GammaL, beta, deltaL));
    fit.beta = beta;
    fit.mean_curve = Curve(dataset.basis, centered.mean_coef);
    fit.mean_response = centered.mean_response;
    return fit;
}

double predict(const RidgeFLRFit& fit, const Curve& x) {
    if (!x.basis().same_as(fit.theta_hat.basis()))
        raise("basis-mismatch", "curve basis does not match the fitted model");
    const GramPair& g = x.basis().grams();
    return fit.mean_response + fit.theta_hat.coef().dot(g.G_L * (x.coef() - fit.mean_curve.coef()));
}

Eigen::VectorXd predict(const RidgeFLRFit& fit, const FunctionalDataset& data) {
    if (!data.basis.same_as(fit.theta_hat.basis()))
        raise("basis-mismatch", "dataset basis does not match the fitted model");
    const GramPair& g = data.basis.grams();
    const Eigen::MatrixXd dc = data.coef.rowwise() - fit.mean_curve.coef().transpose();
    Eigen::VectorXd out = dc * (g.G_L * fit.theta_hat.coef());
    out.array() += fit.mean_response;
    return out;
}

namespace {

double mean_squared_error(const Eigen::VectorXd& pred, const Eigen::VectorXd& truth) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
        const double r = truth[i] - pred[i];
        acc += r * r;
    }
    return acc / static_cast<double>(pred.size());
}

}  // namespace

double msep(const FLRDFit& fit, const FunctionalDataset& validation) {
    if (validation.size() == 0) raise("empty-data", "validation set is empty");
    return mean_squared_error(predict(fit, validation), validation.responses);
}

double msep(const RidgeFLRFit& fit, const FunctionalDataset& validation) {
    if (validation.size() == 0) raise("empty-data", "validation set is empty");
    return mean_squared_error(predict(fit, validation), validation.responses);
}

Curve make_unidentifiable(const BSplineBasis& basis, const GramPair& grams, const Curve& psi) {
    if (!psi.basis().same_as(basis.derivative_basis()))
        raise("basis-mismatch", "psi must live on the derivative basis");
    // D* psi solves G_W c = D_coef' G_L_deriv c_psi; return its negative.
    const Eigen::VectorXd rhs = grams.D_coef.transpose() * (grams.G_L_deriv * psi.coef());
    Eigen::LLT<Eigen::MatrixXd> llt(grams.G_W);
    if (llt.info() != Eigen::Success) raise("singular-gram", "G_W is not positive definite");
    return Curve(basis, -llt.solve(rhs));
}

}  // namespace flrd
