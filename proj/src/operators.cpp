#include "flrd/operators.hpp"

#include "flrd/errors.hpp"

#include <cmath>
#include <sstream>

namespace flrd {

namespace {

void check_symmetric_psd_input(const Eigen::MatrixXd& T) {
    if (T.rows() != T.cols()) raise("invalid-dimension", "operator must be square");
    const double scale = T.cwiseAbs().maxCoeff();
    if (scale > 0.0 && (T - T.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        raise("not-psd", "operator is not symmetric");
}

// Shared solve path: PD factorization of (T + gamma I) with one refinement
// step, eigendecomposition fallback when the factorization breaks down.
Eigen::MatrixXd solve_shifted(const Eigen::MatrixXd& T, double gamma, const Eigen::MatrixXd& V) {
    if (!(gamma > 0.0)) raise("invalid-penalty", "regularization parameter must be > 0");
    check_symmetric_psd_input(T);
    const Eigen::Index k = T.rows();
    if (V.rows() != k) raise("invalid-dimension", "right-hand side has wrong length");
    if (k == 0) return Eigen::MatrixXd(0, V.cols());
    Eigen::MatrixXd A = T + gamma * Eigen::MatrixXd::Identity(k, k);
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
        Eigen::MatrixXd W = llt.solve(V);
        W += llt.solve(V - A * W);
        return W;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double tol = 1e-8 * std::abs(T.trace());
    if (es.eigenvalues()(0) < -tol) {
        std::ostringstream os;
        os << "operator has eigenvalue " << es.eigenvalues()(0) << " below -1e-8*trace";
        raise("not-psd", os.str());
    }
    Eigen::VectorXd inv = (es.eigenvalues().array().max(0.0) + gamma).inverse();
    return es.eigenvectors() * inv.asDiagonal() * (es.eigenvectors().transpose() * V);
}

}  // namespace

CovarianceSet empirical_covariances(const FunctionalDataset& dataset, const GramPair& grams) {
    if (!dataset.centered)
        raise("must-center", "empirical covariances require a centered dataset");
    const Eigen::Index n = dataset.size();
    if (n < 1) raise("empty-data", "dataset is empty");

    // rows are orthonormal coordinates of X_i and X'_i
    const Eigen::MatrixXd W = dataset.coef * grams.R_W.transpose();
    const Eigen::MatrixXd Z = dataset.deriv_coef * grams.R_L.transpose();
    const double inv_n = 1.0 / static_cast<double>(n);

    CovarianceSet cov;
    cov.n = n;
    cov.Gamma = (W.transpose() * W) * inv_n;
    cov.Gamma = 0.5 * (cov.Gamma + cov.Gamma.transpose()).eval();
    cov.GammaPrime = (W.transpose() * Z) * inv_n;
    cov.GammaPrimeStar = cov.GammaPrime.transpose();
    cov.GammaPrimePrime = (Z.transpose() * Z) * inv_n;
    cov.GammaPrimePrime = 0.5 * (cov.GammaPrimePrime + cov.GammaPrimePrime.transpose()).eval();
    cov.delta = (W.transpose() * dataset.responses) * inv_n;
    cov.deltaPrime = (Z.transpose() * dataset.responses) * inv_n;
    return cov;
}

Eigen::VectorXd reg_inverse_apply(const Eigen::MatrixXd& T, double gamma,
                                  const Eigen::VectorXd& v) {
    return solve_shifted(T, gamma, v);
}

Eigen::MatrixXd reg_inverse_apply(const Eigen::MatrixXd& T, double gamma,
                                  const Eigen::MatrixXd& V) {
    return solve_shifted(T, gamma, V);
}

SchurSystem schur_systems(const CovarianceSet& cov, double alpha) {
    if (!(alpha > 0.0)) raise("invalid-penalty", "alpha must be > 0");
    const Eigen::Index kW = cov.Gamma.rows();
    const Eigen::Index kL = cov.GammaPrimePrime.rows();
    SchurSystem sys;
    sys.alpha = alpha;

    // one factorization per resolvent, shared across its two right-hand sides
    Eigen::MatrixXd rhs_l(kL, kW + 1);
    rhs_l << cov.GammaPrimeStar, cov.deltaPrime;
    const Eigen::MatrixXd sol_l = reg_inverse_apply(cov.GammaPrimePrime, alpha, rhs_l);
    sys.S_phi = cov.Gamma - cov.GammaPrime * sol_l.leftCols(kW);
    sys.S_phi = 0.5 * (sys.S_phi + sys.S_phi.transpose()).eval();
    sys.u_phi = cov.delta - cov.GammaPrime * sol_l.col(kW);

    Eigen::MatrixXd rhs_w(kW, kL + 1);
    rhs_w << cov.GammaPrime, cov.delta;
    const Eigen::MatrixXd sol_w = reg_inverse_apply(cov.Gamma, alpha, rhs_w);
    sys.S_psi = cov.GammaPrimePrime - cov.GammaPrimeStar * sol_w.leftCols(kL);
    sys.S_psi = 0.5 * (sys.S_psi + sys.S_psi.transpose()).eval();
    sys.u_psi = cov.deltaPrime - cov.GammaPrimeStar * sol_w.col(kL);
    return sys;
}

Eigen::MatrixXd operator_sqrt(const Eigen::MatrixXd& T) {
    check_symmetric_psd_input(T);
    if (T.rows() == 0) return T;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double tol = 1e-8 * std::abs(T.trace());
    if (es.eigenvalues()(0) < -tol) {
        std::ostringstream os;
        os << "operator has eigenvalue " << es.eigenvalues()(0) << " below -1e-8*trace";
        raise("not-psd", os.str());
    }
    Eigen::VectorXd root = es.eigenvalues().array().max(0.0).sqrt();
    Eigen::MatrixXd S = es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (S + S.transpose()).eval();
}

double sup_norm(const Eigen::MatrixXd& T) {
    if (T.rows() == 0 || T.cols() == 0) return 0.0;
    return T.jacobiSvd().singularValues()(0);
}

}  // namespace flrd
