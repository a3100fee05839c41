#include "flrd/simulate.hpp"

#include "flrd/errors.hpp"

#include <cmath>
#include <sstream>

namespace flrd {

double SimRng::bounded_score() {
    return (2.0 * unit() - 1.0) * std::sqrt(3.0);
}

double SimRng::gaussian() {
    const double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

SimulatedData generate(const SyntheticSpec& spec, const GramPair& grams) {
    if (spec.n < 1) raise("empty-data", "sample size must be >= 1");
    const Eigen::Index kW = grams.U_W.rows();
    const Eigen::Index P = spec.eigenvalues.size();
    if (P < 1) raise("dimension", "eigenvalue sequence is empty");
    if (P > kW) {
        std::ostringstream os;
        os << "eigenvalue sequence length " << P << " exceeds basis dimension " << kW;
        raise("dimension", os.str());
    }
    for (Eigen::Index p = 0; p < P; ++p) {
        if (!(spec.eigenvalues[p] > 0.0))
            raise("dimension", "eigenvalues must be strictly positive");
        if (p > 0 && spec.eigenvalues[p] > spec.eigenvalues[p - 1])
            raise("dimension", "eigenvalues must be non-increasing");
    }
    if (spec.sigma_eps < 0.0) raise("invalid-penalty", "sigma_eps must be >= 0");
    if (spec.true_phi.coef().size() != kW)
        raise("basis-mismatch", "true phi does not match the basis");
    if (spec.true_psi.coef().size() != kW - 1)
        raise("basis-mismatch", "true psi does not match the derivative basis");

    const Eigen::VectorXd sqrt_lambda = spec.eigenvalues.array().sqrt();
    const Eigen::VectorXd phi_orth = grams.R_W * spec.true_phi.coef();
    const Eigen::VectorXd psi_orth = grams.R_L * spec.true_psi.coef();

    SimRng rng(spec.seed);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(spec.n, kW);
    Eigen::VectorXd noise(spec.n);
    // draw order is part of the contract: per observation, P scores then one
    // gaussian (two uniforms), regardless of sigma_eps
    for (Eigen::Index i = 0; i < spec.n; ++i) {
        for (Eigen::Index p = 0; p < P; ++p) W(i, p) = sqrt_lambda[p] * rng.bounded_score();
        noise[i] = rng.gaussian();
    }

    const Eigen::VectorXd ystar = W * phi_orth + (W * grams.D_orth.transpose()) * psi_orth;
    const Eigen::VectorXd y = ystar + spec.sigma_eps * noise;

    SimulatedData out;
    out.dataset = dataset_from_coefficients(spec.true_phi.basis(),
                                            W * grams.U_W.transpose(), y);
    out.oracle = ystar;
    return out;
}

}  // namespace flrd
