// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each check pins its tolerance in code.
#include "flrd/estimator.hpp"
#include "flrd/io.hpp"
#include "flrd/operators.hpp"
#include "flrd/simulate.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace flrd;

namespace {

int failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double elapsed) {
    std::printf("%s criterion %d: %s (%s; %.2fs)\n", pass ? "PASS" : "FAIL", criterion,
                name.c_str(), detail.c_str(), elapsed);
    if (!pass) ++failures;
}

std::string fmt(const char* format, double a, double b = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), format, a, b);
    return buf;
}

FunctionalDataset random_dataset(const BSplineBasis& basis, Eigen::Index n, oracle::Rng& rng) {
    return dataset_from_coefficients(basis, rng.matrix(n, basis.size()), rng.vector(n));
}

struct RandomDatasetSweep {
    std::vector<FunctionalDataset> centered;
    std::vector<const GramPair*> grams;
};

RandomDatasetSweep make_sweep() {
    static BSplineBasis basis5 = build_basis({0.0, 1.0}, 5, 3);
    static BSplineBasis basis12 = build_basis({0.0, 1.0}, 12, 3);
    RandomDatasetSweep sweep;
    oracle::Rng rng(64001);
    int made = 0;
    while (made < 20) {
        for (Eigen::Index n : {3, 10, 50}) {
            for (const BSplineBasis* basis : {&basis5, &basis12}) {
                if (made == 20) break;
                sweep.centered.push_back(center(random_dataset(*basis, n, rng)));
                sweep.grams.push_back(&basis->grams());
                ++made;
            }
        }
    }
    return sweep;
}

// criterion 1: Gamma'* = D Gamma and Gamma'' = D Gamma' in orthonormal
// coordinates, 1e-10 relative
void criterion_1(const RandomDatasetSweep& sweep) {
    Timer timer;
    double worst = 0.0;
    for (std::size_t i = 0; i < sweep.centered.size(); ++i) {
        const GramPair& g = *sweep.grams[i];
        const CovarianceSet cov = empirical_covariances(sweep.centered[i], g);
        const double scale = std::max(1e-300, cov.Gamma.cwiseAbs().maxCoeff());
        worst = std::max(worst, (cov.GammaPrimeStar - g.D_orth * cov.Gamma).cwiseAbs().maxCoeff() /
                                    scale);
        worst = std::max(worst,
                         (cov.GammaPrimePrime - g.D_orth * cov.GammaPrime).cwiseAbs().maxCoeff() /
                             scale);
    }
    const double elapsed = timer.seconds();
    report(1, "operator identities on 20 random datasets", worst <= 1e-10 && elapsed < 5.0,
           fmt("max rel err %.2e", worst), elapsed);
}

// criterion 2: ||(T+gI)^{-1} v|| <= ||v||/g on 200 random draws
void criterion_2() {
    Timer timer;
    oracle::Rng rng(64002);
    double worst = 0.0;
    for (int rep = 0; rep < 200; ++rep) {
        const Eigen::Index dim = 4 + rep % 9;
        const Eigen::MatrixXd t = rng.psd(dim);
        const double gamma = std::pow(10.0, -3.0 + 4.0 * rng.unit());
        const Eigen::VectorXd v = rng.vector(dim);
        const Eigen::VectorXd w = reg_inverse_apply(t, gamma, v);
        worst = std::max(worst, w.norm() * gamma / v.norm());
    }
    const double elapsed = timer.seconds();
    report(2, "resolvent bound over 200 random PSD solves", worst <= 1.0 + 1e-10 && elapsed < 5.0,
           fmt("max ||w||*gamma/||v|| = %.12f", worst), elapsed);
}

// criterion 3: Schur complements stay PSD for alpha in {1e-3, 0.1, 10}
void criterion_3(const RandomDatasetSweep& sweep) {
    Timer timer;
    double worst = 1e300;
    for (std::size_t i = 0; i < sweep.centered.size(); ++i) {
        const CovarianceSet cov = empirical_covariances(sweep.centered[i], *sweep.grams[i]);
        for (double alpha : {1e-3, 0.1, 10.0}) {
            const SchurSystem sys = schur_systems(cov, alpha);
            for (const Eigen::MatrixXd* s : {&sys.S_phi, &sys.S_psi}) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*s);
                const double floor = -1e-8 * std::max(s->trace(), 1e-300);
                worst = std::min(worst, es.eigenvalues()(0) - floor);
            }
        }
    }
    report(3, "Schur positivity across datasets and alphas", worst >= 0.0,
           fmt("min margin above -1e-8*trace = %.2e", worst), timer.seconds());
}

// criterion 4: (-D*psi, psi) contributes nothing to the predictor
void criterion_4() {
    Timer timer;
    BSplineBasis basis = build_basis({0.0, 1.0}, 10, 3);
    const GramPair& g = basis.grams();
    oracle::Rng rng(64004);
    double worst = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const Curve psi(basis.derivative_basis(), rng.vector(9));
        const Curve phi = make_unidentifiable(basis, g, psi);
        for (int j = 0; j < 100; ++j) {
            const Curve x(basis, rng.vector(10));
            const double contribution = inner_W(phi, x) + inner_L(psi, differentiate(x));
            worst = std::max(worst, std::abs(contribution));
        }
    }
    report(4, "identifiability null space kills the predictor", worst <= 1e-9,
           fmt("max |<phi,x>_W + <psi,x'>_L| = %.2e", worst), timer.seconds());
}

// criterion 5: noiseless recovery, out-of-sample RMS <= 1e-3
void criterion_5() {
    Timer timer;
    BSplineBasis basis = build_basis({0.0, 1.0}, 8, 3);
    const GramPair& g = basis.grams();
    oracle::Rng rng(64005);
    SyntheticSpec spec;
    spec.n = 200;
    spec.eigenvalues.resize(8);
    for (Eigen::Index p = 0; p < 8; ++p) spec.eigenvalues[p] = std::pow(p + 1.0, -2.0);
    spec.true_phi = Curve(basis, g.U_W * rng.vector(8).normalized());
    spec.true_psi = Curve(basis.derivative_basis(), g.U_L * rng.vector(7).normalized());
    spec.sigma_eps = 0.0;
    spec.seed = 505001;
    const SimulatedData train = generate(spec, g);
    const FLRDFit fit = fit_flrd(train.dataset, g, 1e-8, 1e-8);

    SyntheticSpec fresh = spec;
    fresh.seed = 505002;
    const SimulatedData test = generate(fresh, g);
    const Eigen::VectorXd pred = predict(fit, test.dataset);
    const double rms = std::sqrt((pred - test.dataset.responses).squaredNorm() / 200.0);
    const double elapsed = timer.seconds();
    report(5, "noiseless recovery, 200 fresh curves", rms <= 1e-3 && elapsed < 10.0,
           fmt("out-of-sample RMS = %.2e", rms), elapsed);
}

// criterion 6: MSPE against the oracle decays with the theoretical rate
void criterion_6() {
    Timer timer;
    BSplineBasis basis = build_basis({0.0, 1.0}, 10, 3);
    const GramPair& g = basis.grams();
    const Eigen::Index k = basis.size();

    Eigen::VectorXd lambda(k);
    for (Eigen::Index p = 0; p < k; ++p) lambda[p] = std::pow(p + 1.0, -2.0);
    // A4-compatible truth: phi along the eigendirections with coefficients
    // proportional to lambda, psi in the range of Gamma''
    const double scale = 0.04;
    const Eigen::VectorXd phi_orth = scale * lambda;
    const Eigen::MatrixXd gamma_pp_true = g.D_orth * lambda.asDiagonal() * g.D_orth.transpose();
    const Eigen::VectorXd zeta =
        Eigen::VectorXd::Constant(k - 1, 1.0 / std::sqrt(static_cast<double>(k - 1)));
    const Eigen::VectorXd psi_orth = scale * (gamma_pp_true * zeta);

    SyntheticSpec spec;
    spec.eigenvalues = lambda;
    spec.true_phi = Curve(basis, g.U_W * phi_orth);
    spec.true_psi = Curve(basis.derivative_basis(), g.U_L * psi_orth);
    spec.sigma_eps = 0.1;

    const std::vector<Eigen::Index> sizes = {250, 1000, 4000};
    std::vector<double> mspe;
    for (std::size_t ni = 0; ni < sizes.size(); ++ni) {
        const Eigen::Index n = sizes[ni];
        const double beta = 0.5 * std::pow(static_cast<double>(n), -0.25);
        double acc = 0.0;
        for (int s = 0; s < 20; ++s) {
            SyntheticSpec train_spec = spec;
            train_spec.n = n;
            train_spec.seed = 606000 + static_cast<std::uint64_t>(s);
            const SimulatedData train = generate(train_spec, g);
            const FLRDFit fit = fit_flrd(train.dataset, g, 0.1, beta);

            SyntheticSpec test_spec = spec;
            test_spec.n = 1000;
            test_spec.seed = 707000 + static_cast<std::uint64_t>(100 * s + ni);
            const SimulatedData test = generate(test_spec, g);
            const Eigen::VectorXd pred = predict(fit, test.dataset);
            acc += (pred - test.oracle).squaredNorm() / 1000.0;
        }
        mspe.push_back(acc / 20.0);
    }

    // least-squares slope of log MSPE against log n
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double x = std::log(static_cast<double>(sizes[i]));
        const double y = std::log(mspe[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double m = static_cast<double>(sizes.size());
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double elapsed = timer.seconds();
    report(6, "prediction error rate (beta = 0.5 n^{-1/4}, alpha = 0.1)",
           slope >= -0.8 && slope <= -0.25 && elapsed < 180.0,
           fmt("log-log slope = %.3f (window [-0.8, -0.25])", slope), elapsed);
}

// criterion 7: E(yhat-y)^2 = E(yhat-y*)^2 + sigma^2 within 10%
void criterion_7() {
    Timer timer;
    BSplineBasis basis = build_basis({0.0, 1.0}, 10, 3);
    const GramPair& g = basis.grams();
    const Eigen::Index k = basis.size();
    Eigen::VectorXd lambda(k);
    for (Eigen::Index p = 0; p < k; ++p) lambda[p] = std::pow(p + 1.0, -2.0);

    SyntheticSpec spec;
    spec.n = 2000;
    spec.eigenvalues = lambda;
    spec.true_phi = Curve(basis, g.U_W * lambda);
    spec.true_psi = Curve(basis.derivative_basis(), Eigen::VectorXd::Zero(k - 1));
    spec.sigma_eps = 0.5;
    spec.seed = 808001;
    const SimulatedData train = generate(spec, g);
    const double beta = 0.5 * std::pow(2000.0, -0.25);
    const FLRDFit fit = fit_flrd(train.dataset, g, 0.1, beta);

    SyntheticSpec test_spec = spec;
    test_spec.n = 4000;
    test_spec.seed = 808002;
    const SimulatedData test = generate(test_spec, g);
    const Eigen::VectorXd pred = predict(fit, test.dataset);
    const double lhs = (pred - test.dataset.responses).squaredNorm() / 4000.0;
    const double rhs = (pred - test.oracle).squaredNorm() / 4000.0 + 0.5 * 0.5;
    const double rel = std::abs(lhs - rhs) / lhs;
    report(7, "variance decomposition at sigma = 0.5", rel <= 0.10,
           fmt("E(yhat-y)^2 = %.4f vs E(yhat-y*)^2 + sigma^2 = %.4f", lhs, rhs) +
               fmt(", rel diff %.2f%%", 100.0 * rel),
           timer.seconds());
}

// criterion 8: gram, covariance, Schur and fit against brute-force oracles
void criterion_8() {
    Timer timer;
    BSplineBasis basis = build_basis({0.0, 1.0}, 5, 3);
    const GramPair& g = basis.grams();
    const Eigen::VectorXd& knots = basis.knots();
    double worst = 0.0;

    // gram entries against composite quadrature of the naive recursion
    for (Eigen::Index i = 0; i < 5; ++i) {
        for (Eigen::Index j = i; j < 5; ++j) {
            const double ref_l = oracle::integrate_piecewise(
                knots,
                [&](double t) {
                    return oracle::bspline_value(knots, 3, i, t) *
                           oracle::bspline_value(knots, 3, j, t);
                },
                1024);
            worst = std::max(worst, std::abs(g.G_L(i, j) - ref_l));
            const double ref_d = oracle::integrate_piecewise(
                knots,
                [&](double t) {
                    return oracle::bspline_derivative(knots, 3, i, t) *
                           oracle::bspline_derivative(knots, 3, j, t);
                },
                1024);
            worst = std::max(worst, std::abs(g.G_D(i, j) - ref_d));
        }
    }

    // covariances against explicit outer-product loops
    oracle::Rng rng(64008);
    const FunctionalDataset ds = random_dataset(basis, 5, rng);
    const FunctionalDataset c = center(ds);
    const CovarianceSet cov = empirical_covariances(c, g);
    {
        Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(5, 5);
        Eigen::MatrixXd gamma_p = Eigen::MatrixXd::Zero(5, 4);
        Eigen::MatrixXd gamma_pp = Eigen::MatrixXd::Zero(4, 4);
        Eigen::VectorXd delta = Eigen::VectorXd::Zero(5);
        Eigen::VectorXd delta_p = Eigen::VectorXd::Zero(4);
        for (Eigen::Index i = 0; i < 5; ++i) {
            const Eigen::VectorXd w = g.R_W * c.coef.row(i).transpose();
            const Eigen::VectorXd z = g.R_L * c.deriv_coef.row(i).transpose();
            gamma += w * w.transpose() / 5.0;
            gamma_p += w * z.transpose() / 5.0;
            gamma_pp += z * z.transpose() / 5.0;
            delta += c.responses[i] * w / 5.0;
            delta_p += c.responses[i] * z / 5.0;
        }
        worst = std::max(worst, (cov.Gamma - gamma).cwiseAbs().maxCoeff());
        worst = std::max(worst, (cov.GammaPrime - gamma_p).cwiseAbs().maxCoeff());
        worst = std::max(worst, (cov.GammaPrimePrime - gamma_pp).cwiseAbs().maxCoeff());
        worst = std::max(worst, (cov.delta - delta).cwiseAbs().maxCoeff());
        worst = std::max(worst, (cov.deltaPrime - delta_p).cwiseAbs().maxCoeff());
    }

    // Schur systems and the fit against dense inverses
    const double alpha = 0.1, beta = 0.1;
    const SchurSystem sys = schur_systems(cov, alpha);
    const Eigen::MatrixXd inv_pp =
        (cov.GammaPrimePrime + alpha * Eigen::MatrixXd::Identity(4, 4)).inverse();
    const Eigen::MatrixXd inv_w = (cov.Gamma + alpha * Eigen::MatrixXd::Identity(5, 5)).inverse();
    worst = std::max(worst, (sys.S_phi - (cov.Gamma - cov.GammaPrime * inv_pp * cov.GammaPrimeStar))
                                .cwiseAbs()
                                .maxCoeff());
    worst = std::max(worst, (sys.u_phi - (cov.delta - cov.GammaPrime * inv_pp * cov.deltaPrime))
                                .cwiseAbs()
                                .maxCoeff());
    worst = std::max(
        worst, (sys.S_psi - (cov.GammaPrimePrime - cov.GammaPrimeStar * inv_w * cov.GammaPrime))
                   .cwiseAbs()
                   .maxCoeff());
    worst = std::max(worst, (sys.u_psi - (cov.deltaPrime - cov.GammaPrimeStar * inv_w * cov.delta))
                                .cwiseAbs()
                                .maxCoeff());

    const FLRDFit fit = fit_flrd(ds, g, alpha, beta);
    const Eigen::VectorXd phi_ref =
        g.U_W * (sys.S_phi + beta * Eigen::MatrixXd::Identity(5, 5)).inverse() * sys.u_phi;
    const Eigen::VectorXd psi_ref =
        g.U_L * (sys.S_psi + beta * Eigen::MatrixXd::Identity(4, 4)).inverse() * sys.u_psi;
    worst = std::max(worst, (fit.phi_hat.coef() - phi_ref).cwiseAbs().maxCoeff());
    worst = std::max(worst, (fit.psi_hat.coef() - psi_ref).cwiseAbs().maxCoeff());

    report(8, "oracle equivalence on the n=5, k=5 toy", worst <= 1e-10,
           fmt("max abs deviation = %.2e", worst), timer.seconds());
}

}  // namespace

int main() {
    const RandomDatasetSweep sweep = make_sweep();
    criterion_1(sweep);
    criterion_2();
    criterion_3(sweep);
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    std::printf(
        "SKIP criterion 9: cookie calibration needs the external Osborne/Brown dataset; "
        "see scripts/cookie_reproduction.sh\n");
    if (failures > 0) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all automated criteria passed\n");
    return 0;
}
