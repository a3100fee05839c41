#include "flrd/errors.hpp"
#include "flrd/estimator.hpp"
#include "flrd/io.hpp"
#include "flrd/selection.hpp"
#include "flrd/simulate.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using flrd::io::format_double;

// Option resolution order: explicit flag beats config file beats default.
class Resolved {
public:
    Resolved(const CLI::App& cmd, std::map<std::string, std::string> cfg)
        : cmd_(cmd), cfg_(std::move(cfg)) {}

    std::optional<std::string> get(const std::string& key) const {
        const CLI::Option* opt = cmd_.get_option_no_throw("--" + key);
        if (opt != nullptr && opt->count() > 0) return opt->as<std::string>();
        const auto it = cfg_.find(key);
        if (it != cfg_.end()) return it->second;
        return std::nullopt;
    }

    std::string require(const std::string& key) const {
        auto v = get(key);
        if (!v) flrd::raise("config", "missing required option '" + key + "'");
        return *v;
    }

    std::string get_or(const std::string& key, const std::string& fallback) const {
        return get(key).value_or(fallback);
    }

    double number(const std::string& key) const {
        return flrd::io::parse_double(require(key), key);
    }

    double number_or(const std::string& key, double fallback) const {
        auto v = get(key);
        return v ? flrd::io::parse_double(*v, key) : fallback;
    }

    long long integer(const std::string& key) const {
        return flrd::io::parse_integer(require(key), key);
    }

    long long integer_or(const std::string& key, long long fallback) const {
        auto v = get(key);
        return v ? flrd::io::parse_integer(*v, key) : fallback;
    }

private:
    const CLI::App& cmd_;
    std::map<std::string, std::string> cfg_;
};

std::map<std::string, std::string> load_config(const CLI::App& cmd) {
    const CLI::Option* opt = cmd.get_option_no_throw("--config");
    if (opt != nullptr && opt->count() > 0)
        return flrd::io::read_config(opt->as<std::string>());
    return {};
}

void add_common_flags(CLI::App* cmd) {
    cmd->add_option("--config", "flat key=value configuration file");
    cmd->allow_extras(false);
}

void add_str(CLI::App* cmd, const std::string& name, const std::string& help) {
    cmd->add_option("--" + name, help);
}

struct LoadedDataset {
    flrd::BSplineBasis basis;
    flrd::FunctionalDataset dataset;
};

flrd::BSplineBasis basis_from_options(const Resolved& r, const flrd::io::CurveTable& table) {
    const long long k = r.integer("k");
    const long long degree = r.integer_or("degree", 3);
    const double a = r.number_or("domain_a", table.abscissae.minCoeff());
    const double b = r.number_or("domain_b", table.abscissae.maxCoeff());
    return flrd::build_basis({a, b}, static_cast<Eigen::Index>(k), static_cast<int>(degree));
}

LoadedDataset load_dataset(const Resolved& r, const std::string& curves_key,
                           const std::string& responses_key) {
    const flrd::io::CurveTable table = flrd::io::read_curves_csv(r.require(curves_key));
    const Eigen::VectorXd responses = flrd::io::read_responses_csv(r.require(responses_key));
    if (table.values.rows() != responses.size()) {
        std::ostringstream os;
        os << table.values.rows() << " curves but " << responses.size() << " responses";
        flrd::raise("invalid-dimension", os.str());
    }
    LoadedDataset out;
    out.basis = basis_from_options(r, table);
    Eigen::MatrixXd coef(table.values.rows(), out.basis.size());
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        flrd::SampledCurve raw{table.abscissae, table.values.row(i)};
        coef.row(i) = flrd::smooth(raw, out.basis).coef();
    }
    out.dataset = flrd::dataset_from_coefficients(out.basis, std::move(coef), responses);
    return out;
}

flrd::FunctionalDataset smooth_with_model_basis(const flrd::FLRDFit& fit, const Resolved& r,
                                                const std::string& curves_key,
                                                const Eigen::VectorXd& responses) {
    const flrd::BSplineBasis& basis = fit.phi_hat.basis();
    if (auto k = r.get("k"); k && flrd::io::parse_integer(*k, "k") != basis.size())
        flrd::raise("basis-mismatch", "--k disagrees with the model's basis dimension");
    if (auto d = r.get("degree"); d && flrd::io::parse_integer(*d, "degree") != basis.degree())
        flrd::raise("basis-mismatch", "--degree disagrees with the model's basis degree");
    const flrd::io::CurveTable table = flrd::io::read_curves_csv(r.require(curves_key));
    if (table.abscissae.minCoeff() < basis.domain_a() ||
        table.abscissae.maxCoeff() > basis.domain_b())
        flrd::raise("basis-mismatch", "curve abscissae fall outside the model's domain");
    Eigen::MatrixXd coef(table.values.rows(), basis.size());
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        flrd::SampledCurve raw{table.abscissae, table.values.row(i)};
        coef.row(i) = flrd::smooth(raw, basis).coef();
    }
    return flrd::dataset_from_coefficients(basis, std::move(coef), responses);
}

int cmd_fit(const CLI::App& cmd) {
    Resolved r(cmd, load_config(cmd));
    LoadedDataset in = load_dataset(r, "curves", "responses");
    const double alpha = r.number("alpha");
    const double beta = r.number("beta");
    const flrd::GramPair& grams = in.basis.grams();
    const flrd::FLRDFit fit = flrd::fit_flrd(in.dataset, grams, alpha, beta);
    if (fit.degenerate_design)
        std::cerr << "warning: degenerate design (all curves identical after centering)\n";
    const std::string model_path = r.get_or("model", "model.flrd");
    flrd::io::save_model(model_path, fit);
    if (auto plot = r.get("plot_out")) flrd::io::write_fit_grid(*plot, fit);
    const double rms = std::sqrt(flrd::msep(fit, in.dataset));
    std::cout << "n=" << in.dataset.size() << " k=" << in.basis.size()
              << " degree=" << in.basis.degree() << " alpha=" << format_double(alpha)
              << " beta=" << format_double(beta) << " in_sample_rms=" << format_double(rms)
              << " model=" << model_path << '\n';
    return 0;
}

int cmd_cv(const CLI::App& cmd) {
    Resolved r(cmd, load_config(cmd));
    LoadedDataset in = load_dataset(r, "curves", "responses");
    Eigen::VectorXd alpha_grid = flrd::default_penalty_grid();
    Eigen::VectorXd beta_grid = flrd::default_penalty_grid();
    if (auto g = r.get("alpha_grid")) alpha_grid = flrd::io::parse_number_list(*g);
    if (auto g = r.get("beta_grid")) beta_grid = flrd::io::parse_number_list(*g);
    if (auto a = r.get("alpha")) alpha_grid = flrd::io::parse_number_list(*a);
    if (auto b = r.get("beta")) beta_grid = flrd::io::parse_number_list(*b);
    const flrd::CVResult res =
        flrd::grid_search(in.dataset, in.basis.grams(), alpha_grid, beta_grid);
    const std::string out_path = r.get_or("out", "cv_surface.csv");
    flrd::io::write_cv_surface(out_path, res);
    std::cout << "cells=" << res.alpha_grid.size() * res.beta_grid.size()
              << " best_alpha=" << format_double(res.best_alpha)
              << " best_beta=" << format_double(res.best_beta)
              << " best_cvmsep=" << format_double(res.best_score) << " surface=" << out_path
              << '\n';
    return 0;
}

int cmd_predict(const CLI::App& cmd) {
    Resolved r(cmd, load_config(cmd));
    const flrd::FLRDFit fit = flrd::io::load_model(r.require("model"));
    const flrd::io::CurveTable table = flrd::io::read_curves_csv(r.require("curves"));
    Eigen::VectorXd dummy = Eigen::VectorXd::Zero(table.values.rows());
    const flrd::FunctionalDataset data = smooth_with_model_basis(fit, r, "curves", dummy);
    const Eigen::VectorXd pred = flrd::predict(fit, data);
    const std::string out_path = r.get_or("out", "predictions.csv");
    flrd::io::write_responses_csv(out_path, pred);
    std::cout << "n=" << pred.size() << " predictions=" << out_path << '\n';
    return 0;
}

int cmd_eval(const CLI::App& cmd) {
    Resolved r(cmd, load_config(cmd));
    double value = 0.0;
    if (r.get("model")) {
        const flrd::FLRDFit fit = flrd::io::load_model(r.require("model"));
        const Eigen::VectorXd truth =
            flrd::io::read_responses_csv(r.get("validation_responses")
                                             ? r.require("validation_responses")
                                             : r.require("responses"));
        const std::string curves_key = r.get("validation_curves") ? "validation_curves" : "curves";
        const flrd::FunctionalDataset data = smooth_with_model_basis(fit, r, curves_key, truth);
        value = flrd::msep(fit, data);
    } else {
        const Eigen::VectorXd pred = flrd::io::read_responses_csv(r.require("predictions"));
        const Eigen::VectorXd truth = flrd::io::read_responses_csv(r.require("responses"));
        if (pred.size() != truth.size())
            flrd::raise("invalid-dimension", "predictions and responses differ in length");
        value = (pred - truth).squaredNorm() / static_cast<double>(pred.size());
    }
    std::cout << "msep=" << format_double(value) << '\n';
    return 0;
}

int cmd_simulate(const CLI::App& cmd) {
    Resolved r(cmd, load_config(cmd));
    const long long n = r.integer("n");
    const long long k = r.integer_or("k", 10);
    const long long degree = r.integer_or("degree", 3);
    const double a = r.number_or("domain_a", 0.0);
    const double b = r.number_or("domain_b", 1.0);
    const flrd::BSplineBasis basis =
        flrd::build_basis({a, b}, static_cast<Eigen::Index>(k), static_cast<int>(degree));
    const flrd::GramPair& grams = basis.grams();

    Eigen::VectorXd lambda;
    if (auto lam = r.get("lambda")) {
        lambda = flrd::io::parse_number_list(*lam);
    } else {
        const long long count = r.integer_or("lambda_count", k);
        const double decay = r.number_or("lambda_decay", 2.0);
        lambda.resize(static_cast<Eigen::Index>(count));
        for (Eigen::Index p = 0; p < lambda.size(); ++p)
            lambda[p] = std::pow(static_cast<double>(p + 1), -decay);
    }

    // A4-style truth: phi along the orthonormal directions with coefficients
    // proportional to lambda, psi in the range of Gamma''.
    const double phi_scale = r.number_or("phi_scale", 1.0);
    const double psi_scale = r.number_or("psi_scale", 1.0);
    Eigen::VectorXd phi_orth = Eigen::VectorXd::Zero(basis.size());
    phi_orth.head(lambda.size()) = phi_scale * lambda;
    Eigen::VectorXd lam_full = Eigen::VectorXd::Zero(basis.size());
    lam_full.head(lambda.size()) = lambda;
    const Eigen::MatrixXd gamma_pp_true =
        grams.D_orth * lam_full.asDiagonal() * grams.D_orth.transpose();
    const Eigen::VectorXd zeta =
        Eigen::VectorXd::Constant(basis.size() - 1,
                                  1.0 / std::sqrt(static_cast<double>(basis.size() - 1)));
    const Eigen::VectorXd psi_orth = psi_scale * (gamma_pp_true * zeta);

    flrd::SyntheticSpec spec;
    spec.n = static_cast<Eigen::Index>(n);
    spec.eigenvalues = lambda;
    spec.true_phi = flrd::Curve(basis, grams.U_W * phi_orth);
    spec.true_psi = flrd::Curve(basis.derivative_basis(), grams.U_L * psi_orth);
    spec.sigma_eps = r.number_or("sigma_eps", 0.1);
    spec.seed = static_cast<std::uint64_t>(r.integer_or("seed", 0));
    const flrd::SimulatedData sim = flrd::generate(spec, grams);

    const long long samples = r.integer_or("samples", std::max<long long>(256, 2 * k));
    if (samples < k) flrd::raise("config", "samples must be at least k");
    flrd::io::CurveTable table;
    table.abscissae.resize(samples);
    table.values.resize(spec.n, samples);
    for (Eigen::Index j = 0; j < samples; ++j) {
        const double u = static_cast<double>(j) / static_cast<double>(samples - 1);
        table.abscissae[j] = a + (b - a) * u;
        for (Eigen::Index i = 0; i < spec.n; ++i)
            table.values(i, j) = basis.value01(sim.dataset.coef.row(i), u);
    }

    const std::string prefix = r.get_or("out", "sim");
    flrd::io::write_curves_csv(prefix + "_curves.csv", table);
    flrd::io::write_responses_csv(prefix + "_responses.csv", sim.dataset.responses);
    flrd::io::write_responses_csv(prefix + "_oracle.csv", sim.oracle);
    std::ofstream manifest(prefix + "_manifest.txt");
    if (!manifest) flrd::raise("io", "cannot open '" + prefix + "_manifest.txt' for writing");
    manifest << "n=" << spec.n << '\n' << "k=" << k << '\n' << "degree=" << degree << '\n';
    manifest << "domain_a=" << format_double(a) << '\n' << "domain_b=" << format_double(b) << '\n';
    manifest << "lambda=";
    for (Eigen::Index p = 0; p < lambda.size(); ++p) {
        if (p) manifest << ',';
        manifest << format_double(lambda[p]);
    }
    manifest << '\n';
    manifest << "sigma_eps=" << format_double(spec.sigma_eps) << '\n';
    manifest << "seed=" << spec.seed << '\n';
    manifest << "samples=" << samples << '\n';
    std::cout << "n=" << spec.n << " files=" << prefix << "_{curves,responses,oracle}.csv"
              << " manifest=" << prefix << "_manifest.txt" << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"functional linear regression with derivatives"};
    app.require_subcommand(1);

    CLI::App* fit = app.add_subcommand("fit", "fit a model from curves and responses");
    add_common_flags(fit);
    for (const char* key : {"curves", "responses", "k", "degree", "domain_a", "domain_b", "alpha",
                            "beta", "model", "plot_out"})
        add_str(fit, key, "");

    CLI::App* cv = app.add_subcommand("cv", "leave-one-out cross-validation over a penalty grid");
    add_common_flags(cv);
    for (const char* key : {"curves", "responses", "k", "degree", "domain_a", "domain_b",
                            "alpha_grid", "beta_grid", "alpha", "beta", "out"})
        add_str(cv, key, "");

    CLI::App* predict = app.add_subcommand("predict", "predict responses for new curves");
    add_common_flags(predict);
    for (const char* key : {"model", "curves", "out", "k", "degree"}) add_str(predict, key, "");

    CLI::App* eval = app.add_subcommand("eval", "mean squared error of predictions");
    add_common_flags(eval);
    for (const char* key : {"predictions", "responses", "model", "curves", "validation_curves",
                            "validation_responses", "k", "degree"})
        add_str(eval, key, "");

    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic dataset");
    add_common_flags(simulate);
    for (const char* key : {"n", "k", "degree", "domain_a", "domain_b", "lambda", "lambda_count",
                            "lambda_decay", "sigma_eps", "seed", "phi_scale", "psi_scale",
                            "samples", "out"})
        add_str(simulate, key, "");

    try {
        app.parse(argc, argv);
        if (fit->parsed()) return cmd_fit(*fit);
        if (cv->parsed()) return cmd_cv(*cv);
        if (predict->parsed()) return cmd_predict(*predict);
        if (eval->parsed()) return cmd_eval(*eval);
        if (simulate->parsed()) return cmd_simulate(*simulate);
        flrd::raise("config", "no command given");
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error:config: " << e.what() << '\n';
        return 2;
    } catch (const flrd::Error& e) {
        std::cerr << "error:" << e.kind() << ": " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error:internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
