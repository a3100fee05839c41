#include "flrd/errors.hpp"
#include "flrd/estimator.hpp"
#include "flrd/io.hpp"
#include "flrd/operators.hpp"
#include "flrd/selection.hpp"
#include "flrd/simulate.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace flrd;

PYBIND11_MODULE(_core, m) {
    m.doc() = "functional linear regression with derivatives";

    static py::exception<Error> error(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            error((e.kind() + ": " + e.what()).c_str());
        }
    });

    py::class_<BSplineBasis>(m, "BSplineBasis")
        .def_property_readonly("k", &BSplineBasis::size)
        .def_property_readonly("degree", &BSplineBasis::degree)
        .def_property_readonly("domain",
                               [](const BSplineBasis& b) {
                                   return py::make_tuple(b.domain_a(), b.domain_b());
                               })
        .def_property_readonly("knots", &BSplineBasis::knots)
        .def("eval", &BSplineBasis::eval, py::arg("t"))
        .def("derivative_basis", &BSplineBasis::derivative_basis,
             py::return_value_policy::copy)
        .def("grams", &BSplineBasis::grams, py::return_value_policy::copy)
        .def("same_as", &BSplineBasis::same_as);

    py::class_<GramPair>(m, "GramPair")
        .def_readonly("G_L", &GramPair::G_L)
        .def_readonly("G_D", &GramPair::G_D)
        .def_readonly("G_W", &GramPair::G_W)
        .def_readonly("D_coef", &GramPair::D_coef)
        .def_readonly("G_L_deriv", &GramPair::G_L_deriv)
        .def_readonly("U_W", &GramPair::U_W)
        .def_readonly("U_L", &GramPair::U_L)
        .def_readonly("D_orth", &GramPair::D_orth);

    py::class_<SampledCurve>(m, "SampledCurve")
        .def(py::init([](Eigen::VectorXd abscissae, Eigen::VectorXd values) {
                 return SampledCurve{std::move(abscissae), std::move(values)};
             }),
             py::arg("abscissae"), py::arg("values"))
        .def_readonly("abscissae", &SampledCurve::abscissae)
        .def_readonly("values", &SampledCurve::values);

    py::class_<Curve>(m, "Curve")
        .def(py::init<BSplineBasis, Eigen::VectorXd>(), py::arg("basis"), py::arg("coef"))
        .def_property_readonly("basis", &Curve::basis)
        .def_property_readonly("coef", &Curve::coef)
        .def("__call__", &Curve::operator(), py::arg("t"));

    py::class_<FunctionalDataset>(m, "FunctionalDataset")
        .def_readonly("basis", &FunctionalDataset::basis)
        .def_readonly("coef", &FunctionalDataset::coef)
        .def_readonly("deriv_coef", &FunctionalDataset::deriv_coef)
        .def_readonly("responses", &FunctionalDataset::responses)
        .def_readonly("centered", &FunctionalDataset::centered)
        .def_readonly("mean_coef", &FunctionalDataset::mean_coef)
        .def_readonly("mean_response", &FunctionalDataset::mean_response)
        .def("__len__", &FunctionalDataset::size)
        .def("curve", &FunctionalDataset::curve, py::arg("i"))
        .def("derivative", &FunctionalDataset::derivative, py::arg("i"))
        .def("mean_curve", &FunctionalDataset::mean_curve);

    py::class_<CovarianceSet>(m, "CovarianceSet")
        .def_readonly("n", &CovarianceSet::n)
        .def_readonly("Gamma", &CovarianceSet::Gamma)
        .def_readonly("GammaPrime", &CovarianceSet::GammaPrime)
        .def_readonly("GammaPrimeStar", &CovarianceSet::GammaPrimeStar)
        .def_readonly("GammaPrimePrime", &CovarianceSet::GammaPrimePrime)
        .def_readonly("delta", &CovarianceSet::delta)
        .def_readonly("deltaPrime", &CovarianceSet::deltaPrime);

    py::class_<SchurSystem>(m, "SchurSystem")
        .def_readonly("alpha", &SchurSystem::alpha)
        .def_readonly("S_phi", &SchurSystem::S_phi)
        .def_readonly("u_phi", &SchurSystem::u_phi)
        .def_readonly("S_psi", &SchurSystem::S_psi)
        .def_readonly("u_psi", &SchurSystem::u_psi);

    py::class_<FLRDFit>(m, "FLRDFit")
        .def_readonly("phi_hat", &FLRDFit::phi_hat)
        .def_readonly("psi_hat", &FLRDFit::psi_hat)
        .def_readonly("alpha", &FLRDFit::alpha)
        .def_readonly("beta", &FLRDFit::beta)
        .def_readonly("mean_curve", &FLRDFit::mean_curve)
        .def_readonly("mean_response", &FLRDFit::mean_response)
        .def_readonly("degenerate_design", &FLRDFit::degenerate_design);

    py::class_<RidgeFLRFit>(m, "RidgeFLRFit")
        .def_readonly("theta_hat", &RidgeFLRFit::theta_hat)
        .def_readonly("beta", &RidgeFLRFit::beta)
        .def_readonly("mean_curve", &RidgeFLRFit::mean_curve)
        .def_readonly("mean_response", &RidgeFLRFit::mean_response);

    py::class_<CVResult>(m, "CVResult")
        .def_readonly("alpha_grid", &CVResult::alpha_grid)
        .def_readonly("beta_grid", &CVResult::beta_grid)
        .def_readonly("scores", &CVResult::scores)
        .def_readonly("best_alpha", &CVResult::best_alpha)
        .def_readonly("best_beta", &CVResult::best_beta)
        .def_readonly("best_score", &CVResult::best_score);

    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init<>())
        .def_readwrite("n", &SyntheticSpec::n)
        .def_readwrite("eigenvalues", &SyntheticSpec::eigenvalues)
        .def_readwrite("true_phi", &SyntheticSpec::true_phi)
        .def_readwrite("true_psi", &SyntheticSpec::true_psi)
        .def_readwrite("sigma_eps", &SyntheticSpec::sigma_eps)
        .def_readwrite("seed", &SyntheticSpec::seed);

    py::class_<SimulatedData>(m, "SimulatedData")
        .def_readonly("dataset", &SimulatedData::dataset)
        .def_readonly("oracle", &SimulatedData::oracle);

    m.def(
        "build_basis",
        [](double a, double b, Eigen::Index k, int degree) {
            return build_basis({a, b}, k, degree);
        },
        py::arg("a"), py::arg("b"), py::arg("k"), py::arg("degree") = 3);
    m.def("eval_basis", &eval_basis, py::arg("basis"), py::arg("t"));
    m.def(
        "derivative_map",
        [](const BSplineBasis& basis) {
            auto dm = derivative_map(basis);
            return py::make_tuple(dm.degenerate ? py::object(py::none()) : py::cast(*dm.basis),
                                  dm.coef);
        },
        py::arg("basis"));
    m.def("gram_matrices", &gram_matrices, py::arg("basis"));
    m.def("orthonormal_map", &orthonormal_map, py::arg("G"));

    m.def("smooth", &smooth, py::arg("raw"), py::arg("basis"));
    m.def("differentiate", &differentiate, py::arg("curve"));
    m.def("inner_L", &inner_L, py::arg("u"), py::arg("v"));
    m.def("inner_W", &inner_W, py::arg("u"), py::arg("v"));
    m.def("make_dataset", &make_dataset, py::arg("basis"), py::arg("curves"),
          py::arg("responses"));
    m.def("dataset_from_coefficients", &dataset_from_coefficients, py::arg("basis"),
          py::arg("coef"), py::arg("responses"));
    m.def("center", &center, py::arg("dataset"));

    m.def("empirical_covariances", &empirical_covariances, py::arg("dataset"), py::arg("grams"));
    m.def(
        "reg_inverse_apply",
        [](const Eigen::MatrixXd& T, double gamma, const Eigen::MatrixXd& V) {
            return reg_inverse_apply(T, gamma, V);
        },
        py::arg("T"), py::arg("gamma"), py::arg("v"));
    m.def("schur_systems", &schur_systems, py::arg("cov"), py::arg("alpha"));
    m.def("operator_sqrt", &operator_sqrt, py::arg("T"));
    m.def("sup_norm", &sup_norm, py::arg("T"));

    m.def("fit_flrd", &fit_flrd, py::arg("dataset"), py::arg("grams"), py::arg("alpha"),
          py::arg("beta"));
    m.def("predict", py::overload_cast<const FLRDFit&, const Curve&>(&predict), py::arg("fit"),
          py::arg("x"));
    m.def("predict", py::overload_cast<const FLRDFit&, const FunctionalDataset&>(&predict),
          py::arg("fit"), py::arg("data"));
    m.def("fit_flr_ridge", &fit_flr_ridge, py::arg("dataset"), py::arg("grams"), py::arg("beta"));
    m.def("predict_ridge", py::overload_cast<const RidgeFLRFit&, const Curve&>(&predict),
          py::arg("fit"), py::arg("x"));
    m.def("predict_ridge",
          py::overload_cast<const RidgeFLRFit&, const FunctionalDataset&>(&predict),
          py::arg("fit"), py::arg("data"));
    m.def("msep", py::overload_cast<const FLRDFit&, const FunctionalDataset&>(&msep),
          py::arg("fit"), py::arg("validation"));
    m.def("msep_ridge", py::overload_cast<const RidgeFLRFit&, const FunctionalDataset&>(&msep),
          py::arg("fit"), py::arg("validation"));
    m.def("make_unidentifiable", &make_unidentifiable, py::arg("basis"), py::arg("grams"),
          py::arg("psi"));

    m.def("cv_score", &cv_score, py::arg("dataset"), py::arg("grams"), py::arg("alpha"),
          py::arg("beta"));
    m.def("grid_search", &grid_search, py::arg("dataset"), py::arg("grams"),
          py::arg("alpha_grid"), py::arg("beta_grid"));
    m.def("default_penalty_grid", &default_penalty_grid);

    m.def("generate", &generate, py::arg("spec"), py::arg("grams"));

    m.def("save_model", &io::save_model, py::arg("path"), py::arg("fit"));
    m.def("load_model", &io::load_model, py::arg("path"));

    m.attr("__version__") = "0.1.0";
}
