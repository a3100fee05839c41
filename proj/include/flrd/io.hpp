#pragma once

#include "flrd/curves.hpp"
#include "flrd/estimator.hpp"
#include "flrd/selection.hpp"

#include <map>
#include <string>

namespace flrd::io {

/// 17-significant-digit decimal rendering; round-trips IEEE doubles exactly.
std::string format_double(double v);

/// Curve CSV layout: first row = abscissae, each following row = one
/// observation's values at those abscissae.
struct CurveTable {
    Eigen::VectorXd abscissae;
    Eigen::MatrixXd values;  // n x m
};

CurveTable read_curves_csv(const std::string& path);
void write_curves_csv(const std::string& path, const CurveTable& table);

/// Single column of reals, one per line.
Eigen::VectorXd read_responses_csv(const std::string& path);
void write_responses_csv(const std::string& path, const Eigen::VectorXd& values);

/// Flat text model file (basis spec, penalties, coefficients, means).
void save_model(const std::string& path, const FLRDFit& fit);
FLRDFit load_model(const std::string& path);

/// Flat key=value configuration; '#' starts a comment.
std::map<std::string, std::string> read_config(const std::string& path);

/// CSV surface: header alpha,beta,cvmsep, one row per grid cell.
void write_cv_surface(const std::string& path, const CVResult& result);

/// Plot-ready data: phi_hat and psi_hat sampled on a uniform grid.
void write_fit_grid(const std::string& path, const FLRDFit& fit, int points = 512);

/// Comma-separated list of reals.
Eigen::VectorXd parse_number_list(const std::string& text);

double parse_double(const std::string& text, const std::string& what);
long long parse_integer(const std::string& text, const std::string& what);

}  // namespace flrd::io
