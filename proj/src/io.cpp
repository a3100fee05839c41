#include "flrd/io.hpp"

#include "flrd/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace flrd::io {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_field(const std::string& text, std::size_t row, std::size_t col) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        std::ostringstream os;
        os << "cannot parse number '" << text << "' at row " << row << ", column " << col;
        raise("parse", os.str());
    }
    return value;
}

std::vector<double> parse_row(const std::string& line, std::size_t row) {
    std::vector<double> out;
    std::size_t start = 0, col = 1;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string field =
            comma == std::string::npos ? line.substr(start) : line.substr(start, comma - start);
        out.push_back(parse_field(field, row, col));
        if (comma == std::string::npos) break;
        start = comma + 1;
        ++col;
    }
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise("io", "cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) raise("io", "cannot open '" + path + "' for writing");
    return out;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in = open_in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CurveTable read_curves_csv(const std::string& path) {
    const auto lines = read_lines(path);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        rows.push_back(parse_row(lines[i], i + 1));
        if (rows.back().size() != rows.front().size()) {
            std::ostringstream os;
            os << "row " << i + 1 << " has " << rows.back().size() << " fields, expected "
               << rows.front().size();
            raise("parse", os.str());
        }
    }
    if (rows.size() < 2) raise("parse", "curves file '" + path + "' needs an abscissae row and at least one curve");
    CurveTable table;
    const Eigen::Index m = static_cast<Eigen::Index>(rows.front().size());
    table.abscissae.resize(m);
    for (Eigen::Index j = 0; j < m; ++j) table.abscissae[j] = rows.front()[static_cast<std::size_t>(j)];
    for (Eigen::Index j = 1; j < m; ++j)
        if (table.abscissae[j] <= table.abscissae[j - 1])
            raise("parse", "abscissae must be strictly increasing");
    table.values.resize(static_cast<Eigen::Index>(rows.size()) - 1, m);
    for (std::size_t i = 1; i < rows.size(); ++i)
        for (Eigen::Index j = 0; j < m; ++j)
            table.values(static_cast<Eigen::Index>(i) - 1, j) = rows[i][static_cast<std::size_t>(j)];
    return table;
}

void write_curves_csv(const std::string& path, const CurveTable& table) {
    std::ofstream out = open_out(path);
    for (Eigen::Index j = 0; j < table.abscissae.size(); ++j) {
        if (j) out << ',';
        out << format_double(table.abscissae[j]);
    }
    out << '\n';
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
            if (j) out << ',';
            out << format_double(table.values(i, j));
        }
        out << '\n';
    }
}

Eigen::VectorXd read_responses_csv(const std::string& path) {
    const auto lines = read_lines(path);
    std::vector<double> values;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto row = parse_row(lines[i], i + 1);
        if (row.size() != 1) {
            std::ostringstream os;
            os << "expected a single column at row " << i + 1 << ", got " << row.size();
            raise("parse", os.str());
        }
        values.push_back(row.front());
    }
    if (values.empty()) raise("empty-data", "responses file '" + path + "' is empty");
    Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = values[static_cast<std::size_t>(i)];
    return out;
}

void write_responses_csv(const std::string& path, const Eigen::VectorXd& values) {
    std::ofstream out = open_out(path);
    for (Eigen::Index i = 0; i < values.size(); ++i) out << format_double(values[i]) << '\n';
}

namespace {

void write_vector(std::ofstream& out, const char* name, const Eigen::VectorXd& v) {
    out << name;
    for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_double(v[i]);
    out << '\n';
}

}  // namespace

void save_model(const std::string& path, const FLRDFit& fit) {
    std::ofstream out = open_out(path);
    const BSplineBasis& basis = fit.phi_hat.basis();
    out << "flrd-model 1\n";
    out << "domain " << format_double(basis.domain_a()) << ' ' << format_double(basis.domain_b())
        << '\n';
    out << "k " << basis.size() << '\n';
    out << "degree " << basis.degree() << '\n';
    out << "alpha " << format_double(fit.alpha) << '\n';
    out << "beta " << format_double(fit.beta) << '\n';
    out << "mean_response " << format_double(fit.mean_response) << '\n';
    write_vector(out, "phi", fit.phi_hat.coef());
    write_vector(out, "psi", fit.psi_hat.coef());
    write_vector(out, "mean_curve", fit.mean_curve.coef());
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

Eigen::VectorXd model_vector(const std::vector<std::string>& toks, Eigen::Index expected,
                             const std::string& path) {
    if (static_cast<Eigen::Index>(toks.size()) - 1 != expected) {
        std::ostringstream os;
        os << "model file '" << path << "': field '" << toks[0] << "' has " << toks.size() - 1
           << " values, expected " << expected;
        raise("parse", os.str());
    }
    Eigen::VectorXd v(expected);
    for (Eigen::Index i = 0; i < expected; ++i)
        v[i] = parse_field(toks[static_cast<std::size_t>(i) + 1], 0, static_cast<std::size_t>(i));
    return v;
}

}  // namespace

FLRDFit load_model(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || split_ws(lines[0]) != std::vector<std::string>{"flrd-model", "1"})
        raise("parse", "'" + path + "' is not a flrd model file");
    std::map<std::string, std::vector<std::string>> fields;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto toks = split_ws(lines[i]);
        fields[toks[0]] = std::move(toks);
    }
    for (const char* key : {"domain", "k", "degree", "alpha", "beta", "mean_response", "phi",
                            "psi", "mean_curve"})
        if (!fields.count(key))
            raise("parse", "model file '" + path + "' is missing field '" + key + "'");

    const auto& dom = fields["domain"];
    if (dom.size() != 3) raise("parse", "model field 'domain' needs two values");
    const double a = parse_field(dom[1], 0, 0), b = parse_field(dom[2], 0, 1);
    const long long k = parse_integer(fields["k"].at(1), "k");
    const long long degree = parse_integer(fields["degree"].at(1), "degree");
    BSplineBasis basis = build_basis({a, b}, static_cast<Eigen::Index>(k), static_cast<int>(degree));

    FLRDFit fit;
    fit.alpha = parse_field(fields["alpha"].at(1), 0, 0);
    fit.beta = parse_field(fields["beta"].at(1), 0, 0);
    fit.mean_response = parse_field(fields["mean_response"].at(1), 0, 0);
    fit.phi_hat = Curve(basis, model_vector(fields["phi"], basis.size(), path));
    fit.psi_hat =
        Curve(basis.derivative_basis(), model_vector(fields["psi"], basis.size() - 1, path));
    fit.mean_curve = Curve(basis, model_vector(fields["mean_curve"], basis.size(), path));
    return fit;
}

std::map<std::string, std::string> read_config(const std::string& path) {
    std::map<std::string, std::string> out;
    const auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::string line = lines[i];
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream os;
            os << "config line " << i + 1 << " is not of the form key=value";
            raise("config", os.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            std::ostringstream os;
            os << "config line " << i + 1 << " has an empty key";
            raise("config", os.str());
        }
        out[key] = value;
    }
    return out;
}

void write_cv_surface(const std::string& path, const CVResult& result) {
    std::ofstream out = open_out(path);
    out << "alpha,beta,cvmsep\n";
    for (Eigen::Index ia = 0; ia < result.alpha_grid.size(); ++ia)
        for (Eigen::Index ib = 0; ib < result.beta_grid.size(); ++ib)
            out << format_double(result.alpha_grid[ia]) << ',' << format_double(result.beta_grid[ib])
                << ',' << format_double(result.scores(ia, ib)) << '\n';
}

void write_fit_grid(const std::string& path, const FLRDFit& fit, int points) {
    std::ofstream out = open_out(path);
    out << "t,phi_hat,psi_hat\n";
    const BSplineBasis& basis = fit.phi_hat.basis();
    const BSplineBasis& dbasis = fit.psi_hat.basis();
    const double a = basis.domain_a(), b = basis.domain_b();
    for (int i = 0; i < points; ++i) {
        const double u = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        const double t = a + (b - a) * u;
        out << format_double(t) << ',' << format_double(basis.value01(fit.phi_hat.coef(), u))
            << ',' << format_double(dbasis.value01(fit.psi_hat.coef(), u)) << '\n';
    }
}

Eigen::VectorXd parse_number_list(const std::string& text) {
    const auto row = parse_row(text, 1);
    Eigen::VectorXd out(static_cast<Eigen::Index>(row.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = row[static_cast<std::size_t>(i)];
    return out;
}

double parse_double(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        raise("config", "cannot parse " + what + " value '" + text + "'");
    return value;
}

long long parse_integer(const std::string& text, const std::string& what) {
    const std::string t = trim(text);
    long long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size())
        raise("config", "cannot parse " + what + " value '" + text + "'");
    return value;
}

}  // namespace flrd::io
