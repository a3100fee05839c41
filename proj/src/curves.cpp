#include "flrd/curves.hpp"

#include "flrd/errors.hpp"

#include <sstream>

namespace flrd {

namespace {

void require_same_basis(const Curve& u, const Curve& v) {
    if (!u.basis().same_as(v.basis()))
        raise("basis-mismatch", "curves live on different bases");
}

}  // namespace

Curve::Curve(BSplineBasis basis, Eigen::VectorXd coef)
    : basis_(std::move(basis)), coef_(std::move(coef)) {
    if (coef_.size() != basis_.size()) {
        std::ostringstream os;
        os << "coefficient length " << coef_.size() << " does not match basis dimension "
           << basis_.size();
        raise("invalid-dimension", os.str());
    }
    if (!coef_.allFinite()) raise("invalid-dimension", "curve coefficients must be finite");
}

double Curve::operator()(double t) const { return basis_.value01(coef_, basis_.rescale(t)); }

Curve FunctionalDataset::curve(Eigen::Index i) const { return Curve(basis, coef.row(i)); }

Curve FunctionalDataset::derivative(Eigen::Index i) const {
    return Curve(basis.derivative_basis(), deriv_coef.row(i));
}

Curve FunctionalDataset::mean_curve() const { return Curve(basis, mean_coef); }

Curve smooth(const SampledCurve& raw, const BSplineBasis& basis) {
    const Eigen::Index m = raw.values.size();
    const Eigen::Index k = basis.size();
    if (raw.abscissae.size() != m)
        raise("invalid-dimension", "abscissae and values have different lengths");
    if (m < k) {
        std::ostringstream os;
        os << "smoothing needs at least k=" << k << " sample points, got " << m;
        raise("underdetermined", os.str());
    }
    Eigen::MatrixXd design(m, k);
    for (Eigen::Index j = 0; j < m; ++j)
        design.row(j) = basis.eval01(basis.rescale(raw.abscissae[j]));
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < k) {
        std::ostringstream os;
        os << "design matrix rank " << qr.rank() << " < basis dimension " << k;
        raise("rank-deficient", os.str());
    }
    return Curve(basis, qr.solve(raw.values));
}

Curve differentiate(const Curve& curve) {
    if (curve.basis().degree() < 1)
        raise("unsupported-degree", "cannot differentiate a degree-0 spline");
    const GramPair& g = curve.basis().grams();
    return Curve(curve.basis().derivative_basis(), g.D_coef * curve.coef());
}

double inner_L(const Curve& u, const Curve& v) {
    require_same_basis(u, v);
    return u.coef().dot(u.basis().grams().G_L * v.coef());
}

double inner_W(const Curve& u, const Curve& v) {
    require_same_basis(u, v);
    if (u.basis().degree() < 1)
        raise("unsupported-degree", "the W inner product needs a basis of degree >= 1");
    return u.coef().dot(u.basis().grams().G_W * v.coef());
}

FunctionalDataset make_dataset(const BSplineBasis& basis,
                               const std::vector<SampledCurve>& raws,
                               const Eigen::VectorXd& responses) {
    if (raws.empty()) raise("empty-data", "dataset needs at least one curve");
    if (static_cast<Eigen::Index>(raws.size()) != responses.size()) {
        std::ostringstream os;
        os << raws.size() << " curves but " << responses.size() << " responses";
        raise("invalid-dimension", os.str());
    }
    Eigen::MatrixXd coef(static_cast<Eigen::Index>(raws.size()), basis.size());
    for (Eigen::Index i = 0; i < coef.rows(); ++i)
        coef.row(i) = smooth(raws[static_cast<std::size_t>(i)], basis).coef();
    return dataset_from_coefficients(basis, std::move(coef), responses);
}

FunctionalDataset dataset_from_coefficients(const BSplineBasis& basis,
                                            Eigen::MatrixXd coef,
                                            Eigen::VectorXd responses) {
    if (responses.size() == 0) raise("empty-data", "dataset needs at least one observation");
    if (coef.rows() != responses.size())
        raise("invalid-dimension", "coefficient rows and responses differ in length");
    if (coef.cols() != basis.size())
        raise("invalid-dimension", "coefficient columns do not match basis dimension");
    FunctionalDataset ds;
    ds.basis = basis;
    ds.coef = std::move(coef);
    ds.deriv_coef = ds.coef * basis.grams().D_coef.transpose();
    ds.responses = std::move(responses);
    ds.mean_coef = Eigen::VectorXd::Zero(basis.size());
    return ds;
}

FunctionalDataset center(const FunctionalDataset& dataset) {
    if (dataset.size() == 0) raise("empty-data", "cannot center an empty dataset");
    FunctionalDataset out;
    out.basis = dataset.basis;
    const Eigen::VectorXd mean_coef =
        dataset.coef.colwise().mean().transpose() + dataset.mean_coef;
    const double mean_y = dataset.responses.mean() + dataset.mean_response;
    out.coef = dataset.coef.rowwise() - dataset.coef.colwise().mean();
    out.deriv_coef = out.coef * dataset.basis.grams().D_coef.transpose();
    out.responses = dataset.responses.array() - dataset.responses.mean();
    out.centered = true;
    out.mean_coef = mean_coef;
    out.mean_response = mean_y;
    return out;
}

}  // namespace flrd
