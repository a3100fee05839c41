#include "flrd/spline_basis.hpp"

#include "flrd/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>
#include <vector>

namespace flrd {

namespace {

// Knot span index for u in [0,1]: largest i with knots[i] <= u < knots[i+1],
// clamped to the last non-empty span at the right end.
Eigen::Index find_span(const Eigen::VectorXd& knots, int degree, Eigen::Index k, double u) {
    const Eigen::Index last = k - 1;  // index of the last basis function
    if (u >= knots[last + 1]) return last;
    if (u <= knots[degree]) return degree;
    Eigen::Index low = degree, high = last + 1;
    Eigen::Index mid = (low + high) / 2;
    while (u < knots[mid] || u >= knots[mid + 1]) {
        if (u < knots[mid])
            high = mid;
        else
            low = mid;
        mid = (low + high) / 2;
    }
    return mid;
}

// Cox-de Boor triangle: values (and optionally derivatives) of the degree+1
// basis functions that are nonzero on the span. ders is (nderiv+1) x (degree+1).
void ders_basis_funs(const Eigen::VectorXd& knots, int degree, Eigen::Index span, double u,
                     int nderiv, Eigen::MatrixXd& ders) {
    const int p = degree;
    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            const double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }
    ders.setZero(nderiv + 1, p + 1);
    for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);
    if (nderiv == 0) return;

    Eigen::MatrixXd a(2, p + 1);
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a(0, 0) = 1.0;
        for (int d = 1; d <= nderiv; ++d) {
            double dv = 0.0;
            const int rk = r - d, pk = p - d;
            if (r >= d) {
                a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
                dv = a(s2, 0) * ndu(rk, pk);
            }
            const int j1 = (rk >= -1) ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? d - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
                dv += a(s2, j) * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a(s2, d) = -a(s1, d - 1) / ndu(pk + 1, r);
                dv += a(s2, d) * ndu(r, pk);
            }
            ders(d, r) = dv;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int d = 1; d <= nderiv; ++d) {
        for (int j = 0; j <= p; ++j) ders(d, j) *= factor;
        factor *= (p - d);
    }
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int order, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
    nodes.resize(order);
    weights.resize(order);
    const int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[order - 1 - i] = weights[i];
    }
}

}  // namespace

struct BSplineBasis::Impl {
    double a = 0.0, b = 1.0;
    int degree = 0;
    Eigen::Index k = 0;
    Eigen::VectorXd knots;  // on [0,1]

    mutable std::once_flag deriv_once;
    mutable std::shared_ptr<BSplineBasis> deriv;

    mutable std::once_flag gram_once;
    mutable std::shared_ptr<GramPair> gram;
};

double BSplineBasis::domain_a() const { return impl_->a; }
double BSplineBasis::domain_b() const { return impl_->b; }
int BSplineBasis::degree() const { return impl_->degree; }
Eigen::Index BSplineBasis::size() const { return impl_->k; }
const Eigen::VectorXd& BSplineBasis::knots() const { return impl_->knots; }

double BSplineBasis::rescale(double t) const {
    const double a = impl_->a, b = impl_->b;
    if (t < a || t > b) {
        std::ostringstream os;
        os << "abscissa " << t << " outside basis domain [" << a << ", " << b << "]";
        raise("out-of-domain", os.str());
    }
    return (t - a) / (b - a);
}

Eigen::VectorXd BSplineBasis::eval(double t) const { return eval01(rescale(t)); }

Eigen::VectorXd BSplineBasis::eval01(double u) const {
    const auto& im = *impl_;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(im.k);
    const Eigen::Index span = find_span(im.knots, im.degree, im.k, u);
    Eigen::MatrixXd ders;
    ders_basis_funs(im.knots, im.degree, span, u, 0, ders);
    for (int j = 0; j <= im.degree; ++j) out[span - im.degree + j] = ders(0, j);
    return out;
}

double BSplineBasis::value01(const Eigen::VectorXd& coef, double u) const {
    const auto& im = *impl_;
    const Eigen::Index span = find_span(im.knots, im.degree, im.k, u);
    Eigen::MatrixXd ders;
    ders_basis_funs(im.knots, im.degree, span, u, 0, ders);
    double v = 0.0;
    for (int j = 0; j <= im.degree; ++j) v += coef[span - im.degree + j] * ders(0, j);
    return v;
}

const BSplineBasis& BSplineBasis::derivative_basis() const {
    const auto& im = *impl_;
    if (im.degree < 1) raise("unsupported-degree", "degree-0 basis has no derivative basis");
    std::call_once(im.deriv_once, [&im] {
        // same interior knots, clamped one level less
        im.deriv = std::make_shared<BSplineBasis>(
            build_basis({im.a, im.b}, im.k - 1, im.degree - 1));
    });
    return *im.deriv;
}

const GramPair& BSplineBasis::grams() const {
    const auto& im = *impl_;
    std::call_once(im.gram_once, [this, &im] { im.gram = std::make_shared<GramPair>(gram_matrices(*this)); });
    return *im.gram;
}

bool BSplineBasis::same_as(const BSplineBasis& other) const {
    if (impl_ == other.impl_) return true;
    if (!impl_ || !other.impl_) return false;
    return impl_->a == other.impl_->a && impl_->b == other.impl_->b &&
           impl_->degree == other.impl_->degree && impl_->k == other.impl_->k;
}

BSplineBasis build_basis(Interval domain, Eigen::Index k, int degree) {
    if (!(domain.a < domain.b)) {
        std::ostringstream os;
        os << "domain [" << domain.a << ", " << domain.b << "] is degenerate";
        raise("invalid-domain", os.str());
    }
    if (degree < 0) raise("invalid-dimension", "degree must be >= 0");
    if (k < degree + 1) {
        std::ostringstream os;
        os << "basis dimension k=" << k << " must be at least degree+1=" << degree + 1;
        raise("invalid-dimension", os.str());
    }
    auto impl = std::make_shared<BSplineBasis::Impl>();
    impl->a = domain.a;
    impl->b = domain.b;
    impl->degree = degree;
    impl->k = k;
    const Eigen::Index n_interior = k - degree - 1;
    impl->knots.resize(k + degree + 1);
    for (int i = 0; i <= degree; ++i) impl->knots[i] = 0.0;
    for (Eigen::Index i = 0; i < n_interior; ++i)
        impl->knots[degree + 1 + i] = static_cast<double>(i + 1) / static_cast<double>(n_interior + 1);
    for (int i = 0; i <= degree; ++i) impl->knots[k + i] = 1.0;
    BSplineBasis basis;
    basis.impl_ = std::move(impl);
    return basis;
}

Eigen::VectorXd eval_basis(const BSplineBasis& basis, double t) { return basis.eval(t); }

DerivativeMap derivative_map(const BSplineBasis& basis) {
    DerivativeMap out;
    if (!basis) return out;
    const int d = basis.degree();
    const Eigen::Index k = basis.size();
    if (d == 0) {
        out.degenerate = true;
        out.coef.resize(0, k);
        return out;
    }
    const auto& t = basis.knots();
    out.coef = Eigen::MatrixXd::Zero(k - 1, k);
    for (Eigen::Index i = 0; i < k - 1; ++i) {
        const double dt = t[i + d + 1] - t[i + 1];
        out.coef(i, i) = -d / dt;
        out.coef(i, i + 1) = d / dt;
    }
    out.basis = basis.derivative_basis();
    return out;
}

GramPair gram_matrices(const BSplineBasis& basis) {
    const int d = basis.degree();
    const Eigen::Index k = basis.size();
    const auto& knots = basis.knots();

    Eigen::VectorXd gx, gw;
    gauss_legendre(d + 2, gx, gw);

    GramPair g;
    g.G_L = Eigen::MatrixXd::Zero(k, k);
    g.G_D = Eigen::MatrixXd::Zero(k, k);
    const int nderiv = d >= 1 ? 1 : 0;
    Eigen::MatrixXd ders;
    for (Eigen::Index s = d; s < k; ++s) {
        const double ta = knots[s], tb = knots[s + 1];
        if (tb <= ta) continue;
        for (Eigen::Index q = 0; q < gx.size(); ++q) {
            const double u = 0.5 * (ta + tb) + 0.5 * (tb - ta) * gx[q];
            const double w = 0.5 * (tb - ta) * gw[q];
            ders_basis_funs(knots, d, s, u, nderiv, ders);
            for (int i = 0; i <= d; ++i) {
                for (int j = 0; j <= d; ++j) {
                    g.G_L(s - d + i, s - d + j) += w * ders(0, i) * ders(0, j);
                    if (nderiv == 1) g.G_D(s - d + i, s - d + j) += w * ders(1, i) * ders(1, j);
                }
            }
        }
    }
    g.G_L = 0.5 * (g.G_L + g.G_L.transpose()).eval();
    g.G_D = 0.5 * (g.G_D + g.G_D.transpose()).eval();
    g.G_W = g.G_L + g.G_D;

    auto dm = derivative_map(basis);
    g.D_coef = dm.coef;
    if (!dm.degenerate) {
        const BSplineBasis& db = *dm.basis;
        const int dd = db.degree();
        const Eigen::Index kd = db.size();
        const auto& dknots = db.knots();
        Eigen::VectorXd dgx, dgw;
        gauss_legendre(dd + 2, dgx, dgw);
        g.G_L_deriv = Eigen::MatrixXd::Zero(kd, kd);
        for (Eigen::Index s = dd; s < kd; ++s) {
            const double ta = dknots[s], tb = dknots[s + 1];
            if (tb <= ta) continue;
            for (Eigen::Index q = 0; q < dgx.size(); ++q) {
                const double u = 0.5 * (ta + tb) + 0.5 * (tb - ta) * dgx[q];
                const double w = 0.5 * (tb - ta) * dgw[q];
                ders_basis_funs(dknots, dd, s, u, 0, ders);
                for (int i = 0; i <= dd; ++i)
                    for (int j = 0; j <= dd; ++j)
                        g.G_L_deriv(s - dd + i, s - dd + j) += w * ders(0, i) * ders(0, j);
            }
        }
        g.G_L_deriv = 0.5 * (g.G_L_deriv + g.G_L_deriv.transpose()).eval();
        g.U_L = orthonormal_map(g.G_L_deriv);
        g.R_L = g.U_L.triangularView<Eigen::Upper>().solve(
            Eigen::MatrixXd::Identity(kd, kd));
    } else {
        g.G_L_deriv.resize(0, 0);
        g.U_L.resize(0, 0);
        g.R_L.resize(0, 0);
    }
    g.U_W = orthonormal_map(g.G_W);
    g.R_W = g.U_W.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    g.D_orth = g.R_L * g.D_coef * g.U_W;
    return g;
}

Eigen::MatrixXd orthonormal_map(const Eigen::MatrixXd& G) {
    if (G.rows() != G.cols()) raise("invalid-dimension", "gram matrix must be square");
    const Eigen::Index k = G.rows();
    if (k == 0) return Eigen::MatrixXd(0, 0);
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) {
        // locate the offending leading minor with a plain Cholesky sweep
        Eigen::MatrixXd L = Eigen::MatrixXd::Zero(k, k);
        for (Eigen::Index j = 0; j < k; ++j) {
            double diag = G(j, j) - L.row(j).head(j).squaredNorm();
            if (diag <= 0.0) {
                std::ostringstream os;
                os << "gram matrix is not positive definite: leading minor of order "
                   << (j + 1) << " failed";
                raise("singular-gram", os.str());
            }
            L(j, j) = std::sqrt(diag);
            for (Eigen::Index i = j + 1; i < k; ++i)
                L(i, j) = (G(i, j) - L.row(j).head(j).dot(L.row(i).head(j))) / L(j, j);
        }
        raise("singular-gram", "cholesky factorization failed");
    }
    Eigen::MatrixXd R = llt.matrixU();
    return R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
}

}  // namespace flrd
