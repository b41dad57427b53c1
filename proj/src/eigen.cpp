#include "icestring/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "icestring/errors.hpp"

namespace icestr {

double hermitian_defect(const Eigen::MatrixXcd& A) {
    if (A.rows() != A.cols()) throw DimensionError("matrix is not square");
    double d = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = i; j < A.cols(); ++j) d = std::max(d, std::abs(A(i, j) - std::conj(A(j, i))));
    return d;
}

namespace {

// implicit QL on the real symmetric tridiagonal (d, e), e[i] couples i and i+1
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e, Eigen::MatrixXd* Z, double tol) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return;
    e.resize(n, 0.0);
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int mm;
        do {
            for (mm = l; mm < n - 1; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= tol * dd || std::abs(e[mm]) + dd == dd) break;
            }
            if (mm != l) {
                if (iter++ == 100) throw InvalidOperatorError("tridiagonal QL did not converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = mm - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[mm] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (Z) {
                        for (int k = 0; k < n; ++k) {
                            f = (*Z)(k, i + 1);
                            (*Z)(k, i + 1) = s * (*Z)(k, i) + c * f;
                            (*Z)(k, i) = c * (*Z)(k, i) - s * f;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[mm] = 0.0;
            }
        } while (mm != l);
    }
}

}  // namespace

EigenSystem eigh(const Eigen::MatrixXcd& A0, bool want_vectors, double rel_tol) {
    if (A0.rows() != A0.cols()) throw DimensionError("eigh needs a square matrix");
    const Eigen::Index n = A0.rows();
    EigenSystem out;
    if (n == 0) {
        out.values.resize(0);
        out.vectors.resize(0, 0);
        return out;
    }
    const double scale = std::max(1.0, A0.cwiseAbs().maxCoeff());
    if (!A0.allFinite()) throw InvalidOperatorError("matrix has non-finite entries");
    if (hermitian_defect(A0) > 1e-12 * scale) throw InvalidOperatorError("matrix is not Hermitian");

    Eigen::MatrixXcd A = A0;
    Eigen::MatrixXcd Q;
    if (want_vectors) Q = Eigen::MatrixXcd::Identity(n, n);

    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Eigen::Index L = n - k - 1;
        Eigen::VectorXcd v = A.col(k).tail(L);
        const double alpha = v.norm();
        if (alpha == 0.0) continue;
        const cplx theta = std::abs(v(0)) > 0.0 ? v(0) / std::abs(v(0)) : cplx(1.0, 0.0);
        v(0) += theta * alpha;
        const double beta = 2.0 / v.squaredNorm();
        auto B = A.bottomRightCorner(L, L);
        const Eigen::VectorXcd p = beta * (B * v);
        const cplx K = 0.5 * beta * v.dot(p);  // v^H p, real for Hermitian B
        const Eigen::VectorXcd q = p - K.real() * v;
        B.noalias() -= v * q.adjoint();
        B.noalias() -= q * v.adjoint();
        A.col(k).tail(L).setZero();
        A(k + 1, k) = -theta * alpha;
        A.row(k).tail(L) = A.col(k).tail(L).adjoint();
        if (want_vectors) {
            auto Qb = Q.rightCols(L);
            const Eigen::VectorXcd w = Qb * v;
            Qb.noalias() -= beta * w * v.adjoint();
        }
    }

    std::vector<double> d(n), e(n, 0.0);
    cplx D = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        d[i] = A(i, i).real();
        if (want_vectors && i > 0) Q.col(i) *= D;
        if (i + 1 < n) {
            const cplx c = A(i + 1, i);
            e[i] = std::abs(c);
            if (e[i] > 0.0) D *= c / e[i];
        }
    }
    Eigen::MatrixXd Z;
    if (want_vectors) Z = Eigen::MatrixXd::Identity(n, n);
    tridiagonal_ql(d, e, want_vectors ? &Z : nullptr, rel_tol);

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return d[a] < d[b]; });
    out.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) out.values(i) = d[order[i]];
    if (want_vectors) {
        const Eigen::MatrixXcd V = Q * Z.cast<cplx>();
        out.vectors.resize(n, n);
        for (Eigen::Index i = 0; i < n; ++i) out.vectors.col(i) = V.col(order[i]);
    }
    return out;
}

cplx determinant(const Eigen::MatrixXcd& A) {
    if (A.rows() != A.cols()) throw DimensionError("determinant needs a square matrix");
    if (A.rows() == 0) return 1.0;
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(A).determinant();
}

cplx normalized_determinant(const Eigen::MatrixXcd& A) {
    if (A.rows() != A.cols()) throw DimensionError("determinant needs a square matrix");
    Eigen::MatrixXcd S = A;
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
        const double r = S.row(i).cwiseAbs().maxCoeff();
        if (r == 0.0) return 0.0;
        S.row(i) /= r;
    }
    return determinant(S);
}

Eigen::MatrixXcd smallest_right_singular(const Eigen::MatrixXcd& M, int k, Eigen::VectorXd* sigma) {
    const Eigen::Index c = M.cols();
    if (k < 0 || k > c) throw DimensionError("requested more singular vectors than columns");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
    // JacobiSVD returns min(rows, cols) values; pad with zeros for wide matrices
    Eigen::VectorXd s = Eigen::VectorXd::Zero(c);
    s.head(svd.singularValues().size()) = svd.singularValues();
    if (sigma) *sigma = s.reverse();
    return svd.matrixV().rightCols(k);
}

}  // namespace icestr
