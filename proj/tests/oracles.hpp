#pragma once

// Slow, independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

// Laplace expansion along the first row
inline cplx cofactor_det(const Eigen::MatrixXcd& A) {
    const auto n = A.rows();
    if (n == 0) return 1.0;
    if (n == 1) return A(0, 0);
    cplx d = 0.0;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::MatrixXcd minor(n - 1, n - 1);
        for (Eigen::Index i = 1; i < n; ++i)
            for (Eigen::Index j = 0, jj = 0; j < n; ++j)
                if (j != c) minor(i - 1, jj++) = A(i, j);
        d += ((c % 2) ? -1.0 : 1.0) * A(0, c) * cofactor_det(minor);
    }
    return d;
}

// Faddeev-LeVerrier: coefficients c_0..c_n of det(x I - A), c_n = 1
inline std::vector<cplx> char_poly(const Eigen::MatrixXcd& A) {
    const auto n = A.rows();
    std::vector<cplx> c(n + 1);
    c[n] = 1.0;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        M = A * M + c[n - k + 1] * I;
        c[n - k] = -(A * M).trace() / static_cast<double>(k);
    }
    return c;
}

// Durand-Kerner on a monic polynomial, roots sorted by real part
inline std::vector<double> real_roots(const std::vector<cplx>& c) {
    const auto n = static_cast<int>(c.size()) - 1;
    std::vector<cplx> z(n);
    for (int i = 0; i < n; ++i) z[i] = std::pow(cplx(0.4, 0.9), i);
    auto p = [&](cplx x) {
        cplx v = 0.0;
        for (int i = n; i >= 0; --i) v = v * x + c[i];
        return v;
    };
    for (int it = 0; it < 5000; ++it) {
        double move = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx den = 1.0;
            for (int j = 0; j < n; ++j)
                if (j != i) den *= z[i] - z[j];
            const cplx dz = p(z[i]) / den;
            z[i] -= dz;
            move = std::max(move, std::abs(dz));
        }
        if (move < 1e-15) break;
    }
    std::vector<double> r;
    for (auto x : z) r.push_back(x.real());
    std::sort(r.begin(), r.end());
    return r;
}

// number of weakly increasing tuples of length len in [lo, hi], by recursion
inline std::uint64_t count_chains(int len, int lo, int hi) {
    if (len == 0) return 1;
    std::uint64_t s = 0;
    for (int x = lo; x <= hi; ++x) s += count_chains(len - 1, x, hi);
    return s;
}

inline std::uint64_t pascal(int n, int k) {
    std::vector<std::vector<std::uint64_t>> t(n + 1, std::vector<std::uint64_t>(n + 1, 0));
    for (int i = 0; i <= n; ++i) {
        t[i][0] = 1;
        for (int j = 1; j <= i; ++j) t[i][j] = t[i - 1][j - 1] + t[i - 1][j];
    }
    return (k < 0 || k > n) ? 0 : t[n][k];
}

// run of r+1 equal consecutive entries in a non-cyclic tuple
inline bool has_run(const std::vector<int>& l, int r) {
    int run = 1;
    for (std::size_t i = 1; i < l.size(); ++i) {
        run = l[i] == l[i - 1] ? run + 1 : 1;
        if (run > r) return true;
    }
    return false;
}

inline Eigen::MatrixXcd random_hermitian(int n, unsigned seed) {
    std::srand(seed);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Random(n, n);
    return 0.5 * (A + A.adjoint());
}

inline double max_gap(std::vector<double> a, std::vector<double> b) {
    if (a.size() != b.size()) return INFINITY;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
    return g;
}

}  // namespace oracle
