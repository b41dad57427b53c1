#include "icestring/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "icestring/eigen.hpp"
#include "icestring/errors.hpp"

namespace icestr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// strictly increasing tuples 0 < k_1 < ... < k_len < K
std::vector<std::vector<int>> increasing_tuples(int len, int K) {
    std::vector<std::vector<int>> out;
    if (len > K - 1) return out;
    std::vector<int> cur(len);
    std::iota(cur.begin(), cur.end(), 1);
    while (true) {
        out.push_back(cur);
        int i = len - 1;
        while (i >= 0 && cur[i] == K - 1 - (len - 1 - i)) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < len; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

double real_energy(cplx E) {
    if (std::abs(E.imag()) > 1e-12 * std::max(1.0, std::abs(E.real())))
        throw InvalidOperatorError("energy has an imaginary residue above 1e-12");
    return E.real();
}

}  // namespace

std::vector<double> one_step_spectrum(int N) {
    if (N < 1) throw DimensionError("one-step wave needs N >= 1");
    std::vector<double> out;
    for (int k = 1; k <= N + 1; ++k) out.push_back(2.0 * unit_root(k, 2 * (N + 2)).real());
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<FixedEndsMode> fixed_ends_spectrum(int N, int M) {
    if (N < 0 || M < 1) throw DimensionError("fixed-ends spectrum needs N >= 0 and M >= 1");
    const int K = N + M + 1;
    std::vector<FixedEndsMode> out;
    for (auto& ks : increasing_tuples(M, K)) {
        cplx E = 0.0;
        for (int k : ks) E += 2.0 * unit_root(k, 2 * K).real();
        out.push_back({{ks, K}, real_energy(E)});
    }
    return out;
}

cplx fixed_ends_wavefunction(const WaveNumberTuple& t, std::span<const int> lambda) {
    const int M = static_cast<int>(t.ks.size());
    if (static_cast<int>(lambda.size()) != M) throw DimensionError("wave numbers and state differ in M");
    const int K = t.modulus;
    Eigen::MatrixXcd A(M, M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) {
            const std::int64_t p = static_cast<std::int64_t>(t.ks[i]) * (lambda[j] + j + 1);
            A(i, j) = unit_root(p, 2 * K) - unit_root(-p, 2 * K);
        }
    }
    return determinant(A);
}

cplx fixed_ends_wavefunction(const WaveNumberTuple& t, const FixedEndsState& s) {
    if (t.modulus != s.N + s.M() + 1 || static_cast<int>(t.ks.size()) != s.M())
        throw DimensionError("wave numbers and state differ in (N, M)");
    return fixed_ends_wavefunction(t, std::span<const int>(s.lambda));
}

double fixed_ends_quantization_residual(const WaveNumberTuple& t) {
    double r = 0.0;
    for (int k : t.ks) {
        const cplx x = std::polar(1.0, std::numbers::pi * k / t.modulus);
        r = std::max(r, std::abs(std::pow(x, 2 * t.modulus) - 1.0));
    }
    return r;
}

double torus11_phi(int m, int n, int a, long sum_k) {
    return static_cast<double>(sum_k) / (static_cast<double>(n) * (n + m)) - static_cast<double>(a) / (n * m) -
           static_cast<double>(m + 1) / (2.0 * n);
}

std::vector<Torus11Solution> torus11_solutions(int m, int n, int a) {
    if (m < 1 || n < 1) throw DimensionError("torus needs m >= 1 and n >= 1");
    if (a < 0 || a >= m) throw DimensionError("sector a must lie in [0, m)");
    std::vector<Torus11Solution> out;
    for (auto& ks : increasing_tuples(m, m + n)) {
        Torus11Solution s;
        const long sum = std::accumulate(ks.begin(), ks.end(), 0L);
        s.a = a;
        s.phi = torus11_phi(m, n, a, sum);
        s.rho = std::polar(1.0, kTwoPi * s.phi);
        s.b = static_cast<int>(floor_mod(sum, n));
        cplx E = 0.0;
        for (int k : ks) {
            const cplx x = s.rho * unit_root(k, m + n);
            E += x + 1.0 / x;
        }
        s.energy = real_energy(E);
        s.ks = {std::move(ks), m + n};
        out.push_back(std::move(s));
    }
    return out;
}

double bethe_residual(const Torus11Solution& s, int m, int n) {
    cplx prod = 1.0;
    std::vector<cplx> x;
    for (int k : s.ks.ks) {
        x.push_back(s.rho * unit_root(k, m + n));
        prod *= x.back();
    }
    const double sign = (m + 1) % 2 == 0 ? 1.0 : -1.0;
    const cplx rhs = sign * unit_root(-s.a, m) * prod;
    double r = 0.0;
    for (const cplx& xi : x) r = std::max(r, std::abs(std::pow(xi, n + m) - rhs));
    return r;
}

cplx torus11_wavefunction(const Torus11Solution& s, std::span<const int> lambda) {
    const int m = static_cast<int>(s.ks.ks.size());
    if (static_cast<int>(lambda.size()) != m) throw DimensionError("state length differs from wave-number count");
    const int L = s.ks.modulus;
    Eigen::MatrixXcd A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = unit_root(static_cast<std::int64_t>(s.ks.ks[i]) * (lambda[j] + j), L);
    const long sum = std::accumulate(lambda.begin(), lambda.end(), 0L);
    return std::polar(1.0, kTwoPi * s.phi * static_cast<double>(sum)) * determinant(A);
}

int torus11_momentum_label(const Torus11Solution& s, int m, int n) {
    const long sum = std::accumulate(s.ks.ks.begin(), s.ks.ks.end(), 0L);
    return static_cast<int>(floor_mod(s.a + static_cast<long>(m) * (m + 1) / 2 - sum, n));
}

}  // namespace icestr
