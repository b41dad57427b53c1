#pragma once

#include <span>
#include <vector>

#include "icestring/lattice.hpp"
#include "icestring/phase.hpp"

namespace icestr {

struct WaveNumberTuple {
    std::vector<int> ks;  // strictly increasing
    int modulus = 1;      // fixed ends: N+M+1, torus: m+n
};

// {2 cos(pi k/(N+2)) : k = 1..N+1}, ascending
std::vector<double> one_step_spectrum(int N);

struct FixedEndsMode {
    WaveNumberTuple ks;
    double energy;
};

// one mode per 0 < k_1 < ... < k_M < N+M+1, lexicographic in ks
std::vector<FixedEndsMode> fixed_ends_spectrum(int N, int M);

// Det([x_i^{lambda_j + j}]) with [x] = x - 1/x, x_i = exp(i pi k_i/(N+M+1)).
// lambda may be formal (outside [0, N]); N is taken from the modulus.
cplx fixed_ends_wavefunction(const WaveNumberTuple& ks, std::span<const int> lambda);
cplx fixed_ends_wavefunction(const WaveNumberTuple& ks, const FixedEndsState& s);
// max_i |x_i^{2(N+M+1)} - 1|
double fixed_ends_quantization_residual(const WaveNumberTuple& ks);

struct Torus11Solution {
    WaveNumberTuple ks;  // modulus m+n
    int a = 0;
    double phi = 0.0;
    cplx rho;
    int b = 0;           // sum k_i mod n
    double energy = 0.0;
};

double torus11_phi(int m, int n, int a, long sum_k);
std::vector<Torus11Solution> torus11_solutions(int m, int n, int a);

// max_i |x_i^{n+m} - (-1)^{m+1} eta^{-a} prod_j x_j|, x_i = rho omega^{k_i}
double bethe_residual(const Torus11Solution& s, int m, int n);

// rho^{sum lambda} Det(omega^{k_i (lambda_j + j - 1)}); lambda may be formal
cplx torus11_wavefunction(const Torus11Solution& s, std::span<const int> lambda);

// translation label of the block that contains the solution:
// P acts as exp(2 pi i b_P/n) with b_P = a + m(m+1)/2 - sum k  (mod n)
int torus11_momentum_label(const Torus11Solution& s, int m, int n);

}  // namespace icestr
