#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace icestr {

using cplx = std::complex<double>;

// Exact root of unity exp(2*pi*i*num/den), kept reduced with 0 <= num < den.
struct Phase {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Phase() = default;
    Phase(std::int64_t num, std::int64_t den);

    static Phase one() { return Phase(); }
    Phase operator*(const Phase& o) const;
    Phase& operator*=(const Phase& o) { return *this = *this * o; }
    Phase conj() const;
    Phase pow(std::int64_t k) const;
    bool is_one() const { return num == 0; }
    bool operator==(const Phase& o) const = default;

    // Evaluated so that value(conj()) is the bitwise conjugate of value().
    cplx value() const;
};

// Element of Z[zeta] written as sum_k c_k zeta^k with zeta = exp(2*pi*i/L).
// Equality and is_zero compare residues modulo the L-th cyclotomic
// polynomial, so 1 + zeta^{L/2} == 0 holds exactly.
class CycloSum {
public:
    explicit CycloSum(std::int64_t L = 1);

    std::int64_t modulus() const { return static_cast<std::int64_t>(c_.size()); }
    const std::vector<std::int64_t>& coefficients() const { return c_; }

    void add(const Phase& p, std::int64_t coeff = 1);
    void add_power(std::int64_t k, std::int64_t coeff = 1);

    CycloSum operator+(const CycloSum& o) const;
    CycloSum operator-(const CycloSum& o) const;
    CycloSum operator*(const CycloSum& o) const;
    CycloSum operator-() const;
    CycloSum& operator+=(const CycloSum& o);
    CycloSum conj() const;
    bool is_zero() const;
    bool operator==(const CycloSum& o) const;
    // coefficients reduced modulo Phi_L, length phi(L)
    std::vector<std::int64_t> reduced() const;

    // conj-symmetric evaluation: value(x.conj()) == std::conj(value(x)) bitwise
    cplx value() const;

private:
    std::vector<std::int64_t> c_;
};

std::int64_t floor_mod(std::int64_t a, std::int64_t m);
std::int64_t lcm64(std::int64_t a, std::int64_t b);

// exp(2*pi*i*k/L) with the same conj-symmetric evaluation as Phase::value
cplx unit_root(std::int64_t k, std::int64_t L);

}  // namespace icestr
