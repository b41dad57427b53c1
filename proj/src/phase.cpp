#include "icestring/phase.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace icestr {

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) { return a / std::gcd(a, b) * b; }

cplx unit_root(std::int64_t k, std::int64_t L) {
    k = floor_mod(k, L);
    if (k == 0) return {1.0, 0.0};
    if (2 * k > L) return std::conj(unit_root(L - k, L));
    if (2 * k == L) return {-1.0, 0.0};
    if (4 * k == L) return {0.0, 1.0};
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(L);
    return {std::cos(t), std::sin(t)};
}

Phase::Phase(std::int64_t n, std::int64_t d) {
    if (d <= 0) throw std::invalid_argument("phase denominator must be positive");
    n = floor_mod(n, d);
    const std::int64_t g = std::gcd(n, d);
    num = n / g;
    den = d / g;
    if (num == 0) den = 1;
}

Phase Phase::operator*(const Phase& o) const {
    const std::int64_t L = lcm64(den, o.den);
    return Phase(num * (L / den) + o.num * (L / o.den), L);
}

Phase Phase::conj() const { return Phase(-num, den); }

Phase Phase::pow(std::int64_t k) const { return Phase(floor_mod(num * floor_mod(k, den), den), den); }

cplx Phase::value() const { return unit_root(num, den); }

CycloSum::CycloSum(std::int64_t L) : c_(static_cast<std::size_t>(L), 0) {
    if (L <= 0) throw std::invalid_argument("group ring modulus must be positive");
}

void CycloSum::add(const Phase& p, std::int64_t coeff) {
    const std::int64_t L = modulus();
    if (L % p.den != 0) throw std::invalid_argument("phase order does not divide group ring modulus");
    c_[static_cast<std::size_t>(p.num * (L / p.den))] += coeff;
}

void CycloSum::add_power(std::int64_t k, std::int64_t coeff) {
    c_[static_cast<std::size_t>(floor_mod(k, modulus()))] += coeff;
}

CycloSum CycloSum::operator+(const CycloSum& o) const {
    CycloSum r = *this;
    return r += o;
}

CycloSum& CycloSum::operator+=(const CycloSum& o) {
    if (o.modulus() != modulus()) throw std::invalid_argument("group ring modulus mismatch");
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
}

CycloSum CycloSum::operator-() const {
    CycloSum r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
}

CycloSum CycloSum::operator-(const CycloSum& o) const { return *this + (-o); }

CycloSum CycloSum::operator*(const CycloSum& o) const {
    if (o.modulus() != modulus()) throw std::invalid_argument("group ring modulus mismatch");
    const std::int64_t L = modulus();
    CycloSum r(L);
    for (std::int64_t i = 0; i < L; ++i) {
        if (c_[i] == 0) continue;
        for (std::int64_t j = 0; j < L; ++j)
            if (o.c_[j] != 0) r.c_[(i + j) % L] += c_[i] * o.c_[j];
    }
    return r;
}

CycloSum CycloSum::conj() const {
    const std::int64_t L = modulus();
    CycloSum r(L);
    for (std::int64_t k = 0; k < L; ++k) r.c_[floor_mod(-k, L)] = c_[k];
    return r;
}

namespace {

// low-to-high coefficients of the L-th cyclotomic polynomial
const std::vector<std::int64_t>& cyclotomic(std::int64_t L) {
    static thread_local std::map<std::int64_t, std::vector<std::int64_t>> cache;
    if (auto it = cache.find(L); it != cache.end()) return it->second;
    std::vector<std::int64_t> p(static_cast<std::size_t>(L) + 1, 0);
    p[0] = -1;
    p[L] = 1;
    for (std::int64_t d = 1; d < L; ++d) {
        if (L % d) continue;
        const auto& q = cyclotomic(d);
        const std::size_t dq = q.size() - 1;
        std::vector<std::int64_t> quot(p.size() - dq, 0);
        for (std::size_t k = p.size() - 1; k + 1 > dq; --k) {
            const std::int64_t c = p[k];
            quot[k - dq] = c;
            for (std::size_t i = 0; i <= dq; ++i) p[k - dq + i] -= c * q[i];
            if (k == dq) break;
        }
        p = std::move(quot);
    }
    return cache.emplace(L, std::move(p)).first->second;
}

}  // namespace

std::vector<std::int64_t> CycloSum::reduced() const {
    const auto& phi = cyclotomic(modulus());
    const std::size_t deg = phi.size() - 1;
    std::vector<std::int64_t> r = c_;
    for (std::size_t k = r.size(); k-- > deg;) {
        const std::int64_t c = r[k];
        if (c == 0) continue;
        for (std::size_t i = 0; i <= deg; ++i) r[k - deg + i] -= c * phi[i];
    }
    r.resize(deg);
    return r;
}

bool CycloSum::is_zero() const {
    const auto r = reduced();
    return std::all_of(r.begin(), r.end(), [](std::int64_t x) { return x == 0; });
}

bool CycloSum::operator==(const CycloSum& o) const {
    return modulus() == o.modulus() && (*this - o).is_zero();
}

cplx CycloSum::value() const {
    const std::int64_t L = modulus();
    double re = static_cast<double>(c_[0]), im = 0.0;
    for (std::int64_t k = 1; 2 * k <= L; ++k) {
        const std::int64_t kc = L - k;
        const cplx z = unit_root(k, L);
        if (kc == k) {
            re += static_cast<double>(c_[k]) * z.real();
            continue;
        }
        re += static_cast<double>(c_[k] + c_[kc]) * z.real();
        im += static_cast<double>(c_[k] - c_[kc]) * z.imag();
    }
    return {re, im};
}

}  // namespace icestr
