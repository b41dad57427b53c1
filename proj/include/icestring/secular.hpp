#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "icestring/lattice.hpp"
#include "icestring/phase.hpp"

namespace icestr {

// 2m x 2m determinant with rows (1, w^{n_1 k_r}, ..., w^{n_{2m-1} k_r}), w = exp(2 pi i/N)
cplx d_det(std::span<const std::int64_t> coords, std::span<const std::int64_t> ks, std::int64_t N);
// same with an explicit first coordinate: rows (w^{c_0 k_r}, w^{c_1 k_r}, ...)
cplx d_full(std::span<const std::int64_t> nbar, std::span<const std::int64_t> ks, std::int64_t N);

// b runs over [-n+1+m(2m-3), m(2m-3)]
std::pair<int, int> secular_b_range(int m, int n);
double secular_phi(int m, int n, int a, int b);
// translation label b_P in [0, n) of the Hamiltonian block that corresponds to (a, b)
int secular_momentum_label(int m, int n, int a, int b);

cplx energy_12_complex(std::span<const std::int64_t> ks, int a, int b, int m, int n);
double energy_12(std::span<const std::int64_t> ks, int a, int b, int m, int n);

struct SecularMatrix {
    int m = 0, n = 0, a = 0, b = 0;
    double E = 0.0;
    std::vector<std::vector<int>> indices;
    Eigen::MatrixXcd entries;
};

struct SecularSolution {
    double E = 0.0;
    std::vector<cplx> zeta;
    // nonempty when E sits on eigenvalues of the unrestricted problem
    std::vector<int> pole_sets;
    std::vector<cplx> pole_weights;
    double residual = 0.0;       // normalized secular determinant at E
    double null_residual = 0.0;  // ||M v|| / ||M|| of the extracted vector
    int multiplicity = 1;
    bool at_pole = false;
};

struct RootScan {
    std::vector<SecularSolution> solutions;
    std::vector<std::string> warnings;
};

class SecularProblem {
public:
    SecularProblem(int m, int n, int a, int b);

    int m() const { return m_; }
    int n() const { return n_; }
    int a() const { return a_; }
    int b() const { return b_; }
    int N() const { return N_; }
    double phi() const { return phi_; }
    cplx rho() const { return rho_; }
    // translation eigenvalue rho^{2m} w^b of the reconstructed wavefunction
    cplx p() const { return p_; }

    std::size_t dimension() const { return indices_.size(); }
    const std::vector<std::vector<int>>& indices() const { return indices_; }
    // (1..m, i_1..i_{m-1}) for a row
    std::vector<std::int64_t> row_coords(std::size_t row) const;
    // classes with a cyclic run of m+2 or more equal jumps, as difference coordinates
    const std::vector<std::vector<std::int64_t>>& deep_coords() const { return deep_; }

    struct Term {
        std::vector<std::int64_t> ks;  // k_{2m} = b - sum, not reduced
        double energy = 0.0;
        int set = -1;                  // -1 when residues collide
        Eigen::VectorXcd lower;        // D_i(k) per row
    };
    // residue sets K of Z_N with |K| = 2m and sum K = b mod N
    struct KSet {
        std::vector<std::int64_t> ks;  // ordering of its first occurrence in the sum
        double energy = 0.0;
        int copies = 0;
        Eigen::VectorXcd lower;
        Eigen::VectorXcd deep;         // D(q|K) per deep class
    };
    const std::vector<Term>& terms() const { return terms_; }
    const std::vector<KSet>& sets() const { return sets_; }

    // A(E); throws PoleGuardError within guard of a pole with nonzero residue
    Eigen::MatrixXcd A(double E, double guard = 1e-6) const;
    // contributions of the listed sets left out, no guard
    Eigen::MatrixXcd A_without(double E, const std::vector<int>& skip) const;
    Eigen::MatrixXcd deep_rows_without(double E, const std::vector<int>& skip) const;
    // square pole-cleared matrix on (zeta, c_K) for K in poles
    Eigen::MatrixXcd bordered(double E, const std::vector<int>& poles) const;
    std::vector<int> poles_near(double E, double radius) const;

    // spectrum of the unrestricted Hamiltonian restricted to deep classes
    const std::vector<double>& deep_spectrum() const { return deep_spec_; }
    const Eigen::MatrixXcd& range() const { return range_; }
    // number of eigenvalues of the restricted Hamiltonian below E
    int count_below(double E) const;
    std::vector<double> critical_points() const;

    // determinant with rows scaled by their cancellation-free size; bordered form near poles
    double certificate(double E, double pole_radius = 1e-6) const;

private:
    int m_, n_, a_, b_, N_;
    double phi_;
    cplx rho_, p_;
    std::vector<std::vector<int>> indices_;
    std::vector<std::vector<std::int64_t>> deep_;
    std::vector<Term> terms_;
    std::vector<KSet> sets_;
    std::vector<double> deep_spec_;
    Eigen::MatrixXcd range_;  // orthonormal basis of span{D_i(k)}
};

SecularMatrix build_A(double E, int m, int n, int a, int b, double guard = 1e-6);
cplx det_A(double E, int m, int n, int a, int b, bool normalized = false);

struct RootOptions {
    std::optional<double> lo, hi;  // default [-4m-1, 4m+1]
    double step = 0.0;             // default (hi-lo)/2000
    double pole_radius = 1e-6;
};

RootScan find_roots(const SecularProblem& P, const RootOptions& opt = {});

// Psi(0, n_1, ..., n_{2m-1}); coords may include the leading 0
cplx psi12(const SecularProblem& P, const SecularSolution& s, std::span<const std::int64_t> coords);
// Psi at absolute coordinates nbar_0 < ... < nbar_{2m-1}, not reduced by translation
cplx psi12_direct(const SecularProblem& P, const SecularSolution& s, std::span<const std::int64_t> nbar);
// value on a canonical doubled-lattice state: p^{nbar_0} Psi(0, nbar - nbar_0)
cplx psi12_state(const SecularProblem& P, const SecularSolution& s, const Lambda& lambda);

// sum over 0 <= n_1 < ... < n_{2m-1} <= N-1 of D(n|-l) D(n|k)
cplx orthogonality_sum(std::span<const std::int64_t> ks, std::span<const std::int64_t> ls, std::int64_t N);

// ---- m = 2 forms written out term by term ----

// A_{mu nu}(E) for 4 <= mu, nu <= N-2 with phi = b/(nN) - (a+1)/(2n)
Eigen::MatrixXcd explicit_A_m2(double E, int n, int a, int b);
double explicit_energy_m2(const std::array<std::int64_t, 4>& ks, int n, int a, int b);
cplx explicit_D_m2(const std::array<std::int64_t, 3>& coords, const std::array<std::int64_t, 4>& ks, std::int64_t N);

// H0 + dH in the Fourier-a basis of all doubled states, exact over Z[Z_2]
struct LiteralBlock {
    int n = 0, a = 0;
    std::vector<Lambda> basis;
    std::vector<char> forbidden;
    std::map<std::pair<std::size_t, std::size_t>, CycloSum> entries;  // (row, col)
};
LiteralBlock literal_delta_h_m2(int n, int a);

// the four boundary sums obtained by projecting the m = 2 equation for C
// onto the set ls; equal for an eigenfunction
std::array<cplx, 4> boundary_terms_m2(const SecularProblem& P, const SecularSolution& s,
                                      std::span<const std::int64_t> ls);

}  // namespace icestr
