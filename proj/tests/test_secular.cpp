#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "icestring/bethe.hpp"
#include "icestring/eigen.hpp"
#include "icestring/errors.hpp"
#include "icestring/hamiltonian.hpp"
#include "icestring/secular.hpp"
#include "oracles.hpp"

using namespace icestr;

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

cplx direct_d(const std::vector<std::int64_t>& coords, const std::vector<std::int64_t>& ks, int N) {
    const auto L = static_cast<Eigen::Index>(ks.size());
    Eigen::MatrixXcd A(L, L);
    for (Eigen::Index r = 0; r < L; ++r) {
        A(r, 0) = 1.0;
        for (Eigen::Index c = 1; c < L; ++c) A(r, c) = std::polar(1.0, kTwoPi * double(coords[c - 1] * ks[r]) / N);
    }
    return oracle::cofactor_det(A);
}

std::vector<double> brute(int m, int n, int a, int b) {
    FamilyParams p;
    p.m = m;
    p.n = n;
    return dense_spectrum(build_sector_matrix(Family::Torus12, p, {a, secular_momentum_label(m, n, a, b)})).expanded();
}

}  // namespace

TEST_CASE("D determinant") {
    const std::vector<std::int64_t> c{1, 2, 3};
    CHECK(std::abs(d_det(c, std::vector<std::int64_t>{0, 1, 1, 3}, 8)) < 1e-14);
    CHECK(std::abs(d_det(c, std::vector<std::int64_t>{0, 1, 9, 3}, 8)) < 1e-13);
    CHECK(std::abs(d_det(std::vector<std::int64_t>{1, 1, 3}, std::vector<std::int64_t>{0, 1, 2, 3}, 8)) < 1e-14);
    const std::vector<std::int64_t> k{0, 1, 2, 3};
    CHECK(std::abs(d_det(c, k, 8) - direct_d(c, k, 8)) < 1e-12);
    CHECK(std::abs(d_det(c, k, 8) - explicit_D_m2({1, 2, 3}, {0, 1, 2, 3}, 8)) < 1e-12);
    // exponents live mod N
    const std::vector<std::int64_t> shifted{0, 9, 2, -5};
    CHECK(std::abs(d_det(c, k, 8) - d_det(c, shifted, 8)) < 1e-13);
    // swapping two k's flips the sign; swapping two coordinates too
    const std::vector<std::int64_t> swapped{1, 0, 2, 3};
    CHECK(std::abs(d_det(c, k, 8) + d_det(c, swapped, 8)) < 1e-13);
    const std::vector<std::int64_t> c2{2, 1, 3};
    CHECK(std::abs(d_det(c, k, 8) + d_det(c2, k, 8)) < 1e-13);
    CHECK_THROWS_AS(d_det(c, std::vector<std::int64_t>{0, 1, 2}, 8), DimensionError);
}

TEST_CASE("energy and phase") {
    for (int n = 2; n <= 6; ++n)
        for (int a = 0; a < 2; ++a)
            for (int b = -n + 3; b <= 2; ++b) {
                const double N = n + 4;
                CHECK(std::abs(secular_phi(2, n, a, b) - (b / (n * N) - (a + 1.0) / (2 * n))) < 1e-15);
            }
    const std::vector<std::int64_t> ks{0, 2, 3, 5}, moved{0, 12, 3, 5};
    CHECK(std::abs(energy_12(ks, 1, 0, 2, 6) - energy_12(moved, 1, 0, 2, 6)) < 1e-13);
    CHECK(std::abs(energy_12(ks, 1, 0, 2, 6) - explicit_energy_m2({0, 2, 3, 5}, 6, 1, 0)) < 1e-13);
    CHECK(std::abs(energy_12_complex(ks, 1, 0, 2, 6).imag()) < 1e-14);
}

TEST_CASE("free energies are doubled-lattice (1,1) levels in sector 2a") {
    for (int m = 2; m <= 3; ++m)
        for (int n = 2; n <= 4; ++n) {
            const int N = n + 2 * m;
            for (int a = 0; a < m; ++a) {
                const auto [lo, hi] = secular_b_range(m, n);
                const auto sols = torus11_solutions(2 * m, n, 2 * a);
                for (int b = lo; b <= hi; ++b) {
                    const SecularProblem P(m, n, a, b);
                    for (const auto& K : P.sets()) {
                        std::vector<int> r;
                        for (auto k : K.ks) r.push_back(static_cast<int>(floor_mod(k, N)));
                        std::sort(r.begin(), r.end());
                        if (r[0] == 0) continue;
                        bool found = false;
                        for (const auto& s : sols) found = found || std::abs(s.energy - K.energy) < 1e-9;
                        CHECK(found);
                    }
                }
            }
        }
}

TEST_CASE("secular matrix shape and limits") {
    for (int n = 2; n <= 6; ++n) CHECK(build_A(0.37, 2, n, 0, 2).entries.rows() == n - 1);
    for (int n = 3; n <= 4; ++n) CHECK(build_A(0.37, 3, n, 0, 9).entries.rows() == long(binomial(n, 2)));

    const SecularProblem P(2, 4, 0, 0);
    const Eigen::MatrixXcd big = P.A(1e6) * 1e6;
    Eigen::MatrixXcd lim = Eigen::MatrixXcd::Zero(3, 3);
    for (const auto& t : P.terms())
        if (t.set >= 0) lim += t.lower * t.lower.adjoint();
    CHECK((big - lim).cwiseAbs().maxCoeff() < 1e-4 * lim.cwiseAbs().maxCoeff());

    // Hermitian at every real E
    CHECK(hermitian_defect(P.A(0.123)) < 1e-12);
}

TEST_CASE("m = 2 matrix matches the term-by-term sum") {
    for (int n = 2; n <= 6; ++n)
        for (int a = 0; a < 2; ++a)
            for (int b = -n + 3; b <= 2; ++b)
                for (double E : {0.0, 0.37, -1.3, 5.5}) {
                    const SecularProblem P(2, n, a, b);
                    bool near = false;
                    for (const auto& s : P.sets()) near = near || std::abs(s.energy - E) < 1e-3;
                    if (near) continue;
                    const Eigen::MatrixXcd A = P.A(E), L = explicit_A_m2(E, n, a, b);
                    CHECK((A - L).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, L.cwiseAbs().maxCoeff()));
                }
}

TEST_CASE("each ordering of a residue set carries its set's vector up to sign") {
    for (auto [m, n] : {std::pair{2, 3}, {2, 5}, {3, 3}, {3, 4}}) {
        const SecularProblem P(m, n, 1, secular_b_range(m, n).second);
        std::vector<int> seen(P.sets().size(), 0);
        for (const auto& t : P.terms()) {
            if (t.set < 0) continue;
            const auto& K = P.sets()[t.set];
            ++seen[t.set];
            CHECK(std::abs(t.energy - K.energy) < 1e-12);
            const double plus = (t.lower - K.lower).cwiseAbs().maxCoeff();
            const double minus = (t.lower + K.lower).cwiseAbs().maxCoeff();
            CHECK(std::min(plus, minus) <= 1e-9 * std::max(1.0, K.lower.cwiseAbs().maxCoeff()));
        }
        for (std::size_t k = 0; k < seen.size(); ++k) CHECK(seen[k] == P.sets()[k].copies);
    }
}

TEST_CASE("determinant properties") {
    // 1 x 1 case
    const SecularProblem P(2, 2, 0, 2);
    CHECK(std::abs(det_A(0.3, 2, 2, 0, 2) - P.A(0.3)(0, 0)) < 1e-14);
    // simultaneous row/column permutation
    const Eigen::MatrixXcd A = build_A(0.41, 2, 5, 1, -1).entries;
    Eigen::PermutationMatrix<Eigen::Dynamic> perm(A.rows());
    perm.setIdentity();
    perm.applyTranspositionOnTheRight(0, A.rows() - 1);
    const Eigen::MatrixXcd B = perm.transpose() * A * perm;
    CHECK(std::abs(determinant(A) - determinant(B)) < 1e-12 * std::abs(determinant(A)));
    CHECK_THROWS_AS(P.A(P.sets()[0].energy), PoleGuardError);
}

TEST_CASE("m = 2, n = 4: every sector") {
    const int m = 2, n = 4;
    FamilyParams fp;
    fp.m = m;
    fp.n = n;
    for (int a = 0; a < m; ++a) {
        const SparseOperator sec = build_sector_matrix(Family::Torus12, fp, {a, std::nullopt});
        const Eigen::MatrixXcd H = sec.dense();
        const auto [lo, hi] = secular_b_range(m, n);
        for (int b = lo; b <= hi; ++b) {
            const SecularProblem P(m, n, a, b);
            const auto ref = brute(m, n, a, b);
            for (double E : ref) CHECK(P.certificate(E) <= 1e-6);
            const RootScan scan = find_roots(P);
            std::vector<double> roots;
            for (const auto& s : scan.solutions) roots.push_back(s.E);
            CHECK(roots.size() == ref.size());
            CHECK(oracle::max_gap(roots, ref) < 1e-6);
            CHECK(scan.warnings.empty());

            for (const auto& s : scan.solutions) {
                Eigen::VectorXcd v(static_cast<Eigen::Index>(sec.dim()));
                for (std::size_t i = 0; i < sec.dim(); ++i) v(i) = psi12_state(P, s, std::get<Torus12State>(sec.basis[i]).base.lambda);
                const double inf = v.cwiseAbs().maxCoeff();
                REQUIRE(inf > 0.0);
                CHECK((H * v - s.E * v).norm() <= 1e-8 * v.norm());
                for (const auto& l : weak_chains(4, 1, n))
                    if (violates_exclusion(l, m)) CHECK(std::abs(psi12_state(P, s, l)) <= 1e-10 * inf);
                for (std::int64_t mu = 3; mu < P.N(); ++mu) {
                    const std::vector<std::int64_t> z{1, 2, mu};
                    CHECK(std::abs(psi12(P, s, z)) <= 1e-10 * inf);
                }
                const std::vector<std::int64_t> nb{0, 1, 3, 5}, nb1{1, 2, 4, 6};
                CHECK(std::abs(psi12_direct(P, s, nb1) - P.p() * psi12_direct(P, s, nb)) <= 1e-10 * inf);
            }
        }
    }
}

TEST_CASE("degenerate roots give independent eigenvectors") {
    const SecularProblem P(2, 4, 0, -1);
    const RootScan scan = find_roots(P);
    FamilyParams fp;
    fp.m = 2;
    fp.n = 4;
    const SparseOperator sec = build_sector_matrix(Family::Torus12, fp, {0, std::nullopt});
    std::map<long, std::vector<Eigen::VectorXcd>> groups;
    for (const auto& s : scan.solutions) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(sec.dim()));
        for (std::size_t i = 0; i < sec.dim(); ++i) v(i) = psi12_state(P, s, std::get<Torus12State>(sec.basis[i]).base.lambda);
        groups[std::lround(s.E * 1e6)].push_back(v.normalized());
    }
    for (const auto& [key, vs] : groups) {
        Eigen::MatrixXcd G(vs[0].size(), static_cast<Eigen::Index>(vs.size()));
        for (std::size_t j = 0; j < vs.size(); ++j) G.col(j) = vs[j];
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(G);
        CHECK(svd.singularValues().minCoeff() > 1e-6);
    }
}

TEST_CASE("roots for m = 3 and m = 1") {
    for (auto [m, n] : {std::pair{3, 3}, {3, 4}, {1, 4}})
        for (int a = 0; a < m; ++a) {
            const auto [lo, hi] = secular_b_range(m, n);
            for (int b = lo; b <= hi; ++b) {
                const RootScan scan = find_roots(SecularProblem(m, n, a, b));
                std::vector<double> roots;
                for (const auto& s : scan.solutions) roots.push_back(s.E);
                CHECK(oracle::max_gap(roots, brute(m, n, a, b)) < 1e-6);
            }
        }
}

TEST_CASE("count below is monotone") {
    const SecularProblem P(3, 4, 1, 9);
    int prev = P.count_below(-20.0);
    CHECK(prev == 0);
    for (double E = -13.0; E <= 13.0; E += 0.01) {
        const int c = P.count_below(E);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(prev == static_cast<int>(brute(3, 4, 1, 9).size()));
}

TEST_CASE("orthogonality constant") {
    for (int n = 2; n <= 5; ++n) {
        const int N = n + 4;
        const double kappa = 2 * 2 * std::pow(N, 3);
        const SecularProblem P(2, n, 0, 2);
        for (std::size_t i = 0; i < P.sets().size(); ++i)
            for (std::size_t j = 0; j < P.sets().size(); ++j) {
                const cplx s = orthogonality_sum(P.sets()[i].ks, P.sets()[j].ks, N);
                if (i == j)
                    CHECK(std::abs(s - kappa) <= 1e-9 * kappa);
                else
                    CHECK(std::abs(s) <= 1e-9 * kappa);
            }
    }
}

TEST_CASE("literal forbidden-state terms reproduce the projected Hamiltonian") {
    for (int n = 2; n <= 6; ++n)
        for (int a = 0; a < 2; ++a) {
            const LiteralBlock blk = literal_delta_h_m2(n, a);
            std::map<Lambda, std::size_t> idx;
            for (std::size_t i = 0; i < blk.basis.size(); ++i) idx[blk.basis[i]] = i;
            std::map<std::pair<std::size_t, std::size_t>, CycloSum> proj;
            for (std::size_t c = 0; c < blk.basis.size(); ++c) {
                if (blk.forbidden[c]) continue;
                for (const auto& mv : apply_torus12(blk.basis[c], 2, n, a)) {
                    auto [it, fresh] = proj.try_emplace({idx.at(mv.state), c}, CycloSum(2));
                    it->second.add(mv.phase);
                }
            }
            for (const auto& [key, v] : blk.entries) {
                if (blk.forbidden[key.first]) continue;
                if (blk.forbidden[key.second]) {
                    CHECK(v.is_zero());
                    continue;
                }
                auto it = proj.find(key);
                CHECK((it == proj.end() ? v.is_zero() : it->second == v));
            }
            for (const auto& [key, v] : proj) {
                auto it = blk.entries.find(key);
                CHECK((it == blk.entries.end() ? v.is_zero() : it->second == v));
            }
        }
}

TEST_CASE("the four boundary sums coincide") {
    for (int n = 3; n <= 5; ++n) {
        const SecularProblem P(2, n, 0, 0);
        const RootScan scan = find_roots(P);
        for (const auto& s : scan.solutions) {
            double inf = 0.0;
            for (const auto& l : torus12_lambdas(2, n)) inf = std::max(inf, std::abs(psi12_state(P, s, l)));
            for (const auto& K : P.sets()) {
                const auto t = boundary_terms_m2(P, s, K.ks);
                const double scale = std::max({inf, std::abs(t[0]), std::abs(t[1]), std::abs(t[2]), std::abs(t[3])});
                for (int i = 1; i < 4; ++i) CHECK(std::abs(t[i] - t[0]) <= 1e-8 * scale);
            }
        }
    }
}
