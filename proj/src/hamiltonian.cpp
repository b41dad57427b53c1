#include "icestring/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "icestring/eigen.hpp"
#include "icestring/errors.hpp"

namespace icestr {

std::vector<Move<FixedEndsState>> apply_fixed_ends(const FixedEndsState& s, double e) {
    if (!s.valid()) throw InvalidStateError("fixed-ends state is not weakly increasing in [0, N]");
    std::vector<Move<FixedEndsState>> out;
    const int M = s.M();
    for (int i = 0; i < M; ++i) {
        const int v = s.lambda[i];
        if (v + 1 <= s.N && (i == M - 1 || s.lambda[i + 1] >= v + 1)) {
            FixedEndsState t = s;
            ++t.lambda[i];
            out.push_back({std::move(t), Phase::one(), e});
        }
        if (v - 1 >= 0 && (i == 0 || s.lambda[i - 1] <= v - 1)) {
            FixedEndsState t = s;
            --t.lambda[i];
            out.push_back({std::move(t), Phase::one(), e});
        }
    }
    return out;
}

namespace {

// move list shared by the alpha-resolved and the Fourier-reduced forms;
// shift = +1 when the left relabelling fired, -1 for the right one
struct RawMove {
    Lambda lambda;
    int shift;
};

std::vector<RawMove> raw_moves(const Lambda& l, int n) {
    std::vector<RawMove> out;
    const int len = static_cast<int>(l.size());
    for (int i = 0; i < len; ++i) {
        const int v = l[i];
        if (i == len - 1 || l[i + 1] >= v + 1) {
            if (v + 1 <= n) {
                Lambda t = l;
                ++t[i];
                out.push_back({std::move(t), 0});
            } else if (i == len - 1) {
                Lambda t(len);
                t[0] = 1;
                for (int k = 1; k < len; ++k) t[k] = l[k - 1];
                out.push_back({std::move(t), -1});
            }
        }
        if (i == 0 || l[i - 1] <= v - 1) {
            if (v - 1 >= 1) {
                Lambda t = l;
                --t[i];
                out.push_back({std::move(t), 0});
            } else if (i == 0) {
                Lambda t(len);
                for (int k = 0; k + 1 < len; ++k) t[k] = l[k + 1];
                t[len - 1] = n;
                out.push_back({std::move(t), +1});
            }
        }
    }
    return out;
}

void check_lambda(const Lambda& l, int n) {
    for (std::size_t i = 0; i < l.size(); ++i)
        if (l[i] < 1 || l[i] > n || (i > 0 && l[i] < l[i - 1]))
            throw InvalidStateError("torus state must be weakly increasing in [1, n]");
    if (l.empty()) throw InvalidStateError("torus state needs at least one jump");
}

}  // namespace

std::vector<Move<Torus11State>> apply_torus_classes(const Torus11State& s, int n, int classes, double e) {
    check_lambda(s.lambda, n);
    if (s.alpha < 0 || s.alpha >= classes) throw InvalidStateError("alpha out of range");
    std::vector<Move<Torus11State>> out;
    for (auto& r : raw_moves(s.lambda, n))
        out.push_back({{static_cast<int>(floor_mod(s.alpha + r.shift, classes)), std::move(r.lambda)}, Phase::one(), e});
    return out;
}

std::vector<Move<Torus11State>> apply_torus11(const Torus11State& s, int n, double e) {
    return apply_torus_classes(s, n, static_cast<int>(s.lambda.size()), e);
}

std::vector<Move<Lambda>> sector_moves(const Lambda& lambda, int n, int a, int den, const SectorOptions& opt) {
    check_lambda(lambda, n);
    if (a < 0 || a >= den) throw DimensionError("sector index a out of range");
    std::vector<Move<Lambda>> out;
    for (auto& r : raw_moves(lambda, n)) {
        Phase ph;
        if (r.shift == +1) ph = Phase(opt.flip_left_phase ? a : -a, den);
        if (r.shift == -1) ph = Phase(a, den);
        out.push_back({std::move(r.lambda), ph, opt.e});
    }
    return out;
}

std::vector<Move<Lambda>> apply_torus11_sector(const Lambda& lambda, int n, int a, const SectorOptions& opt) {
    return sector_moves(lambda, n, a, static_cast<int>(lambda.size()), opt);
}

std::vector<Move<Lambda>> apply_torus12(const Lambda& lambda, int m, int n, int a, const SectorOptions& opt) {
    if (static_cast<int>(lambda.size()) != 2 * m) throw DimensionError("(1,2) state needs 2m jump coordinates");
    if (violates_exclusion(lambda, m)) throw InvalidStateError("state violates the exclusion rule");
    std::vector<Move<Lambda>> out;
    for (auto& mv : sector_moves(lambda, n, a, m, opt))
        if (!violates_exclusion(mv.state, m)) out.push_back(std::move(mv));
    return out;
}

std::vector<Move<Torus12State>> apply_torus12_full(const Torus12State& s, int m, int n, double e) {
    if (static_cast<int>(s.base.lambda.size()) != 2 * m) throw DimensionError("(1,2) state needs 2m jump coordinates");
    if (violates_exclusion(s.base.lambda, m)) throw InvalidStateError("state violates the exclusion rule");
    std::vector<Move<Torus12State>> out;
    for (auto& mv : apply_torus_classes(s.base, n, m, e))
        if (!violates_exclusion(mv.state.lambda, m)) out.push_back({{std::move(mv.state)}, mv.phase, mv.weight});
    return out;
}

Move<Lambda> shift_P(const Lambda& lambda, int n, int a, int den) {
    check_lambda(lambda, n);
    const int len = static_cast<int>(lambda.size());
    const int r = static_cast<int>(std::count(lambda.begin(), lambda.end(), n));
    Lambda t(len);
    for (int k = 0; k < r; ++k) t[k] = 1;
    for (int k = 0; k < len - r; ++k) t[r + k] = lambda[k] + 1;
    return {std::move(t), Phase(static_cast<std::int64_t>(a) * r, den), 1.0};
}

std::optional<Move<Lambda>> canonicalize_nbar(std::vector<int> nb, int n, int a, int den) {
    const int L = static_cast<int>(nb.size());
    const int N = n + L;
    Phase ph;
    for (int guard = 0; guard < 4 * L * (std::abs(nb.empty() ? 0 : nb[0]) + 2 + N); ++guard) {
        for (int i = 0; i + 1 < L; ++i)
            if (nb[i] >= nb[i + 1]) return std::nullopt;
        if (nb[0] <= 0) {
            const int first = nb[0];
            for (int i = 0; i + 1 < L; ++i) nb[i] = nb[i + 1] - 1;
            nb[L - 1] = first + N - 1;
            ph *= Phase(-a, den);
            continue;
        }
        if (nb[L - 1] >= N) {
            const int last = nb[L - 1];
            for (int i = L - 1; i > 0; --i) nb[i] = nb[i - 1] + 1;
            nb[0] = last - N + 1;
            ph *= Phase(a, den);
            continue;
        }
        Lambda l(L);
        for (int i = 0; i < L; ++i) l[i] = nb[i] - i;
        return Move<Lambda>{std::move(l), ph, 1.0};
    }
    throw InvalidStateError("nbar canonicalization did not terminate");
}

std::vector<Move<EdgeColouring>> apply_colouring(const EdgeColouring& c, const LatticeSpec& spec) {
    spec.validate();
    if (c.m != spec.m || c.n != spec.n) throw DimensionError("colouring shape does not match lattice");
    const bool strip = spec.topology == Topology::OpenStrip;
    const int imax = strip ? spec.m - 1 : spec.m;
    const int jmax = strip ? spec.n - 1 : spec.n;
    std::vector<Move<EdgeColouring>> out;
    for (int i = 0; i < imax; ++i) {
        for (int j = 0; j < jmax; ++j) {
            const int b = c.sigma(i, j), l = c.eta(i, j), t = c.sigma(i + 1, j), r = c.eta(i, j + 1);
            int nb, nl, nt, nr;
            if (b && r && !l && !t) {
                nb = 0, nr = 0, nl = 1, nt = 1;
            } else if (l && t && !b && !r) {
                nb = 1, nr = 1, nl = 0, nt = 0;
            } else {
                continue;
            }
            EdgeColouring x = c;
            x.set_sigma(i, j, nb);
            x.set_eta(i, j, nl);
            x.set_sigma(i + 1, j, nt);
            x.set_eta(i, j + 1, nr);
            out.push_back({std::move(x), Phase::one(), spec.e});
        }
    }
    return out;
}

// ---- assembly ----

Eigen::MatrixXcd SparseOperator::dense() const {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
    for (const auto& e : entries) A(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) += e.value;
    return A;
}

double SparseOperator::hermiticity_defect() const {
    std::map<std::pair<std::size_t, std::size_t>, cplx> m;
    for (const auto& e : entries) m[{e.row, e.col}] += e.value;
    double d = 0.0;
    for (const auto& [k, v] : m) {
        auto it = m.find({k.second, k.first});
        const cplx w = it == m.end() ? cplx(0.0) : it->second;
        d = std::max(d, std::abs(v - std::conj(w)));
    }
    return d;
}

double SparseOperator::max_abs() const {
    double d = 0.0;
    for (const auto& e : entries) d = std::max(d, std::abs(e.value));
    return d;
}

namespace {

void check_params(Family f, const FamilyParams& p) {
    switch (f) {
        case Family::FixedEnds:
            if (p.N < 0 || p.M < 0) throw DimensionError("fixed ends need N >= 0 and M >= 0");
            break;
        case Family::Torus11:
            if (p.m < 1 || p.n < 1) throw DimensionError("(1,1) strings need m >= 1 and n >= 1");
            break;
        case Family::Torus12:
            if (p.m < 1 || p.n < 2) throw DimensionError("(1,2) strings need m >= 1 and n >= 2");
            break;
    }
}

using ExactEntries = std::map<std::pair<std::size_t, std::size_t>, CycloSum>;

SparseOperator from_exact(ExactEntries&& ex, double e, Family f, SectorLabel s, std::vector<StringState>&& basis) {
    SparseOperator op;
    op.family = f;
    op.sector = s;
    op.basis = std::move(basis);
    for (auto& [k, v] : ex)
        if (!v.is_zero()) op.entries.push_back({k.first, k.second, e * v.value()});
    return op;
}

template <class S, class Moves>
SparseOperator assemble(const std::vector<S>& basis, Moves moves, std::int64_t L, double e, Family f, SectorLabel s,
                        std::vector<StringState>&& tagged) {
    std::map<S, std::size_t> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], i);
    ExactEntries ex;
    for (std::size_t col = 0; col < basis.size(); ++col) {
        for (const auto& mv : moves(basis[col])) {
            auto it = index.find(mv.state);
            if (it == index.end()) throw InvalidStateError("move left the enumerated basis");
            auto [pos, fresh] = ex.try_emplace({it->second, col}, CycloSum(L));
            pos->second.add(mv.phase);
        }
    }
    return from_exact(std::move(ex), e, f, s, std::move(tagged));
}

std::vector<Lambda> sector_basis(Family f, const FamilyParams& p, std::size_t cap) {
    if (f == Family::Torus11) return weak_chains(p.m, 1, p.n, cap);
    return torus12_lambdas(p.m, p.n, cap);
}

StringState tag(Family f, const Lambda& l) {
    if (f == Family::Torus11) return Torus11State{0, l};
    return Torus12State{{0, l}};
}

struct OrbitInfo {
    std::size_t rep = 0;      // basis index of the orbit representative
    int shift = 0;            // |s> = beta * P^shift |rep>
    Phase beta;
};

SparseOperator momentum_block(Family f, const FamilyParams& p, int a, int b, std::size_t cap) {
    const int m = p.m, n = p.n;
    const std::vector<Lambda> basis = sector_basis(f, p, cap);
    std::map<Lambda, std::size_t> index;
    for (std::size_t i = 0; i < basis.size(); ++i) index.emplace(basis[i], i);

    std::vector<OrbitInfo> info(basis.size());
    std::vector<char> seen(basis.size(), 0);
    std::vector<std::size_t> reps;
    std::vector<int> period;
    std::vector<char> compatible;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (seen[i]) continue;
        // lexicographic order of the basis makes the first unseen state the orbit minimum
        Lambda cur = basis[i];
        Phase chi;  // P^t |rep> = chi |cur>
        int t = 0;
        while (true) {
            const std::size_t k = index.at(cur);
            if (seen[k]) break;
            seen[k] = 1;
            info[k] = {i, t, chi.conj()};
            Move<Lambda> mv = shift_P(cur, n, a, m);
            chi *= mv.phase;
            cur = std::move(mv.state);
            ++t;
        }
        if (cur != basis[i]) throw InvalidOperatorError("translation orbit does not close");
        const Phase closure = chi * Phase(-static_cast<std::int64_t>(b) * t, n);
        reps.push_back(i);
        period.push_back(t);
        compatible.push_back(closure.is_one() ? 1 : 0);
    }

    std::map<std::size_t, std::size_t> block_index;
    std::vector<StringState> tagged;
    std::vector<int> block_period;
    for (std::size_t r = 0; r < reps.size(); ++r) {
        if (!compatible[r]) continue;
        block_index[reps[r]] = tagged.size();
        tagged.push_back(tag(f, basis[reps[r]]));
        block_period.push_back(period[r]);
    }

    const std::int64_t L = lcm64(m, n);
    ExactEntries ex;
    const SectorOptions opt{1.0, p.flip_left_phase};
    for (const auto& [rep, col] : block_index) {
        const auto mv_list = f == Family::Torus11 ? sector_moves(basis[rep], n, a, m, opt)
                                                  : apply_torus12(basis[rep], m, n, a, opt);
        for (const auto& mv : mv_list) {
            const OrbitInfo& oi = info[index.at(mv.state)];
            auto bi = block_index.find(oi.rep);
            if (bi == block_index.end()) continue;
            const Phase w = mv.phase * oi.beta * Phase(static_cast<std::int64_t>(b) * oi.shift, n);
            auto [pos, fresh] = ex.try_emplace({bi->second, col}, CycloSum(L));
            pos->second.add(w);
        }
    }

    SparseOperator op;
    op.family = f;
    op.sector = {a, b};
    op.basis = std::move(tagged);
    for (auto& [k, v] : ex) {
        if (v.is_zero()) continue;
        const double ratio = std::sqrt(static_cast<double>(block_period[k.second]) / block_period[k.first]);
        op.entries.push_back({k.first, k.second, p.e * ratio * v.value()});
    }
    // Entries and their mirrors come from independent move lists; once they
    // agree to rounding, store exact conjugates so the block is Hermitian bit for bit.
    const double scale = std::max(1.0, op.max_abs());
    if (op.hermiticity_defect() <= 1e-12 * scale) {
        std::map<std::pair<std::size_t, std::size_t>, cplx> sym;
        for (const auto& e : op.entries) {
            if (e.row < e.col) {
                sym[{e.row, e.col}] = e.value;
                sym[{e.col, e.row}] = std::conj(e.value);
            } else if (e.row == e.col) {
                sym[{e.row, e.col}] = e.value.real();
            }
        }
        op.entries.clear();
        for (const auto& [k, v] : sym)
            if (v != cplx(0.0)) op.entries.push_back({k.first, k.second, v});
    }
    return op;
}

}  // namespace

SparseOperator build_sector_matrix(Family f, const FamilyParams& p, const SectorLabel& sector, std::size_t cap) {
    check_params(f, p);
    if (f == Family::FixedEnds) {
        if (sector.a || sector.b) throw DimensionError("fixed ends carry no sector label");
        const auto basis = enumerate_fixed_ends(p.N, p.M, cap);
        std::vector<StringState> tagged(basis.begin(), basis.end());
        return assemble(basis, [&](const FixedEndsState& s) { return apply_fixed_ends(s); }, 1, p.e, f, sector,
                        std::move(tagged));
    }
    if (sector.b && !sector.a) throw DimensionError("momentum b needs the vertical sector a");
    if (sector.a && (*sector.a < 0 || *sector.a >= p.m)) throw DimensionError("sector a must lie in [0, m)");
    if (sector.b && (*sector.b < 0 || *sector.b >= p.n)) throw DimensionError("momentum b must lie in [0, n)");
    if (sector.b) return momentum_block(f, p, *sector.a, *sector.b, cap);

    if (sector.a) {
        const int a = *sector.a;
        const SectorOptions opt{1.0, p.flip_left_phase};
        const std::vector<Lambda> basis = sector_basis(f, p, cap);
        std::vector<StringState> tagged;
        for (const auto& l : basis) tagged.push_back(tag(f, l));
        if (f == Family::Torus11)
            return assemble(basis, [&](const Lambda& l) { return sector_moves(l, p.n, a, p.m, opt); }, p.m, p.e, f,
                            sector, std::move(tagged));
        return assemble(basis, [&](const Lambda& l) { return apply_torus12(l, p.m, p.n, a, opt); }, p.m, p.e, f,
                        sector, std::move(tagged));
    }

    if (f == Family::Torus11) {
        const auto basis = enumerate_torus11(p.m, p.n, cap);
        std::vector<StringState> tagged(basis.begin(), basis.end());
        return assemble(basis, [&](const Torus11State& s) { return apply_torus11(s, p.n); }, 1, p.e, f, sector,
                        std::move(tagged));
    }
    std::vector<Torus12State> basis;
    for (auto& s : enumerate_torus12(p.m, p.n, cap))
        if (s.base.alpha < p.m) basis.push_back(std::move(s));
    std::vector<StringState> tagged(basis.begin(), basis.end());
    return assemble(basis, [&](const Torus12State& s) { return apply_torus12_full(s, p.m, p.n); }, 1, p.e, f, sector,
                    std::move(tagged));
}

std::vector<SectorLabel> sector_labels(Family f, const FamilyParams& p, bool with_b) {
    check_params(f, p);
    if (f == Family::FixedEnds) return {SectorLabel{}};
    std::vector<SectorLabel> out;
    for (int a = 0; a < p.m; ++a) {
        if (!with_b) {
            out.push_back({a, std::nullopt});
            continue;
        }
        for (int b = 0; b < p.n; ++b) out.push_back({a, b});
    }
    return out;
}

std::size_t full_dimension(Family f, const FamilyParams& p) {
    check_params(f, p);
    switch (f) {
        case Family::FixedEnds:
            return fixed_ends_dimension(p.N, p.M);
        case Family::Torus11:
            return torus11_dimension(p.m, p.n);
        case Family::Torus12:
            return static_cast<std::size_t>(p.m) * torus12_lambdas(p.m, p.n).size();
    }
    return 0;
}

std::string export_coo(const SparseOperator& op) {
    std::vector<MatrixEntry> es = op.entries;
    std::sort(es.begin(), es.end(), [](const MatrixEntry& x, const MatrixEntry& y) {
        return std::pair(x.row, x.col) < std::pair(y.row, y.col);
    });
    std::string out;
    char buf[128];
    for (const auto& e : es) {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", e.row, e.col, e.value.real(), e.value.imag());
        out += buf;
    }
    return out;
}

std::vector<double> SpectrumResult::expanded() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) out.insert(out.end(), multiplicities[i], eigenvalues[i]);
    return out;
}

SpectrumResult dense_spectrum(const SparseOperator& op, std::size_t dense_cap, double degeneracy_tol) {
    if (op.dim() > dense_cap)
        throw CapacityError("block of dimension " + std::to_string(op.dim()) + " exceeds dense cap " +
                            std::to_string(dense_cap));
    const Eigen::MatrixXcd A = op.dense();
    const double norm = A.size() ? A.cwiseAbs().maxCoeff() : 0.0;
    if (hermitian_defect(A) > 1e-12 * std::max(1.0, norm))
        throw InvalidOperatorError("operator is not Hermitian (defect " + std::to_string(hermitian_defect(A)) + ")");
    const EigenSystem es = eigh(A, true);
    SpectrumResult r;
    r.sector = op.sector;
    const double opnorm = A.size() ? A.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
    for (Eigen::Index i = 0; i < es.values.size(); ++i) {
        const double res = (A * es.vectors.col(i) - es.values(i) * es.vectors.col(i)).norm();
        r.max_residual = std::max(r.max_residual, opnorm > 0 ? res / opnorm : res);
    }
    const double tol = degeneracy_tol * std::max(1.0, opnorm);
    for (Eigen::Index i = 0; i < es.values.size();) {
        Eigen::Index j = i + 1;
        double sum = es.values(i);
        while (j < es.values.size() && es.values(j) - es.values(j - 1) <= tol) sum += es.values(j++);
        r.eigenvalues.push_back(sum / static_cast<double>(j - i));
        r.multiplicities.push_back(static_cast<int>(j - i));
        i = j;
    }
    return r;
}

}  // namespace icestr
