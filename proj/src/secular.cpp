#include "icestring/secular.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <set>

#include "icestring/eigen.hpp"
#include "icestring/errors.hpp"
#include "icestring/hamiltonian.hpp"

namespace icestr {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// strictly increasing tuples of length len drawn from [lo, hi], lexicographic
std::vector<std::vector<std::int64_t>> combinations(int len, std::int64_t lo, std::int64_t hi) {
    std::vector<std::vector<std::int64_t>> out;
    if (len == 0) {
        out.emplace_back();
        return out;
    }
    if (hi - lo + 1 < len) return out;
    std::vector<std::int64_t> cur(len);
    std::iota(cur.begin(), cur.end(), lo);
    while (true) {
        out.push_back(cur);
        int i = len - 1;
        while (i >= 0 && cur[i] == hi - (len - 1 - i)) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < len; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

cplx upper_dot(const Eigen::VectorXcd& lower, const Eigen::VectorXcd& zeta) {
    // D^j(k) = conj(D_j(k))
    return lower.dot(zeta);
}

}  // namespace

cplx d_full(std::span<const std::int64_t> nbar, std::span<const std::int64_t> ks, std::int64_t N) {
    if (nbar.size() != ks.size()) throw DimensionError("D needs as many coordinates as wave numbers");
    const auto L = static_cast<Eigen::Index>(ks.size());
    Eigen::MatrixXcd A(L, L);
    for (Eigen::Index r = 0; r < L; ++r)
        for (Eigen::Index c = 0; c < L; ++c) A(r, c) = unit_root(floor_mod(nbar[c], N) * floor_mod(ks[r], N), N);
    return determinant(A);
}

cplx d_det(std::span<const std::int64_t> coords, std::span<const std::int64_t> ks, std::int64_t N) {
    if (coords.size() + 1 != ks.size()) throw DimensionError("D needs |coords| = |ks| - 1");
    std::vector<std::int64_t> nb(ks.size());
    nb[0] = 0;
    std::copy(coords.begin(), coords.end(), nb.begin() + 1);
    return d_full(nb, ks, N);
}

std::pair<int, int> secular_b_range(int m, int n) { return {-n + 1 + m * (2 * m - 3), m * (2 * m - 3)}; }

double secular_phi(int m, int n, int a, int b) {
    const double N = n + 2 * m;
    return b / (n * N) - static_cast<double>(a) / (n * m) - (2.0 * m - 3.0) / (2.0 * n);
}

int secular_momentum_label(int m, int n, int a, int b) {
    return static_cast<int>(floor_mod(2 * a + m * (2 * m - 3) - b, n));
}

cplx energy_12_complex(std::span<const std::int64_t> ks, int a, int b, int m, int n) {
    if (static_cast<int>(ks.size()) != 2 * m) throw DimensionError("energy needs 2m wave numbers");
    const std::int64_t N = n + 2 * m;
    const cplx rho = std::polar(1.0, kTwoPi * secular_phi(m, n, a, b));
    cplx E = 0.0;
    for (auto k : ks) {
        const cplx w = unit_root(k, N);
        E += rho * w + std::conj(rho) * std::conj(w);
    }
    return E;
}

double energy_12(std::span<const std::int64_t> ks, int a, int b, int m, int n) {
    const cplx E = energy_12_complex(ks, a, b, m, n);
    if (std::abs(E.imag()) > 1e-12 * std::max(1.0, std::abs(E.real())))
        throw InvalidOperatorError("energy has an imaginary residue above 1e-12");
    return E.real();
}

// ---- SecularProblem ----

SecularProblem::SecularProblem(int m, int n, int a, int b) : m_(m), n_(n), a_(a), b_(b), N_(n + 2 * m) {
    if (m < 1 || n < 2) throw DimensionError("(1,2) strings need m >= 1 and n >= 2");
    if (a < 0 || a >= m) throw DimensionError("sector a must lie in [0, m)");
    const auto [blo, bhi] = secular_b_range(m, n);
    if (b < blo || b > bhi) throw DimensionError("sector b outside [" + std::to_string(blo) + ", " + std::to_string(bhi) + "]");
    phi_ = secular_phi(m, n, a, b);
    rho_ = std::polar(1.0, kTwoPi * phi_);
    p_ = std::polar(1.0, kTwoPi * (2.0 * m * phi_ + static_cast<double>(b) / N_));

    for (auto& c : combinations(m - 1, m + 2, N_ - 2)) indices_.emplace_back(c.begin(), c.end());

    for (int r = m + 2; r <= 2 * m; ++r) {
        std::vector<std::int64_t> head(r - 1);
        std::iota(head.begin(), head.end(), 1);
        if (r == 2 * m) {
            deep_.push_back(head);
            continue;
        }
        for (auto& rest : combinations(2 * m - r, r + 1, N_ - 2)) {
            std::vector<std::int64_t> q = head;
            q.insert(q.end(), rest.begin(), rest.end());
            deep_.push_back(q);
        }
    }

    const auto dim = static_cast<Eigen::Index>(indices_.size());
    std::map<std::vector<std::int64_t>, int> set_id;
    for (auto& head : combinations(2 * m - 1, 0, N_ - 1)) {
        Term t;
        t.ks = head;
        t.ks.push_back(b - std::accumulate(head.begin(), head.end(), std::int64_t{0}));
        t.energy = energy_12(t.ks, a, b, m, n);
        std::vector<std::int64_t> res;
        for (auto k : t.ks) res.push_back(floor_mod(k, N_));
        std::sort(res.begin(), res.end());
        if (std::adjacent_find(res.begin(), res.end()) == res.end()) {
            auto [it, fresh] = set_id.try_emplace(res, static_cast<int>(sets_.size()));
            if (fresh) {
                KSet s;
                s.ks = t.ks;
                s.energy = t.energy;
                sets_.push_back(std::move(s));
            }
            t.set = it->second;
            ++sets_[t.set].copies;
        }
        t.lower.resize(dim);
        if (t.set >= 0)
            for (Eigen::Index i = 0; i < dim; ++i) t.lower(i) = d_det(row_coords(i), t.ks, N_);
        else
            t.lower.setZero();
        terms_.push_back(std::move(t));
    }

    for (auto& s : sets_) {
        s.lower.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i) s.lower(i) = d_det(row_coords(i), s.ks, N_);
        s.deep.resize(static_cast<Eigen::Index>(deep_.size()));
        for (std::size_t q = 0; q < deep_.size(); ++q) s.deep(q) = d_det(deep_[q], s.ks, N_);
    }

    {
        // the zeta block only matters on the span of all D-vectors
        Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(dim, dim);
        for (const auto& s : sets_) G += static_cast<double>(s.copies) * s.lower * s.lower.adjoint();
        G = 0.5 * (G + G.adjoint()).eval();
        const EigenSystem gs = eigh(G, true);
        const double top = gs.values.size() ? std::max(gs.values.maxCoeff(), 0.0) : 0.0;
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < gs.values.size(); ++i)
            if (gs.values(i) > 1e-10 * top) keep.push_back(i);
        range_.resize(dim, static_cast<Eigen::Index>(keep.size()));
        for (std::size_t c = 0; c < keep.size(); ++c) range_.col(c) = gs.vectors.col(keep[c]);
    }

    // deep block: generalized problem on span{D(q|K)} with K-diagonal energies
    if (!deep_.empty() && !sets_.empty()) {
        const auto nq = static_cast<Eigen::Index>(deep_.size());
        Eigen::MatrixXcd V(static_cast<Eigen::Index>(sets_.size()), nq);
        Eigen::VectorXd ek(static_cast<Eigen::Index>(sets_.size()));
        for (std::size_t k = 0; k < sets_.size(); ++k) {
            V.row(k) = sets_[k].deep.transpose();
            ek(k) = sets_[k].energy;
        }
        Eigen::MatrixXcd G = V.adjoint() * V;
        G = 0.5 * (G + G.adjoint()).eval();
        Eigen::MatrixXcd Mx = V.adjoint() * ek.asDiagonal() * V;
        Mx = 0.5 * (Mx + Mx.adjoint()).eval();
        const EigenSystem gs = eigh(G, true);
        const double top = std::max(1.0, gs.values.size() ? gs.values.maxCoeff() : 0.0);
        std::vector<Eigen::Index> keep;
        for (Eigen::Index i = 0; i < gs.values.size(); ++i)
            if (gs.values(i) > 1e-9 * top) keep.push_back(i);
        if (!keep.empty()) {
            Eigen::MatrixXcd U(nq, static_cast<Eigen::Index>(keep.size()));
            for (std::size_t c = 0; c < keep.size(); ++c)
                U.col(c) = gs.vectors.col(keep[c]) / std::sqrt(gs.values(keep[c]));
            Eigen::MatrixXcd R = U.adjoint() * Mx * U;
            R = 0.5 * (R + R.adjoint()).eval();
            const EigenSystem rs = eigh(R, false);
            for (Eigen::Index i = 0; i < rs.values.size(); ++i) deep_spec_.push_back(rs.values(i));
            // values that coincide with a free energy are reproduced only to ~1e-10; pin them
            for (double& d : deep_spec_)
                for (const auto& s : sets_)
                    if (std::abs(d - s.energy) < 1e-8 * std::max(1.0, std::abs(d))) d = s.energy;
        }
    }
}

std::vector<std::int64_t> SecularProblem::row_coords(std::size_t row) const {
    std::vector<std::int64_t> c(static_cast<std::size_t>(m_));
    std::iota(c.begin(), c.end(), 1);
    c.insert(c.end(), indices_[row].begin(), indices_[row].end());
    return c;
}

Eigen::MatrixXcd SecularProblem::A_without(double E, const std::vector<int>& skip) const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
    // every ordering of a residue set has D_i(k) = +-D_i(K), so terms pair up per set
    for (std::size_t k = 0; k < sets_.size(); ++k) {
        if (std::find(skip.begin(), skip.end(), static_cast<int>(k)) != skip.end()) continue;
        const KSet& s = sets_[k];
        const double w = s.copies / (E - s.energy);
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = i; j < dim; ++j) A(i, j) += w * s.lower(i) * std::conj(s.lower(j));
    }
    for (Eigen::Index i = 0; i < dim; ++i) {
        A(i, i) = A(i, i).real();
        for (Eigen::Index j = i + 1; j < dim; ++j) A(j, i) = std::conj(A(i, j));
    }
    return A;
}

Eigen::MatrixXcd SecularProblem::A(double E, double guard) const {
    for (const auto& t : terms_) {
        if (t.set < 0) continue;
        if (std::abs(E - t.energy) < guard && t.lower.cwiseAbs().maxCoeff() > 1e-9) throw PoleGuardError(E, t.energy);
    }
    return A_without(E, {});
}

Eigen::MatrixXcd SecularProblem::deep_rows_without(double E, const std::vector<int>& skip) const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    const auto nq = static_cast<Eigen::Index>(deep_.size());
    Eigen::MatrixXcd W = Eigen::MatrixXcd::Zero(nq, dim);
    for (std::size_t k = 0; k < sets_.size(); ++k) {
        if (std::find(skip.begin(), skip.end(), static_cast<int>(k)) != skip.end()) continue;
        const KSet& s = sets_[k];
        W += (s.copies / (E - s.energy)) * s.deep * s.lower.adjoint();
    }
    return W;
}

std::vector<int> SecularProblem::poles_near(double E, double radius) const {
    std::vector<int> out;
    for (std::size_t k = 0; k < sets_.size(); ++k)
        if (std::abs(E - sets_[k].energy) < radius) out.push_back(static_cast<int>(k));
    return out;
}

Eigen::MatrixXcd SecularProblem::bordered(double E, const std::vector<int>& poles) const {
    const auto dim = static_cast<Eigen::Index>(dimension());
    const auto np = static_cast<Eigen::Index>(poles.size());
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Zero(dim + np, dim + np);
    X.topLeftCorner(dim, dim) = A_without(E, poles);
    for (Eigen::Index c = 0; c < np; ++c) {
        const KSet& s = sets_[poles[c]];
        X.block(0, dim + c, dim, 1) = s.lower;
        X.block(dim + c, 0, 1, dim) = s.lower.adjoint();
        X(dim + c, dim + c) = -(E - s.energy) / s.copies;
    }
    return X;
}

int SecularProblem::count_below(double E) const {
    // Inertia of A(E) through the bordered matrix: poles close to E are moved
    // into a diagonal block, so nothing blows up near them.
    const std::vector<int> poles = poles_near(E, 0.05);
    const Eigen::MatrixXcd X = bordered(E, poles);
    const auto dim = static_cast<Eigen::Index>(dimension());
    const auto r = range_.cols();
    const auto np = static_cast<Eigen::Index>(poles.size());
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(dim + np, r + np);
    T.topLeftCorner(dim, r) = range_;
    for (Eigen::Index c = 0; c < np; ++c) T(dim + c, r + c) = 1.0;
    Eigen::MatrixXcd Xr = T.adjoint() * X * T;
    Xr = 0.5 * (Xr + Xr.adjoint()).eval();
    // congruence by a positive diagonal keeps the inertia and balances the rows
    Eigen::VectorXd sc(Xr.rows());
    for (Eigen::Index i = 0; i < Xr.rows(); ++i) {
        const double rmax = Xr.row(i).cwiseAbs().maxCoeff();
        sc(i) = rmax > 0 ? 1.0 / std::sqrt(rmax) : 1.0;
    }
    Xr = (sc.asDiagonal() * Xr * sc.asDiagonal()).eval();
    const EigenSystem xs = eigh(Xr, false);
    int pos = 0;
    for (Eigen::Index i = 0; i < xs.values.size(); ++i)
        if (xs.values(i) > 0.0) ++pos;
    int above = 0;
    for (int k : poles)
        if (sets_[k].energy > E) ++above;
    int h0 = 0;
    for (const auto& s : sets_)
        if (s.energy < E) ++h0;
    int deep = 0;
    for (double d : deep_spec_)
        if (d < E) ++deep;
    return h0 - (pos - above) - deep;
}

std::vector<double> SecularProblem::critical_points() const {
    std::vector<double> c;
    for (const auto& s : sets_) c.push_back(s.energy);
    c.insert(c.end(), deep_spec_.begin(), deep_spec_.end());
    std::sort(c.begin(), c.end());
    std::vector<double> out;
    for (double x : c)
        if (out.empty() || x - out.back() > 1e-12 * std::max(1.0, std::abs(x))) out.push_back(x);
    return out;
}

double SecularProblem::certificate(double E, double pole_radius) const {
    const std::vector<int> poles = poles_near(E, pole_radius);
    const Eigen::MatrixXcd X = poles.empty() ? A_without(E, {}) : bordered(E, poles);
    // Rows are scaled by the size their entries would have without
    // cancellation, so an A that vanishes identically certifies as 0.
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXd bound = Eigen::MatrixXd::Zero(X.rows(), X.cols());
    for (std::size_t k = 0; k < sets_.size(); ++k) {
        if (std::find(poles.begin(), poles.end(), static_cast<int>(k)) != poles.end()) continue;
        const Eigen::VectorXd l = sets_[k].lower.cwiseAbs();
        bound.topLeftCorner(dim, dim) += (l * l.transpose()) * (sets_[k].copies / std::abs(E - sets_[k].energy));
    }
    for (std::size_t c = 0; c < poles.size(); ++c) {
        const KSet& k = sets_[poles[c]];
        const auto at = dim + static_cast<Eigen::Index>(c);
        bound.block(0, at, dim, 1) = k.lower.cwiseAbs();
        bound.block(at, 0, 1, dim) = k.lower.cwiseAbs().transpose();
        bound(at, at) = std::abs(E - k.energy) / k.copies;
    }
    Eigen::MatrixXcd S = X;
    for (Eigen::Index i = 0; i < S.rows(); ++i) {
        const double r = bound.row(i).maxCoeff();
        if (r == 0.0) return 0.0;
        S.row(i) /= r;
    }
    return std::abs(determinant(S));
}

SecularMatrix build_A(double E, int m, int n, int a, int b, double guard) {
    const SecularProblem P(m, n, a, b);
    SecularMatrix s{m, n, a, b, E, P.indices(), P.A(E, guard)};
    return s;
}

cplx det_A(double E, int m, int n, int a, int b, bool normalized) {
    const SecularProblem P(m, n, a, b);
    const Eigen::MatrixXcd A = P.A(E);
    return normalized ? normalized_determinant(A) : determinant(A);
}

// ---- roots ----

namespace {

struct Root {
    double E;
    int multiplicity;
};

void bisect(const SecularProblem& P, double lo, int clo, double hi, int chi, std::vector<Root>& out) {
    if (chi == clo) return;
    if (hi - lo <= 1e-13 * std::max(1.0, std::abs(lo))) {
        out.push_back({0.5 * (lo + hi), chi - clo});
        return;
    }
    const double mid = 0.5 * (lo + hi);
    const int cm = P.count_below(mid);
    bisect(P, lo, clo, mid, cm, out);
    bisect(P, mid, cm, hi, chi, out);
}

SecularSolution normalize(SecularSolution s) {
    double zmax = 0.0, cmax = 0.0;
    cplx zpiv = 1.0, cpiv = 1.0;
    for (const auto& z : s.zeta)
        if (std::abs(z) > zmax) zmax = std::abs(z), zpiv = z;
    for (const auto& c : s.pole_weights)
        if (std::abs(c) > cmax) cmax = std::abs(c), cpiv = c;
    const cplx piv = zmax > 1e-8 * std::max(zmax, cmax) ? zpiv : cpiv;
    for (auto& z : s.zeta) z /= piv;
    for (auto& c : s.pole_weights) c /= piv;
    return s;
}

// Psi at fixed difference coordinates for many (zeta, pole weight) columns at once
struct PsiTable {
    Eigen::MatrixXcd Ds;  // D per (coordinate, set)
    Eigen::VectorXcd pre;
};

PsiTable psi_table(const SecularProblem& P, const std::vector<std::vector<std::int64_t>>& at) {
    const auto nc = static_cast<Eigen::Index>(at.size());
    PsiTable t{Eigen::MatrixXcd::Zero(nc, static_cast<Eigen::Index>(P.sets().size())), Eigen::VectorXcd(nc)};
    for (Eigen::Index c = 0; c < nc; ++c) {
        const auto& x = at[static_cast<std::size_t>(c)];
        const std::int64_t total = std::accumulate(x.begin(), x.end(), std::int64_t{0});
        t.pre(c) = std::polar(1.0, kTwoPi * P.phi() * static_cast<double>(total));
        for (std::size_t k = 0; k < P.sets().size(); ++k) t.Ds(c, static_cast<Eigen::Index>(k)) = d_det(x, P.sets()[k].ks, P.N());
    }
    return t;
}

Eigen::MatrixXcd psi_values(const SecularProblem& P, const PsiTable& t, double E, const std::vector<int>& poles,
                            const Eigen::MatrixXcd& B) {
    const auto dim = static_cast<Eigen::Index>(P.dimension());
    const auto ns = static_cast<Eigen::Index>(P.sets().size());
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(ns, B.cols());
    for (Eigen::Index k = 0; k < ns; ++k) {
        const auto& K = P.sets()[static_cast<std::size_t>(k)];
        if (std::find(poles.begin(), poles.end(), static_cast<int>(k)) != poles.end()) continue;
        C.row(k) = (K.lower.adjoint() * B.topRows(dim)) * (K.copies / (E - K.energy));
    }
    Eigen::MatrixXcd out = t.Ds * C;
    for (std::size_t c = 0; c < poles.size(); ++c)
        out += t.Ds.col(poles[c]) * B.row(dim + static_cast<Eigen::Index>(c));
    return t.pre.asDiagonal() * out;
}

}  // namespace

RootScan find_roots(const SecularProblem& P, const RootOptions& opt) {
    RootScan scan;
    const double lo = opt.lo.value_or(-4.0 * P.m() - 1.0);
    const double hi = opt.hi.value_or(4.0 * P.m() + 1.0);
    if (!(hi > lo)) throw DimensionError("root window must have hi > lo");
    const double step = opt.step > 0 ? opt.step : (hi - lo) / 2000.0;

    const std::vector<double> crit = P.critical_points();
    // Spurious zeros of det A sit on the deep eigenvalues but are only
    // reproduced to ~1e-10 there, so those points get a wider window.
    std::vector<double> width(crit.size());
    for (std::size_t k = 0; k < crit.size(); ++k) {
        bool deep = false;
        for (double d : P.deep_spectrum())
            if (std::abs(d - crit[k]) <= 1e-12 * std::max(1.0, std::abs(d))) deep = true;
        width[k] = (deep ? 1e-7 : 1e-10) * std::max(1.0, std::abs(crit[k]));
    }
    std::vector<std::pair<double, int>> pts;  // (E, critical index or -1)
    const auto steps = static_cast<long>(std::ceil((hi - lo) / step));
    for (long i = 0; i <= steps; ++i) {
        const double x = std::min(hi, lo + static_cast<double>(i) * step);
        bool clash = false;
        for (std::size_t k = 0; k < crit.size(); ++k)
            if (std::abs(x - crit[k]) < 4 * width[k]) clash = true;
        if (!clash) pts.push_back({x, -1});
    }
    for (std::size_t k = 0; k < crit.size(); ++k) {
        if (crit[k] < lo || crit[k] > hi) continue;
        pts.push_back({crit[k] - width[k], static_cast<int>(k)});
        pts.push_back({crit[k] + width[k], static_cast<int>(k)});
    }
    std::sort(pts.begin(), pts.end());

    std::vector<int> counts(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) counts[i] = P.count_below(pts[i].first);

    std::vector<Root> roots;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (counts[i + 1] < counts[i])
            scan.warnings.push_back("eigenvalue count decreased near E = " + std::to_string(pts[i].first));
        if (counts[i + 1] <= counts[i]) continue;
        const int ci = pts[i].second, cj = pts[i + 1].second;
        if (ci >= 0 && ci == cj) {
            roots.push_back({crit[ci], counts[i + 1] - counts[i]});
            continue;
        }
        bisect(P, pts[i].first, counts[i], pts[i + 1].first, counts[i + 1], roots);
    }

    // a degenerate root can be bracketed from both sides; treat it as one
    std::sort(roots.begin(), roots.end(), [](const Root& x, const Root& y) { return x.E < y.E; });
    std::vector<Root> merged;
    for (const Root& r : roots) {
        if (!merged.empty() && r.E - merged.back().E <= 1e-11 * std::max(1.0, std::abs(r.E))) {
            Root& last = merged.back();
            last.E = (last.E * last.multiplicity + r.E * r.multiplicity) / (last.multiplicity + r.multiplicity);
            last.multiplicity += r.multiplicity;
        } else {
            merged.push_back(r);
        }
    }
    roots = std::move(merged);

    const auto dim = static_cast<Eigen::Index>(P.dimension());
    double scale = 1e-300;
    for (const auto& s : P.sets()) scale = std::max(scale, s.copies * s.lower.squaredNorm());

    // difference coordinates of the allowed and forbidden states
    std::set<std::vector<std::int64_t>> allowed_set, forbidden_set;
    for (const auto& l : weak_chains(2 * P.m(), 1, P.n())) {
        std::vector<std::int64_t> d;
        for (std::size_t i = 1; i < l.size(); ++i) d.push_back(l[i] + static_cast<std::int64_t>(i) - l[0]);
        (violates_exclusion(l, P.m()) ? forbidden_set : allowed_set).insert(d);
    }
    const std::vector<std::vector<std::int64_t>> allowed(allowed_set.begin(), allowed_set.end());
    const std::vector<std::vector<std::int64_t>> forbidden(forbidden_set.begin(), forbidden_set.end());
    std::optional<PsiTable> allowed_tab, forbidden_tab;  // built on first use

    auto trial = [&](double E, const std::vector<int>& poles, const Eigen::VectorXcd& v) {
        SecularSolution s;
        s.E = E;
        s.pole_sets = poles;
        for (Eigen::Index i = 0; i < dim; ++i) s.zeta.push_back(v(i));
        for (Eigen::Index c = dim; c < v.size(); ++c) s.pole_weights.push_back(v(c));
        return s;
    };

    for (const Root& r : roots) {
        const std::vector<int> poles = P.poles_near(r.E, opt.pole_radius);
        const auto np = static_cast<Eigen::Index>(poles.size());
        const Eigen::MatrixXcd X = P.bordered(r.E, poles);
        // zeta restricted to the span of the D-vectors, pole weights free
        const auto rk = P.range().cols();
        Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(dim + np, rk + np);
        T.topLeftCorner(dim, rk) = P.range();
        for (Eigen::Index c = 0; c < np; ++c) T(dim + c, rk + c) = 1.0;
        const int unknowns = static_cast<int>(rk + np);
        if (r.multiplicity > unknowns)
            scan.warnings.push_back("root multiplicity exceeds the unknown count at E = " + std::to_string(r.E));
        const int mu = std::min(r.multiplicity, unknowns);

        Eigen::VectorXd sigma;
        const Eigen::MatrixXcd XT = X * T;
        const Eigen::MatrixXcd all = smallest_right_singular(XT, unknowns, &sigma);
        int nu = 0;
        while (nu < unknowns && sigma(nu) <= 1e-9 * scale) ++nu;
        nu = std::max(nu, mu);
        Eigen::MatrixXcd V = T * all.rightCols(nu);

        if (nu > mu || np > 0) {
            auto values = [&](const Eigen::MatrixXcd& B, bool on_allowed) {
                auto& tab = on_allowed ? allowed_tab : forbidden_tab;
                if (!tab) tab = psi_table(P, on_allowed ? allowed : forbidden);
                return psi_values(P, *tab, r.E, poles, B);
            };
            // Near free energies the bordered null space can carry plane waves
            // that do not vanish on the forbidden states; solve both together.
            if (!forbidden.empty()) {
                const Eigen::MatrixXcd FT = values(T, false);
                const double ff = FT.norm();
                if (ff > 0.0) {
                    // same absolute scale for X as in the null-space count above
                    Eigen::MatrixXcd J(XT.rows() + FT.rows(), unknowns);
                    J << XT / scale, FT / ff;
                    // equilibrate columns: zeta and the pole weights live on different scales
                    Eigen::VectorXd cs(unknowns);
                    for (int q = 0; q < unknowns; ++q) {
                        const double cn = J.col(q).norm();
                        cs(q) = cn > 0 ? 1.0 / cn : 1.0;
                    }
                    Eigen::VectorXd js;
                    const Eigen::MatrixXcd Z = cs.asDiagonal() * smallest_right_singular(J * cs.asDiagonal(), unknowns, &js);
                    int keep = 0;
                    while (keep < unknowns && js(keep) <= 1e-9) ++keep;
                    if (keep >= mu)
                        V = T * Z.rightCols(keep);
                    else
                        scan.warnings.push_back("forbidden-state constraint too strict at E = " + std::to_string(r.E));
                }
            }
            // drop directions that reconstruct to nothing on the allowed states and
            // rotate the rest so each solution is well conditioned there
            {
                const Eigen::MatrixXcd Phi = values(V, true);
                Eigen::JacobiSVD<Eigen::MatrixXcd> svd(Phi, Eigen::ComputeFullV);
                const Eigen::VectorXd& sv = svd.singularValues();
                int live = 0;
                while (live < sv.size() && sv(live) > 1e-8 * sv(0)) ++live;
                live = std::max(live, mu);
                V = V * svd.matrixV().leftCols(live);
            }
            if (V.cols() > mu) {
                scan.warnings.push_back("null space wider than the multiplicity at E = " + std::to_string(r.E));
                V = V.leftCols(mu).eval();
            }
        }
        const double cert = P.certificate(r.E, opt.pole_radius);
        for (int k = 0; k < mu; ++k) {
            const Eigen::VectorXcd v = V.col(k);
            SecularSolution s = trial(r.E, poles, v);
            s.multiplicity = r.multiplicity;
            s.at_pole = np > 0;
            s.null_residual = (X * v).norm() / (scale * v.norm());
            if (s.null_residual > 1e-8) scan.warnings.push_back("weak null vector at E = " + std::to_string(r.E));
            s.residual = cert;
            scan.solutions.push_back(normalize(std::move(s)));
        }
    }
    std::stable_sort(scan.solutions.begin(), scan.solutions.end(),
                     [](const SecularSolution& x, const SecularSolution& y) { return x.E < y.E; });
    return scan;
}

// ---- wavefunction ----

namespace {

template <class DFun>
cplx psi_sum(const SecularProblem& P, const SecularSolution& s, DFun dfun) {
    Eigen::VectorXcd zeta(static_cast<Eigen::Index>(s.zeta.size()));
    for (std::size_t i = 0; i < s.zeta.size(); ++i) zeta(i) = s.zeta[i];
    cplx sum = 0.0;
    for (std::size_t k = 0; k < P.sets().size(); ++k) {
        if (std::find(s.pole_sets.begin(), s.pole_sets.end(), static_cast<int>(k)) != s.pole_sets.end()) continue;
        const auto& K = P.sets()[k];
        const cplx num = upper_dot(K.lower, zeta);
        if (num == cplx(0.0)) continue;
        if (std::abs(s.E - K.energy) < 1e-12) throw PoleGuardError(s.E, K.energy);
        sum += static_cast<double>(K.copies) * dfun(K.ks) * num / (s.E - K.energy);
    }
    for (std::size_t c = 0; c < s.pole_sets.size(); ++c) sum += s.pole_weights[c] * dfun(P.sets()[s.pole_sets[c]].ks);
    return sum;
}

}  // namespace

cplx psi12(const SecularProblem& P, const SecularSolution& s, std::span<const std::int64_t> coords) {
    const auto want = static_cast<std::size_t>(2 * P.m() - 1);
    if (coords.size() == want + 1) {
        if (coords[0] != 0) throw DimensionError("psi12 coordinates must start at 0");
        coords = coords.subspan(1);
    }
    if (coords.size() != want) throw DimensionError("psi12 needs 2m-1 difference coordinates");
    if (s.zeta.size() != P.dimension()) throw DimensionError("zeta length differs from the secular dimension");
    const std::int64_t total = std::accumulate(coords.begin(), coords.end(), std::int64_t{0});
    const cplx pre = std::polar(1.0, kTwoPi * P.phi() * static_cast<double>(total));
    return pre * psi_sum(P, s, [&](const std::vector<std::int64_t>& ks) { return d_det(coords, ks, P.N()); });
}

cplx psi12_direct(const SecularProblem& P, const SecularSolution& s, std::span<const std::int64_t> nbar) {
    if (nbar.size() != static_cast<std::size_t>(2 * P.m())) throw DimensionError("psi12_direct needs 2m coordinates");
    const std::int64_t total = std::accumulate(nbar.begin(), nbar.end(), std::int64_t{0});
    const cplx pre = std::polar(1.0, kTwoPi * P.phi() * static_cast<double>(total));
    return pre * psi_sum(P, s, [&](const std::vector<std::int64_t>& ks) { return d_full(nbar, ks, P.N()); });
}

cplx psi12_state(const SecularProblem& P, const SecularSolution& s, const Lambda& lambda) {
    if (lambda.size() != static_cast<std::size_t>(2 * P.m())) throw DimensionError("state needs 2m jump coordinates");
    std::vector<std::int64_t> diff;
    for (std::size_t i = 1; i < lambda.size(); ++i) diff.push_back(lambda[i] + static_cast<std::int64_t>(i) - lambda[0]);
    return std::pow(P.p(), lambda[0]) * psi12(P, s, diff);
}

cplx orthogonality_sum(std::span<const std::int64_t> ks, std::span<const std::int64_t> ls, std::int64_t N) {
    if (ks.size() != ls.size() || ks.empty()) throw DimensionError("orthogonality needs equal-length tuples");
    std::vector<std::int64_t> neg(ls.size());
    for (std::size_t i = 0; i < ls.size(); ++i) neg[i] = -ls[i];
    cplx sum = 0.0;
    for (auto& c : combinations(static_cast<int>(ks.size()) - 1, 0, N - 1)) sum += d_det(c, neg, N) * d_det(c, ks, N);
    return sum;
}

// ---- m = 2, written out ----

cplx explicit_D_m2(const std::array<std::int64_t, 3>& c, const std::array<std::int64_t, 4>& k, std::int64_t N) {
    cplx a[4][4];
    for (int r = 0; r < 4; ++r) {
        a[r][0] = 1.0;
        for (int j = 0; j < 3; ++j) a[r][j + 1] = std::polar(1.0, kTwoPi * static_cast<double>(c[j] * k[r]) / N);
    }
    auto minor3 = [&](int skip_row) {
        int rows[3], t = 0;
        for (int r = 0; r < 4; ++r)
            if (r != skip_row) rows[t++] = r;
        const auto& x = a[rows[0]];
        const auto& y = a[rows[1]];
        const auto& z = a[rows[2]];
        return x[1] * (y[2] * z[3] - y[3] * z[2]) - x[2] * (y[1] * z[3] - y[3] * z[1]) +
               x[3] * (y[1] * z[2] - y[2] * z[1]);
    };
    cplx det = 0.0;
    for (int r = 0; r < 4; ++r) det += ((r % 2) ? -1.0 : 1.0) * a[r][0] * minor3(r);
    return det;
}

double explicit_energy_m2(const std::array<std::int64_t, 4>& ks, int n, int a, int b) {
    const double N = n + 4;
    const double phi = b / (n * N) - (a + 1.0) / (2.0 * n);
    const cplx rho = std::exp(cplx(0.0, kTwoPi * phi));
    cplx E = 0.0;
    for (auto k : ks) {
        const cplx w = std::exp(cplx(0.0, kTwoPi * static_cast<double>(k) / N));
        E += rho * w + 1.0 / (rho * w);
    }
    return E.real();
}

Eigen::MatrixXcd explicit_A_m2(double E, int n, int a, int b) {
    const std::int64_t N = n + 4;
    const int dim = n - 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
    for (std::int64_t k1 = 0; k1 < N; ++k1)
        for (std::int64_t k2 = k1 + 1; k2 < N; ++k2)
            for (std::int64_t k3 = k2 + 1; k3 < N; ++k3) {
                const std::array<std::int64_t, 4> k{k1, k2, k3, b - k1 - k2 - k3};
                const std::array<std::int64_t, 4> mk{-k1, -k2, -k3, -(b - k1 - k2 - k3)};
                const double den = E - explicit_energy_m2(k, n, a, b);
                for (int mu = 4; mu <= N - 2; ++mu)
                    for (int nu = 4; nu <= N - 2; ++nu)
                        A(mu - 4, nu - 4) += explicit_D_m2({1, 2, mu}, k, N) * explicit_D_m2({1, 2, nu}, mk, N) / den;
            }
    return A;
}

LiteralBlock literal_delta_h_m2(int n, int a) {
    constexpr int m = 2;
    if (n < 2) throw DimensionError("(1,2) strings need n >= 2");
    if (a < 0 || a >= m) throw DimensionError("sector a must lie in [0, 2)");
    const int N = n + 2 * m;
    LiteralBlock blk;
    blk.n = n;
    blk.a = a;
    blk.basis = weak_chains(2 * m, 1, n);
    std::map<Lambda, std::size_t> index;
    for (std::size_t i = 0; i < blk.basis.size(); ++i) {
        index.emplace(blk.basis[i], i);
        blk.forbidden.push_back(violates_exclusion(blk.basis[i], m) ? 1 : 0);
    }

    using Ket = std::vector<Move<Lambda>>;
    auto formal = [&](std::vector<int> nb) -> Ket {
        auto r = canonicalize_nbar(std::move(nb), n, a, m);
        if (!r) return {};
        return {*r};
    };
    auto shift = [&](const Ket& ks, int k) -> Ket {
        Ket out;
        for (const auto& mv : ks) {
            std::vector<int> nb(mv.state.size());
            for (std::size_t i = 0; i < nb.size(); ++i) nb[i] = mv.state[i] + static_cast<int>(i) + k;
            auto r = canonicalize_nbar(nb, n, a, m);
            if (r) out.push_back({r->state, mv.phase * r->phase, 1.0});
        }
        return out;
    };
    auto scaled = [](Ket ks, Phase f) {
        for (auto& mv : ks) mv.phase *= f;
        return ks;
    };
    auto append = [](Ket& to, const Ket& from) { to.insert(to.end(), from.begin(), from.end()); };
    // P^{-1}|0,2,3,x> + |0,1,3,y>
    auto pair = [&](int x, int y) {
        Ket k = shift(formal({0, 2, 3, x}), -1);
        append(k, formal({0, 1, 3, y}));
        return k;
    };
    const Phase minus(1, 2);
    const Phase sign_a(a, 2);

    for (std::size_t col = 0; col < blk.basis.size(); ++col) {
        const Lambda& s = blk.basis[col];
        Ket out;
        for (auto& mv : sector_moves(s, n, a, m)) out.push_back(mv);
        if (blk.forbidden[col]) {
            const int n0 = s[0];
            const int n1 = s[1] + 1 - n0, n2 = s[2] + 2 - n0, n3 = s[3] + 3 - n0;
            Ket dh;
            if (n1 == 1 && n2 == 2) append(dh, scaled(pair(n3 + 1, n3), minus));
            if (n2 == n1 + 1 && n3 == n1 + 2)
                append(dh, scaled(shift(pair(N - n1 + 1, N - n1), n1 - 1), minus * sign_a));
            if (n2 == N - 2 && n3 == N - 1) append(dh, scaled(pair(n1 + 1, n1 + 2), minus));
            if (n1 == 1 && n3 == N - 1) append(dh, scaled(pair(n2 + 2, n2 + 1), minus * sign_a));
            append(out, shift(dh, n0));
        }
        for (const auto& mv : out) {
            auto it = index.find(mv.state);
            if (it == index.end()) throw InvalidStateError("literal dH produced a state outside the basis");
            auto [pos, fresh] = blk.entries.try_emplace({it->second, col}, CycloSum(2));
            pos->second.add(mv.phase);
        }
    }
    return blk;
}

std::array<cplx, 4> boundary_terms_m2(const SecularProblem& P, const SecularSolution& s,
                                      std::span<const std::int64_t> ls) {
    if (P.m() != 2 || ls.size() != 4) throw DimensionError("boundary terms are defined for m = 2");
    const std::int64_t N = P.N();
    const cplx rho = P.rho(), p = P.p();
    const double sg = P.a() % 2 ? -1.0 : 1.0;
    const std::vector<std::int64_t> nl{-ls[0], -ls[1], -ls[2], -ls[3]};
    auto psi = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        const std::int64_t c[3] = {x, y, z};
        return psi12(P, s, c);
    };
    auto S = [&](std::int64_t j) { return -psi(2, 3, j + 1) / p - psi(1, 3, j); };
    auto D = [&](std::int64_t x, std::int64_t y, std::int64_t z) {
        const std::int64_t c[3] = {x, y, z};
        return d_det(c, nl, N);
    };
    auto rp = [&](std::int64_t e) { return std::pow(rho, static_cast<int>(e)); };
    std::array<cplx, 4> t{};
    for (std::int64_t x = 4; x <= N - 2; ++x) t[0] += rp(-3 - x) * D(1, 2, x) * S(x);
    for (std::int64_t x = 2; x <= N - 4; ++x)
        t[1] += sg * std::pow(p, static_cast<int>(x - 1)) * rp(-3 - 3 * x) * D(x, x + 1, x + 2) * S(N - x);
    for (std::int64_t x = 2; x <= N - 4; ++x) t[2] += rp(-x - 2 * N + 3) * D(x, N - 2, N - 1) * S(x + 2);
    for (std::int64_t x = 3; x <= N - 3; ++x) t[3] += sg * rp(-x - N) * D(1, x, N - 1) * S(x + 1);
    return t;
}

}  // namespace icestr
