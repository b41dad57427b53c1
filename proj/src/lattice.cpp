#include "icestring/lattice.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "icestring/errors.hpp"
#include "icestring/phase.hpp"

namespace icestr {

void LatticeSpec::validate() const {
    if (m < 1 || n < 1) throw DimensionError("lattice needs m >= 1 and n >= 1");
    if (!std::isfinite(e)) throw DimensionError("coupling must be finite");
}

EdgeColouring::EdgeColouring(int rows, int cols) : m(rows), n(cols) {
    if (rows < 1 || cols < 1) throw DimensionError("colouring needs positive dimensions");
    horizontal.assign(static_cast<std::size_t>(rows) * cols, 0);
    vertical.assign(static_cast<std::size_t>(rows) * cols, 0);
}

std::size_t EdgeColouring::idx(int i, int j) const {
    return static_cast<std::size_t>(floor_mod(i, m)) * n + static_cast<std::size_t>(floor_mod(j, n));
}

std::size_t EdgeColouring::coloured_count() const {
    std::size_t k = 0;
    for (auto x : horizontal) k += x;
    for (auto x : vertical) k += x;
    return k;
}

int vertex_type(std::uint8_t pattern) {
    for (std::size_t t = 0; t < kVertexTypes.size(); ++t)
        if (kVertexTypes[t] == pattern) return static_cast<int>(t) + 1;
    return 0;
}

namespace {

void check_shape(const EdgeColouring& c, const LatticeSpec& spec) {
    spec.validate();
    const auto cells = static_cast<std::size_t>(spec.m) * spec.n;
    if (c.m != spec.m || c.n != spec.n || c.horizontal.size() != cells || c.vertical.size() != cells)
        throw DimensionError("colouring shape does not match lattice " + std::to_string(spec.m) + "x" +
                             std::to_string(spec.n));
    for (std::size_t k = 0; k < cells; ++k)
        if (c.horizontal[k] > 1 || c.vertical[k] > 1) throw DimensionError("edge values must be 0 or 1");
}

struct Vertex {
    int L, R, D, U;
    bool ok;
};

// Edge values around vertex (i,j). On the strip the inflow edges left of
// column 0 and below row 0 are not part of the lattice; they are filled in
// with the first completion that makes the vertex allowed.
Vertex vertex_at(const EdgeColouring& c, Topology topo, int i, int j) {
    Vertex v{0, c.sigma(i, j), 0, c.eta(i, j), false};
    const bool strip = topo == Topology::OpenStrip;
    const bool missL = strip && j == 0;
    const bool missD = strip && i == 0;
    const int knownL = missL ? 0 : c.sigma(i, j - 1);
    const int knownD = missD ? 0 : c.eta(i - 1, j);
    for (int l = 0; l <= (missL ? 1 : 0); ++l) {
        for (int d = 0; d <= (missD ? 1 : 0); ++d) {
            const int L = missL ? l : knownL;
            const int D = missD ? d : knownD;
            const auto bits = static_cast<std::uint8_t>(L << 3 | v.R << 2 | D << 1 | v.U);
            if (vertex_type(bits) != 0) return {L, v.R, D, v.U, true};
        }
    }
    v.L = knownL;
    v.D = knownD;
    return v;
}

}  // namespace

bool check_ice_condition(const EdgeColouring& c, const LatticeSpec& spec) {
    check_shape(c, spec);
    for (int i = 0; i < spec.m; ++i)
        for (int j = 0; j < spec.n; ++j)
            if (!vertex_at(c, spec.topology, i, j).ok) return false;
    return true;
}

namespace {

// successor of each coloured edge along its string, -1 if it leaves the strip
std::vector<int> successors(const EdgeColouring& c, const LatticeSpec& spec) {
    const int m = spec.m, n = spec.n, cells = m * n;
    const bool strip = spec.topology == Topology::OpenStrip;
    std::vector<int> next(2 * cells, -1);
    auto h_id = [&](int i, int j) { return floor_mod(i, m) * n + floor_mod(j, n); };
    auto v_id = [&](int i, int j) { return cells + floor_mod(i, m) * n + floor_mod(j, n); };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            if (c.sigma(i, j) && !(strip && j + 1 == n)) {
                const Vertex v = vertex_at(c, spec.topology, i, j + 1);
                // arriving from the left: go up unless this is a lone horizontal crossing
                const bool up = v.U && (v.D || !v.R);
                next[h_id(i, j)] = up ? v_id(i, j + 1) : h_id(i, j + 1);
            }
            if (c.eta(i, j) && !(strip && i + 1 == m)) {
                const Vertex v = vertex_at(c, spec.topology, i + 1, j);
                const bool right = v.R && (v.L || !v.U);
                next[v_id(i, j)] = right ? h_id(i + 1, j) : v_id(i + 1, j);
            }
        }
    }
    return next;
}

}  // namespace

int count_strings(const EdgeColouring& c, const LatticeSpec& spec) {
    if (!check_ice_condition(c, spec)) throw InvalidStateError("colouring violates the ice condition");
    const int cells = spec.m * spec.n;
    std::vector<int> colour(2 * cells);
    for (int k = 0; k < cells; ++k) {
        colour[k] = c.horizontal[k];
        colour[cells + k] = c.vertical[k];
    }
    const std::vector<int> next = successors(c, spec);
    std::vector<int> has_pred(2 * cells, 0);
    for (int e = 0; e < 2 * cells; ++e)
        if (colour[e] && next[e] >= 0) has_pred[next[e]] = 1;

    std::vector<char> seen(2 * cells, 0);
    int strings = 0;
    auto walk = [&](int e) {
        while (e >= 0 && !seen[e]) {
            seen[e] = 1;
            e = next[e];
        }
    };
    for (int e = 0; e < 2 * cells; ++e) {
        if (colour[e] && !has_pred[e]) {
            ++strings;
            walk(e);
        }
    }
    for (int e = 0; e < 2 * cells; ++e) {
        if (colour[e] && !seen[e]) {
            ++strings;
            walk(e);
        }
    }
    return strings;
}

WindingClass winding_class(const EdgeColouring& c, const LatticeSpec& spec) {
    if (spec.topology != Topology::Torus) throw InvalidStateError("winding is defined on the torus only");
    if (count_strings(c, spec) != 1) throw InvalidStateError("winding class needs exactly one string");
    WindingClass w;
    for (int i = 0; i < spec.m; ++i) w.mbar += c.sigma(i, 0);
    for (int j = 0; j < spec.n; ++j) w.nbar += c.eta(0, j);
    return w;
}

EdgeColouring translate(const EdgeColouring& c, int di, int dj) {
    EdgeColouring t(c.m, c.n);
    for (int i = 0; i < c.m; ++i) {
        for (int j = 0; j < c.n; ++j) {
            t.set_sigma(i + di, j + dj, c.sigma(i, j));
            t.set_eta(i + di, j + dj, c.eta(i, j));
        }
    }
    return t;
}

// ---- states and enumeration ----

bool FixedEndsState::valid() const {
    if (N < 0) return false;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        if (lambda[i] < 0 || lambda[i] > N) return false;
        if (i > 0 && lambda[i] < lambda[i - 1]) return false;
    }
    return true;
}

std::vector<int> Torus12State::nbar() const {
    std::vector<int> out(base.lambda.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = base.lambda[i] + static_cast<int>(i);
    return out;
}

std::vector<int> Torus12State::differences() const {
    const std::vector<int> nb = nbar();
    std::vector<int> d;
    for (std::size_t i = 1; i < nb.size(); ++i) d.push_back(nb[i] - nb[0]);
    return d;
}

std::uint64_t binomial(std::int64_t n, std::int64_t k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned __int128>(n - k + i) / static_cast<unsigned __int128>(i);
        if (r > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(r);
}

std::uint64_t fixed_ends_dimension(int N, int M) { return binomial(N + M, M); }

std::uint64_t torus11_dimension(int m, int n) {
    const std::uint64_t c = binomial(m + n - 1, m);
    if (c > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(m))
        return std::numeric_limits<std::uint64_t>::max();
    return c * static_cast<std::uint64_t>(m);
}

namespace {

void require_cap(std::uint64_t size, std::size_t cap, const char* what) {
    if (size > cap)
        throw CapacityError(std::string(what) + " basis of size " + std::to_string(size) + " exceeds cap " +
                            std::to_string(cap));
}

}  // namespace

std::vector<Lambda> weak_chains(int len, int lo, int hi, std::size_t cap) {
    if (len < 0) throw DimensionError("negative chain length");
    std::vector<Lambda> out;
    if (len == 0) {
        out.emplace_back();
        return out;
    }
    if (hi < lo) return out;
    require_cap(binomial(hi - lo + len, len), cap, "chain");
    Lambda cur(len, lo);
    while (true) {
        out.push_back(cur);
        int i = len - 1;
        while (i >= 0 && cur[i] == hi) --i;
        if (i < 0) break;
        ++cur[i];
        for (int k = i + 1; k < len; ++k) cur[k] = cur[i];
    }
    return out;
}

std::vector<FixedEndsState> enumerate_fixed_ends(int N, int M, std::size_t cap) {
    if (N < 0 || M < 0) throw DimensionError("fixed ends need N >= 0 and M >= 0");
    require_cap(fixed_ends_dimension(N, M), cap, "fixed-ends");
    std::vector<FixedEndsState> out;
    for (auto& l : weak_chains(M, 0, N, cap)) out.push_back({N, std::move(l)});
    return out;
}

std::vector<Torus11State> enumerate_torus11(int m, int n, std::size_t cap) {
    if (m < 1 || n < 1) throw DimensionError("torus needs m >= 1 and n >= 1");
    require_cap(torus11_dimension(m, n), cap, "(1,1)");
    const std::vector<Lambda> chains = weak_chains(m, 1, n, cap);
    std::vector<Torus11State> out;
    out.reserve(chains.size() * static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a)
        for (const auto& l : chains) out.push_back({a, l});
    return out;
}

bool violates_exclusion(const Lambda& lambda, int m) {
    int run = 1;
    for (std::size_t i = 1; i < lambda.size(); ++i) {
        run = lambda[i] == lambda[i - 1] ? run + 1 : 1;
        if (run >= m + 1) return true;
    }
    return false;
}

std::vector<Lambda> torus12_lambdas(int m, int n, std::size_t cap) {
    if (m < 1 || n < 2) throw DimensionError("(1,2) strings need m >= 1 and n >= 2");
    require_cap(binomial(n + 2 * m - 1, 2 * m), cap, "(1,2)");
    std::vector<Lambda> out;
    for (auto& l : weak_chains(2 * m, 1, n, cap))
        if (!violates_exclusion(l, m)) out.push_back(std::move(l));
    return out;
}

std::vector<Torus12State> enumerate_torus12(int m, int n, std::size_t cap) {
    if (m < 1 || n < 2) throw DimensionError("(1,2) strings need m >= 1 and n >= 2");
    require_cap(torus11_dimension(2 * m, n), cap, "(1,2)");
    const std::vector<Lambda> ls = torus12_lambdas(m, n, cap);
    std::vector<Torus12State> out;
    for (int a = 0; a < 2 * m; ++a)
        for (const auto& l : ls) out.push_back({{a, l}});
    return out;
}

bool valid_torus11(const Torus11State& s, int m, int n) {
    if (static_cast<int>(s.lambda.size()) != m || s.alpha < 0 || s.alpha >= m) return false;
    for (std::size_t i = 0; i < s.lambda.size(); ++i) {
        if (s.lambda[i] < 1 || s.lambda[i] > n) return false;
        if (i > 0 && s.lambda[i] < s.lambda[i - 1]) return false;
    }
    return true;
}

bool valid_torus12(const Torus12State& s, int m, int n) {
    if (static_cast<int>(s.base.lambda.size()) != 2 * m || s.base.alpha < 0 || s.base.alpha >= 2 * m) return false;
    Torus11State t = s.base;
    t.alpha = 0;
    if (!valid_torus11(t, 2 * m, n)) return false;
    const std::vector<int> nb = s.nbar();
    const int N = n + 2 * m;
    for (std::size_t i = 0; i < nb.size(); ++i)
        if (nb[i] <= 0 || nb[i] >= N || (i > 0 && nb[i] <= nb[i - 1])) return false;
    return !violates_exclusion(s.base.lambda, m);
}

Lambda to_strict(const Lambda& weak) {
    Lambda s(weak.size());
    for (std::size_t j = 0; j < weak.size(); ++j) s[j] = weak[j] + static_cast<int>(j) + 1;
    return s;
}

Lambda to_weak(const Lambda& strict) {
    Lambda w(strict.size());
    for (std::size_t j = 0; j < strict.size(); ++j) w[j] = strict[j] - static_cast<int>(j) - 1;
    return w;
}

EdgeColouring fixed_ends_colouring(const FixedEndsState& s) {
    if (!s.valid()) throw InvalidStateError("fixed-ends state is not weakly increasing in [0, N]");
    const int M = s.M(), N = s.N;
    EdgeColouring c(M + 1, N + 1);
    for (int r = 0; r <= M; ++r) {
        const int from = r == 0 ? 0 : s.lambda[r - 1];
        const int to = r == M ? N + 1 : s.lambda[r];
        for (int j = from; j < to; ++j) c.set_sigma(r, j, 1);
        if (r > 0) c.set_eta(r - 1, s.lambda[r - 1], 1);
    }
    return c;
}

EdgeColouring torus11_colouring(const Torus11State& s, int n) {
    const int m = static_cast<int>(s.lambda.size());
    if (!valid_torus11(s, m, n)) throw InvalidStateError("invalid (1,1) state");
    EdgeColouring c(m, n);
    for (int i = 0; i < m; ++i) {
        const int row = s.alpha + i;
        c.set_eta(row, s.lambda[i], 1);
        const int next = i + 1 < m ? s.lambda[i + 1] : s.lambda[0] + n;
        for (int j = s.lambda[i]; j < next; ++j) c.set_sigma(row + 1, j, 1);
    }
    return c;
}

}  // namespace icestr
