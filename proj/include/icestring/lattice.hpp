#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace icestr {

enum class Topology { Torus, OpenStrip };

struct LatticeSpec {
    int m = 1;  // rows
    int n = 1;  // columns
    Topology topology = Topology::Torus;
    double e = 1.0;

    void validate() const;
};

// sigma(i,j): horizontal edge from vertex (i,j) to (i,j+1)
// eta(i,j):   vertical edge from vertex (i,j) to (i+1,j)
// Value 1 means coloured.
struct EdgeColouring {
    int m = 0;
    int n = 0;
    std::vector<std::uint8_t> horizontal;
    std::vector<std::uint8_t> vertical;

    EdgeColouring() = default;
    EdgeColouring(int rows, int cols);

    int sigma(int i, int j) const { return horizontal[idx(i, j)]; }
    int eta(int i, int j) const { return vertical[idx(i, j)]; }
    void set_sigma(int i, int j, int v) { horizontal[idx(i, j)] = static_cast<std::uint8_t>(v); }
    void set_eta(int i, int j, int v) { vertical[idx(i, j)] = static_cast<std::uint8_t>(v); }
    std::size_t coloured_count() const;

    auto operator<=>(const EdgeColouring&) const = default;

private:
    std::size_t idx(int i, int j) const;
};

// Vertex patterns as 4-bit words L R D U (L = bit 3), listed as types 1..6.
inline constexpr std::array<std::uint8_t, 6> kVertexTypes = {0b1111, 0b0000, 0b0011, 0b1100, 0b0110, 0b1001};

// 1..6, or 0 when the pattern is not allowed
int vertex_type(std::uint8_t pattern);

bool check_ice_condition(const EdgeColouring& c, const LatticeSpec& spec);
int count_strings(const EdgeColouring& c, const LatticeSpec& spec);

struct WindingClass {
    int mbar = 0;
    int nbar = 0;
    bool operator==(const WindingClass&) const = default;
};

WindingClass winding_class(const EdgeColouring& c, const LatticeSpec& spec);

// periodic translation by (di, dj)
EdgeColouring translate(const EdgeColouring& c, int di, int dj);

// ---- string states ----

inline constexpr std::size_t kDefaultBasisCap = 1000000;

struct FixedEndsState {
    int N = 0;
    std::vector<int> lambda;

    int M() const { return static_cast<int>(lambda.size()); }
    bool valid() const;
    auto operator<=>(const FixedEndsState&) const = default;
};

// alpha in [0, classes), lambda weakly increasing in [1, n]
struct Torus11State {
    int alpha = 0;
    std::vector<int> lambda;
    auto operator<=>(const Torus11State&) const = default;
};

// (1,1)-state of the doubled lattice with 2m jump coordinates
struct Torus12State {
    Torus11State base;

    std::vector<int> nbar() const;
    std::vector<int> differences() const;
    auto operator<=>(const Torus12State&) const = default;
};

using Lambda = std::vector<int>;

// C(n, k) saturating at UINT64_MAX
std::uint64_t binomial(std::int64_t n, std::int64_t k);
std::uint64_t fixed_ends_dimension(int N, int M);
std::uint64_t torus11_dimension(int m, int n);

// all weakly increasing tuples of length len with entries in [lo, hi], lexicographic
std::vector<Lambda> weak_chains(int len, int lo, int hi, std::size_t cap = kDefaultBasisCap);

std::vector<FixedEndsState> enumerate_fixed_ends(int N, int M, std::size_t cap = kDefaultBasisCap);
std::vector<Torus11State> enumerate_torus11(int m, int n, std::size_t cap = kDefaultBasisCap);
// doubled-lattice states: alpha in [0, 2m), lambda of length 2m obeying the exclusion rule
std::vector<Torus12State> enumerate_torus12(int m, int n, std::size_t cap = kDefaultBasisCap);
// lambda tuples (2m entries) obeying the exclusion rule
std::vector<Lambda> torus12_lambdas(int m, int n, std::size_t cap = kDefaultBasisCap);

// true when some run of m+1 consecutive entries is constant
bool violates_exclusion(const Lambda& lambda, int m);
bool valid_torus11(const Torus11State& s, int m, int n);
bool valid_torus12(const Torus12State& s, int m, int n);

// lambda_bar_j = lambda_j + j (1-based j), and back
Lambda to_strict(const Lambda& weak);
Lambda to_weak(const Lambda& strict);

// Colourings realising the string states; used to tie the state Hamiltonians
// to the plaquette-flip picture.
// Fixed ends live on an (M+1) x (N+1) strip entering at vertex (0,0) from the left.
EdgeColouring fixed_ends_colouring(const FixedEndsState& s);
// (alpha, lambda) on an m x n torus, m = lambda.size(); climb i sits on eta((alpha+i) mod m, lambda_i mod n)
EdgeColouring torus11_colouring(const Torus11State& s, int n);

}  // namespace icestr
