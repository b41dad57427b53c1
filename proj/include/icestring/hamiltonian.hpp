#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "icestring/lattice.hpp"
#include "icestring/phase.hpp"

namespace icestr {

template <class S>
struct Move {
    S state;
    Phase phase;
    double weight = 1.0;
    cplx amplitude() const { return weight * phase.value(); }
};

// lambda +- delta_i inside [0, N]; +delta before -delta for each i
std::vector<Move<FixedEndsState>> apply_fixed_ends(const FixedEndsState& s, double e = 1.0);

// alpha-resolved torus moves; alpha lives in Z_classes (classes = m for (1,1))
std::vector<Move<Torus11State>> apply_torus11(const Torus11State& s, int n, double e = 1.0);
std::vector<Move<Torus11State>> apply_torus_classes(const Torus11State& s, int n, int classes, double e = 1.0);

struct SectorOptions {
    double e = 1.0;
    // deliberately wrong sign on the lambda_1 = 1 relabelling phase (fault injection)
    bool flip_left_phase = false;
};

// Fourier sector a: the lambda_1 = 1 move carries exp(-2 pi i a/den), the
// lambda_last = n move exp(+2 pi i a/den). den = m for both string families.
std::vector<Move<Lambda>> sector_moves(const Lambda& lambda, int n, int a, int den, const SectorOptions& opt = {});
std::vector<Move<Lambda>> apply_torus11_sector(const Lambda& lambda, int n, int a, const SectorOptions& opt = {});
// lambda has 2m entries; forbidden images are dropped
std::vector<Move<Lambda>> apply_torus12(const Lambda& lambda, int m, int n, int a, const SectorOptions& opt = {});
// physical (1,2) states with alpha in [0, m)
std::vector<Move<Torus12State>> apply_torus12_full(const Torus12State& s, int m, int n, double e = 1.0);

// horizontal shift P in sector a: entries equal to n wrap to 1, each wrap costs exp(2 pi i a/den)
Move<Lambda> shift_P(const Lambda& lambda, int n, int a, int den);

// Reduce a formal nbar tuple (nbar_i = lambda_{i+1} + i, possibly out of (0, N))
// to a canonical lambda using the relabelling identities. Empty if two
// coordinates coincide.
std::optional<Move<Lambda>> canonicalize_nbar(std::vector<int> nbar, int n, int a, int den);

// plaquette flips: bottom+right <-> left+top
std::vector<Move<EdgeColouring>> apply_colouring(const EdgeColouring& c, const LatticeSpec& spec);

// ---- assembled blocks ----

enum class Family { FixedEnds, Torus11, Torus12 };

struct FamilyParams {
    int N = -1;
    int M = -1;
    int m = -1;
    int n = -1;
    double e = 1.0;
    bool flip_left_phase = false;
};

struct SectorLabel {
    std::optional<int> a;
    std::optional<int> b;
    bool operator==(const SectorLabel&) const = default;
};

using StringState = std::variant<FixedEndsState, Torus11State, Torus12State>;

struct MatrixEntry {
    std::size_t row;
    std::size_t col;
    cplx value;
};

// Sector blocks store Fourier-reduced states with alpha = 0; momentum blocks
// store the lexicographically smallest member of each translation orbit.
struct SparseOperator {
    Family family = Family::FixedEnds;
    SectorLabel sector;
    std::vector<StringState> basis;
    std::vector<MatrixEntry> entries;  // sorted by (row, col), no zeros

    std::size_t dim() const { return basis.size(); }
    Eigen::MatrixXcd dense() const;
    double hermiticity_defect() const;
    double max_abs() const;
};

inline constexpr std::size_t kDefaultDenseCap = 2000;

// a absent: alpha-resolved block; b present: momentum block (needs a)
SparseOperator build_sector_matrix(Family family, const FamilyParams& p, const SectorLabel& sector,
                                   std::size_t cap = kDefaultBasisCap);

// every (a) or (a,b) label of a family; fixed ends has the single empty label
std::vector<SectorLabel> sector_labels(Family family, const FamilyParams& p, bool with_b);
std::size_t full_dimension(Family family, const FamilyParams& p);

// "i j re im" per line, 0-based, sorted by (i,j)
std::string export_coo(const SparseOperator& op);

struct SpectrumResult {
    std::optional<SectorLabel> sector;
    std::vector<double> eigenvalues;  // distinct, ascending
    std::vector<int> multiplicities;
    double max_residual = 0.0;        // max ||Av - Ev|| / ||A|| over returned pairs

    std::vector<double> expanded() const;
};

SpectrumResult dense_spectrum(const SparseOperator& op, std::size_t dense_cap = kDefaultDenseCap,
                              double degeneracy_tol = 1e-9);

}  // namespace icestr
