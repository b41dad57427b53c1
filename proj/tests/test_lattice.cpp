#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "icestring/colouring_io.hpp"
#include "icestring/errors.hpp"
#include "icestring/lattice.hpp"
#include "samples.hpp"
#include "oracles.hpp"

using namespace icestr;
using samples::winding21_sample;
using samples::winding11_sample;

namespace {

LatticeSpec torus(int m, int n) { return {m, n, Topology::Torus, 1.0}; }

}  // namespace

TEST_CASE("ice condition on simple colourings") {
    EdgeColouring zero(3, 3);
    CHECK(check_ice_condition(zero, torus(3, 3)));
    EdgeColouring one(3, 3);
    std::fill(one.horizontal.begin(), one.horizontal.end(), 1);
    std::fill(one.vertical.begin(), one.vertical.end(), 1);
    CHECK(check_ice_condition(one, torus(3, 3)));
    EdgeColouring single(2, 2);
    single.set_sigma(0, 0, 1);
    CHECK_FALSE(check_ice_condition(single, torus(2, 2)));
}

TEST_CASE("exactly six of sixteen vertex patterns are allowed") {
    int allowed = 0;
    for (int p = 0; p < 16; ++p) allowed += vertex_type(static_cast<std::uint8_t>(p)) != 0;
    CHECK(allowed == 6);
    // every allowed pattern has as many coloured inflows (L, D) as outflows (R, U)
    for (auto p : kVertexTypes) {
        const int in = ((p >> 3) & 1) + ((p >> 1) & 1), outc = ((p >> 2) & 1) + (p & 1);
        CHECK(in == outc);
    }
}

TEST_CASE("string counts and winding classes of the sample configurations") {
    CHECK(count_strings(EdgeColouring(4, 4), torus(4, 4)) == 0);

    const EdgeColouring c13 = winding11_sample();
    REQUIRE(check_ice_condition(c13, torus(4, 7)));
    CHECK(count_strings(c13, torus(4, 7)) == 1);
    CHECK(winding_class(c13, torus(4, 7)) == WindingClass{1, 1});
    // the same configuration comes out of the state (alpha = 1, lambda = (2,3,5,6))
    CHECK(torus11_colouring(Torus11State{1, {2, 3, 5, 6}}, 7) == c13);

    const EdgeColouring c11 = winding21_sample();
    REQUIRE(check_ice_condition(c11, torus(5, 7)));
    CHECK(count_strings(c11, torus(5, 7)) == 1);
    CHECK(winding_class(c11, torus(5, 7)) == WindingClass{2, 1});

    EdgeColouring column(3, 3);
    for (int i = 0; i < 3; ++i) column.set_eta(i, 1, 1);
    CHECK(count_strings(column, torus(3, 3)) == 1);
    CHECK(winding_class(column, torus(3, 3)) == WindingClass{0, 1});

    EdgeColouring loops(4, 4);
    for (int i = 0; i < 4; ++i) {
        loops.set_eta(i, 0, 1);
        loops.set_eta(i, 2, 1);
    }
    CHECK(count_strings(loops, torus(4, 4)) == 2);
}

TEST_CASE("translation keeps ice condition and winding") {
    const EdgeColouring c = winding21_sample();
    for (int di = 0; di < 5; ++di)
        for (int dj = 0; dj < 7; ++dj) {
            const EdgeColouring t = translate(c, di, dj);
            CHECK(check_ice_condition(t, torus(5, 7)));
            CHECK(winding_class(t, torus(5, 7)) == WindingClass{2, 1});
        }
}

TEST_CASE("fixed-ends enumeration") {
    const auto two = enumerate_fixed_ends(1, 1);
    REQUIRE(two.size() == 2);
    CHECK(two[0].lambda == std::vector<int>{0});
    CHECK(two[1].lambda == std::vector<int>{1});

    const auto big = enumerate_fixed_ends(9, 6);
    CHECK(big.size() == 5005);
    CHECK(std::find(big.begin(), big.end(), FixedEndsState{9, {1, 1, 2, 4, 6, 6}}) != big.end());

    for (int N = 0; N <= 6; ++N)
        for (int M = 0; N + M <= 10; ++M) {
            const auto v = enumerate_fixed_ends(N, M);
            CHECK(v.size() == oracle::count_chains(M, 0, N));
            CHECK(v.size() == oracle::pascal(N + M, M));
            CHECK(std::is_sorted(v.begin(), v.end()));
            CHECK(std::all_of(v.begin(), v.end(), [](const FixedEndsState& s) { return s.valid(); }));
        }
}

TEST_CASE("fixed-ends states draw single strings obeying the ice rule") {
    for (const auto& s : enumerate_fixed_ends(3, 3)) {
        const EdgeColouring c = fixed_ends_colouring(s);
        const LatticeSpec spec{s.M() + 1, s.N + 1, Topology::OpenStrip, 1.0};
        CHECK(check_ice_condition(c, spec));
        CHECK(count_strings(c, spec) == 1);
    }
}

TEST_CASE("(1,1) enumeration") {
    CHECK(enumerate_torus11(1, 1).size() == 1);
    const auto v = enumerate_torus11(4, 7);
    CHECK(v.size() == 840);
    CHECK(std::find(v.begin(), v.end(), Torus11State{1, {2, 3, 5, 6}}) != v.end());
    for (int m = 1; m <= 5; ++m)
        for (int n = 1; n <= 5; ++n) {
            const auto s = enumerate_torus11(m, n);
            CHECK(s.size() == m * oracle::count_chains(m, 1, n));
            CHECK(s.size() == torus11_dimension(m, n));
            for (const auto& x : s) CHECK(valid_torus11(x, m, n));
        }
}

TEST_CASE("(1,1) states draw one string of winding (1,1)") {
    for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 3; ++n)
            for (const auto& s : enumerate_torus11(m, n)) {
                const EdgeColouring c = torus11_colouring(s, n);
                CHECK(check_ice_condition(c, torus(m, n)));
                CHECK(count_strings(c, torus(m, n)) == 1);
                CHECK(winding_class(c, torus(m, n)) == WindingClass{1, 1});
            }
}

TEST_CASE("(1,2) enumeration applies the exclusion rule") {
    for (int n = 2; n <= 5; ++n) {
        const auto all = weak_chains(4, 1, n);
        std::size_t bad = 0;
        for (const auto& l : all) bad += oracle::has_run(l, 2);
        const auto ok = torus12_lambdas(2, n);
        CHECK(ok.size() == all.size() - bad);
        for (const auto& l : ok) CHECK_FALSE(oracle::has_run(l, 2));
        const auto states = enumerate_torus12(2, n);
        CHECK(states.size() == 4 * ok.size());
        for (const auto& s : states) CHECK(valid_torus12(s, 2, n));
    }
    // n = 3: no lambda_i = lambda_{i+1} = lambda_{i+2}
    for (const auto& l : torus12_lambdas(2, 3))
        for (std::size_t i = 0; i + 2 < l.size(); ++i) CHECK_FALSE((l[i] == l[i + 1] && l[i + 1] == l[i + 2]));
    // n = 4: no three consecutive nbar differences
    for (const auto& s : enumerate_torus12(2, 4)) {
        const auto nb = s.nbar();
        for (std::size_t i = 0; i + 2 < nb.size(); ++i) CHECK_FALSE((nb[i + 1] == nb[i] + 1 && nb[i + 2] == nb[i] + 2));
    }
}

TEST_CASE("strict and weak tuples convert both ways") {
    for (const auto& l : weak_chains(4, 0, 4)) CHECK(to_weak(to_strict(l)) == l);
    CHECK(to_strict({1, 1, 2}) == std::vector<int>{2, 3, 5});
}

TEST_CASE("binomial saturates instead of overflowing") {
    CHECK(binomial(15, 6) == 5005);
    CHECK(binomial(200, 100) == UINT64_MAX);
    CHECK(binomial(3, 5) == 0);
}

TEST_CASE("enumeration refuses oversized bases") {
    CHECK_THROWS_AS(enumerate_fixed_ends(40, 20), CapacityError);
    CHECK_THROWS_AS(enumerate_torus11(3, 3, 10), CapacityError);
    CHECK_THROWS_AS(enumerate_fixed_ends(-1, 2), DimensionError);
}

TEST_CASE("colouring files round-trip") {
    const LatticeSpec spec = torus(5, 7);
    const EdgeColouring c = winding21_sample();
    const auto [s2, c2] = parse_colouring(dump_colouring(spec, c));
    CHECK(s2.m == 5);
    CHECK(s2.n == 7);
    CHECK(s2.topology == Topology::Torus);
    CHECK(c2 == c);
    CHECK_THROWS_AS(parse_colouring("{\"m\":2}"), DimensionError);
    CHECK_THROWS_AS(parse_colouring("not json"), DimensionError);
    CHECK_THROWS_AS(parse_colouring(R"({"m":1,"n":1,"topology":"torus","h":[[2]],"v":[[0]]})"), DimensionError);
}
