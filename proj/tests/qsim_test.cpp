#include <doctest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "qpar/qsim.hpp"

using namespace qpar;

namespace {

Circuit h_on_first(int n) {
    Circuit c;
    c.n = n;
    c.depth = 1;
    c.layers.resize(1);
    c.layers[0].push_back(named_gate1("H", 0, 1));
    c.validate();
    return c;
}

// flips every qubit; a leftover odd qubit gets its own layer
Circuit x_layer(int n) {
    Circuit c;
    c.n = n;
    c.depth = n % 2 ? 2 : 1;
    c.layers.resize(static_cast<std::size_t>(c.depth));
    for (int q = 0; q + 1 < n; q += 2) {
        Mat4Q xx{};  // X(x)X permutes |ab> -> |~a ~b>
        xx[0 * 4 + 3] = CplxQ(1);
        xx[1 * 4 + 2] = CplxQ(1);
        xx[2 * 4 + 1] = CplxQ(1);
        xx[3 * 4 + 0] = CplxQ(1);
        c.layers[0].push_back(matrix_gate(q, q + 1, xx));
    }
    if (n % 2 == 1) c.layers[1].push_back(named_gate1("X", n - 1, 0));
    c.validate();
    return c;
}

}  // namespace

TEST_SUITE("qsim") {

TEST_CASE("identity circuit gives a point mass") {
    Circuit c;
    c.n = 3;
    c.m = 2;
    c.depth = 0;
    auto d = simulate<double>(c, 0b101);
    for (uint32_t y = 0; y < d.p.size(); ++y)
        CHECK(d.p[y] == (y == 0b101 ? 1.0 : 0.0));
    auto dq = simulate<Rat>(c, 0b101);
    CHECK(dq.p[0b101] == Rat(1));
}

TEST_CASE("an X layer lands on the bitwise complement") {
    int n = 4;
    Circuit c = x_layer(n);
    uint32_t x = 0b0110;
    auto d = simulate<Rat>(c, x);
    for (uint32_t y = 0; y < d.p.size(); ++y)
        CHECK(d.p[y] == (y == (x ^ 0b1111) ? Rat(1) : Rat(0)));
}

TEST_CASE("H on qubit 1 splits the first bit") {
    Circuit c = h_on_first(2);
    auto d = simulate<double>(c, 0b00);
    CHECK(d.p[0b00] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.p[0b01] == doctest::Approx(0.5).epsilon(1e-12));  // variable 1 flipped
    CHECK(d.p[0b10] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.p[0b11] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("expectation identities") {
    // identity circuit: expectation is f at the padded input
    Circuit c;
    c.n = 2;
    c.m = 1;
    c.depth = 0;
    BoolFnQ f = chi_fn<Rat>(3, 0b011);
    for (uint32_t x = 0; x < 4; ++x)
        CHECK(expectation(c, f, x) == Rat(chi_sign(0b011, x)));

    // X on qubit 1 negates chi_{1}
    Circuit cx;
    cx.n = 2;
    cx.depth = 1;
    cx.layers.resize(1);
    cx.layers[0].push_back(named_gate1("X", 0, 1));
    cx.validate();
    BoolFnQ chi1 = chi_fn<Rat>(2, 0b01);
    for (uint32_t x = 0; x < 4; ++x)
        CHECK(expectation(cx, chi1, x) == Rat(-chi_sign(0b01, x)));
}

TEST_CASE("H tensor H conjugation zeroes the parity observable") {
    Circuit c;
    c.n = 2;
    c.depth = 2;
    c.layers.resize(2);
    c.layers[0].push_back(named_gate1("H", 0, 1));
    c.layers[1].push_back(named_gate1("H", 1, 0));
    c.validate();
    BoolFnD par = to_f64(parity_fn<Rat>(2));
    for (uint32_t x = 0; x < 4; ++x)
        CHECK(std::abs(expectation(c, par, x)) <= 1e-12);

    // oracle: dense conjugation (H(x)H) Z(x)Z (H(x)H) has zero diagonal
    auto u = dense_unitary(c);
    auto m = oracle::cmat_mul(oracle::cmat_mul(oracle::cmat_adjoint(u),
                                               oracle::cmat_diag({1, -1, -1, 1})),
                              u);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(m[i][i]) <= 1e-12);
}

TEST_CASE("parity correlation basics") {
    Circuit id;
    id.n = 3;
    id.depth = 0;
    CHECK(parity_correlation(id, parity_fn<Rat>(3)) == Rat(1));

    for (int n : {2, 3}) {
        Circuit cx = x_layer(n);
        CHECK(parity_correlation(cx, parity_fn<Rat>(n)) == Rat(n % 2 ? -1 : 1));
    }
}

TEST_CASE("the trojan-horse composition reaches correlation 1") {
    for (int m : {2, 3}) {
        Circuit c = append_ones_circuit(m);
        BoolFnQ h = trojan_horse_fn<Rat>(m);
        CHECK(parity_correlation(c, h) == Rat(1));
    }
}

TEST_CASE("heisenberg trace of the identity") {
    Circuit c;
    c.n = 2;
    c.depth = 0;
    CHECK(heisenberg_trace(c, 0b11).real() == doctest::Approx(4.0));
    CHECK(std::abs(heisenberg_trace(c, 0b01)) <= 1e-12);
}

TEST_CASE("heisenberg trace vanishes below the lightcone threshold") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        int n = 4 + static_cast<int>(seed % 3);
        int depth = 1;
        Circuit c = random_circuit(n, 0, depth, seed);
        auto table = heisenberg_trace_table(c);
        for (uint32_t s = 0; s < (1u << n); ++s) {
            if (std::popcount(s) * (1 << depth) < n) CHECK(std::abs(table[s]) <= 1e-9);
        }
        // the table agrees with the single-subset routine
        CHECK(std::abs(table[1] - heisenberg_trace(c, 1).real()) <= 1e-9);
    }
    Circuit with_anc;
    with_anc.n = 2;
    with_anc.m = 1;
    with_anc.depth = 0;
    CHECK_THROWS_AS((void)heisenberg_trace(with_anc, 1), ValidationError);
}

TEST_CASE("forward lightcones") {
    Circuit id;
    id.n = 4;
    id.depth = 0;
    CHECK(forward_lightcone(id, 2) == std::vector<int>{2});

    Circuit one;
    one.n = 3;
    one.depth = 1;
    one.layers.resize(1);
    one.layers[0].push_back(named_gate2("CNOT", 0, 1));
    one.validate();
    CHECK(forward_lightcone(one, 0) == std::vector<int>({0, 1}));

    for (int depth : {1, 2, 3}) {
        Circuit bf = butterfly_circuit(8, depth, 5);
        auto cone = forward_lightcone(bf, 0);
        CHECK(static_cast<int>(cone.size()) == std::min(1 << depth, 8));
        auto direct = oracle::lightcone_direct(bf, 0);
        CHECK(std::set<int>(cone.begin(), cone.end()) == direct);
    }
}

TEST_CASE("correlation symmetry lemma on random instances") {
    SplitRng rng(31);
    for (uint64_t seed = 0; seed < 8; ++seed) {
        int n = 2 + static_cast<int>(seed % 4);
        Circuit c = random_circuit(n, 0, 2, 100 + seed);
        BoolFnD f = to_f64(random_pm1_fn(n, rng));
        BoolFnD g = to_f64(random_pm1_fn(n, rng));
        const double scale = std::ldexp(1.0, -n);

        double lhs = 0;
        for (uint32_t x = 0; x < f.size(); ++x)
            lhs += scale * expectation(c, f, x) * g.values[x];

        Circuit cinv = c.inverse();
        double rhs = 0;
        for (uint32_t x = 0; x < f.size(); ++x)
            rhs += scale * f.values[x] * expectation(cinv, g, x);

        auto u = dense_unitary(c);
        auto mf = oracle::cmat_diag(f.values);
        auto mg = oracle::cmat_diag(g.values);
        auto prod = oracle::cmat_mul(oracle::cmat_mul(mf, u),
                                     oracle::cmat_mul(mg, oracle::cmat_adjoint(u)));
        double tr = scale * oracle::cmat_trace(prod).real();

        CHECK(std::abs(lhs - rhs) <= 1e-9);
        CHECK(std::abs(lhs - tr) <= 1e-9);
    }
}

TEST_CASE("rational circuits simulate exactly") {
    for (uint64_t seed = 0; seed < 6; ++seed) {
        Circuit c = random_rational_circuit(4, 1, 2, seed);
        REQUIRE(c.exact_ok());
        for (uint32_t x = 0; x < (1u << c.n); ++x) {
            auto dq = simulate<Rat>(c, x);
            Rat total(0);
            for (const Rat& p : dq.p) total += p;
            CHECK(total == Rat(1));
            auto dd = simulate<double>(c, x);
            for (std::size_t y = 0; y < dq.p.size(); ++y)
                CHECK(std::abs(dq.p[y].get_d() - dd.p[y]) <= 1e-12);
        }
    }
}

TEST_CASE("circuits with H gates refuse the exact path") {
    Circuit c = h_on_first(2);
    CHECK_FALSE(c.exact_ok());
    CHECK_THROWS_AS((void)simulate<Rat>(c, 0), ValidationError);
}

TEST_CASE("circuit format round trip") {
    Circuit c = random_rational_circuit(3, 2, 2, 9);
    c.v = 1;
    c.advice = {CplxQ(Rat(3, 5)), CplxQ(Rat(0), Rat(4, 5))};
    c.validate();
    std::ostringstream os;
    write_circuit(os, c);
    std::istringstream is(os.str());
    Circuit back = parse_circuit(is);
    CHECK(back.n == c.n);
    CHECK(back.m == c.m);
    CHECK(back.v == c.v);
    CHECK(back.depth == c.depth);
    REQUIRE(back.exact_ok());
    for (uint32_t x = 0; x < (1u << c.n); ++x) {
        auto a = simulate<Rat>(c, x);
        auto b = simulate<Rat>(back, x);
        CHECK(a.p == b.p);
    }
}

TEST_CASE("circuit format accepts named gates and validates") {
    std::istringstream good(
        "circuit n=2 m=1 v=0 depth=2\n"
        "layer=1 q=1,2 gate=CNOT\n"
        "layer=2 q=3 gate=H\n");
    Circuit c = parse_circuit(good);
    CHECK(c.depth == 2);
    CHECK(c.layers[1][0].one_qubit);

    std::istringstream overlap(
        "circuit n=2 m=0 v=0 depth=1\n"
        "layer=1 q=1,2 gate=CNOT\n"
        "layer=1 q=2,1 gate=CZ\n");
    CHECK_THROWS_AS((void)parse_circuit(overlap), ValidationError);

    std::istringstream nonunitary(
        "circuit n=2 m=0 v=0 depth=1\n"
        "layer=1 q=1,2 matrix=1:0,0:0,0:0,0:0,0:0,1:0,0:0,0:0,0:0,0:0,1:0,0:0,0:0,0:0,0:0,0:0\n");
    CHECK_THROWS_AS((void)parse_circuit(nonunitary), ValidationError);

    std::istringstream badlayer(
        "circuit n=2 m=0 v=0 depth=1\n"
        "layer=2 q=1,2 gate=CNOT\n");
    CHECK_THROWS_AS((void)parse_circuit(badlayer), ParseError);
}

TEST_CASE("advice states participate in the simulation") {
    Circuit c;
    c.n = 1;
    c.m = 1;
    c.v = 1;
    c.depth = 0;
    c.advice = {CplxQ(Rat(3, 5)), CplxQ(Rat(4, 5))};
    c.validate();
    auto d = simulate<Rat>(c, 0);
    CHECK(d.p[0b00] == Rat(9, 25));
    CHECK(d.p[0b10] == Rat(16, 25));

    Circuit bad = c;
    bad.advice = {CplxQ(Rat(1)), CplxQ(Rat(1))};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("theorem-1 style inequality holds on spot instances") {
    SplitRng rng(63);
    for (uint64_t seed = 0; seed < 6; ++seed) {
        int n = 5 + static_cast<int>(seed % 3);
        int t = 1 + static_cast<int>(seed % 2);
        Circuit c = random_circuit(n, 0, t, 500 + seed);
        BoolFnQ f = random_pm1_fn(n, rng);
        double corr = parity_correlation(c, to_f64(f));
        int k = (n + (1 << t) - 1) / (1 << t);  // ceil(n / 2^t)
        double tail = fourier_tail(wht(to_f64(f)), k);
        CHECK(corr <= std::sqrt(tail) + 1e-9);
    }
}

}
