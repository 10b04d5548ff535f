#include <doctest.h>

#include <deque>
#include <map>
#include <sstream>

#include "oracles.hpp"
#include "qpar/dtdecomp.hpp"
#include "qpar/rng.hpp"

using namespace qpar;

namespace {

DecisionTree random_tree(int outputs, int depth, SplitRng& rng) {
    DecisionTree t;
    auto rec = [&](auto&& self, int d) -> int {
        if (d == 0 || rng.below(4) == 0) return t.add_leaf(rng.pm1() > 0 ? 1 : -1);
        int var = static_cast<int>(rng.below(outputs));
        int l = self(self, d - 1);
        int r = self(self, d - 1);
        return t.add_node(var, l, r);
    };
    t.root = rec(rec, depth);
    return t;
}

NsChannelQ instance_channel(uint64_t seed) {
    switch (seed % 4) {
        case 0: return random_local_mixture(2 + seed % 3, 1, seed);
        case 1: return random_polytope_vertex(2, 1 + seed % 2, seed);
        case 2: return ghz_channel(3);
        default: return singlet_xz_channel();
    }
}

Rat target_prob_plus(const DecisionTree& tau, const NsChannelQ& ch, uint32_t x) {
    Rat acc(0);
    for (uint32_t y = 0; y < ch.cols(); ++y)
        if (eval_dt(tau, y) == 1) acc += ch.table[x][y];
    return acc;
}

}  // namespace

TEST_SUITE("dtdecomp") {

TEST_CASE("univariate decomposition formula") {
    auto id = decompose_univariate(Rat(1), Rat(0));
    CHECK(id.a_pm == Rat(1));
    CHECK(id.a_pp == Rat(0));
    CHECK(id.a_mm == Rat(0));
    CHECK(id.a_mp == Rat(0));

    auto coin = decompose_univariate(Rat(1, 2), Rat(1, 2));
    CHECK(coin.a_pp == Rat(1, 2));
    CHECK(coin.a_mm == Rat(1, 2));
    CHECK(coin.a_pm == Rat(0));
    CHECK(coin.a_mp == Rat(0));

    auto skew = decompose_univariate(Rat(3, 4), Rat(1, 4));
    CHECK(skew.a_pp == Rat(1, 4));
    CHECK(skew.a_pm == Rat(1, 2));
    CHECK(skew.a_mm == Rat(1, 4));
    CHECK(skew.a_mp == Rat(0));

    CHECK_THROWS_AS((void)decompose_univariate(Rat(3, 2), Rat(0)), ValidationError);
}

TEST_CASE("univariate decomposition reconstructs and keeps support small") {
    SplitRng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Rat p = frac(static_cast<long>(rng.below(17)), 16);
        Rat q = frac(static_cast<long>(rng.below(17)), 16);
        auto m = decompose_univariate(p, q);
        CHECK(m.a_pp + m.a_mm + m.a_pm + m.a_mp == Rat(1));
        CHECK(m.a_pp >= 0);
        CHECK(m.a_mm >= 0);
        CHECK(m.a_pm >= 0);
        CHECK(m.a_mp >= 0);
        // reconstruction: Pr[y=+1|x=+1] and Pr[y=+1|x=-1]
        CHECK(m.a_pp + m.a_pm == p);
        CHECK(m.a_pp + m.a_mp == q);
        int nonzero = (m.a_pp != 0) + (m.a_mm != 0) + (m.a_pm != 0) + (m.a_mp != 0);
        CHECK(nonzero <= 3);
    }
}

TEST_CASE("decomposing a constant tree is a point mass") {
    DecisionTree leaf;
    leaf.root = leaf.add_leaf(-1);
    NsChannelQ g = parity_channel(2);
    TreeDistribution td = decompose(leaf, g);
    REQUIRE(td.entries.size() == 1);
    CHECK(td.entries[0].first == Rat(1));
    CHECK(dt_depth(td.entries[0].second) == 0);
    CHECK(eval_dt(td.entries[0].second, 0) == -1);
}

TEST_CASE("the identity channel turns output queries into input queries") {
    DecisionTree tau = parse_tree("(x1 (x2 +1 -1) (x2 -1 +1))");
    NsChannelQ id = identity_channel(2);
    TreeDistribution td = decompose(tau, id);
    REQUIRE(td.entries.size() == 1);
    CHECK(td.entries[0].first == Rat(1));
    CHECK(tree_to_string(td.entries[0].second) == "(x1 (x2 +1 -1) (x2 -1 +1))");
}

TEST_CASE("the parity tree through the parity channel computes parity pointwise") {
    DecisionTree tau = parse_tree("(x1 (x2 +1 -1) (x2 -1 +1))");
    NsChannelQ g = parity_channel(2);
    TreeDistribution td = decompose(tau, g);
    auto rep = verify_decomposition(tau, g, td);
    CHECK(rep.max_deviation == Rat(0));
    CHECK(rep.max_depth <= 2);
    BoolFnQ p2 = parity_fn<Rat>(2);
    for (const auto& [w, tree] : td.entries)
        for (uint32_t x = 0; x < 4; ++x) CHECK(Rat(eval_dt(tree, x)) == p2.values[x]);
}

TEST_CASE("random instances decompose exactly within the depth bound") {
    SplitRng rng(2718);
    int done = 0;
    for (uint64_t seed = 0; done < 30; ++seed) {
        NsChannelQ ch = instance_channel(seed);
        if (ch.N > 4) continue;
        DecisionTree tau = random_tree(ch.N, std::min(4, ch.N), rng);
        TreeDistribution td = decompose(tau, ch);
        auto rep = verify_decomposition(tau, ch, td);
        CHECK(rep.max_deviation == Rat(0));
        CHECK(rep.max_depth <= dt_depth(dt_canonicalize(tau)));
        ++done;
    }
}

TEST_CASE("verifier notices perturbed weights and deep trees") {
    DecisionTree tau = parse_tree("(x1 +1 -1)");
    NsChannelQ id = identity_channel(1);
    TreeDistribution td = decompose(tau, id);
    TreeDistribution bad = td;
    REQUIRE(bad.entries.size() == 1);
    // split the mass unevenly between the true tree and a constant
    DecisionTree althou;
    althou.root = althou.add_leaf(1);
    bad.entries[0].first = Rat(3, 4);
    bad.entries.push_back({Rat(1, 4), althou});
    auto rep = verify_decomposition(tau, id, bad);
    CHECK(rep.max_deviation > Rat(0));

    TreeDistribution deep = td;
    DecisionTree two = parse_tree("(x1 (x1 +1 -1) -1)");
    deep.entries[0] = {Rat(1), two};
    auto rep2 = verify_decomposition(tau, id, deep);
    CHECK(rep2.max_depth == 2);
    CHECK(rep2.max_depth > dt_depth(tau));
}

TEST_CASE("expand_leaf base case finalizes a constant") {
    DecisionTree leaf;
    leaf.root = leaf.add_leaf(1);
    HybridTree t = HybridTree::single_leaf(2, leaf, parity_channel(2));
    auto pieces = expand_leaf(t, 0);
    REQUIRE(pieces.size() == 1);
    CHECK(pieces[0].first == Rat(1));
    CHECK(pieces[0].second.fully_expanded());
}

TEST_CASE("expand_leaf on the identity channel grafts an input query") {
    DecisionTree tau = parse_tree("(x1 +1 -1)");
    HybridTree t = HybridTree::single_leaf(2, tau, identity_channel(2));
    auto pieces = expand_leaf(t, 0);
    REQUIRE(pieces.size() == 1);
    CHECK(pieces[0].first == Rat(1));
    const HybridTree& h = pieces[0].second;
    CHECK(h.nodes[h.root].var == 0);  // queries x1
}

TEST_CASE("expand_leaf on the parity channel splits into halves") {
    DecisionTree tau = parse_tree("(x1 +1 -1)");
    HybridTree t = HybridTree::single_leaf(2, tau, parity_channel(2));
    auto pieces = expand_leaf(t, 0);
    REQUIRE(pieces.size() == 2);
    CHECK(pieces[0].first == Rat(1, 2));
    CHECK(pieces[1].first == Rat(1, 2));
}

TEST_CASE("expansion preserves the channel pointwise (claims combined)") {
    SplitRng rng(33);
    int done = 0;
    for (uint64_t seed = 100; done < 12; ++seed) {
        NsChannelQ ch = instance_channel(seed);
        if (ch.N > 4) continue;
        DecisionTree tau = random_tree(ch.N, 3, rng);
        NsChannelQ checked = ch;
        REQUIRE(is_no_signaling(checked));
        HybridTree start = HybridTree::single_leaf(ch.n, dt_canonicalize(tau), checked);
        // iterate one-step expansions to a fixpoint, tracking the mixture
        std::deque<std::pair<Rat, HybridTree>> work{{Rat(1), start}};
        std::vector<std::pair<Rat, HybridTree>> finished;
        long steps = 0;
        while (!work.empty()) {
            auto [w, h] = work.front();
            work.pop_front();
            if (h.fully_expanded()) {
                finished.push_back({w, h});
                continue;
            }
            int leaf = -1;
            for (int idx : h.leaf_nodes())
                if (!h.payloads[h.nodes[idx].payload].is_const) {
                    leaf = idx;
                    break;
                }
            for (auto& [pw, ph] : expand_leaf(h, leaf)) work.push_back({w * pw, std::move(ph)});
            REQUIRE(++steps < 100000);
        }
        // the mixture of fully expanded trees equals the original channel
        for (uint32_t x = 0; x < checked.rows(); ++x) {
            Rat target = target_prob_plus(dt_canonicalize(tau), checked, x);
            Rat got(0);
            for (const auto& [w, h] : finished) got += w * h.prob_plus(x);
            CHECK(got == target);
        }
        // and matches the direct recursion
        TreeDistribution td = decompose(tau, ch);
        for (uint32_t x = 0; x < checked.rows(); ++x) {
            Rat a(0);
            for (const auto& [w, h] : finished)
                a += w * h.prob_plus(x);
            Rat b(0);
            for (const auto& [w, tree] : td.entries)
                if (eval_dt(tree, x) == 1) b += w;
            CHECK(a == b);
        }
        ++done;
    }
}

TEST_CASE("expectation unwrap: mixing payloads commutes with the tree context") {
    // T(x1 ? G : const) with G replaced by a two-channel mixture
    NsChannelQ g_plus;  // constant +1 output
    g_plus.n = 1;
    g_plus.N = 1;
    g_plus.b = {-1};
    g_plus.table = {{Rat(1), Rat(0)}, {Rat(1), Rat(0)}};
    g_plus.validate();
    NsChannelQ g_copy = identity_channel(1);

    // mixture channel: 1/3 copy + 2/3 constant
    NsChannelQ mix;
    mix.n = 1;
    mix.N = 1;
    mix.b = {0};
    mix.table.assign(2, std::vector<Rat>(2));
    for (uint32_t x = 0; x < 2; ++x)
        for (uint32_t y = 0; y < 2; ++y)
            mix.table[x][y] = Rat(1, 3) * g_copy.table[x][y] + Rat(2, 3) * g_plus.table[x][y];
    mix.validate();

    DecisionTree probe = parse_tree("(x1 +1 -1)");
    auto hybrid_with = [&](const NsChannelQ& payload) {
        HybridTree t;
        t.n = 1;
        HybridTree::Payload pc;
        pc.is_const = true;
        pc.value = -1;
        HybridTree::Payload pg;
        pg.is_const = false;
        pg.tau = probe;
        pg.ch = payload;
        pg.in_ids = {0};
        pg.out_ids = {0};
        t.payloads = {pg, pc};
        t.nodes.push_back({-1, -1, -1, 0});
        t.nodes.push_back({-1, -1, -1, 1});
        t.nodes.push_back({0, 0, 1, -1});
        t.root = 2;
        return t;
    };
    HybridTree mixed = hybrid_with(mix);
    HybridTree with_copy = hybrid_with(g_copy);
    HybridTree with_const = hybrid_with(g_plus);
    for (uint32_t x = 0; x < 2; ++x) {
        Rat lhs = mixed.prob_plus(x);
        Rat rhs = Rat(1, 3) * with_copy.prob_plus(x) + Rat(2, 3) * with_const.prob_plus(x);
        CHECK(lhs == rhs);
    }
}

TEST_CASE("expected function through channels") {
    NsChannelQ g = parity_channel(2);
    BoolFnQ p2 = parity_fn<Rat>(2);
    BoolFnQ ep = expected_function(p2, g);
    CHECK(ep.values == p2.values);  // parity is preserved exactly

    BoolFnQ chi1 = chi_fn<Rat>(2, 0b01);
    BoolFnQ e1 = expected_function(chi1, g);
    for (const Rat& v : e1.values) CHECK(v == Rat(0));

    NsChannelQ id = identity_channel(3);
    SplitRng rng(6);
    BoolFnQ f = random_pm1_fn(3, rng);
    CHECK(expected_function(f, id).values == f.values);
}

TEST_CASE("degree does not increase through a channel") {
    for (uint64_t seed = 0; seed < 12; ++seed) {
        NsChannelQ ch = instance_channel(seed);
        SplitRng rng(900 + seed);
        BoolFnQ f = random_pm1_fn(ch.N, rng);
        BoolFnQ ef = expected_function(f, ch);
        CHECK(wht(ef).degree() <= wht(f).degree());
    }
}

TEST_CASE("signaling channels are rejected") {
    NsChannelQ bad;
    bad.n = 2;
    bad.N = 1;
    bad.b = {0};
    bad.table.assign(4, std::vector<Rat>(2, Rat(0)));
    for (uint32_t x = 0; x < 4; ++x) bad.table[x][(x >> 1) & 1] = 1;
    bad.validate();
    DecisionTree tau = parse_tree("(x1 +1 -1)");
    CHECK_THROWS_AS((void)decompose(tau, bad), ValidationError);
}

TEST_CASE("guards on depth and inputs") {
    NsChannelQ id = identity_channel(1);
    DecisionTree deep = parse_tree(
        "(x1 (x1 (x1 (x1 (x1 (x1 +1 -1) -1) -1) -1) -1) -1)");
    (void)deep;
    // depth guard is checked after canonicalization, so craft a genuine chain
    // over distinct variables instead
    NsChannelQ id6 = identity_channel(6);
    std::string text = "(x1 (x2 (x3 (x4 (x5 (x6 +1 -1) -1) -1) -1) -1) -1)";
    DecisionTree t6 = parse_tree(text);
    CHECK_THROWS_AS((void)decompose(t6, id6), GuardError);
}

TEST_CASE("treedist format round trip") {
    DecisionTree tau = parse_tree("(x1 (x2 +1 -1) (x2 -1 +1))");
    NsChannelQ g = parity_channel(2);
    TreeDistribution td = decompose(tau, g);
    std::ostringstream os;
    write_treedist(os, td);
    std::istringstream is(os.str());
    TreeDistribution back = parse_treedist(is);
    CHECK(back.n == td.n);
    REQUIRE(back.entries.size() == td.entries.size());
    for (std::size_t i = 0; i < back.entries.size(); ++i) {
        CHECK(back.entries[i].first == td.entries[i].first);
        CHECK(tree_to_string(back.entries[i].second) == tree_to_string(td.entries[i].second));
    }
    std::istringstream bad("treedist n=1 count=1\nw=1/2\n(x1 +1 -1)\n");
    CHECK_THROWS_AS((void)parse_treedist(bad), ValidationError);
}

}
