#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qpar/boolfn.hpp"
#include "qpar/nsc.hpp"

namespace qpar {

// convex weights of the four deterministic 1-bit channels: (L,R) is the
// output for x=+1 / x=-1, so pp/mm are the constants and pm is the identity
struct UnivariateMix {
    Rat a_pp, a_mm, a_pm, a_mp;
};

// canonical min-based decomposition of p = Pr[y=+1|x=+1], q = Pr[y=+1|x=-1];
// at most three weights are nonzero and reconstruction is exact
UnivariateMix decompose_univariate(const Rat& p, const Rat& q);

struct TreeDistribution {
    int n = 0;
    std::vector<std::pair<Rat, DecisionTree>> entries;
    void validate() const;  // nonnegative weights summing to exactly 1
    int max_depth() const;
};

// distribution over plain decision trees exactly equal to tau composed with
// the channel, every tree no deeper than tau
TreeDistribution decompose(const DecisionTree& tau, const NsChannelQ& ch);

struct VerifyReport {
    Rat max_deviation;
    int max_depth = 0;
};
VerifyReport verify_decomposition(const DecisionTree& tau, const NsChannelQ& ch,
                                  const TreeDistribution& gamma);

// x -> sum_y P(y|x) f(y)
template <class T>
BoolFn<T> expected_function(const BoolFn<T>& f, const NsChannel<T>& ch);

// ---- hybrid decision trees ----------------------------------------------

// decision tree over input variables whose leaves hold residual computations:
// either a constant or a decision tree composed with a (conditioned) channel
struct HybridTree {
    struct Payload {
        bool is_const = false;
        int8_t value = 1;
        DecisionTree tau;          // over local outputs of ch
        NsChannelQ ch;
        std::vector<int> in_ids;   // global input variable of each channel input
        std::vector<int> out_ids;  // global output id of each channel output
    };
    struct Node {
        int var = -1;  // global input variable; -1 for a leaf
        int left = -1, right = -1;
        int payload = -1;
    };
    int n = 0;  // global input arity
    std::vector<Node> nodes;
    std::vector<Payload> payloads;
    int root = -1;

    static HybridTree single_leaf(int n, DecisionTree tau, NsChannelQ ch);
    // Pr[output = +1 | x]
    Rat prob_plus(uint32_t x) const;
    std::vector<int> leaf_nodes() const;
    bool fully_expanded() const;  // every leaf is a constant
    DecisionTree to_decision_tree() const;
};

// One expansion step at the given leaf node: the base case turns the leaf
// into a constant, a referee-backed root splits into <= 2 reweighted trees,
// and an input-backed root grafts a one-node tree querying that input with
// conditioned compositions below (<= 3 terms). The mixture of the returned
// trees equals the original channel pointwise.
std::vector<std::pair<Rat, HybridTree>> expand_leaf(const HybridTree& t, int leaf_node);

// ---- text format ---------------------------------------------------------

TreeDistribution parse_treedist(std::istream& in);
void write_treedist(std::ostream& out, const TreeDistribution& td);

}  // namespace qpar
