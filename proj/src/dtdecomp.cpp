#include "qpar/dtdecomp.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace qpar {

UnivariateMix decompose_univariate(const Rat& p, const Rat& q) {
    if (p < 0 || p > 1 || q < 0 || q > 1)
        throw ValidationError("decompose_univariate: p, q must lie in [0,1]");
    Rat lo = std::min(p, q);
    Rat hi = std::max(p, q);
    UnivariateMix m{lo, 1 - hi, p - lo, q - lo};
    return m;
}

void TreeDistribution::validate() const {
    Rat total(0);
    for (const auto& [w, tree] : entries) {
        if (w < 0) throw ValidationError("treedist: negative weight");
        if (tree.empty()) throw ValidationError("treedist: empty tree");
        total += w;
    }
    if (total != 1) throw ValidationError("treedist: weights do not sum to 1");
}

int TreeDistribution::max_depth() const {
    int d = 0;
    for (const auto& [w, tree] : entries) d = std::max(d, dt_depth(tree));
    return d;
}

namespace {

// local output index of global output id, via the live-output list
int local_output(const std::vector<int>& out_ids, int global) {
    for (std::size_t i = 0; i < out_ids.size(); ++i)
        if (out_ids[i] == global) return static_cast<int>(i);
    throw ValidationError("decompose: tree queries an output that was already consumed");
}

std::vector<int> erase_at(const std::vector<int>& v, std::size_t pos) {
    std::vector<int> out = v;
    out.erase(out.begin() + static_cast<long>(pos));
    return out;
}

// single-output marginal Pr[y_i = +1] from a table row
Rat row_prob_plus(const std::vector<Rat>& row, int i) {
    Rat acc(0);
    for (uint32_t y = 0; y < row.size(); ++y)
        if (((y >> i) & 1) == 0) acc += row[y];
    return acc;
}

struct Weighted {
    Rat w;
    DecisionTree tree;
};

void merge_into(std::map<std::string, Weighted>& acc, const Rat& w, const DecisionTree& t) {
    std::string key = tree_to_string(t);
    auto it = acc.find(key);
    if (it == acc.end()) acc.emplace(std::move(key), Weighted{w, t});
    else it->second.w += w;
}

std::vector<Weighted> to_list(std::map<std::string, Weighted>&& acc) {
    std::vector<Weighted> out;
    out.reserve(acc.size());
    for (auto& [k, v] : acc) out.push_back(std::move(v));
    return out;
}

// recursive expansion following the three cases of the vertex decomposition:
// constant leaf; referee-backed root (split on the input-independent outcome,
// no node emitted); input-backed root (canonical univariate mix, emit one
// node querying that input, condition both sides)
std::vector<Weighted> expand(const DecisionTree& tau, int tau_node, const NsChannelQ& ch,
                             const std::vector<int>& in_ids, const std::vector<int>& out_ids) {
    const auto& nd = tau.nodes[tau_node];
    if (nd.var < 0) {
        DecisionTree leaf;
        leaf.root = leaf.add_leaf(nd.leaf);
        return {{Rat(1), leaf}};
    }
    int i = local_output(out_ids, nd.var);
    std::map<std::string, Weighted> acc;
    if (ch.b[i] == -1) {
        // outcome distribution is input-independent; any row gives it
        Rat w_plus = row_prob_plus(ch.table[0], i);
        for (int omega = 0; omega < 2; ++omega) {
            Rat w = omega == 0 ? w_plus : 1 - w_plus;
            if (w == 0) continue;
            NsChannelQ cond = condition(ch, {i}, static_cast<uint32_t>(omega));
            int sub = omega == 0 ? nd.left : nd.right;
            for (const auto& piece : expand(tau, sub, cond, in_ids, erase_at(out_ids, i)))
                merge_into(acc, w * piece.w, piece.tree);
        }
    } else {
        int beta = ch.b[i];
        int x_var = in_ids[beta];
        // Pr[y_i=+1 | x_beta = +-1]; rows agreeing on x_beta share the value
        Rat p = row_prob_plus(ch.table[0], i);
        Rat q = row_prob_plus(ch.table[std::size_t(1) << beta], i);
        UnivariateMix mix = decompose_univariate(p, q);
        const std::array<std::tuple<Rat, int, int>, 4> branches{
            std::tuple<Rat, int, int>{mix.a_pp, 0, 0},   // (L,R) = (+1,+1)
            std::tuple<Rat, int, int>{mix.a_mm, 1, 1},   // (-1,-1)
            std::tuple<Rat, int, int>{mix.a_pm, 0, 1},   // (+1,-1)
            std::tuple<Rat, int, int>{mix.a_mp, 1, 0}};  // (-1,+1)
        auto out_rest = erase_at(out_ids, i);
        auto in_rest = erase_at(in_ids, beta);
        for (const auto& [w, lo, ro] : branches) {
            if (w == 0) continue;
            NsChannelQ nl = condition(ch, {i}, static_cast<uint32_t>(lo),
                                      std::make_pair(beta, +1));
            NsChannelQ nr = condition(ch, {i}, static_cast<uint32_t>(ro),
                                      std::make_pair(beta, -1));
            auto left = expand(tau, lo == 0 ? nd.left : nd.right, nl, in_rest, out_rest);
            auto right = expand(tau, ro == 0 ? nd.left : nd.right, nr, in_rest, out_rest);
            for (const auto& lt : left)
                for (const auto& rt : right) {
                    DecisionTree t;
                    // splice both subtrees into one tree rooted at x_var
                    auto copy_sub = [&t](auto&& self, const DecisionTree& src, int idx) -> int {
                        const auto& snd = src.nodes[idx];
                        if (snd.var < 0) return t.add_leaf(snd.leaf);
                        int l = self(self, src, snd.left);
                        int r = self(self, src, snd.right);
                        return t.add_node(snd.var, l, r);
                    };
                    int l = copy_sub(copy_sub, lt.tree, lt.tree.root);
                    int r = copy_sub(copy_sub, rt.tree, rt.tree.root);
                    t.root = t.add_node(x_var, l, r);
                    merge_into(acc, w * lt.w * rt.w, t);
                }
        }
    }
    return to_list(std::move(acc));
}

}  // namespace

TreeDistribution decompose(const DecisionTree& tau, const NsChannelQ& ch) {
    if (tau.empty()) throw ValidationError("decompose: empty tree");
    DecisionTree canon = dt_canonicalize(tau);
    check_guard("dtdecomp.depth", 5, dt_depth(canon));
    check_guard("dtdecomp.inputs", 6, ch.n);
    if (canon.max_var() >= ch.N)
        throw ValidationError("decompose: tree queries outputs beyond the channel");
    NsChannelQ checked = ch;
    if (!is_no_signaling(checked))
        throw ValidationError("decompose: channel is signaling");

    std::vector<int> in_ids(static_cast<std::size_t>(ch.n));
    std::vector<int> out_ids(static_cast<std::size_t>(ch.N));
    for (int i = 0; i < ch.n; ++i) in_ids[i] = i;
    for (int j = 0; j < ch.N; ++j) out_ids[j] = j;
    auto pieces = expand(canon, canon.root, checked, in_ids, out_ids);

    TreeDistribution td;
    td.n = ch.n;
    std::map<std::string, Weighted> acc;
    for (auto& piece : pieces) {
        // repeated queries cannot survive the bookkeeping, but prune anyway
        DecisionTree pruned = dt_canonicalize(piece.tree);
        merge_into(acc, piece.w, pruned);
    }
    for (auto& [key, piece] : acc) td.entries.push_back({piece.w, piece.tree});
    td.validate();
    return td;
}

VerifyReport verify_decomposition(const DecisionTree& tau, const NsChannelQ& ch,
                                  const TreeDistribution& gamma) {
    VerifyReport rep{Rat(0), gamma.max_depth()};
    for (uint32_t x = 0; x < ch.rows(); ++x) {
        Rat target(0);
        for (uint32_t y = 0; y < ch.cols(); ++y)
            if (eval_dt(tau, y) == 1) target += ch.table[x][y];
        Rat got(0);
        for (const auto& [w, tree] : gamma.entries)
            if (eval_dt(tree, x) == 1) got += w;
        Rat dev = rat_abs(target - got);
        if (dev > rep.max_deviation) rep.max_deviation = dev;
    }
    return rep;
}

template <class T>
BoolFn<T> expected_function(const BoolFn<T>& f, const NsChannel<T>& ch) {
    if (f.n != ch.N) throw ValidationError("expected_function: arity mismatch");
    std::vector<T> vals(ch.rows());
    for (uint32_t x = 0; x < ch.rows(); ++x) {
        T acc(0);
        for (uint32_t y = 0; y < ch.cols(); ++y) acc += ch.table[x][y] * f.values[y];
        vals[x] = acc;
    }
    return BoolFn<T>(ch.n, Range::real, std::move(vals));
}

template BoolFnQ expected_function<Rat>(const BoolFnQ&, const NsChannelQ&);
template BoolFnD expected_function<double>(const BoolFnD&, const NsChannelD&);

// ---- hybrid trees --------------------------------------------------------

HybridTree HybridTree::single_leaf(int n, DecisionTree tau, NsChannelQ ch) {
    if (ch.n != n) throw ValidationError("hybrid tree: channel arity mismatch");
    HybridTree t;
    t.n = n;
    Payload p;
    p.is_const = false;
    p.tau = std::move(tau);
    p.ch = std::move(ch);
    for (int i = 0; i < t.n; ++i) p.in_ids.push_back(i);
    for (int j = 0; j < p.ch.N; ++j) p.out_ids.push_back(j);
    t.payloads.push_back(std::move(p));
    t.nodes.push_back({-1, -1, -1, 0});
    t.root = 0;
    return t;
}

Rat HybridTree::prob_plus(uint32_t x) const {
    int cur = root;
    while (nodes[cur].var >= 0) {
        cur = ((x >> nodes[cur].var) & 1) ? nodes[cur].right : nodes[cur].left;
    }
    const Payload& p = payloads[nodes[cur].payload];
    if (p.is_const) return p.value == 1 ? Rat(1) : Rat(0);
    uint32_t z = 0;
    for (std::size_t i = 0; i < p.in_ids.size(); ++i)
        if ((x >> p.in_ids[i]) & 1) z |= 1u << i;
    Rat acc(0);
    for (uint32_t y = 0; y < p.ch.cols(); ++y)
        if (eval_dt(p.tau, y) == 1) acc += p.ch.table[z][y];
    return acc;
}

std::vector<int> HybridTree::leaf_nodes() const {
    std::vector<int> out;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].var < 0) out.push_back(static_cast<int>(i));
    return out;
}

bool HybridTree::fully_expanded() const {
    for (const auto& nd : nodes)
        if (nd.var < 0 && !payloads[nd.payload].is_const) return false;
    return true;
}

DecisionTree HybridTree::to_decision_tree() const {
    if (!fully_expanded()) throw ValidationError("hybrid tree still has channel leaves");
    DecisionTree t;
    auto rec = [&](auto&& self, int idx) -> int {
        const auto& nd = nodes[idx];
        if (nd.var < 0) return t.add_leaf(payloads[nd.payload].value);
        int l = self(self, nd.left);
        int r = self(self, nd.right);
        return t.add_node(nd.var, l, r);
    };
    t.root = rec(rec, root);
    return t;
}

namespace {

// clone with the leaf replaced; when subtree_var >= 0 the leaf becomes a node
// querying it with two fresh payload leaves, otherwise a single new payload
HybridTree graft(const HybridTree& t, int leaf_node, int subtree_var,
                 std::vector<HybridTree::Payload> payloads) {
    HybridTree out;
    out.n = t.n;
    auto rec = [&](auto&& self, int idx) -> int {
        const auto& nd = t.nodes[idx];
        if (idx == leaf_node) {
            if (subtree_var < 0) {
                out.payloads.push_back(payloads[0]);
                out.nodes.push_back({-1, -1, -1, static_cast<int>(out.payloads.size()) - 1});
                return static_cast<int>(out.nodes.size()) - 1;
            }
            out.payloads.push_back(payloads[0]);
            int pl = static_cast<int>(out.payloads.size()) - 1;
            out.payloads.push_back(payloads[1]);
            int pr = static_cast<int>(out.payloads.size()) - 1;
            out.nodes.push_back({-1, -1, -1, pl});
            int l = static_cast<int>(out.nodes.size()) - 1;
            out.nodes.push_back({-1, -1, -1, pr});
            int r = static_cast<int>(out.nodes.size()) - 1;
            out.nodes.push_back({subtree_var, l, r, -1});
            return static_cast<int>(out.nodes.size()) - 1;
        }
        if (nd.var < 0) {
            out.payloads.push_back(t.payloads[nd.payload]);
            out.nodes.push_back({-1, -1, -1, static_cast<int>(out.payloads.size()) - 1});
            return static_cast<int>(out.nodes.size()) - 1;
        }
        int l = self(self, nd.left);
        int r = self(self, nd.right);
        out.nodes.push_back({nd.var, l, r, -1});
        return static_cast<int>(out.nodes.size()) - 1;
    };
    out.root = rec(rec, t.root);
    return out;
}

DecisionTree subtree_of(const DecisionTree& src, int idx) {
    DecisionTree t;
    auto rec = [&](auto&& self, int i) -> int {
        const auto& nd = src.nodes[i];
        if (nd.var < 0) return t.add_leaf(nd.leaf);
        int l = self(self, nd.left);
        int r = self(self, nd.right);
        return t.add_node(nd.var, l, r);
    };
    t.root = rec(rec, idx);
    return t;
}

}  // namespace

std::vector<std::pair<Rat, HybridTree>> expand_leaf(const HybridTree& t, int leaf_node) {
    if (leaf_node < 0 || leaf_node >= static_cast<int>(t.nodes.size()) ||
        t.nodes[leaf_node].var >= 0)
        throw ValidationError("expand_leaf: index is not a leaf");
    const HybridTree::Payload& p = t.payloads[t.nodes[leaf_node].payload];
    if (p.is_const) return {{Rat(1), t}};

    const auto& nd = p.tau.nodes[p.tau.root];
    if (nd.var < 0) {
        // base case: constant subtree, deterministic leaf
        HybridTree::Payload np;
        np.is_const = true;
        np.value = nd.leaf;
        return {{Rat(1), graft(t, leaf_node, -1, {np})}};
    }

    int i = local_output(p.out_ids, nd.var);
    std::vector<std::pair<Rat, HybridTree>> out;
    if (p.ch.b[i] == -1) {
        Rat w_plus = row_prob_plus(p.ch.table[0], i);
        for (int omega = 0; omega < 2; ++omega) {
            Rat w = omega == 0 ? w_plus : 1 - w_plus;
            if (w == 0) continue;
            HybridTree::Payload np;
            np.is_const = false;
            np.tau = subtree_of(p.tau, omega == 0 ? nd.left : nd.right);
            np.ch = condition(p.ch, {i}, static_cast<uint32_t>(omega));
            np.in_ids = p.in_ids;
            np.out_ids = erase_at(p.out_ids, i);
            out.push_back({w, graft(t, leaf_node, -1, {np})});
        }
        return out;
    }

    int beta = p.ch.b[i];
    int x_var = p.in_ids[beta];
    Rat pp = row_prob_plus(p.ch.table[0], i);
    Rat qq = row_prob_plus(p.ch.table[std::size_t(1) << beta], i);
    UnivariateMix mix = decompose_univariate(pp, qq);
    const std::array<std::tuple<Rat, int, int>, 4> branches{
        std::tuple<Rat, int, int>{mix.a_pp, 0, 0},
        std::tuple<Rat, int, int>{mix.a_mm, 1, 1},
        std::tuple<Rat, int, int>{mix.a_pm, 0, 1},
        std::tuple<Rat, int, int>{mix.a_mp, 1, 0}};
    for (const auto& [w, lo, ro] : branches) {
        if (w == 0) continue;
        HybridTree::Payload left, right;
        left.is_const = right.is_const = false;
        left.tau = subtree_of(p.tau, lo == 0 ? nd.left : nd.right);
        right.tau = subtree_of(p.tau, ro == 0 ? nd.left : nd.right);
        left.ch = condition(p.ch, {i}, static_cast<uint32_t>(lo), std::make_pair(beta, +1));
        right.ch = condition(p.ch, {i}, static_cast<uint32_t>(ro), std::make_pair(beta, -1));
        left.in_ids = right.in_ids = erase_at(p.in_ids, beta);
        left.out_ids = right.out_ids = erase_at(p.out_ids, i);
        out.push_back({w, graft(t, leaf_node, x_var, {left, right})});
    }
    return out;
}

// ---- text format ---------------------------------------------------------

namespace {

std::string next_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        auto end = line.find_last_not_of(" \t\r");
        return line.substr(pos, end - pos + 1);
    }
    return {};
}

}  // namespace

TreeDistribution parse_treedist(std::istream& in) {
    std::string header = next_line(in);
    if (header.rfind("treedist", 0) != 0) throw ParseError("expected 'treedist' header");
    std::istringstream hs(header);
    std::string tok;
    int n = -1;
    long count = -1;
    while (hs >> tok) {
        if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
        if (tok.rfind("count=", 0) == 0) count = std::stol(tok.substr(6));
    }
    if (n < 0 || count < 0) throw ParseError("treedist header needs n= and count=");
    TreeDistribution td;
    td.n = n;
    for (long i = 0; i < count; ++i) {
        std::string wline = next_line(in);
        if (wline.rfind("w=", 0) != 0) throw ParseError("expected w=<p/q> line");
        Rat w = parse_rat(wline.substr(2));
        std::string tline = next_line(in);
        if (tline.empty()) throw ParseError("treedist truncated");
        td.entries.push_back({w, parse_tree(tline)});
    }
    td.validate();
    return td;
}

void write_treedist(std::ostream& out, const TreeDistribution& td) {
    out << "treedist n=" << td.n << " count=" << td.entries.size() << "\n";
    for (const auto& [w, tree] : td.entries) {
        out << "w=" << rat_to_string(w) << "\n";
        out << tree_to_string(tree) << "\n";
    }
}

}  // namespace qpar
