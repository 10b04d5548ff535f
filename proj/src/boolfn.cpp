#include "qpar/boolfn.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace qpar {

Restriction sample_restriction(int n, const Rat& delta, uint64_t seed) {
    if (delta < 0 || delta > 1) throw ValidationError("sample_restriction: delta outside [0,1]");
    SplitRng rng = SplitRng(seed).child("restriction");
    Restriction rho;
    rho.n = n;
    rho.assign.resize(n);
    // star iff u < delta*2^64, compared exactly
    Rat scale = rat_pow2(64);
    for (int i = 0; i < n; ++i) {
        Rat u(rng.next());
        if (u < delta * scale) {
            rho.assign[i] = 0;
        } else {
            rho.assign[i] = static_cast<int8_t>(rng.pm1());
        }
    }
    return rho;
}

int eval_dt(const DecisionTree& t, uint32_t x) {
    if (t.empty()) throw ValidationError("eval_dt: empty tree");
    int cur = t.root;
    while (t.nodes[cur].var >= 0) {
        const auto& nd = t.nodes[cur];
        cur = ((x >> nd.var) & 1) ? nd.right : nd.left;  // bit 1 encodes -1
    }
    return t.nodes[cur].leaf;
}

int dt_depth(const DecisionTree& t) {
    if (t.empty()) return 0;
    auto rec = [&](auto&& self, int idx) -> int {
        const auto& nd = t.nodes[idx];
        if (nd.var < 0) return 0;
        return 1 + std::max(self(self, nd.left), self(self, nd.right));
    };
    return rec(rec, t.root);
}

bool dt_is_canonical(const DecisionTree& t) {
    if (t.empty()) return true;
    std::vector<int> path;
    auto rec = [&](auto&& self, int idx) -> bool {
        const auto& nd = t.nodes[idx];
        if (nd.var < 0) return true;
        for (int v : path)
            if (v == nd.var) return false;
        path.push_back(nd.var);
        bool ok = self(self, nd.left) && self(self, nd.right);
        path.pop_back();
        return ok;
    };
    return rec(rec, t.root);
}

DecisionTree dt_canonicalize(const DecisionTree& t) {
    DecisionTree out;
    if (t.empty()) return out;
    // assigned[v]: 0 unknown, +1 left taken, -1 right taken
    std::vector<int8_t> assigned(static_cast<std::size_t>(t.max_var() + 1), 0);
    auto rec = [&](auto&& self, int idx) -> int {
        const auto& nd = t.nodes[idx];
        if (nd.var < 0) return out.add_leaf(nd.leaf);
        if (assigned[nd.var] == 1) return self(self, nd.left);
        if (assigned[nd.var] == -1) return self(self, nd.right);
        assigned[nd.var] = 1;
        int l = self(self, nd.left);
        assigned[nd.var] = -1;
        int r = self(self, nd.right);
        assigned[nd.var] = 0;
        return out.add_node(nd.var, l, r);
    };
    out.root = rec(rec, t.root);
    return out;
}

// ---- formats -----------------------------------------------------------

std::string mask_to_string(uint32_t mask, int n) {
    std::string s(static_cast<std::size_t>(n), '0');
    for (int i = 0; i < n; ++i)
        if ((mask >> i) & 1) s[i] = '1';  // variable 1 is the leftmost character
    return s;
}

uint32_t mask_from_string(const std::string& s, int n) {
    if (static_cast<int>(s.size()) != n) throw ParseError("mask '" + s + "' has wrong width");
    uint32_t m = 0;
    for (int i = 0; i < n; ++i) {
        if (s[i] == '1') m |= 1u << i;
        else if (s[i] != '0') throw ParseError("mask '" + s + "' is not binary");
    }
    return m;
}

namespace {

std::string next_content_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        return line;
    }
    return {};
}

// splits "k=v" fields on whitespace
std::string field(const std::string& line, const std::string& key) {
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) {
        if (tok.rfind(key + "=", 0) == 0) return tok.substr(key.size() + 1);
    }
    throw ParseError("missing field '" + key + "' in: " + line);
}

}  // namespace

BoolFnQ parse_boolfn(std::istream& in) {
    std::string header = next_content_line(in);
    if (header.rfind("boolfn", 0) != 0) throw ParseError("expected 'boolfn' header");
    int n = std::stoi(field(header, "n"));
    std::string rng = field(header, "range");
    Range range;
    if (rng == "pm1") range = Range::pm_one;
    else if (rng == "real") range = Range::real;
    else throw ParseError("range must be pm1 or real");
    if (n < 0) throw ParseError("boolfn: negative arity");
    check_guard("boolfn.arity", 20, n);

    std::vector<Rat> values(std::size_t(1) << n);
    for (uint32_t expect = 0; expect < values.size(); ++expect) {
        std::string line = next_content_line(in);
        if (line.empty()) throw ParseError("truth table truncated");
        std::istringstream iss(line);
        std::string mask_s, val_s;
        if (!(iss >> mask_s >> val_s)) throw ParseError("bad table row: " + line);
        uint32_t mask = mask_from_string(mask_s, n);
        if (mask != expect) throw ParseError("masks must appear in ascending order");
        values[mask] = parse_rat(val_s);
    }
    return BoolFnQ(n, range, std::move(values));
}

void write_boolfn(std::ostream& out, const BoolFnQ& f) {
    out << "boolfn n=" << f.n << " range=" << (f.range == Range::pm_one ? "pm1" : "real") << "\n";
    for (uint32_t x = 0; x < f.size(); ++x)
        out << mask_to_string(x, f.n) << " " << rat_to_string(f.values[x]) << "\n";
}

void write_boolfn(std::ostream& out, const BoolFnD& f) {
    out << "boolfn n=" << f.n << " range=" << (f.range == Range::pm_one ? "pm1" : "real") << "\n";
    for (uint32_t x = 0; x < f.size(); ++x)
        out << mask_to_string(x, f.n) << " " << double_to_string(f.values[x]) << "\n";
}

namespace {

struct TreeParser {
    const std::string& s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    int parse(DecisionTree& t) {
        skip_ws();
        if (pos >= s.size()) throw ParseError("tree text truncated");
        if (s[pos] == '(') {
            ++pos;
            skip_ws();
            if (pos >= s.size() || s[pos] != 'x') throw ParseError("expected x<i> after '('");
            ++pos;
            std::size_t start = pos;
            while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
            if (start == pos) throw ParseError("expected variable index after 'x'");
            int var = std::stoi(s.substr(start, pos - start));
            if (var < 1) throw ParseError("variable indices are 1-based");
            int left = parse(t);
            int right = parse(t);
            skip_ws();
            if (pos >= s.size() || s[pos] != ')') throw ParseError("expected ')'");
            ++pos;
            return t.add_node(var - 1, left, right);
        }
        if (s.compare(pos, 2, "+1") == 0) {
            pos += 2;
            return t.add_leaf(1);
        }
        if (s.compare(pos, 2, "-1") == 0) {
            pos += 2;
            return t.add_leaf(-1);
        }
        throw ParseError("expected '(', '+1' or '-1' in tree text");
    }
};

void write_tree_rec(std::string& out, const DecisionTree& t, int idx) {
    const auto& nd = t.nodes[idx];
    if (nd.var < 0) {
        out += nd.leaf > 0 ? "+1" : "-1";
        return;
    }
    out += "(x" + std::to_string(nd.var + 1) + " ";
    write_tree_rec(out, t, nd.left);
    out += " ";
    write_tree_rec(out, t, nd.right);
    out += ")";
}

}  // namespace

DecisionTree parse_tree(const std::string& text) {
    DecisionTree t;
    TreeParser p{text};
    t.root = p.parse(t);
    p.skip_ws();
    if (p.pos != text.size()) throw ParseError("trailing characters after tree");
    return t;
}

std::string tree_to_string(const DecisionTree& t) {
    if (t.empty()) throw ValidationError("tree_to_string: empty tree");
    std::string out;
    write_tree_rec(out, t, t.root);
    return out;
}

}  // namespace qpar
