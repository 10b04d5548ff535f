#include "qpar/nsc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace qpar {

namespace {

constexpr int kRatTableGuard = 16;
constexpr int kF64TableGuard = 20;

template <class T>
void check_table_guard(int n, int N) {
    int limit = std::is_same_v<T, Rat> ? kRatTableGuard : kF64TableGuard;
    if (n < 0 || N < 0) throw ValidationError("channel arities must be nonnegative");
    check_guard("nsc.table_bits", limit, n + N);
}

template <class T>
bool near_zero(const T& v, double tol) {
    if constexpr (std::is_same_v<T, Rat>) {
        (void)tol;
        return v == 0;
    } else {
        return std::abs(v) <= tol;
    }
}

uint32_t extract_bits(uint32_t y, const std::vector<int>& idx) {
    uint32_t out = 0;
    for (std::size_t i = 0; i < idx.size(); ++i)
        if ((y >> idx[i]) & 1) out |= 1u << i;
    return out;
}

// marginal of one table row onto the outputs in idx
template <class T>
std::vector<T> row_marginal(const std::vector<T>& row, int N, const std::vector<int>& idx) {
    std::vector<T> out(std::size_t(1) << idx.size(), T(0));
    for (uint32_t y = 0; y < (1u << N); ++y) out[extract_bits(y, idx)] += row[y];
    return out;
}

}  // namespace

template <class T>
void NsChannel<T>::validate(double structural_tol) const {
    check_table_guard<T>(n, N);
    if (static_cast<int>(b.size()) != N) throw ValidationError("channel: lightcone map length != N");
    for (int v : b)
        if (v != -1 && (v < 0 || v >= n))
            throw ValidationError("channel: lightcone map entry out of range");
    if (table.size() != rows()) throw ValidationError("channel: wrong row count");
    for (const auto& row : table) {
        if (row.size() != cols()) throw ValidationError("channel: wrong row length");
        if constexpr (std::is_same_v<T, Rat>) {
            Rat s(0);
            for (const Rat& p : row) {
                if (p < 0) throw ValidationError("channel: negative probability");
                s += p;
            }
            if (s != 1) throw ValidationError("channel: row does not sum to 1");
        } else {
            double s = 0;
            for (double p : row) {
                if (p < -structural_tol) throw ValidationError("channel: negative probability");
                s += p;
            }
            if (std::abs(s - 1.0) > structural_tol)
                throw ValidationError("channel: row does not sum to 1");
        }
    }
    if (!flagged.empty() && flagged.size() != rows())
        throw ValidationError("channel: flag vector length mismatch");
}

template <class T>
void OutputDistribution<T>::validate(double structural_tol) const {
    if (p.size() != (std::size_t(1) << arity))
        throw ValidationError("distribution has wrong length");
    if constexpr (std::is_same_v<T, Rat>) {
        Rat s(0);
        for (const Rat& x : p) {
            if (x < 0) throw ValidationError("negative probability");
            s += x;
        }
        if (s != 1) throw ValidationError("distribution does not sum to 1");
    } else {
        double s = 0;
        for (double x : p) s += x;
        if (std::abs(s - 1.0) > structural_tol)
            throw ValidationError("distribution does not sum to 1");
    }
}

template <class T>
std::optional<NsViolation> no_signaling_violation(const NsChannel<T>& ch, double tol) {
    ch.validate();
    check_guard("nsc.check_inputs", 8, ch.n);
    // subsets S in order of size then value, so the witness is minimal
    std::vector<uint32_t> subsets;
    for (uint32_t s = 0; s < ch.rows(); ++s) subsets.push_back(s);
    std::stable_sort(subsets.begin(), subsets.end(), [](uint32_t a, uint32_t b) {
        return std::popcount(a) < std::popcount(b);
    });
    for (uint32_t s : subsets) {
        std::vector<int> t;
        for (int j = 0; j < ch.N; ++j)
            if (ch.b[j] == -1 || ((s >> ch.b[j]) & 1)) t.push_back(j);
        // group inputs by their restriction to s; compare against the class rep
        std::map<uint32_t, std::pair<uint32_t, std::vector<T>>> rep;
        for (uint32_t x = 0; x < ch.rows(); ++x) {
            auto marg = row_marginal(ch.table[x], ch.N, t);
            auto key = x & s;
            auto it = rep.find(key);
            if (it == rep.end()) {
                rep.emplace(key, std::make_pair(x, std::move(marg)));
                continue;
            }
            for (std::size_t w = 0; w < marg.size(); ++w) {
                if (!near_zero<T>(marg[w] - it->second.second[w], tol)) {
                    return NsViolation{s, it->second.first, x, t};
                }
            }
        }
    }
    return std::nullopt;
}

template <class T>
NsChannel<T> reduce(const NsChannel<T>& ch, const std::vector<int>& t) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < 0 || t[i] >= ch.N) throw ValidationError("reduce: output index out of range");
        if (i > 0 && t[i] <= t[i - 1]) throw ValidationError("reduce: indices must ascend");
    }
    NsChannel<T> out;
    out.n = ch.n;
    out.N = static_cast<int>(t.size());
    out.b.reserve(t.size());
    for (int j : t) out.b.push_back(ch.b[j]);
    out.table.resize(ch.rows());
    for (std::size_t x = 0; x < ch.rows(); ++x) out.table[x] = row_marginal(ch.table[x], ch.N, t);
    out.flagged = ch.flagged;
    out.validate();
    return out;
}

template <class T>
NsChannel<T> condition(const NsChannel<T>& ch, const std::vector<int>& j_idx, uint32_t y,
                       std::optional<std::pair<int, int>> x_fix) {
    for (std::size_t i = 0; i < j_idx.size(); ++i) {
        if (j_idx[i] < 0 || j_idx[i] >= ch.N)
            throw ValidationError("condition: output index out of range");
        if (i > 0 && j_idx[i] <= j_idx[i - 1]) throw ValidationError("condition: indices must ascend");
    }
    int fix_in = -1, fix_val = 0;
    if (x_fix) {
        fix_in = x_fix->first;
        fix_val = x_fix->second;
        if (fix_in < 0 || fix_in >= ch.n) throw ValidationError("condition: input index out of range");
        if (fix_val != 1 && fix_val != -1) throw ValidationError("condition: fixed value must be +-1");
    }

    std::vector<int> rest;  // surviving outputs
    {
        std::size_t ji = 0;
        for (int j = 0; j < ch.N; ++j) {
            if (ji < j_idx.size() && j_idx[ji] == j) ++ji;
            else rest.push_back(j);
        }
    }

    NsChannel<T> out;
    out.n = x_fix ? ch.n - 1 : ch.n;
    out.N = static_cast<int>(rest.size());
    for (int j : rest) {
        int src = ch.b[j];
        int dst;
        if (src == -1) dst = -1;
        else if (x_fix && src == fix_in) dst = -1;  // its input is now hard-coded
        else if (x_fix && src > fix_in) dst = src - 1;
        else dst = src;
        out.b.push_back(dst);
    }
    out.table.resize(std::size_t(1) << out.n);
    out.flagged.assign(std::size_t(1) << out.n, false);

    bool any_support = false;
    for (uint32_t xr = 0; xr < out.table.size(); ++xr) {
        uint32_t x;
        if (x_fix) {
            uint32_t low = xr & ((1u << fix_in) - 1);
            uint32_t high = (xr >> fix_in) << (fix_in + 1);
            x = low | high | (fix_val == -1 ? (1u << fix_in) : 0u);
        } else {
            x = xr;
        }
        const auto& row = ch.table[x];
        T denom(0);
        for (uint32_t yf = 0; yf < ch.cols(); ++yf)
            if (extract_bits(yf, j_idx) == y) denom += row[yf];
        auto& orow = out.table[xr];
        orow.assign(std::size_t(1) << out.N, T(0));
        bool zero = near_zero<T>(denom, 1e-300);
        if constexpr (std::is_same_v<T, Rat>) zero = (denom == 0);
        if (zero) {
            // flagged uniform fallback; downstream weights for such branches are zero
            T u;
            if constexpr (std::is_same_v<T, Rat>) u = rat_pow2(-out.N);
            else u = std::ldexp(1.0, -out.N);
            for (auto& v : orow) v = u;
            out.flagged[xr] = true;
            continue;
        }
        any_support = true;
        for (uint32_t yf = 0; yf < ch.cols(); ++yf) {
            if (extract_bits(yf, j_idx) != y) continue;
            orow[extract_bits(yf, rest)] += row[yf];
        }
        for (auto& v : orow) v /= denom;
        if (!ch.flagged.empty() && ch.flagged[x]) out.flagged[xr] = true;
    }
    if (!any_support)
        throw ValidationError("condition: event has probability zero for every input");
    out.validate();
    return out;
}

template <class T>
OutputDistribution<T> pushforward(const NsChannel<T>& ch, const std::vector<T>& input_dist) {
    if (input_dist.size() != ch.rows()) throw ValidationError("pushforward: input length mismatch");
    OutputDistribution<T> mu;
    mu.arity = ch.N;
    mu.p.assign(ch.cols(), T(0));
    for (std::size_t x = 0; x < ch.rows(); ++x) {
        if (input_dist[x] == T(0)) continue;
        for (std::size_t y = 0; y < ch.cols(); ++y) mu.p[y] += input_dist[x] * ch.table[x][y];
    }
    mu.validate();
    return mu;
}

template <class T>
std::vector<T> uniform_input(int n) {
    std::vector<T> p(std::size_t(1) << n);
    T u;
    if constexpr (std::is_same_v<T, Rat>) u = rat_pow2(-n);
    else u = std::ldexp(1.0, -n);
    for (auto& v : p) v = u;
    return p;
}

template <class T>
std::vector<T> parity_side_input(int n, int odd) {
    if (n < 1) throw ValidationError("parity-restricted input needs n >= 1");
    std::vector<T> p(std::size_t(1) << n, T(0));
    T u;
    if constexpr (std::is_same_v<T, Rat>) u = rat_pow2(-(n - 1));
    else u = std::ldexp(1.0, -(n - 1));
    for (uint32_t x = 0; x < p.size(); ++x)
        if ((std::popcount(x) & 1) == odd) p[x] = u;
    return p;
}

template <class T>
std::vector<T> uniform_even_input(int n) {
    return parity_side_input<T>(n, 0);
}
template <class T>
std::vector<T> uniform_odd_input(int n) {
    return parity_side_input<T>(n, 1);
}
template <class T>
std::vector<T> point_input(int n, uint32_t x) {
    std::vector<T> p(std::size_t(1) << n, T(0));
    if (x >= p.size()) throw ValidationError("point input out of range");
    p[x] = T(1);
    return p;
}

template <class T>
int kwise_level(const OutputDistribution<T>& mu, const OutputDistribution<T>& nu, double tol) {
    if (mu.arity != nu.arity) throw ValidationError("kwise_level: arity mismatch");
    std::vector<T> diff(mu.p.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = mu.p[i] - nu.p[i];
    wht_butterfly_generic(diff);  // character sums of the difference
    int level = mu.arity;
    for (uint32_t s = 0; s < diff.size(); ++s)
        if (!near_zero<T>(diff[s], tol)) level = std::min(level, std::popcount(s) - 1);
    return level;
}

template <class T>
int blockwise_level(const OutputDistribution<T>& mu, const OutputDistribution<T>& nu, int k,
                    double tol) {
    if (mu.arity != nu.arity) throw ValidationError("blockwise_level: arity mismatch");
    if (k < 1 || mu.arity % k != 0) throw ValidationError("blockwise_level: k must divide N");
    std::vector<T> diff(mu.p.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = mu.p[i] - nu.p[i];
    wht_butterfly_generic(diff);
    int level = mu.arity / k;
    for (uint32_t s = 0; s < diff.size(); ++s) {
        if (near_zero<T>(diff[s], tol)) continue;
        int blocks = 0;
        for (int bidx = 0; bidx < mu.arity / k; ++bidx) {
            uint32_t bmask = ((1u << k) - 1) << (bidx * k);
            if (s & bmask) ++blocks;
        }
        level = std::min(level, blocks - 1);
    }
    return level;
}

// ---- parity games ------------------------------------------------------

void ParityGame::validate() const {
    if (players < 1 || width_k < 1 || referee_m < 0)
        throw ValidationError("parity game: bad dimensions");
    if (predicate.range != Range::pm_one) throw ValidationError("parity game: predicate must be pm1");
    if (predicate.n != outputs()) throw ValidationError("parity game: predicate arity mismatch");
}

namespace {

// block lightcone map: output j belongs to player j/k, referee outputs to bottom
std::vector<int> block_map(int n, int k, int m) {
    std::vector<int> b(static_cast<std::size_t>(n * k + m), -1);
    for (int j = 0; j < n * k; ++j) b[j] = j / k;
    return b;
}

// no-signaling polytope over variables P(y|x), index x*2^N + y. Row
// stochasticity plus single-input-flip marginal equalities; flips chain and
// marginals commute, so these imply the full definition.
void add_ns_polytope(LpInstance& lp, int n, int k, int m) {
    const int N = n * k + m;
    const uint32_t X = 1u << n, Y = 1u << N;
    auto var = [N](uint32_t x, uint32_t y) { return static_cast<int>((x << N) | y); };
    for (uint32_t x = 0; x < X; ++x) {
        std::vector<std::pair<int, Rat>> row;
        for (uint32_t y = 0; y < Y; ++y) row.push_back({var(x, y), Rat(1)});
        lp.add_row(std::move(row), Rel::eq, Rat(1));
    }
    for (int i = 0; i < n; ++i) {
        std::vector<int> rest;
        for (int j = 0; j < N; ++j)
            if (j / k != i || j >= n * k) rest.push_back(j);
        const uint32_t W = 1u << rest.size();
        for (uint32_t x = 0; x < X; ++x) {
            if ((x >> i) & 1) continue;
            uint32_t x2 = x | (1u << i);
            for (uint32_t w = 0; w < W; ++w) {
                std::vector<std::pair<int, Rat>> row;
                for (uint32_t o = 0; o < (1u << k); ++o) {
                    uint32_t y = 0;
                    for (std::size_t t = 0; t < rest.size(); ++t)
                        if ((w >> t) & 1) y |= 1u << rest[t];
                    y |= o << (i * k);
                    row.push_back({var(x, y), Rat(1)});
                    row.push_back({var(x2, y), Rat(-1)});
                }
                lp.add_row(std::move(row), Rel::eq, Rat(0));
            }
        }
    }
}

NsChannelQ channel_from_point(const std::vector<Rat>& point, int n, int k, int m) {
    const int N = n * k + m;
    NsChannelQ ch;
    ch.n = n;
    ch.N = N;
    ch.b = block_map(n, k, m);
    ch.table.assign(std::size_t(1) << n, std::vector<Rat>(std::size_t(1) << N));
    for (uint32_t x = 0; x < ch.rows(); ++x)
        for (uint32_t y = 0; y < ch.cols(); ++y) ch.table[x][y] = point[(x << N) | y];
    ch.validate();
    return ch;
}

}  // namespace

NsChannelQ ns_polytope_argmax(int n, int k, int m, const std::vector<Rat>& objective,
                              Rat* value) {
    check_guard("game.players", 4, n);
    check_guard("game.width", 2, k);
    check_guard("game.referee", 2, m);
    const int N = n * k + m;
    if (objective.size() != (std::size_t(1) << (n + N)))
        throw ValidationError("polytope objective has wrong length");
    LpInstance lp;
    for (const Rat& c : objective) lp.add_var(c, true);
    add_ns_polytope(lp, n, k, m);
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal) throw ValidationError("polytope LP did not solve");
    if (value) *value = res.value;
    NsChannelQ ch = channel_from_point(res.point, n, k, m);
    if (no_signaling_violation(ch))
        throw ValidationError("polytope vertex fails the no-signaling check");
    ch.ns_checked = true;
    return ch;
}

GameValue game_value_nosignaling(const ParityGame& g) {
    g.validate();
    const int n = g.players, k = g.width_k, m = g.referee_m;
    const int N = g.outputs();
    std::vector<Rat> objective;
    objective.reserve(std::size_t(1) << (n + N));
    Rat scale = rat_pow2(-n);
    for (uint32_t x = 0; x < (1u << n); ++x) {
        int par = (std::popcount(x) & 1) ? -1 : 1;
        for (uint32_t y = 0; y < (1u << N); ++y) {
            bool win = (g.predicate.values[y] == Rat(par));
            objective.push_back(win ? scale : Rat(0));
        }
    }
    GameValue gv;
    gv.witness = ns_polytope_argmax(n, k, m, objective, &gv.value);
    return gv;
}

Rat best_classical_value(const ParityGame& g, int count, uint64_t seed) {
    g.validate();
    const int n = g.players, k = g.width_k, m = g.referee_m;
    SplitRng rng = SplitRng(seed).child("classical-strategies");
    Rat best(0);
    for (int trial = 0; trial < count; ++trial) {
        std::vector<std::array<uint32_t, 2>> outs(static_cast<std::size_t>(n));
        for (auto& o : outs) {
            o[0] = static_cast<uint32_t>(rng.below(1u << k));
            o[1] = static_cast<uint32_t>(rng.below(1u << k));
        }
        uint32_t ref = m > 0 ? static_cast<uint32_t>(rng.below(1u << m)) : 0;
        int wins = 0;
        for (uint32_t x = 0; x < (1u << n); ++x) {
            uint32_t y = ref << (n * k);
            for (int i = 0; i < n; ++i) y |= outs[i][(x >> i) & 1] << (i * k);
            int par = (std::popcount(x) & 1) ? -1 : 1;
            if (g.predicate.values[y] == Rat(par)) ++wins;
        }
        Rat value = Rat(wins) * rat_pow2(-n);
        if (value > best) best = value;
    }
    return best;
}

// ---- quantum channels --------------------------------------------------

template <class C>
Mat<C> Mat<C>::identity(int d) {
    Mat<C> m;
    m.d = d;
    m.e.assign(static_cast<std::size_t>(d) * d, C(0));
    for (int i = 0; i < d; ++i) m.e[i * d + i] = C(1);
    return m;
}

template struct Mat<CplxQ>;
template struct Mat<cd>;

namespace {

template <class C>
struct CplxTraits;

template <>
struct CplxTraits<CplxQ> {
    using real_t = Rat;
    static CplxQ conj(const CplxQ& z) { return z.conj(); }
    static Rat re(const CplxQ& z) { return z.re; }
    static bool is_real(const CplxQ& z, double) { return z.im == 0; }
    static bool nonneg(const Rat& r, double) { return r >= 0; }
    static bool eq(const CplxQ& a, const CplxQ& b, double) { return a == b; }
};

template <>
struct CplxTraits<cd> {
    using real_t = double;
    static cd conj(const cd& z) { return std::conj(z); }
    static double re(const cd& z) { return z.real(); }
    static bool is_real(const cd& z, double tol) { return std::abs(z.imag()) <= tol; }
    static bool nonneg(double r, double tol) { return r >= -tol; }
    static bool eq(const cd& a, const cd& b, double tol) { return std::abs(a - b) <= tol; }
};

template <class C>
Mat<C> mat_mul(const Mat<C>& a, const Mat<C>& b) {
    Mat<C> out;
    out.d = a.d;
    out.e.assign(static_cast<std::size_t>(a.d) * a.d, C(0));
    for (int i = 0; i < a.d; ++i)
        for (int kk = 0; kk < a.d; ++kk) {
            const C& f = a.e[i * a.d + kk];
            for (int j = 0; j < a.d; ++j) out.e[i * a.d + j] += f * b.e[kk * a.d + j];
        }
    return out;
}

// Hermitian matrix is PSD iff every elementary symmetric function of the
// eigenvalues is nonnegative; computed from power sums tr(M^j) by Newton's
// identities, exactly on the rat path
template <class C>
bool psd_check(const Mat<C>& m, double tol) {
    using R = typename CplxTraits<C>::real_t;
    int d = m.d;
    std::vector<R> power(static_cast<std::size_t>(d) + 1, R(0));
    Mat<C> acc = Mat<C>::identity(d);
    for (int j = 1; j <= d; ++j) {
        acc = mat_mul(acc, m);
        C tr(0);
        for (int i = 0; i < d; ++i) tr += acc.e[i * d + i];
        if (!CplxTraits<C>::is_real(tr, tol)) return false;
        power[j] = CplxTraits<C>::re(tr);
    }
    std::vector<R> esym(static_cast<std::size_t>(d) + 1, R(0));
    esym[0] = R(1);
    for (int j = 1; j <= d; ++j) {
        R acc_e(0);
        for (int i = 1; i <= j; ++i) {
            R term = esym[j - i] * power[i];
            if (i % 2 == 0) acc_e -= term;
            else acc_e += term;
        }
        esym[j] = acc_e / R(j);
        if (!CplxTraits<C>::nonneg(esym[j], tol)) return false;
    }
    return true;
}

template <class C>
void validate_povm(const std::vector<Mat<C>>& elems, int d, double tol, const char* what) {
    if (elems.empty()) throw ValidationError(std::string(what) + ": empty POVM");
    Mat<C> sum;
    sum.d = d;
    sum.e.assign(static_cast<std::size_t>(d) * d, C(0));
    for (const auto& m : elems) {
        if (m.d != d) throw ValidationError(std::string(what) + ": dimension mismatch");
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                if (!CplxTraits<C>::eq(m.e[i * d + j], CplxTraits<C>::conj(m.e[j * d + i]), tol))
                    throw ValidationError(std::string(what) + ": element not Hermitian");
            }
        if (!psd_check(m, tol))
            throw ValidationError(std::string(what) + ": element not positive semidefinite");
        for (std::size_t i = 0; i < m.e.size(); ++i) sum.e[i] += m.e[i];
    }
    Mat<C> id = Mat<C>::identity(d);
    for (std::size_t i = 0; i < sum.e.size(); ++i)
        if (!CplxTraits<C>::eq(sum.e[i], id.e[i], tol))
            throw ValidationError(std::string(what) + ": elements do not sum to identity");
}

// applies m to the tensor slot with the given stride layout
template <class C>
std::vector<C> apply_slot(const std::vector<C>& psi, const Mat<C>& m, long stride, long block) {
    std::vector<C> out(psi.size(), C(0));
    long dim = static_cast<long>(psi.size());
    for (long base = 0; base < dim; base += block * m.d) {
        for (long off = 0; off < block; ++off) {
            for (int i = 0; i < m.d; ++i) {
                C acc(0);
                for (int j = 0; j < m.d; ++j)
                    acc += m.e[i * m.d + j] * psi[base + off + j * block];
                out[base + off + i * block] = acc;
            }
        }
    }
    (void)stride;
    return out;
}

}  // namespace

template <class C>
NsChannel<typename RealOf<C>::type> quantum_channel(
    const std::vector<C>& state, const std::vector<int>& party_dims,
    const std::vector<std::array<std::vector<Mat<C>>, 2>>& povms,
    const std::vector<Mat<C>>& referee_povm, int ref_dim, int width_k, int referee_m,
    double tol) {
    using R = typename CplxTraits<C>::real_t;
    const int n = static_cast<int>(party_dims.size());
    if (static_cast<int>(povms.size()) != n) throw ValidationError("quantum_channel: POVM count");
    long total = ref_dim;
    for (int d : party_dims) total *= d;
    if (static_cast<long>(state.size()) != total)
        throw ValidationError("quantum_channel: state dimension mismatch");
    const std::size_t y_per_party = std::size_t(1) << width_k;
    for (int i = 0; i < n; ++i)
        for (int bit = 0; bit < 2; ++bit) {
            if (povms[i][bit].size() != y_per_party)
                throw ValidationError("quantum_channel: POVM outcome count != 2^k");
            validate_povm(povms[i][bit], party_dims[i], tol, "party POVM");
        }
    std::vector<Mat<C>> ref = referee_povm;
    if (referee_m == 0 && ref.empty()) ref.push_back(Mat<C>::identity(ref_dim));
    if (ref.size() != (std::size_t(1) << referee_m))
        throw ValidationError("quantum_channel: referee POVM outcome count != 2^m");
    validate_povm(ref, ref_dim, tol, "referee POVM");

    R norm(0);
    for (const C& a : state) norm += CplxTraits<C>::re(CplxTraits<C>::conj(a) * a);
    if constexpr (std::is_same_v<C, cd>) {
        if (std::abs(norm - 1.0) > tol) throw ValidationError("quantum_channel: state not normalized");
    } else {
        if (norm == 0) throw ValidationError("quantum_channel: zero state");
    }

    // strides: party 0 is the most significant slot, referee the least
    std::vector<long> block(static_cast<std::size_t>(n) + 1);
    block[n] = 1;  // referee block
    long running = ref_dim;
    for (int i = n - 1; i >= 0; --i) {
        block[i] = running;
        running *= party_dims[i];
    }

    NsChannel<R> ch;
    ch.n = n;
    ch.N = n * width_k + referee_m;
    check_table_guard<R>(ch.n, ch.N);
    ch.b = block_map(n, width_k, referee_m);
    ch.table.assign(std::size_t(1) << n, std::vector<R>(std::size_t(1) << ch.N, R(0)));
    for (uint32_t x = 0; x < ch.rows(); ++x) {
        for (uint32_t y = 0; y < ch.cols(); ++y) {
            std::vector<C> phi = state;
            for (int i = 0; i < n; ++i) {
                uint32_t yi = (y >> (i * width_k)) & (y_per_party - 1);
                phi = apply_slot(phi, povms[i][(x >> i) & 1][yi], 0, block[i]);
            }
            if (referee_m > 0 || ref_dim > 1) {
                uint32_t yr = y >> (n * width_k);
                phi = apply_slot(phi, ref[yr], 0, block[n]);
            }
            C ip(0);
            for (std::size_t idx = 0; idx < phi.size(); ++idx)
                ip += CplxTraits<C>::conj(state[idx]) * phi[idx];
            if (!CplxTraits<C>::is_real(ip, tol))
                throw ValidationError("quantum_channel: non-real outcome probability");
            ch.table[x][y] = CplxTraits<C>::re(ip) / norm;
            if constexpr (std::is_same_v<R, double>) {
                if (ch.table[x][y] < 0 && ch.table[x][y] > -tol) ch.table[x][y] = 0;
            }
        }
    }
    ch.validate();
    return ch;
}

template NsChannelQ quantum_channel<CplxQ>(const std::vector<CplxQ>&, const std::vector<int>&,
                                           const std::vector<std::array<std::vector<MatQ>, 2>>&,
                                           const std::vector<MatQ>&, int, int, int, double);
template NsChannelD quantum_channel<cd>(const std::vector<cd>&, const std::vector<int>&,
                                        const std::vector<std::array<std::vector<MatD>, 2>>&,
                                        const std::vector<MatD>&, int, int, int, double);

// ---- generators --------------------------------------------------------

NsChannelQ identity_channel(int n) {
    NsChannelQ ch;
    ch.n = n;
    ch.N = n;
    check_table_guard<Rat>(n, n);
    ch.b.resize(n);
    for (int j = 0; j < n; ++j) ch.b[j] = j;
    ch.table.assign(std::size_t(1) << n, std::vector<Rat>(std::size_t(1) << n, Rat(0)));
    for (uint32_t x = 0; x < ch.rows(); ++x) ch.table[x][x] = 1;
    ch.validate();
    return ch;
}

NsChannelQ parity_channel(int n) {
    NsChannelQ ch;
    ch.n = n;
    ch.N = n;
    check_table_guard<Rat>(n, n);
    ch.b.resize(n);
    for (int j = 0; j < n; ++j) ch.b[j] = j;
    Rat u = rat_pow2(-(n - 1));
    ch.table.assign(std::size_t(1) << n, std::vector<Rat>(std::size_t(1) << n, Rat(0)));
    for (uint32_t x = 0; x < ch.rows(); ++x) {
        int par = std::popcount(x) & 1;
        for (uint32_t y = 0; y < ch.cols(); ++y)
            if ((std::popcount(y) & 1) == par) ch.table[x][y] = u;
    }
    ch.validate();
    return ch;
}

NsChannelQ pr_box_channel() {
    NsChannelQ ch;
    ch.n = 2;
    ch.N = 2;
    ch.b = {0, 1};
    ch.table.assign(4, std::vector<Rat>(4, Rat(0)));
    for (uint32_t x = 0; x < 4; ++x) {
        int target = ((x & 1) && (x & 2)) ? 1 : 0;  // x1 and x2
        for (uint32_t y = 0; y < 4; ++y)
            if ((std::popcount(y) & 1) == target) ch.table[x][y] = Rat(1, 2);
    }
    ch.validate();
    return ch;
}

NsChannelQ random_local_mixture(int n, int k, uint64_t seed) {
    check_table_guard<Rat>(n, n * k);
    SplitRng rng = SplitRng(seed).child("local-mixture");
    int strategies = 1 + static_cast<int>(rng.below(6));
    std::vector<long> raw(static_cast<std::size_t>(strategies));
    long total = 0;
    for (auto& w : raw) {
        w = 1 + static_cast<long>(rng.below(8));
        total += w;
    }
    NsChannelQ ch;
    ch.n = n;
    ch.N = n * k;
    ch.b = block_map(n, k, 0);
    ch.table.assign(std::size_t(1) << n, std::vector<Rat>(std::size_t(1) << ch.N, Rat(0)));
    for (int s = 0; s < strategies; ++s) {
        Rat w = frac(raw[s], total);
        std::vector<std::array<uint32_t, 2>> outs(static_cast<std::size_t>(n));
        for (auto& o : outs) {
            o[0] = static_cast<uint32_t>(rng.below(1u << k));
            o[1] = static_cast<uint32_t>(rng.below(1u << k));
        }
        for (uint32_t x = 0; x < ch.rows(); ++x) {
            uint32_t y = 0;
            for (int i = 0; i < n; ++i) y |= outs[i][(x >> i) & 1] << (i * k);
            ch.table[x][y] += w;
        }
    }
    ch.validate();
    return ch;
}

NsChannelQ random_polytope_vertex(int n, int k, uint64_t seed) {
    SplitRng rng = SplitRng(seed).child("polytope-vertex");
    const int N = n * k;
    std::vector<Rat> objective;
    objective.reserve(std::size_t(1) << (n + N));
    for (std::size_t i = 0; i < (std::size_t(1) << (n + N)); ++i)
        objective.push_back(frac(static_cast<long>(rng.below(16)), 16));
    return ns_polytope_argmax(n, k, 0, objective);
}

namespace {

std::vector<MatQ> basis_projectors_x() {
    // (I +- X)/2
    MatQ plus{2, {CplxQ(Rat(1, 2)), CplxQ(Rat(1, 2)), CplxQ(Rat(1, 2)), CplxQ(Rat(1, 2))}};
    MatQ minus{2, {CplxQ(Rat(1, 2)), CplxQ(Rat(-1, 2)), CplxQ(Rat(-1, 2)), CplxQ(Rat(1, 2))}};
    return {plus, minus};
}

std::vector<MatQ> basis_projectors_y() {
    // (I +- Y)/2
    MatQ plus{2, {CplxQ(Rat(1, 2)), CplxQ(Rat(0), Rat(-1, 2)), CplxQ(Rat(0), Rat(1, 2)),
                  CplxQ(Rat(1, 2))}};
    MatQ minus{2, {CplxQ(Rat(1, 2)), CplxQ(Rat(0), Rat(1, 2)), CplxQ(Rat(0), Rat(-1, 2)),
                   CplxQ(Rat(1, 2))}};
    return {plus, minus};
}

std::vector<MatQ> basis_projectors_z() {
    MatQ plus{2, {CplxQ(1), CplxQ(0), CplxQ(0), CplxQ(0)}};
    MatQ minus{2, {CplxQ(0), CplxQ(0), CplxQ(0), CplxQ(1)}};
    return {plus, minus};
}

}  // namespace

NsChannelQ ghz_channel(int parties) {
    if (parties < 2 || parties > 4) throw ValidationError("ghz_channel: 2..4 parties supported");
    std::vector<CplxQ> state(std::size_t(1) << parties, CplxQ(0));
    state.front() = CplxQ(1);
    state.back() = CplxQ(1);  // unnormalized (|0..0> + |1..1>)
    std::vector<int> dims(static_cast<std::size_t>(parties), 2);
    std::vector<std::array<std::vector<MatQ>, 2>> povms(static_cast<std::size_t>(parties));
    for (auto& p : povms) p = {basis_projectors_x(), basis_projectors_y()};
    return quantum_channel<CplxQ>(state, dims, povms, {}, 1, 1, 0);
}

NsChannelQ singlet_xz_channel() {
    std::vector<CplxQ> state{CplxQ(0), CplxQ(1), CplxQ(-1), CplxQ(0)};  // unnormalized singlet
    std::vector<std::array<std::vector<MatQ>, 2>> povms{
        {basis_projectors_x(), basis_projectors_z()},
        {basis_projectors_x(), basis_projectors_z()}};
    return quantum_channel<CplxQ>(state, {2, 2}, povms, {}, 1, 1, 0);
}

NsChannelD chsh_singlet_channel() {
    const double s = 1.0 / std::sqrt(2.0);
    std::vector<cd> state{cd(0), cd(s), cd(-s), cd(0)};
    auto proj = [](double zx, double xx) {
        // (I + zx Z + xx X)/2 and its complement
        MatD plus{2, {cd((1 + zx) / 2), cd(xx / 2), cd(xx / 2), cd((1 - zx) / 2)}};
        MatD minus{2, {cd((1 - zx) / 2), cd(-xx / 2), cd(-xx / 2), cd((1 + zx) / 2)}};
        return std::vector<MatD>{plus, minus};
    };
    std::vector<std::array<std::vector<MatD>, 2>> povms{
        {proj(1, 0), proj(0, 1)},          // Alice: Z, X
        {proj(s, s), proj(s, -s)}};        // Bob: (Z+X)/sqrt2, (Z-X)/sqrt2
    return quantum_channel<cd>(state, {2, 2}, povms, {}, 1, 1, 0);
}

// ---- text format -------------------------------------------------------

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

NsChannelQ parse_channel(std::istream& in) {
    std::string header = next_line(in);
    if (header.rfind("channel", 0) != 0) throw ParseError("expected 'channel' header");
    std::istringstream iss(header);
    std::string tok;
    int n = -1, N = -1;
    std::string arith, bspec;
    while (iss >> tok) {
        if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
        else if (tok.rfind("N=", 0) == 0) N = std::stoi(tok.substr(2));
        else if (tok.rfind("arith=", 0) == 0) arith = tok.substr(6);
        else if (tok.rfind("B=", 0) == 0) bspec = tok.substr(2);
    }
    if (n < 0 || N < 0) throw ParseError("channel header needs n= and N=");
    if (arith != "rat" && arith != "f64") throw ParseError("channel arith must be rat or f64");
    NsChannelQ ch;
    ch.n = n;
    ch.N = N;
    {
        std::istringstream bs(bspec);
        std::string part;
        while (std::getline(bs, part, ',')) {
            if (part == "_") ch.b.push_back(-1);
            else ch.b.push_back(std::stoi(part) - 1);
        }
        if (N > 0 && static_cast<int>(ch.b.size()) != N)
            throw ParseError("channel B list length != N");
        if (N == 0) ch.b.clear();
    }
    ch.table.assign(std::size_t(1) << n, {});
    for (uint32_t x = 0; x < ch.rows(); ++x) {
        std::string xline = next_line(in);
        if (xline.rfind("x=", 0) != 0) throw ParseError("expected x=<mask> block");
        if (mask_from_string(xline.substr(2), n) != x)
            throw ParseError("channel input blocks must appear in ascending order");
        auto& row = ch.table[x];
        row.assign(std::size_t(1) << N, Rat(0));
        for (uint32_t y = 0; y < ch.cols(); ++y) {
            std::string line = next_line(in);
            std::istringstream ls(line);
            std::string mask_s, val_s;
            if (!(ls >> mask_s >> val_s)) throw ParseError("bad channel row: " + line);
            if (mask_from_string(mask_s, N) != y)
                throw ParseError("channel outcome masks must appear in ascending order");
            row[y] = parse_rat(val_s);
        }
    }
    ch.validate();
    return ch;
}

template <class T>
void write_channel(std::ostream& out, const NsChannel<T>& ch) {
    out << "channel n=" << ch.n << " N=" << ch.N
        << " arith=" << (std::is_same_v<T, Rat> ? "rat" : "f64") << " B=";
    for (int j = 0; j < ch.N; ++j) {
        if (j) out << ",";
        if (ch.b[j] == -1) out << "_";
        else out << (ch.b[j] + 1);
    }
    out << "\n";
    for (uint32_t x = 0; x < ch.rows(); ++x) {
        out << "x=" << mask_to_string(x, ch.n) << "\n";
        for (uint32_t y = 0; y < ch.cols(); ++y) {
            out << mask_to_string(y, ch.N) << " ";
            if constexpr (std::is_same_v<T, Rat>) out << rat_to_string(ch.table[x][y]);
            else out << double_to_string(ch.table[x][y]);
            out << "\n";
        }
    }
}

NsChannelD channel_to_f64(const NsChannelQ& ch) {
    NsChannelD out;
    out.n = ch.n;
    out.N = ch.N;
    out.b = ch.b;
    out.flagged = ch.flagged;
    out.table.assign(ch.rows(), {});
    for (std::size_t x = 0; x < ch.rows(); ++x) {
        out.table[x].resize(ch.cols());
        for (std::size_t y = 0; y < ch.cols(); ++y) out.table[x][y] = ch.table[x][y].get_d();
    }
    out.validate();
    return out;
}

// ---- explicit instantiations -------------------------------------------

template struct NsChannel<Rat>;
template struct NsChannel<double>;
template struct OutputDistribution<Rat>;
template struct OutputDistribution<double>;

template std::optional<NsViolation> no_signaling_violation<Rat>(const NsChannelQ&, double);
template std::optional<NsViolation> no_signaling_violation<double>(const NsChannelD&, double);
template NsChannelQ reduce<Rat>(const NsChannelQ&, const std::vector<int>&);
template NsChannelD reduce<double>(const NsChannelD&, const std::vector<int>&);
template NsChannelQ condition<Rat>(const NsChannelQ&, const std::vector<int>&, uint32_t,
                                   std::optional<std::pair<int, int>>);
template NsChannelD condition<double>(const NsChannelD&, const std::vector<int>&, uint32_t,
                                      std::optional<std::pair<int, int>>);
template OutputDistribution<Rat> pushforward<Rat>(const NsChannelQ&, const std::vector<Rat>&);
template OutputDistribution<double> pushforward<double>(const NsChannelD&,
                                                        const std::vector<double>&);
template std::vector<Rat> uniform_input<Rat>(int);
template std::vector<double> uniform_input<double>(int);
template std::vector<Rat> uniform_even_input<Rat>(int);
template std::vector<double> uniform_even_input<double>(int);
template std::vector<Rat> uniform_odd_input<Rat>(int);
template std::vector<double> uniform_odd_input<double>(int);
template std::vector<Rat> point_input<Rat>(int, uint32_t);
template std::vector<double> point_input<double>(int, uint32_t);
template int kwise_level<Rat>(const OutputDistribution<Rat>&, const OutputDistribution<Rat>&,
                              double);
template int kwise_level<double>(const OutputDistribution<double>&,
                                 const OutputDistribution<double>&, double);
template int blockwise_level<Rat>(const OutputDistribution<Rat>&, const OutputDistribution<Rat>&,
                                  int, double);
template int blockwise_level<double>(const OutputDistribution<double>&,
                                     const OutputDistribution<double>&, int, double);
template void write_channel<Rat>(std::ostream&, const NsChannelQ&);
template void write_channel<double>(std::ostream&, const NsChannelD&);

}  // namespace qpar
