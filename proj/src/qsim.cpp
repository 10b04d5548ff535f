#include "qpar/qsim.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace qpar {

namespace {

Mat4Q kron2(const std::array<CplxQ, 4>& a, const std::array<CplxQ, 4>& b) {
    Mat4Q out{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    out[(2 * i + k) * 4 + (2 * j + l)] = a[2 * i + j] * b[2 * k + l];
    return out;
}

Mat4Q mul4(const Mat4Q& a, const Mat4Q& b) {
    Mat4Q out{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CplxQ acc;
            for (int k = 0; k < 4; ++k) acc += a[4 * i + k] * b[4 * k + j];
            out[4 * i + j] = acc;
        }
    return out;
}

Mat4 to_f64(const Mat4Q& a) {
    Mat4 out{};
    for (int i = 0; i < 16; ++i) out[i] = a[i].to_complex();
    return out;
}

const std::array<CplxQ, 4> kI1{CplxQ(1), CplxQ(0), CplxQ(0), CplxQ(1)};
const std::array<CplxQ, 4> kX1{CplxQ(0), CplxQ(1), CplxQ(1), CplxQ(0)};
const std::array<CplxQ, 4> kY1{CplxQ(0), CplxQ(Rat(0), Rat(-1)), CplxQ(Rat(0), Rat(1)), CplxQ(0)};
const std::array<CplxQ, 4> kZ1{CplxQ(1), CplxQ(0), CplxQ(0), CplxQ(-1)};
const std::array<CplxQ, 4> kS1{CplxQ(1), CplxQ(0), CplxQ(0), CplxQ(Rat(0), Rat(1))};

std::optional<std::array<CplxQ, 4>> named_1q_exact(const std::string& name) {
    if (name == "X") return kX1;
    if (name == "Y") return kY1;
    if (name == "Z") return kZ1;
    if (name == "S") return kS1;
    return std::nullopt;  // H and T are irrational
}

std::array<cd, 4> named_1q_f64(const std::string& name) {
    const double s = 1.0 / std::sqrt(2.0);
    if (name == "H") return {cd(s), cd(s), cd(s), cd(-s)};
    if (name == "T") return {cd(1), cd(0), cd(0), cd(s, s)};
    if (auto e = named_1q_exact(name)) {
        return {(*e)[0].to_complex(), (*e)[1].to_complex(), (*e)[2].to_complex(),
                (*e)[3].to_complex()};
    }
    throw ParseError("unknown 1-qubit gate '" + name + "'");
}

std::optional<Mat4Q> named_2q_exact(const std::string& name) {
    auto perm = [](int p0, int p1, int p2, int p3) {
        Mat4Q u{};
        int p[4] = {p0, p1, p2, p3};
        for (int col = 0; col < 4; ++col) u[4 * p[col] + col] = CplxQ(1);
        return u;
    };
    if (name == "ID") return perm(0, 1, 2, 3);
    if (name == "CNOT") return perm(0, 1, 3, 2);  // control q_a, target q_b
    if (name == "SWAP") return perm(0, 2, 1, 3);
    if (name == "CZ") {
        Mat4Q u = perm(0, 1, 2, 3);
        u[15] = CplxQ(-1);
        return u;
    }
    return std::nullopt;
}

}  // namespace

void Gate::check_unitary(double tol) const {
    // max norm of U^dag U - I
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            cd acc = 0;
            for (int k = 0; k < 4; ++k) acc += std::conj(u[4 * k + i]) * u[4 * k + j];
            if (std::abs(acc - (i == j ? cd(1) : cd(0))) > tol)
                throw ValidationError("gate is not unitary within tolerance");
        }
}

bool Gate::exactly_unitary() const {
    if (!has_exact) return false;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            CplxQ acc;
            for (int k = 0; k < 4; ++k) acc += u_exact[4 * k + i].conj() * u_exact[4 * k + j];
            if (!(acc == (i == j ? CplxQ(1) : CplxQ(0)))) return false;
        }
    return true;
}

Gate named_gate2(const std::string& name, int qa, int qb) {
    Gate g;
    g.qa = qa;
    g.qb = qb;
    g.name = name;
    auto e = named_2q_exact(name);
    if (!e) throw ParseError("unknown 2-qubit gate '" + name + "'");
    g.u_exact = *e;
    g.has_exact = true;
    g.u = to_f64(*e);
    return g;
}

Gate named_gate1(const std::string& name, int q, int partner) {
    Gate g;
    g.qa = q;
    g.qb = partner;
    g.name = name;
    g.one_qubit = true;
    if (auto e = named_1q_exact(name)) {
        g.u_exact = kron2(*e, kI1);
        g.has_exact = true;
        g.u = to_f64(g.u_exact);
    } else {
        auto m1 = named_1q_f64(name);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int k = 0; k < 2; ++k) g.u[(2 * i + k) * 4 + (2 * j + k)] = m1[2 * i + j];
    }
    return g;
}

Gate matrix_gate(int qa, int qb, const Mat4Q& entries) {
    Gate g;
    g.qa = qa;
    g.qb = qb;
    g.u_exact = entries;
    g.has_exact = true;
    g.u = to_f64(entries);
    if (!g.exactly_unitary()) g.has_exact = false;  // f64-only gate
    return g;
}

bool Circuit::exact_ok() const {
    for (const auto& layer : layers)
        for (const Gate& g : layer)
            if (!g.has_exact) return false;
    return true;
}

void Circuit::validate(double structural_tol) const {
    if (n < 0 || m < 0 || v < 0 || depth < 0) throw ValidationError("negative circuit field");
    if (v > m) throw ValidationError("advice register larger than ancilla register");
    if (static_cast<int>(layers.size()) != depth)
        throw ValidationError("layer count does not match depth");
    for (const auto& layer : layers) {
        std::vector<bool> used(static_cast<std::size_t>(qubits()), false);
        for (const Gate& g : layer) {
            if (g.qa == g.qb) throw ValidationError("gate acts twice on one qubit");
            for (int q : {g.qa, g.qb}) {
                if (q < 0 || q >= qubits()) throw ValidationError("gate qubit out of range");
                if (used[q]) throw ValidationError("overlapping gates within a layer");
                used[q] = true;
            }
            g.check_unitary(structural_tol);
        }
    }
    if (v > 0) {
        if (advice.size() != (std::size_t(1) << v))
            throw ValidationError("advice vector has wrong dimension");
        double norm = 0;
        for (const CplxQ& a : advice) norm += a.norm2().get_d();
        if (std::abs(norm - 1.0) > structural_tol)
            throw ValidationError("advice vector is not normalized");
    } else if (!advice.empty()) {
        throw ValidationError("advice present but v=0");
    }
}

Circuit Circuit::inverse() const {
    Circuit inv = *this;
    inv.layers.assign(layers.rbegin(), layers.rend());
    for (auto& layer : inv.layers)
        for (Gate& g : layer) {
            Mat4 u2;
            Mat4Q e2;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) {
                    u2[4 * i + j] = std::conj(g.u[4 * j + i]);
                    if (g.has_exact) e2[4 * i + j] = g.u_exact[4 * j + i].conj();
                }
            g.u = u2;
            if (g.has_exact) g.u_exact = e2;
            g.name.clear();
            g.one_qubit = false;
        }
    return inv;
}

namespace {

void apply_gate_exact(std::vector<CplxQ>& psi, int nq, const Gate& g) {
    const std::size_t da = std::size_t(1) << g.qa;
    const std::size_t db = std::size_t(1) << g.qb;
    const std::size_t len = std::size_t(1) << nq;
    const Mat4Q& u = g.u_exact;
    const std::size_t dlo = da < db ? da : db;
    const std::size_t dhi = da < db ? db : da;
    for (std::size_t i2 = 0; i2 < len; i2 += 2 * dhi)
        for (std::size_t i1 = i2; i1 < i2 + dhi; i1 += 2 * dlo)
            for (std::size_t i0 = i1; i0 < i1 + dlo; ++i0) {
                CplxQ x0 = psi[i0];
                CplxQ x1 = psi[i0 + db];
                CplxQ x2 = psi[i0 + da];
                CplxQ x3 = psi[i0 + da + db];
                psi[i0] = u[0] * x0 + u[1] * x1 + u[2] * x2 + u[3] * x3;
                psi[i0 + db] = u[4] * x0 + u[5] * x1 + u[6] * x2 + u[7] * x3;
                psi[i0 + da] = u[8] * x0 + u[9] * x1 + u[10] * x2 + u[11] * x3;
                psi[i0 + da + db] = u[12] * x0 + u[13] * x1 + u[14] * x2 + u[15] * x3;
            }
}

template <class Amp>
std::vector<Amp> initial_state(const Circuit& c, uint32_t x) {
    check_guard("qsim.qubits", 20, c.qubits());
    if (x >= (1u << c.n)) throw ValidationError("input mask out of range");
    std::vector<Amp> psi(std::size_t(1) << c.qubits());
    if (c.v == 0) {
        psi[x] = Amp(1);
    } else {
        int shift = c.qubits() - c.v;
        for (std::size_t a = 0; a < c.advice.size(); ++a) {
            if constexpr (std::is_same_v<Amp, CplxQ>) psi[x | (a << shift)] = c.advice[a];
            else psi[x | (a << shift)] = c.advice[a].to_complex();
        }
    }
    return psi;
}

}  // namespace

std::vector<cd> run_statevector(const Circuit& c, uint32_t x) {
    auto psi = initial_state<cd>(c, x);
    for (const auto& layer : c.layers)
        for (const Gate& g : layer) kern::apply_gate2(psi.data(), c.qubits(), g.qa, g.qb, g.u.data());
    return psi;
}

std::vector<CplxQ> run_statevector_exact(const Circuit& c, uint32_t x) {
    if (!c.exact_ok())
        throw ValidationError("circuit has gates without exact rational entries; rat path unavailable");
    auto psi = initial_state<CplxQ>(c, x);
    for (const auto& layer : c.layers)
        for (const Gate& g : layer) apply_gate_exact(psi, c.qubits(), g);
    return psi;
}

template <>
OutcomeDistribution<double> simulate<double>(const Circuit& c, uint32_t x) {
    auto psi = run_statevector(c, x);
    OutcomeDistribution<double> d;
    d.qubits = c.qubits();
    d.p.resize(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) d.p[i] = std::norm(psi[i]);
    d.validate();
    return d;
}

template <>
OutcomeDistribution<Rat> simulate<Rat>(const Circuit& c, uint32_t x) {
    auto psi = run_statevector_exact(c, x);
    OutcomeDistribution<Rat> d;
    d.qubits = c.qubits();
    d.p.resize(psi.size());
    Rat total(0);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        d.p[i] = psi[i].norm2();
        total += d.p[i];
    }
    if (total != 1) {  // advice supplied unnormalized up to tolerance
        for (auto& p : d.p) p /= total;
    }
    d.validate();
    return d;
}

std::complex<double> heisenberg_trace(const Circuit& c, uint32_t s_mask) {
    if (c.m != 0) throw ValidationError("heisenberg_trace: ancillas present");
    check_guard("qsim.trace_qubits", 12, c.n);
    Circuit inv = c.inverse();
    double acc = 0;
    const uint32_t dim = 1u << c.n;
    for (uint32_t x = 0; x < dim; ++x) {
        auto psi = run_statevector(inv, x);
        double exp_zs = 0;
        for (uint32_t y = 0; y < dim; ++y) exp_zs += chi_sign(s_mask, y) * std::norm(psi[y]);
        acc += chi_sign(~0u >> (32 - c.n), x) * exp_zs;
    }
    return {acc, 0.0};
}

std::vector<double> heisenberg_trace_table(const Circuit& c) {
    if (c.m != 0) throw ValidationError("heisenberg_trace: ancillas present");
    check_guard("qsim.trace_qubits", 12, c.n);
    Circuit inv = c.inverse();
    const uint32_t dim = 1u << c.n;
    std::vector<double> d(dim, 0.0);
    for (uint32_t x = 0; x < dim; ++x) {
        auto psi = run_statevector(inv, x);
        double sx = (std::popcount(x) & 1) ? -1.0 : 1.0;
        for (uint32_t y = 0; y < dim; ++y) d[y] += sx * std::norm(psi[y]);
    }
    // trace for S is sum_y d[y] chi_S(y): one unnormalized transform
    kern::wht_butterfly(d.data(), c.n);
    return d;
}

std::vector<int> forward_lightcone(const Circuit& c, int j) {
    if (j < 0 || j >= c.qubits()) throw ValidationError("lightcone: qubit out of range");
    std::vector<bool> in(static_cast<std::size_t>(c.qubits()), false);
    in[j] = true;
    for (const auto& layer : c.layers)
        for (const Gate& g : layer)
            if (in[g.qa] || in[g.qb]) in[g.qa] = in[g.qb] = true;
    std::vector<int> out;
    for (int q = 0; q < c.qubits(); ++q)
        if (in[q]) out.push_back(q);
    return out;
}

std::vector<std::vector<cd>> dense_unitary(const Circuit& c) {
    check_guard("qsim.dense_qubits", 12, c.qubits());
    if (c.m != 0) throw ValidationError("dense_unitary: ancillas present");
    const uint32_t dim = 1u << c.qubits();
    std::vector<std::vector<cd>> u(dim, std::vector<cd>(dim));
    for (uint32_t col = 0; col < dim; ++col) {
        auto psi = run_statevector(c, col);
        for (uint32_t row = 0; row < dim; ++row) u[row][col] = psi[row];
    }
    return u;
}

// ---- generators --------------------------------------------------------

Mat4 random_unitary4(SplitRng& rng) {
    // Ginibre + modified Gram-Schmidt
    auto gauss = [&rng]() {
        double u1 = rng.unit();
        double u2 = rng.unit();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    };
    std::array<std::array<cd, 4>, 4> col{};
    for (auto& v : col)
        for (auto& z : v) z = cd(gauss(), gauss());
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < i; ++j) {
            cd dot = 0;
            for (int k = 0; k < 4; ++k) dot += std::conj(col[j][k]) * col[i][k];
            for (int k = 0; k < 4; ++k) col[i][k] -= dot * col[j][k];
        }
        double norm = 0;
        for (int k = 0; k < 4; ++k) norm += std::norm(col[i][k]);
        norm = std::sqrt(norm);
        for (int k = 0; k < 4; ++k) col[i][k] /= norm;
    }
    Mat4 u;
    for (int r = 0; r < 4; ++r)
        for (int cidx = 0; cidx < 4; ++cidx) u[4 * r + cidx] = col[cidx][r];
    return u;
}

Mat4Q random_rational_unitary4(SplitRng& rng) {
    // product of exactly unitary rational factors: permutation-type 2-qubit
    // gates, Pauli/phase tensor products and Pythagorean rotations
    auto rot = [](int a, int b, int c) {
        return std::array<CplxQ, 4>{CplxQ(Rat(a, c)), CplxQ(Rat(-b, c)), CplxQ(Rat(b, c)),
                                    CplxQ(Rat(a, c))};
    };
    auto phase = [](int a, int b, int c) {
        return std::array<CplxQ, 4>{CplxQ(1), CplxQ(0), CplxQ(0), CplxQ(Rat(a, c), Rat(b, c))};
    };
    const std::array<CplxQ, 4> ones[] = {kI1, kX1, kY1, kZ1, kS1, rot(3, 4, 5), rot(5, 12, 13),
                                         rot(8, 15, 17), phase(3, 4, 5), phase(5, 12, 13)};
    Mat4Q acc = *named_2q_exact("ID");
    int factors = 2 + static_cast<int>(rng.below(4));
    for (int f = 0; f < factors; ++f) {
        switch (rng.below(4)) {
            case 0: acc = mul4(*named_2q_exact("CNOT"), acc); break;
            case 1: acc = mul4(*named_2q_exact("CZ"), acc); break;
            case 2: acc = mul4(*named_2q_exact("SWAP"), acc); break;
            default: {
                const auto& a = ones[rng.below(std::size(ones))];
                const auto& b = ones[rng.below(std::size(ones))];
                acc = mul4(kron2(a, b), acc);
                break;
            }
        }
    }
    return acc;
}

namespace {

Circuit random_layers(int n, int m, int depth, uint64_t seed, double pair_density, bool rational) {
    Circuit c;
    c.n = n;
    c.m = m;
    c.depth = depth;
    c.layers.resize(depth);
    SplitRng rng = SplitRng(seed).child("circuit");
    int q = n + m;
    for (int l = 0; l < depth; ++l) {
        std::vector<int> perm(q);
        for (int i = 0; i < q; ++i) perm[i] = i;
        for (int i = q - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        for (int i = 0; i + 1 < q; i += 2) {
            if (rng.unit() >= pair_density) continue;
            Gate g;
            g.qa = perm[i];
            g.qb = perm[i + 1];
            if (rational) {
                g.u_exact = random_rational_unitary4(rng);
                g.has_exact = true;
                g.u = to_f64(g.u_exact);
            } else {
                g.u = random_unitary4(rng);
            }
            c.layers[l].push_back(g);
        }
    }
    c.validate();
    return c;
}

}  // namespace

Circuit random_circuit(int n, int m, int depth, uint64_t seed, double pair_density) {
    return random_layers(n, m, depth, seed, pair_density, false);
}

Circuit random_rational_circuit(int n, int m, int depth, uint64_t seed, double pair_density) {
    return random_layers(n, m, depth, seed, pair_density, true);
}

Circuit butterfly_circuit(int qubits, int depth, uint64_t seed, bool rational) {
    Circuit c;
    c.n = qubits;
    c.depth = depth;
    c.layers.resize(depth);
    SplitRng rng = SplitRng(seed).child("butterfly");
    for (int l = 0; l < depth; ++l) {
        int stride = 1 << (l % 30);
        std::vector<bool> used(static_cast<std::size_t>(qubits), false);
        for (int q = 0; q < qubits; ++q) {
            int partner = q ^ stride;
            if (partner >= qubits || used[q] || used[partner]) continue;
            used[q] = used[partner] = true;
            Gate g;
            g.qa = q;
            g.qb = partner;
            if (rational) {
                g.u_exact = random_rational_unitary4(rng);
                g.has_exact = true;
                g.u = to_f64(g.u_exact);
            } else {
                g.u = random_unitary4(rng);
            }
            c.layers[l].push_back(g);
        }
    }
    c.validate();
    return c;
}

Circuit brickwork_circuit(int qubits, int depth, uint64_t seed, bool rational) {
    Circuit c;
    c.n = qubits;
    c.depth = depth;
    c.layers.resize(depth);
    SplitRng rng = SplitRng(seed).child("brickwork");
    for (int l = 0; l < depth; ++l) {
        for (int q = l % 2; q + 1 < qubits; q += 2) {
            Gate g;
            g.qa = q;
            g.qb = q + 1;
            if (rational) {
                g.u_exact = random_rational_unitary4(rng);
                g.has_exact = true;
                g.u = to_f64(g.u_exact);
            } else {
                g.u = random_unitary4(rng);
            }
            c.layers[l].push_back(g);
        }
    }
    c.validate();
    return c;
}

Circuit append_ones_circuit(int m) {
    Circuit c;
    c.n = m;
    c.m = m;
    c.depth = 1;
    c.layers.resize(1);
    // flip ancilla pairs with X(x)X; a leftover ancilla pairs with input 1
    int a = m;
    while (a + 1 < 2 * m) {
        Gate g;
        g.qa = a;
        g.qb = a + 1;
        g.u_exact = kron2(kX1, kX1);
        g.has_exact = true;
        g.u = to_f64(g.u_exact);
        g.name = "XX";
        c.layers[0].push_back(g);
        a += 2;
    }
    if (a < 2 * m) c.layers[0].push_back(named_gate1("X", a, 0));
    c.validate();
    return c;
}

// ---- text format -------------------------------------------------------

namespace {

std::string next_line(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
        auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        if (auto end = line.find_last_not_of(" \t\r"); end != std::string::npos)
            line = line.substr(pos, end - pos + 1);
        return line;
    }
    return {};
}

std::map<std::string, std::string> kv_fields(const std::string& line) {
    std::map<std::string, std::string> out;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return out;
}

CplxQ parse_cplx(const std::string& tok) {
    auto colon = tok.find(':');
    if (colon == std::string::npos) return CplxQ(parse_rat(tok));
    return CplxQ(parse_rat(tok.substr(0, colon)), parse_rat(tok.substr(colon + 1)));
}

std::string cplx_to_string(const CplxQ& z) {
    return rat_to_string(z.re) + ":" + rat_to_string(z.im);
}

std::string cplx_to_string(const cd& z) {
    return double_to_string(z.real()) + ":" + double_to_string(z.imag());
}

}  // namespace

Circuit parse_circuit(std::istream& in) {
    std::string header = next_line(in);
    if (header.rfind("circuit", 0) != 0) throw ParseError("expected 'circuit' header");
    auto hf = kv_fields(header);
    Circuit c;
    c.n = std::stoi(hf.at("n"));
    c.m = std::stoi(hf.at("m"));
    c.v = std::stoi(hf.at("v"));
    c.depth = std::stoi(hf.at("depth"));
    if (c.n < 0 || c.m < 0 || c.depth < 0) throw ParseError("negative circuit header field");
    c.layers.resize(c.depth);

    std::string line = next_line(in);
    if (c.v > 0) {
        if (line != "advice") throw ParseError("expected advice block for v>0");
        for (std::size_t i = 0; i < (std::size_t(1) << c.v); ++i) {
            std::string row = next_line(in);
            std::istringstream iss(row);
            std::string re, im;
            if (!(iss >> re >> im)) throw ParseError("bad advice row: " + row);
            c.advice.push_back(CplxQ(parse_rat(re), parse_rat(im)));
        }
        line = next_line(in);
    }

    // two passes per layer so that 1-qubit gates pick partners that no
    // explicit gate in the layer occupies
    struct PendingGate {
        int layer;
        std::string spec_q;
        std::string gate_name;  // empty for matrix gates
        std::string matrix;
    };
    std::vector<PendingGate> pending;
    for (; !line.empty(); line = next_line(in)) {
        auto f = kv_fields(line);
        if (!f.count("layer") || !f.count("q")) throw ParseError("bad gate line: " + line);
        PendingGate pg;
        pg.layer = std::stoi(f.at("layer"));
        pg.spec_q = f.at("q");
        if (f.count("gate")) pg.gate_name = f.at("gate");
        else if (f.count("matrix")) pg.matrix = f.at("matrix");
        else throw ParseError("gate line needs gate= or matrix=: " + line);
        if (pg.layer < 1 || pg.layer > c.depth) throw ParseError("layer index out of range");
        pending.push_back(std::move(pg));
    }

    std::vector<std::vector<bool>> used(static_cast<std::size_t>(c.depth),
                                        std::vector<bool>(static_cast<std::size_t>(c.qubits()), false));
    std::vector<std::pair<std::size_t, int>> one_qubit_gates;  // pending idx, qubit
    auto parse_q = [&](const std::string& s) {
        std::vector<int> qs;
        std::istringstream iss(s);
        std::string part;
        while (std::getline(iss, part, ',')) {
            int q = std::stoi(part);
            if (q < 1 || q > c.qubits()) throw ParseError("qubit index out of range: " + part);
            qs.push_back(q - 1);
        }
        return qs;
    };
    for (std::size_t i = 0; i < pending.size(); ++i) {
        auto qs = parse_q(pending[i].spec_q);
        int layer = pending[i].layer - 1;
        for (int q : qs) {
            if (used[layer][q]) throw ValidationError("overlapping gates within a layer");
            used[layer][q] = true;
        }
        if (qs.size() == 1) {
            if (pending[i].gate_name.empty())
                throw ParseError("matrix gates need two qubits");
            one_qubit_gates.push_back({i, qs[0]});
        } else if (qs.size() == 2) {
            Gate g;
            if (!pending[i].gate_name.empty()) {
                g = named_gate2(pending[i].gate_name, qs[0], qs[1]);
            } else {
                Mat4Q entries;
                std::istringstream iss(pending[i].matrix);
                std::string tok;
                int cnt = 0;
                while (std::getline(iss, tok, ',')) {
                    if (cnt >= 16) throw ParseError("matrix has more than 16 entries");
                    entries[cnt++] = parse_cplx(tok);
                }
                if (cnt != 16) throw ParseError("matrix needs 16 entries");
                g = matrix_gate(qs[0], qs[1], entries);
            }
            c.layers[layer].push_back(g);
        } else {
            throw ParseError("q= must list one or two qubits");
        }
    }
    for (auto [idx, q] : one_qubit_gates) {
        int layer = pending[idx].layer - 1;
        int partner = -1;
        for (int cand = 0; cand < c.qubits(); ++cand)
            if (cand != q && !used[layer][cand]) {
                partner = cand;
                break;
            }
        if (partner < 0) throw ValidationError("no free partner qubit for 1-qubit gate");
        used[layer][partner] = true;
        c.layers[layer].push_back(named_gate1(pending[idx].gate_name, q, partner));
    }
    c.validate();
    return c;
}

void write_circuit(std::ostream& out, const Circuit& c) {
    out << "circuit n=" << c.n << " m=" << c.m << " v=" << c.v << " depth=" << c.depth << "\n";
    if (c.v > 0) {
        out << "advice\n";
        for (const CplxQ& a : c.advice)
            out << rat_to_string(a.re) << " " << rat_to_string(a.im) << "\n";
    }
    for (int l = 0; l < c.depth; ++l) {
        for (const Gate& g : c.layers[l]) {
            out << "layer=" << (l + 1);
            if (g.one_qubit && !g.name.empty()) {
                out << " q=" << (g.qa + 1) << " gate=" << g.name << "\n";
                continue;
            }
            out << " q=" << (g.qa + 1) << "," << (g.qb + 1);
            if (!g.name.empty() && !g.one_qubit && named_2q_exact(g.name)) {
                out << " gate=" << g.name << "\n";
                continue;
            }
            out << " matrix=";
            for (int i = 0; i < 16; ++i) {
                if (i) out << ",";
                if (g.has_exact) out << cplx_to_string(g.u_exact[i]);
                else out << cplx_to_string(g.u[i]);
            }
            out << "\n";
        }
    }
}

}  // namespace qpar
