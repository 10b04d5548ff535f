#include "qpar/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "qpar/adeg.hpp"
#include "qpar/boolfn.hpp"
#include "qpar/dtdecomp.hpp"
#include "qpar/errors.hpp"
#include "qpar/lightcone.hpp"
#include "qpar/nsc.hpp"
#include "qpar/qsim.hpp"

namespace qpar {

namespace {

using ojson = nlohmann::ordered_json;

// collects key=value lines plus verbatim blocks; renders as text or json
struct Report {
    ojson j = ojson::object();
    std::vector<std::string> lines;

    void kv(const std::string& k, const std::string& v) {
        j[k] = v;
        lines.push_back(k + "=" + v);
    }
    template <class I, class = std::enable_if_t<std::is_integral_v<I> && !std::is_same_v<I, bool>>>
    void kv(const std::string& k, I v) {
        j[k] = static_cast<long long>(v);
        lines.push_back(k + "=" + std::to_string(v));
    }
    void kv(const std::string& k, bool v) {
        j[k] = v;
        lines.push_back(k + std::string("=") + (v ? "true" : "false"));
    }
    void kv_rat(const std::string& k, const Rat& v) { kv(k, rat_to_string(v)); }
    void kv_f64(const std::string& k, double v) { kv(k, double_to_string(v)); }
    // one line per element: "<tag> f1=v1 f2=v2 ..."
    void rows(const std::string& key, const std::string& tag,
              const std::vector<std::vector<std::pair<std::string, std::string>>>& rws) {
        ojson arr = ojson::array();
        for (const auto& r : rws) {
            ojson o = ojson::object();
            std::string line = tag;
            for (const auto& [k, v] : r) {
                o[k] = v;
                line += " " + k + "=" + v;
            }
            arr.push_back(o);
            lines.push_back(line);
        }
        j[key] = arr;
    }
    void block(const std::string& key, const std::string& text) {
        j[key] = text;
        std::string t = text;
        while (!t.empty() && t.back() == '\n') t.pop_back();
        lines.push_back(t);
    }
    void raw_line(const std::string& key, const std::string& line) {
        j[key] = line;
        lines.push_back(line);
    }
};

struct Options {
    uint64_t seed = 0;
    std::string arith = "rat";
    double tol = 1e-9;
    std::string out_path;
    bool json = false;
    uint64_t budget = 4096;
    bool guard_override = false;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open input file '" + path + "'");
    return in;
}

BoolFnQ load_boolfn(const std::string& path) {
    auto in = open_input(path);
    return parse_boolfn(in);
}

Circuit load_circuit(const std::string& path) {
    auto in = open_input(path);
    return parse_circuit(in);
}

NsChannelQ load_channel(const std::string& path) {
    auto in = open_input(path);
    return parse_channel(in);
}

DecisionTree load_tree(const std::string& path) {
    auto in = open_input(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tree(ss.str());
}

std::vector<Rat> make_input_dist(const std::string& spec, int n) {
    if (spec == "uniform") return uniform_input<Rat>(n);
    if (spec == "even") return uniform_even_input<Rat>(n);
    if (spec == "odd") return uniform_odd_input<Rat>(n);
    if (spec.rfind("point:", 0) == 0)
        return point_input<Rat>(n, mask_from_string(spec.substr(6), n));
    throw ParseError("input distribution must be uniform|even|odd|point:<mask>");
}

std::string channel_text(const NsChannelQ& ch) {
    std::ostringstream os;
    write_channel(os, ch);
    return os.str();
}

void spectrum_rows(Report& rep, int n, const std::vector<Rat>& coef) {
    std::vector<std::vector<std::pair<std::string, std::string>>> rows;
    for (uint32_t s = 0; s < coef.size(); ++s) {
        if (coef[s] == 0) continue;
        rows.push_back({{"S", mask_to_string(s, n)}, {"c", rat_to_string(coef[s])}});
    }
    rep.rows("coef", "coef", rows);
}

// ---- subcommand handlers -------------------------------------------------

void cmd_fourier(const Options& opt, const std::string& file, Report& rep) {
    BoolFnQ f = load_boolfn(file);
    rep.kv("n", f.n);
    rep.kv("arith", opt.arith);
    if (opt.arith == "rat") {
        auto spec = wht(f);
        spectrum_rows(rep, f.n, spec.coef);
    } else {
        auto spec = wht(to_f64(f));
        std::vector<std::vector<std::pair<std::string, std::string>>> rows;
        for (uint32_t s = 0; s < spec.coef.size(); ++s) {
            if (spec.coef[s] == 0.0) continue;
            rows.push_back({{"S", mask_to_string(s, f.n)}, {"c", double_to_string(spec.coef[s])}});
        }
        rep.rows("coef", "coef", rows);
    }
}

void cmd_tail(const std::string& file, int k, Report& rep) {
    BoolFnQ f = load_boolfn(file);
    auto spec = wht(f);
    rep.kv("n", f.n);
    rep.kv("k", k);
    rep.kv_rat("tail", fourier_tail(spec, k));
}

void cmd_correlate(const std::string& f1, const std::string& f2, Report& rep) {
    BoolFnQ a = load_boolfn(f1);
    BoolFnQ b = load_boolfn(f2);
    rep.kv_rat("correlation", correlation(a, b));
}

void cmd_simulate(const Options& opt, const std::string& file, const std::string& x, Report& rep) {
    Circuit c = load_circuit(file);
    uint32_t mask = mask_from_string(x, c.n);
    rep.kv("qubits", c.qubits());
    std::vector<std::vector<std::pair<std::string, std::string>>> rows;
    if (opt.arith == "rat") {
        auto d = simulate<Rat>(c, mask);
        for (uint32_t y = 0; y < d.p.size(); ++y)
            if (d.p[y] != 0)
                rows.push_back({{"y", mask_to_string(y, c.qubits())}, {"p", rat_to_string(d.p[y])}});
    } else {
        auto d = simulate<double>(c, mask);
        for (uint32_t y = 0; y < d.p.size(); ++y)
            if (d.p[y] != 0.0)
                rows.push_back({{"y", mask_to_string(y, c.qubits())}, {"p", double_to_string(d.p[y])}});
    }
    rep.rows("outcomes", "outcome", rows);
}

void cmd_expectation(const Options& opt, const std::string& cfile, const std::string& ffile,
                     const std::string& x, Report& rep) {
    Circuit c = load_circuit(cfile);
    BoolFnQ f = load_boolfn(ffile);
    uint32_t mask = mask_from_string(x, c.n);
    if (opt.arith == "rat") rep.kv_rat("expectation", expectation(c, f, mask));
    else rep.kv_f64("expectation", expectation(c, to_f64(f), mask));
}

void cmd_parity_correlation(const Options& opt, const std::string& cfile, const std::string& ffile,
                            Report& rep) {
    Circuit c = load_circuit(cfile);
    BoolFnQ f = load_boolfn(ffile);
    if (opt.arith == "rat") rep.kv_rat("correlation", parity_correlation(c, f));
    else rep.kv_f64("correlation", parity_correlation(c, to_f64(f)));
}

void cmd_heisenberg(const std::string& cfile, const std::string& s, Report& rep) {
    Circuit c = load_circuit(cfile);
    uint32_t mask = mask_from_string(s, c.n);
    auto tr = heisenberg_trace(c, mask);
    rep.kv("S", s);
    rep.kv_f64("re", tr.real());
    rep.kv_f64("im", tr.imag());
}

void cmd_lightcone(const std::string& cfile, int qubit, Report& rep) {
    Circuit c = load_circuit(cfile);
    auto cone = forward_lightcone(c, qubit - 1);
    std::string list;
    for (std::size_t i = 0; i < cone.size(); ++i) {
        if (i) list += ",";
        list += std::to_string(cone[i] + 1);
    }
    rep.kv("qubit", qubit);
    rep.kv("lightcone", list);
    rep.kv("size", static_cast<long long>(cone.size()));
}

void cmd_reduce_to_game(const Options& opt, const std::string& cfile, const std::string& ffile,
                        Report& rep) {
    Circuit c = load_circuit(cfile);
    BoolFnQ f = load_boolfn(ffile);
    ConflictGraph g = conflict_graph(c);
    auto s = greedy_independent_set(g);
    rep.kv("max_degree", g.max_degree());
    {
        std::string list;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) list += ",";
            list += std::to_string(s[i] + 1);
        }
        rep.kv("independent_set", list);
    }
    std::ostringstream os;
    if (opt.arith == "rat") {
        auto r = best_restriction_search<Rat>(c, f, s, opt.budget, opt.seed);
        rep.kv_rat("full_correlation", r.full_correlation);
        rep.kv_rat("best_correlation", r.best_correlation);
        rep.kv("exhaustive", r.exhaustive);
        write_reduction(os, r);
    } else {
        auto r = best_restriction_search<double>(c, to_f64(f), s, opt.budget, opt.seed);
        rep.kv_f64("full_correlation", r.full_correlation);
        rep.kv_f64("best_correlation", r.best_correlation);
        rep.kv("exhaustive", r.exhaustive);
        write_reduction(os, r);
    }
    rep.block("reduction", os.str());
}

int cmd_nsc_check(const Options& opt, const std::string& file, Report& rep) {
    NsChannelQ ch = load_channel(file);
    auto viol = no_signaling_violation(ch, opt.arith == "rat" ? 0.0 : opt.tol);
    rep.kv("no_signaling", !viol.has_value());
    if (viol) {
        rep.kv("witness_S", mask_to_string(viol->s_mask, ch.n));
        rep.kv("witness_x", mask_to_string(viol->x, ch.n));
        rep.kv("witness_x2", mask_to_string(viol->x2, ch.n));
        std::string t;
        for (std::size_t i = 0; i < viol->t.size(); ++i) {
            if (i) t += ",";
            t += std::to_string(viol->t[i] + 1);
        }
        rep.kv("witness_T", t);
        return 2;
    }
    return 0;
}

void cmd_pushforward(const std::string& file, const std::string& dist, Report& rep) {
    NsChannelQ ch = load_channel(file);
    auto mu = pushforward(ch, make_input_dist(dist, ch.n));
    std::vector<std::vector<std::pair<std::string, std::string>>> rows;
    for (uint32_t y = 0; y < mu.p.size(); ++y)
        if (mu.p[y] != 0)
            rows.push_back({{"y", mask_to_string(y, ch.N)}, {"p", rat_to_string(mu.p[y])}});
    rep.kv("N", ch.N);
    rep.rows("probs", "prob", rows);
}

void cmd_kwise(const std::string& file, Report& rep) {
    NsChannelQ ch = load_channel(file);
    auto mu = pushforward(ch, uniform_even_input<Rat>(ch.n));
    auto nu = pushforward(ch, uniform_odd_input<Rat>(ch.n));
    rep.kv("n", ch.n);
    rep.kv("N", ch.N);
    rep.kv("kwise_level", kwise_level(mu, nu));
}

void cmd_block_kwise(const std::string& file, int block, Report& rep) {
    NsChannelQ ch = load_channel(file);
    auto mu = pushforward(ch, uniform_even_input<Rat>(ch.n));
    auto nu = pushforward(ch, uniform_odd_input<Rat>(ch.n));
    rep.kv("block", block);
    rep.kv("blockwise_level", blockwise_level(mu, nu, block));
}

void cmd_game_value(const std::string& pred_file, int players, int width, int referee,
                    Report& rep) {
    ParityGame g{players, width, referee, load_boolfn(pred_file)};
    GameValue gv = game_value_nosignaling(g);
    rep.kv_rat("value", gv.value);
    Rat adv = gv.value - Rat(1, 2);
    rep.kv_rat("advantage", adv);
    rep.block("witness", channel_text(gv.witness));
}

void cmd_gen_channel(const Options& opt, int n, int k, const std::string& method, Report& rep) {
    NsChannelQ ch;
    if (method == "shared-randomness") ch = random_local_mixture(n, k, opt.seed);
    else if (method == "polytope-vertex") ch = random_polytope_vertex(n, k, opt.seed);
    else throw ParseError("method must be shared-randomness or polytope-vertex");
    rep.block("channel", channel_text(ch));
}

void cmd_decompose(const std::string& tfile, const std::string& cfile, bool verify, Report& rep) {
    DecisionTree tau = load_tree(tfile);
    NsChannelQ ch = load_channel(cfile);
    TreeDistribution td = decompose(tau, ch);
    rep.kv("support", static_cast<long long>(td.entries.size()));
    rep.kv("max_depth", td.max_depth());
    rep.kv("tau_depth", dt_depth(tau));
    if (verify) {
        auto v = verify_decomposition(tau, ch, td);
        rep.kv_rat("deviation", v.max_deviation);
    }
    std::ostringstream os;
    write_treedist(os, td);
    rep.block("treedist", os.str());
}

void cmd_verify_decomp(const std::string& tfile, const std::string& cfile,
                       const std::string& dfile, Report& rep) {
    DecisionTree tau = load_tree(tfile);
    NsChannelQ ch = load_channel(cfile);
    auto in = open_input(dfile);
    TreeDistribution td = parse_treedist(in);
    auto v = verify_decomposition(tau, ch, td);
    rep.kv_rat("deviation", v.max_deviation);
    rep.kv("max_depth", v.max_depth);
    rep.kv("tau_depth", dt_depth(tau));
}

void cmd_expected_fn(const std::string& ffile, const std::string& cfile, Report& rep) {
    BoolFnQ f = load_boolfn(ffile);
    NsChannelQ ch = load_channel(cfile);
    BoolFnQ g = expected_function(f, ch);
    rep.kv("deg_f", wht(f).degree());
    rep.kv("deg_expected", wht(g).degree());
    std::ostringstream os;
    write_boolfn(os, g);
    rep.block("boolfn", os.str());
}

void cmd_adeg(const std::string& file, const Rat& eps, Report& rep) {
    BoolFnQ f = load_boolfn(file);
    DegreeResult r = approx_degree(f, eps);
    rep.j["file"] = file;
    rep.j["eps"] = rat_to_string(eps);
    rep.j["k"] = r.degree;
    rep.j["err"] = rat_to_string(r.witness.sup_error);
    rep.lines.push_back("adeg f=" + file + " eps=" + rat_to_string(eps) +
                        " -> k=" + std::to_string(r.degree) +
                        " err=" + rat_to_string(r.witness.sup_error));
    std::vector<std::vector<std::pair<std::string, std::string>>> rows;
    for (std::size_t i = 0; i < r.witness.monomials.size(); ++i) {
        if (r.witness.coef[i] == 0) continue;
        rows.push_back({{"S", mask_to_string(r.witness.monomials[i], f.n)},
                        {"c", rat_to_string(r.witness.coef[i])}});
    }
    rep.rows("coef", "coef", rows);
}

void cmd_bdeg(const std::string& file, int block, const Rat& eps, Report& rep) {
    BoolFnQ f = load_boolfn(file);
    DegreeResult r = block_approx_degree(f, block, eps);
    rep.j["file"] = file;
    rep.j["block"] = block;
    rep.j["eps"] = rat_to_string(eps);
    rep.j["k"] = r.degree;
    rep.j["err"] = rat_to_string(r.witness.sup_error);
    rep.lines.push_back("bdeg f=" + file + " block=" + std::to_string(block) + " eps=" +
                        rat_to_string(eps) + " -> k=" + std::to_string(r.degree) +
                        " err=" + rat_to_string(r.witness.sup_error));
    std::vector<std::vector<std::pair<std::string, std::string>>> rows;
    for (std::size_t i = 0; i < r.witness.monomials.size(); ++i) {
        if (r.witness.coef[i] == 0) continue;
        rows.push_back({{"S", mask_to_string(r.witness.monomials[i], f.n)},
                        {"c", rat_to_string(r.witness.coef[i])}});
    }
    rep.rows("coef", "coef", rows);
}

void cmd_max_advantage(const std::string& file, int k, Report& rep) {
    BoolFnQ f = load_boolfn(file);
    AdvantageResult r = max_advantage_kwise(f, k);
    rep.kv("k", k);
    rep.kv_rat("advantage", r.advantage);
    std::vector<std::vector<std::pair<std::string, std::string>>> rows;
    for (uint32_t y = 0; y < r.mu.p.size(); ++y) {
        if (r.mu.p[y] == 0 && r.nu.p[y] == 0) continue;
        rows.push_back({{"y", mask_to_string(y, f.n)},
                        {"mu", rat_to_string(r.mu.p[y])},
                        {"nu", rat_to_string(r.nu.p[y])}});
    }
    rep.rows("witness", "witness", rows);
}

int cmd_duality_check(const std::string& file, int k, const Rat& eps, Report& rep) {
    BoolFnQ f = load_boolfn(file);
    DualityReport r = duality_check(f, k, eps);
    rep.kv("k", k);
    rep.kv_rat("eps", eps);
    rep.kv_rat("advantage", r.advantage);
    rep.kv("degree", r.degree);
    rep.kv("fooled", r.fooled);
    rep.kv("low_degree", r.low_degree);
    rep.kv("holds", r.holds);
    return r.holds ? 0 : 2;
}

void cmd_example(const Options& opt, const std::string& which,
                 const std::vector<std::string>& kvargs, Report& rep) {
    auto kvval = [&kvargs](const std::string& key, int fallback) {
        for (const auto& a : kvargs) {
            if (a.rfind(key + "=", 0) == 0) return std::stoi(a.substr(key.size() + 1));
        }
        return fallback;
    };
    if (which == "trojan-horse") {
        int m = kvval("m", 2);
        rep.kv("m", m);
        BoolFnQ h = trojan_horse_fn<Rat>(m);
        spectrum_rows(rep, h.n, wht(h).coef);
        // restriction of the trailing block to the all-ones bitstring (-1 inputs)
        Restriction rho;
        rho.n = 2 * m;
        rho.assign.assign(static_cast<std::size_t>(2 * m), int8_t(0));
        for (int i = m; i < 2 * m; ++i) rho.assign[i] = -1;
        BoolFnQ restricted = restrict_fn(h, rho);
        bool is_par = restricted.values == parity_fn<Rat>(m).values;
        rep.kv("restriction_is_parity", is_par);
        Circuit c = append_ones_circuit(m);
        rep.kv_rat("composed_correlation", parity_correlation(c, h));
        (void)opt;
    } else if (which == "ghz") {
        NsChannelQ ch = ghz_channel(3);
        NsChannelQ copy = ch;
        rep.kv("no_signaling", is_no_signaling(copy));
        // on promise inputs (even number of Y bases) the output XOR is fixed
        std::vector<std::vector<std::pair<std::string, std::string>>> rows;
        for (uint32_t x : {0u, 3u, 5u, 6u}) {
            Rat odd(0);
            for (uint32_t y = 0; y < ch.cols(); ++y)
                if (std::popcount(y) & 1) odd += ch.table[x][y];
            rows.push_back({{"x", mask_to_string(x, 3)},
                            {"xor_odd_prob", rat_to_string(odd)}});
        }
        rep.rows("promise", "promise", rows);
        rep.block("channel", channel_text(ch));
    } else if (which == "parity-channel") {
        int n = kvval("n", 2);
        NsChannelQ ch = parity_channel(n);
        NsChannelQ copy = ch;
        rep.kv("no_signaling", is_no_signaling(copy));
        auto one = reduce(ch, {0});
        rep.kv_rat("single_output_plus_prob", one.table[0][0]);
        rep.block("channel", channel_text(ch));
    } else {
        throw ParseError("example must be trojan-horse, ghz or parity-channel");
    }
}

void emit(const Report& rep, const Options& opt, std::ostream& out) {
    std::ostringstream os;
    if (opt.json) {
        os << rep.j.dump(2) << "\n";
    } else {
        for (const auto& line : rep.lines) os << line << "\n";
    }
    if (!opt.out_path.empty()) {
        std::ofstream f(opt.out_path, std::ios::binary);
        if (!f) throw ParseError("cannot open output file '" + opt.out_path + "'");
        f << os.str();
    } else {
        out << os.str();
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"toolkit for parity against shallow-circuit and no-signaling preprocessing"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may appear after the subcommand

    Options opt;
    app.add_option("--seed", opt.seed, "root seed for all randomized subcommands");
    app.add_option("--arith", opt.arith, "arithmetic path: rat or f64")
        ->check(CLI::IsMember({"rat", "f64"}));
    app.add_option("--tol", opt.tol, "logical tolerance for f64 checks");
    app.add_option("--out", opt.out_path, "write the report to this file");
    app.add_flag("--json", opt.json, "structured output");
    app.add_option("--budget", opt.budget, "search cap for restriction scans");
    app.add_flag("--guard-override", opt.guard_override, "lift size guards at your own risk");

    std::string file1, file2, file3;
    std::string xbits, sbits, dist = "uniform", method = "shared-randomness", which;
    std::string eps_s = "1/3";
    int k = 0, qubit = 1, block = 1, players = 2, width = 1, referee = 0;
    bool verify = false;
    std::vector<std::string> kvargs;

    auto* fourier = app.add_subcommand("fourier", "Walsh-Hadamard spectrum of a truth table");
    fourier->add_option("table", file1)->required();

    auto* tail = app.add_subcommand("tail", "Fourier tail weight at and above level k");
    tail->add_option("table", file1)->required();
    tail->add_option("--k", k)->required();

    auto* correlate = app.add_subcommand("correlate", "E[f g] of two truth tables");
    correlate->add_option("table1", file1)->required();
    correlate->add_option("table2", file2)->required();

    auto* simulate_cmd = app.add_subcommand("simulate", "output distribution of a circuit");
    simulate_cmd->add_option("circuit", file1)->required();
    simulate_cmd->add_option("--x", xbits)->required();

    auto* expectation_cmd = app.add_subcommand("expectation", "diagonal observable expectation");
    expectation_cmd->add_option("circuit", file1)->required();
    expectation_cmd->add_option("observable", file2)->required();
    expectation_cmd->add_option("--x", xbits)->required();

    auto* pcorr = app.add_subcommand("parity-correlation", "correlation of f after the circuit with parity");
    pcorr->add_option("circuit", file1)->required();
    pcorr->add_option("observable", file2)->required();

    auto* htrace = app.add_subcommand("heisenberg-trace", "tr[Z_[n] U Z_S U^dag]");
    htrace->add_option("circuit", file1)->required();
    htrace->add_option("--s", sbits)->required();

    auto* lc = app.add_subcommand("lightcone", "forward lightcone of an input qubit");
    lc->add_option("circuit", file1)->required();
    lc->add_option("--qubit", qubit)->required();

    auto* reduce_cmd = app.add_subcommand("reduce-to-game", "restriction search and channel extraction");
    reduce_cmd->add_option("circuit", file1)->required();
    reduce_cmd->add_option("observable", file2)->required();

    auto* nsc_check = app.add_subcommand("nsc-check", "verify the no-signaling definition");
    nsc_check->add_option("channel", file1)->required();

    auto* push = app.add_subcommand("pushforward", "push an input distribution through a channel");
    push->add_option("channel", file1)->required();
    push->add_option("--input", dist);

    auto* kwise_cmd = app.add_subcommand("kwise", "k-wise level of the even/odd pushforwards");
    kwise_cmd->add_option("channel", file1)->required();

    auto* bkwise = app.add_subcommand("block-kwise", "blockwise level of the even/odd pushforwards");
    bkwise->add_option("channel", file1)->required();
    bkwise->add_option("--block", block)->required();

    auto* game = app.add_subcommand("game-value", "no-signaling value of a parity game");
    game->add_option("predicate", file1)->required();
    game->add_option("--players", players)->required();
    game->add_option("--width", width);
    game->add_option("--referee", referee);

    auto* gen = app.add_subcommand("gen-channel", "generate a seeded no-signaling channel");
    gen->add_option("--n", players)->required();
    gen->add_option("--k", width);
    gen->add_option("--method", method);

    auto* decomp = app.add_subcommand("decompose", "decision tree distribution for tau after a channel");
    decomp->add_option("tree", file1)->required();
    decomp->add_option("channel", file2)->required();
    decomp->add_flag("--verify", verify);

    auto* vdecomp = app.add_subcommand("verify-decomp", "exhaustive check of a tree distribution");
    vdecomp->add_option("tree", file1)->required();
    vdecomp->add_option("channel", file2)->required();
    vdecomp->add_option("treedist", file3)->required();

    auto* efn = app.add_subcommand("expected-fn", "expected value of f through a channel");
    efn->add_option("observable", file1)->required();
    efn->add_option("channel", file2)->required();

    auto* adeg_cmd = app.add_subcommand("adeg", "epsilon-approximate degree via exact LP");
    adeg_cmd->add_option("table", file1)->required();
    adeg_cmd->add_option("--eps", eps_s);

    auto* bdeg_cmd = app.add_subcommand("bdeg", "block approximate degree via exact LP");
    bdeg_cmd->add_option("table", file1)->required();
    bdeg_cmd->add_option("--block", block)->required();
    bdeg_cmd->add_option("--eps", eps_s);

    auto* madv = app.add_subcommand("max-advantage", "distinguishing advantage under k-wise indistinguishability");
    madv->add_option("table", file1)->required();
    madv->add_option("--k", k)->required();

    auto* dual = app.add_subcommand("duality-check", "advantage/approximate-degree duality");
    dual->add_option("table", file1)->required();
    dual->add_option("--k", k)->required();
    dual->add_option("--eps", eps_s);

    auto* example = app.add_subcommand("example", "canonical worked examples");
    example->add_option("which", which)->required();
    example->add_option("args", kvargs);

    std::vector<std::string> argv(args);
    std::reverse(argv.begin(), argv.end());
    try {
        app.parse(argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    guards::set_enabled(!opt.guard_override);
    Report rep;
    int code = 0;
    try {
        if (*fourier) cmd_fourier(opt, file1, rep);
        else if (*tail) cmd_tail(file1, k, rep);
        else if (*correlate) cmd_correlate(file1, file2, rep);
        else if (*simulate_cmd) cmd_simulate(opt, file1, xbits, rep);
        else if (*expectation_cmd) cmd_expectation(opt, file1, file2, xbits, rep);
        else if (*pcorr) cmd_parity_correlation(opt, file1, file2, rep);
        else if (*htrace) cmd_heisenberg(file1, sbits, rep);
        else if (*lc) cmd_lightcone(file1, qubit, rep);
        else if (*reduce_cmd) cmd_reduce_to_game(opt, file1, file2, rep);
        else if (*nsc_check) code = cmd_nsc_check(opt, file1, rep);
        else if (*push) cmd_pushforward(file1, dist, rep);
        else if (*kwise_cmd) cmd_kwise(file1, rep);
        else if (*bkwise) cmd_block_kwise(file1, block, rep);
        else if (*game) cmd_game_value(file1, players, width, referee, rep);
        else if (*gen) cmd_gen_channel(opt, players, width, method, rep);
        else if (*decomp) cmd_decompose(file1, file2, verify, rep);
        else if (*vdecomp) cmd_verify_decomp(file1, file2, file3, rep);
        else if (*efn) cmd_expected_fn(file1, file2, rep);
        else if (*adeg_cmd) cmd_adeg(file1, parse_rat(eps_s), rep);
        else if (*bdeg_cmd) cmd_bdeg(file1, block, parse_rat(eps_s), rep);
        else if (*madv) cmd_max_advantage(file1, k, rep);
        else if (*dual) code = cmd_duality_check(file1, k, parse_rat(eps_s), rep);
        else if (*example) cmd_example(opt, which, kvargs, rep);
    } catch (const GuardError& e) {
        guards::set_enabled(true);
        err << "guard violation: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        guards::set_enabled(true);
        err << "validation failure: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        guards::set_enabled(true);
        err << "input error: " << e.what() << "\n";
        return 1;
    }
    guards::set_enabled(true);
    emit(rep, opt, out);
    return code;
}

}  // namespace qpar
