// spinforge command line: design chains, simulate them, write JSON/CSV.
//
// Exit codes: 0 success, 1 usage or input error, 2 design stalled, 3 tolerance breach.

#include <spinforge/spinforge.hpp>

#include <CLI11.hpp>

#include <iostream>

using namespace spinforge;

namespace {

struct Stalled : Error {
    using Error::Error;
};

std::string g_command;

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(path, text);
    }
}

Provenance provenance(std::uint64_t seed, std::map<std::string, double> tol) {
    return Provenance{g_command, seed, std::move(tol)};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double x = 0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (used != item.size() || item.empty()) throw InvalidInput("bad number '" + item + "' in list");
        v.push_back(x);
    }
    if (v.empty()) throw InvalidInput("empty list");
    return v;
}

// "a:b:step" or "a,b,c"
std::vector<double> parse_range(const std::string& s) {
    if (s.find(':') == std::string::npos) return parse_list(s);
    std::vector<double> parts;
    std::string tmp = s;
    std::replace(tmp.begin(), tmp.end(), ':', ',');
    parts = parse_list(tmp);
    if (parts.size() != 3 || !(parts[2] > 0) || parts[1] < parts[0]) throw InvalidInput("range must be lo:hi:step");
    std::vector<double> v;
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long k = 0; k <= count; ++k) v.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    return v;
}

// ---- design --------------------------------------------------------------

struct PstArgs {
    int n = 0;
    std::string out = "-";
};

int run_design_pst(const PstArgs& a) {
    PstChain c = standard_couplings(a.n);
    const double dev = verify_mirror(c);
    ChainDocument d = chain_document(c);
    d.provenance = provenance(0, {{"mirror_deviation", dev}});
    emit(a.out, dump(to_json(d)));
    if (dev > 1e-9) throw StageError("mirror-check", dev);
    return 0;
}

struct GammaArgs {
    int n = 0;
    double from = 0.0, to = 0.7;
    std::string mode = "unitary";
    double step = 0.0;
    std::string out = "-", trace;
};

int run_design_gamma(const GammaArgs& a) {
    const FlowMode mode = a.mode == "direct" ? FlowMode::direct : FlowMode::unitary;
    const double step = a.step > 0 ? a.step : (mode == FlowMode::direct ? 0.01 : 0.02);
    InterpolationResult r;
    try {
        r = interpolate_gamma(a.n, a.from, a.to, mode, step);
    } catch (const FlowError& e) {
        if (!a.trace.empty()) write_text_file(a.trace, flow_trace_csv(e.trace));
        throw Stalled(e.what());
    }
    ChainDocument d = chain_document(r.x);
    d.provenance = provenance(0, {{"step", step}, {"sv_drift", r.sv_drift}, {"structure_residual", r.structure_residual}});
    emit(a.out, dump(to_json(d)));
    if (!a.trace.empty()) write_text_file(a.trace, flow_trace_csv(r.trace));
    return 0;
}

struct WArgs {
    int n = 0, source = 0;
    std::string target = "odd-uniform", t0 = "auto", method = "nullvector";
    double tol = 1e-6;
    long budget = 100000;
    int seeds = 6;
    std::uint64_t seed = 1;
    bool full_chain = false;
    std::string out = "-", trace;
};

int run_design_wstate(const WArgs& a) {
    Vec target;
    if (a.target == "odd-uniform") {
        target = odd_uniform_target(a.n);
    } else {
        const auto v = parse_list(a.target);
        if (static_cast<int>(v.size()) != a.n) throw InvalidInput("target list must have n entries");
        target = Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    WStateOptions o;
    if (a.method == "commutator") o.method = WMethod::commutator;
    // --tol is judged on the overlap; the flow itself runs to a tight chi
    o.flow.tol = std::min(a.tol, 1e-12);
    o.flow.budget = a.budget;
    o.allow_half_chain = !a.full_chain;
    o.random_seeds = a.seeds;
    o.seed = a.seed;
    if (a.t0 != "auto") o.time = parse_list(a.t0).at(0);
    const WStateDesign d = design_wstate(a.source, target, o);
    ChainDocument doc = chain_document(d.chain, d.time);
    doc.provenance = provenance(a.seed, {{"tol", a.tol}, {"overlap", d.overlap}, {"polish_residual", d.polish_residual}});
    if (!a.trace.empty()) write_text_file(a.trace, synthesis_trace_csv(d.flow.trace));
    std::cerr << "status " << to_string(d.flow.status) << ", overlap " << csv_number(d.overlap)
              << (d.half_chain ? ", half chain" : "") << "\n";
    if (d.overlap < 1.0 - a.tol)
        throw Stalled("overlap " + csv_number(d.overlap) + " misses 1 - tol (flow status " + to_string(d.flow.status) + ")");
    emit(a.out, dump(to_json(doc)));
    return 0;
}

// ---- simulate ------------------------------------------------------------

struct GhzArgs {
    std::string chain;
    int n = 0;
    bool check = false, exact = false;
    std::string out = "-";
};

int run_simulate_ghz(const GhzArgs& a) {
    IsingChain c;
    if (!a.chain.empty()) {
        const ChainDocument d = load_chain(a.chain);
        if (d.kind == ChainKind::zy) {
            const StructuredX x = to_structured(d);
            if (x.n() > brute_force_max_qubits) throw InvalidInput("zy chains are simulated by brute force only (n <= 12)");
            const CVec out = evolve(zy_hamiltonian(x), ghz_time(), basis_state(x.n(), 0));
            emit(a.out, dump(json{{"n", x.n()}, {"method", "exact"}, {"gamma", x.gamma}, {"time", ghz_time()},
                                  {"overlap", std::abs(ghz_target(x.n()).dot(out))}}));
            return 0;
        }
        c = to_ising(d);
    } else {
        if (a.n < 1) throw InvalidInput("give --chain or --n");
        c = standard_ising(a.n);
    }
    json j = to_json(a.exact ? ghz_overlap_exact(c, ghz_time()) : overlap_estimate(c));
    double m = 0.0;
    if (a.check) j["majorana_check"] = m = majorana_transfer_check(c);
    emit(a.out, dump(j));
    if (m > 1e-9) throw StageError("majorana-transfer", m);
    return 0;
}

struct SweepArgs {
    int n = 21, samples = 1000;
    std::string x = "0:10:1";
    std::uint64_t seed = 7;
    unsigned threads = 0;
    std::string out = "-", summary;
};

int run_simulate_sweep(const SweepArgs& a) {
    std::vector<SweepPoint> pts;
    for (double x : parse_range(a.x)) pts.push_back(perturb_sweep(a.n, x, a.samples, a.seed, a.threads));
    emit(a.out, sweep_csv(pts));
    if (!a.summary.empty()) write_text_file(a.summary, sweep_summary_csv(pts));
    return 0;
}

struct CloneArgs {
    int n_clones = 2;
    std::string profile = "symmetric", fidelities, method = "compressed", formula = "haar", w_chain;
    int k = -1;
    std::string out = "-";
};

int run_simulate_clone(const CloneArgs& a) {
    AsymmetryProfile p;
    std::optional<double> fit_scale;
    if (!a.fidelities.empty()) {
        const ProfileFit fit = profile_from_fidelities(parse_list(a.fidelities));
        p = fit.profile;
        fit_scale = fit.scale;
    } else if (a.profile == "symmetric") {
        p = symmetric_profile(a.n_clones);
    } else {
        p = make_profile(parse_list(a.profile));
    }
    CloneSetup s;
    if (!a.w_chain.empty()) {
        const ChainDocument d = load_chain(a.w_chain);
        s.profile = p;
        s.ghz = standard_ising(p.qubits());
        s.w = to_tridiag(d);
        if (!d.time) throw InvalidInput("exchange chain document needs a time");
        s.w_time = *d.time;
        s.k = a.k >= 0 ? a.k : p.n_clones - 1;
    } else {
        s = make_clone_setup(p, a.k >= 0 ? std::optional<int>(a.k) : std::nullopt);
    }
    const CloneMethod m = a.method == "brute-force" ? CloneMethod::brute_force : CloneMethod::compressed;
    const CloneReport r = clone_report(s, m);
    json j = to_json(r);
    std::vector<double> analytic;
    const FidelityFormula f = a.formula == "literal" ? FidelityFormula::literal : FidelityFormula::haar;
    for (int c = 1; c <= p.n_clones; ++c) analytic.push_back(analytic_fidelity(p, c, f));
    j["analytic_fidelities"] = analytic;
    j["formula"] = a.formula;
    if (fit_scale) j["fidelity_scale"] = *fit_scale;
    j["w_chain"] = json{{"couplings", s.w.offdiag}, {"time", s.w_time}};
    j["provenance"] = to_json(provenance(0, {{"stage_tol", 1e-8}}));
    emit(a.out, dump(j));
    return 0;
}

struct GraphArgs {
    std::string edges;
    int path = 0, power = 1, source = 1;
    double time = 0.0;
    bool fixtures = false;
    std::string out = "-";
};

int run_simulate_graph(const GraphArgs& a) {
    if (a.fixtures) {
        json arr = json::array();
        double worst = 0.0;
        for (const auto& r : revival_fixtures()) {
            arr.push_back(to_json(r));
            worst = std::max(worst, r.deviation);
        }
        emit(a.out, dump(json{{"fixtures", arr}, {"max_deviation", worst}}));
        if (worst > 1e-9) throw StageError("fixture-verification", worst);
        return 0;
    }
    GraphSpec g;
    if (!a.edges.empty()) g = parse_edge_list(read_text_file(a.edges));
    else if (a.path > 0) g = path_graph(a.path);
    else throw InvalidInput("give --edges, --path or --fixtures");
    if (a.power > 1) g = hypercube_power(g, a.power);
    const CVec out = evolve_vertex(g, a.source, a.time);
    emit(a.out, dump(json{{"vertices", g.n}, {"source", a.source}, {"time", a.time},
                          {"amplitudes", complex_array(out)}, {"norm", out.norm()}}));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    g_command = "spinforge";
    for (int i = 1; i < argc; ++i) g_command += std::string(" ") + argv[i];

    CLI::App app{"Coupling design and simulation for 1D spin chains"};
    app.require_subcommand(1);
    auto* design = app.add_subcommand("design", "Design a chain and write it as JSON");
    auto* simulate = app.add_subcommand("simulate", "Simulate chains and write reports");
    design->require_subcommand(1);
    simulate->require_subcommand(1);
    const std::vector<std::string> modes{"direct", "unitary"};

    PstArgs pa;
    auto* pst = design->add_subcommand("pst", "Standard perfect-transfer couplings");
    pst->add_option("--n", pa.n, "sites")->required()->check(CLI::Range(2, 100000));
    pst->add_option("--out", pa.out, "output JSON ('-' for stdout)");

    GammaArgs ga;
    auto* gamma = design->add_subcommand("gamma", "Interpolate the ZY chain in gamma");
    gamma->add_option("--n", ga.n, "qubits")->required()->check(CLI::Range(2, 200));
    gamma->add_option("--from", ga.from, "start gamma (0 or 1)");
    gamma->add_option("--to", ga.to, "final gamma")->check(CLI::Range(0.0, 1.0));
    gamma->add_option("--mode", ga.mode, "direct or unitary")->check(CLI::IsMember(modes));
    gamma->add_option("--step", ga.step, "Euler step (default 0.02 unitary, 0.01 direct)");
    gamma->add_option("--out", ga.out, "output JSON");
    gamma->add_option("--trace", ga.trace, "trace CSV");

    WArgs wa;
    auto* wstate = design->add_subcommand("wstate", "Exchange chain mapping one site onto a target");
    wstate->add_option("--n", wa.n, "sites")->required()->check(CLI::Range(2, 400));
    wstate->add_option("--source", wa.source, "source site (1-based)")->required();
    wstate->add_option("--target", wa.target, "odd-uniform or comma list of n amplitudes");
    wstate->add_option("--t0", wa.t0, "auto or a time");
    wstate->add_option("--method", wa.method, "nullvector or commutator")
        ->check(CLI::IsMember({"nullvector", "commutator"}));
    wstate->add_option("--tol", wa.tol, "overlap tolerance")->check(CLI::PositiveNumber);
    wstate->add_option("--budget", wa.budget, "iteration budget")->check(CLI::PositiveNumber);
    wstate->add_option("--seeds", wa.seeds, "random starting profiles")->check(CLI::NonNegativeNumber);
    wstate->add_option("--seed", wa.seed, "seed for random starting profiles");
    wstate->add_flag("--full-chain", wa.full_chain, "never reduce to the half chain");
    wstate->add_option("--out", wa.out, "output JSON");
    wstate->add_option("--trace", wa.trace, "trace CSV");

    GhzArgs gh;
    auto* ghz = simulate->add_subcommand("ghz", "GHZ overlap of an Ising or ZY chain");
    ghz->add_option("--chain", gh.chain, "chain JSON");
    ghz->add_option("--n", gh.n, "standard chain size when no file is given")->check(CLI::Range(1, 2000));
    ghz->add_flag("--check", gh.check, "run the Majorana transfer check (exit 3 on failure)");
    ghz->add_flag("--exact", gh.exact, "brute-force state vector (n <= 12)");
    ghz->add_option("--out", gh.out, "output JSON");

    SweepArgs sw;
    auto* sweep = simulate->add_subcommand("sweep", "Robustness sweep of the GHZ estimator");
    sweep->add_option("--n", sw.n, "qubits")->check(CLI::Range(1, 2000));
    sweep->add_option("--x", sw.x, "percentages, lo:hi:step or a list");
    sweep->add_option("--samples", sw.samples, "samples per point")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sw.seed, "seed");
    sweep->add_option("--threads", sw.threads, "worker threads (0 = SPINFORGE_THREADS or all cores)");
    sweep->add_option("--out", sw.out, "CSV x_percent,sample_index,overlap_estimate");
    sweep->add_option("--summary", sw.summary, "CSV x_percent,mean,stddev,samples");

    CloneArgs ca;
    auto* clone = simulate->add_subcommand("clone", "Two-stage 1->N cloning pipeline");
    clone->add_option("--n-clones", ca.n_clones, "number of clones")->check(CLI::Range(2, 31));
    clone->add_option("--profile", ca.profile, "symmetric or a comma list of betas");
    clone->add_option("--fidelities", ca.fidelities, "target fidelities; overrides --profile");
    clone->add_option("--method", ca.method, "compressed or brute-force")
        ->check(CLI::IsMember({"compressed", "brute-force"}));
    clone->add_option("--formula", ca.formula, "analytic formula: haar or literal")
        ->check(CLI::IsMember({"haar", "literal"}));
    clone->add_option("--k", ca.k, "offset: ancilla on site k+1, input on k+2 (default N-1 for odd N, 0 for even N)");
    clone->add_option("--w-chain", ca.w_chain, "exchange chain JSON instead of designing one");
    clone->add_option("--out", ca.out, "output JSON");

    GraphArgs gr;
    auto* graph = simulate->add_subcommand("graph", "Single-excitation walk on a graph");
    graph->add_option("--edges", gr.edges, "edge-list file");
    graph->add_option("--path", gr.path, "use the path graph P_n");
    graph->add_option("--power", gr.power, "hypercube power")->check(CLI::Range(1, 12));
    graph->add_option("--source", gr.source, "source vertex (1-based)");
    graph->add_option("--time", gr.time, "evolution time");
    graph->add_flag("--fixtures", gr.fixtures, "verify the shipped revival instances");
    graph->add_option("--out", gr.out, "output JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        if (pst->parsed()) return run_design_pst(pa);
        if (gamma->parsed()) return run_design_gamma(ga);
        if (wstate->parsed()) return run_design_wstate(wa);
        if (ghz->parsed()) return run_simulate_ghz(gh);
        if (sweep->parsed()) return run_simulate_sweep(sw);
        if (clone->parsed()) return run_simulate_clone(ca);
        if (graph->parsed()) return run_simulate_graph(gr);
    } catch (const Stalled& e) {
        std::cerr << "stalled: " << e.what() << "\n";
        return 2;
    } catch (const Infeasible& e) {
        std::cerr << "stalled: " << e.what() << "\n";
        return 2;
    } catch (const StageError& e) {
        std::cerr << "tolerance breach in stage '" << e.stage() << "': " << e.what() << "\n";
        return 3;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
