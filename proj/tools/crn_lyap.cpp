// crn-lyap: analyze, construct, verify and simulate mass-action networks.
//
// Exit codes: 0 ok, 1 verification did not certify, 2 malformed input,
// 3 no positive equilibrium, 4 unsupported network / construction failure,
// 5 simulator error.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "crnlyap/crnlyap.hpp"
#include "report.hpp"

namespace {

using namespace crnlyap;
using report::Json;

enum Exit { ok = 0, not_certified = 1, bad_input = 2, no_equilibrium = 3, unsupported = 4, sim_error = 5 };

struct UsageError : Error {
    using Error::Error;
};

template <class T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
    std::vector<T> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(start, end - start);
        while (!item.empty() && item.front() == ' ') item.erase(item.begin());
        while (!item.empty() && item.back() == ' ') item.pop_back();
        T v{};
        auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size())
            throw UsageError(std::string(flag) + ": cannot read '" + item + "' as a number");
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

NetworkDocument load(const std::string& path) {
    if (!std::ifstream(path)) throw UsageError("cannot open '" + path + "'");
    return read_network_file(path);
}

StateVec resolve_x0(const NetworkDocument& doc, const std::string& flag) {
    const auto n = doc.network.num_species();
    if (!flag.empty()) {
        auto x = parse_list<double>(flag, "--x0");
        if (x.size() != n) throw UsageError("--x0: expected " + std::to_string(n) + " values");
        for (double v : x)
            if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError("--x0: entries must be finite and nonnegative");
        return x;
    }
    if (doc.initial_state) return *doc.initial_state;
    return StateVec(n, 1.0);
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + path + "'");
    out << text;
}

Json header(const char* command, const std::string& file) {
    Json o;
    o["schema"] = report::schema_version;
    o["command"] = command;
    o["file"] = file;
    return o;
}

/// Overall class: the single part's class, composite for several supported parts.
std::string overall_class(const Decomposition& dec) {
    if (dec.parts.size() == 1) return to_string(dec.parts.front().classification);
    for (const auto& p : dec.parts)
        if (p.classification != PartClass::complex_balanced && p.classification != PartClass::dim1) return "unsupported";
    return "composite";
}

[[noreturn]] void throw_unsupported() {
    throw UnsupportedNetworkError(
        "network is outside the supported classes (complex balanced, dim S = 1, species-disjoint composites of "
        "those, three-species cycle); Lyapunov functions for general networks with dim S >= 2 remain conjectural "
        "and are out of scope");
}

LyapunovFn construct(const std::string& method, const Network& net, const StateVec& x0) {
    if (method == "gibbs") return construct_gibbs(net, x0);
    if (method == "dim1") return construct_dim1(net, x0);
    if (method == "cycle3") return construct_cycle3(net, x0);
    const auto dec = decompose(net);
    if (method == "composite") return compose_lyapunov(dec, x0);
    if (dec.parts.size() > 1) {
        if (overall_class(dec) == "unsupported") throw_unsupported();
        return compose_lyapunov(dec, x0);
    }
    switch (dec.parts.front().classification) {
        case PartClass::complex_balanced: return construct_gibbs(net, x0);
        case PartClass::dim1: return construct_dim1(net, x0);
        case PartClass::cycle3: return construct_cycle3(net, x0);
        default: throw_unsupported();
    }
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeArgs {
    std::string file, x0, out;
};

int cmd_analyze(const AnalyzeArgs& a) {
    const auto doc = load(a.file);
    const auto x0 = resolve_x0(doc, a.x0);
    const auto& net = doc.network;
    Json rep = header("analyze", a.file);
    rep["network"] = report::network_json(net);
    rep["x0"] = report::vec(x0);
    const auto s = stoich_structure(net);
    rep["structure"] = report::structure_json(s);
    const auto dec = decompose(net);
    rep["decomposition"] = report::decomposition_json(dec, net);
    rep["classification"] = overall_class(dec);

    int code = ok;
    Json eqs = Json::array();
    try {
        const auto found = find_equilibria(net, x0);
        for (const auto& e : found) eqs.push_back(report::equilibrium_json(e));
        if (found.empty()) throw NoEquilibriumError("no equilibrium located in the class of x0");
        rep["complex_balanced"] = found.front().complex_balanced;
    } catch (const Error& e) {
        rep["complex_balanced"] = nullptr;
        rep["error"] = e.what();
        code = no_equilibrium;
    }
    rep["equilibria"] = std::move(eqs);
    emit(rep.dump(2) + "\n", a.out);
    return code;
}

// --- lyapunov --------------------------------------------------------------

struct LyapunovArgs {
    std::string file, x0, out, method = "auto", csv;
    std::vector<std::string> grid;
};

struct GridAxis {
    double lo, hi;
    long steps;
};

GridAxis parse_grid(const std::string& spec) {
    const auto p1 = spec.find(':');
    const auto p2 = spec.find(':', p1 == std::string::npos ? p1 : p1 + 1);
    if (p1 == std::string::npos || p2 == std::string::npos) throw UsageError("--grid: expected a:b:steps, got '" + spec + "'");
    const auto lo = parse_list<double>(spec.substr(0, p1), "--grid");
    const auto hi = parse_list<double>(spec.substr(p1 + 1, p2 - p1 - 1), "--grid");
    const auto st = parse_list<long>(spec.substr(p2 + 1), "--grid");
    if (st[0] < 1 || !(hi[0] >= lo[0])) throw UsageError("--grid: need a <= b and steps >= 1");
    return {lo[0], hi[0], st[0]};
}

/// f and fdot on x* + sum_k c_k q_k, q an orthonormal basis of S. Points outside
/// the positive orthant are skipped.
std::string tabulate(const Network& net, const LyapunovFn& fn, const std::vector<std::string>& specs) {
    const auto s = stoich_structure(net);
    const auto& xs = equilibrium_of(fn);
    const Eigen::MatrixXd q = orthonormal_columns(s.s_basis, net.num_species());
    std::vector<GridAxis> axes;
    for (const auto& g : specs) axes.push_back(parse_grid(g));
    if (axes.size() == 1) axes.resize(s.dim, axes.front());
    if (axes.size() != s.dim)
        throw UsageError("--grid: give one spec or one per class coordinate (" + std::to_string(s.dim) + ")");
    double total = 1.0;
    for (const auto& ax : axes) total *= static_cast<double>(ax.steps + 1);
    if (total > 1e6) throw UsageError("--grid: more than 1e6 points");

    std::ostringstream out;
    out.precision(17);
    for (std::size_t k = 0; k < axes.size(); ++k) out << "c" << k + 1 << ",";
    for (const auto& name : net.species_names()) out << name << ",";
    out << "f,fdot\n";
    const auto grad = gradient_oracle(fn);
    std::vector<long> idx(axes.size(), 0);
    while (true) {
        StateVec x(xs);
        std::vector<double> c(axes.size());
        for (std::size_t k = 0; k < axes.size(); ++k) {
            c[k] = axes[k].lo + (axes[k].hi - axes[k].lo) * static_cast<double>(idx[k]) / static_cast<double>(axes[k].steps);
            for (std::size_t j = 0; j < x.size(); ++j) x[j] += c[k] * q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
        }
        if (all_positive(x)) {
            for (double v : c) out << v << ",";
            for (double v : x) out << v << ",";
            out << lyapunov_value(fn, x) << "," << dissipation(net, grad, x) << "\n";
        }
        std::size_t k = 0;
        while (k < idx.size() && ++idx[k] > axes[k].steps) idx[k++] = 0;
        if (k == idx.size()) break;
    }
    return out.str();
}

int cmd_lyapunov(const LyapunovArgs& a) {
    const auto doc = load(a.file);
    const auto x0 = resolve_x0(doc, a.x0);
    const auto fn = construct(a.method, doc.network, x0);
    Json rep = header("lyapunov", a.file);
    rep["x0"] = report::vec(x0);
    rep["lyapunov"] = report::lyapunov_json(fn, doc.network);
    if (!a.grid.empty()) {
        const auto csv = tabulate(doc.network, fn, a.grid);
        if (a.csv.empty() || a.csv == "-") {
            if (a.out.empty() || a.out == "-") throw UsageError("--grid: give --csv or --out so table and report do not mix");
            std::cout << csv;
        } else {
            emit(csv, a.csv);
        }
        rep["grid_csv"] = a.csv.empty() ? "-" : a.csv;
    }
    emit(rep.dump(2) + "\n", a.out);
    return ok;
}

// --- verify ----------------------------------------------------------------

struct VerifyArgs {
    std::string file, x0, out, method = "auto";
    VerifyOptions opt;
};

int cmd_verify(const VerifyArgs& a) {
    const auto doc = load(a.file);
    const auto x0 = resolve_x0(doc, a.x0);
    const auto fn = construct(a.method, doc.network, x0);
    const auto vr = verify_lyapunov(doc.network, fn, a.opt);
    Json rep = header("verify", a.file);
    rep["x0"] = report::vec(x0);
    rep["lyapunov"] = report::lyapunov_json(fn, doc.network);
    rep["verification"] = report::verification_json(vr, doc.network);
    emit(rep.dump(2) + "\n", a.out);
    return vr.verdict == Verdict::certified ? ok : not_certified;
}

// --- simulate --------------------------------------------------------------

struct OdeArgs {
    std::string file, x0, out, method = "auto";
    double t_end = 10.0, ode_tol = 1e-8;
    bool monitor = false;
};

int cmd_simulate_ode(const OdeArgs& a) {
    const auto doc = load(a.file);
    const auto x0 = resolve_x0(doc, a.x0);
    if (!(a.t_end > 0.0)) throw UsageError("--t-end must be positive");
    if (!(a.ode_tol > 0.0)) throw UsageError("--ode-tol must be positive");
    const auto& net = doc.network;
    sim::Trajectory traj;
    try {
        traj = sim::integrate_ode(net, x0, a.t_end, a.ode_tol);
    } catch (const SimulationError&) {
        throw;
    } catch (const Error& e) {
        throw SimulationError(e.what(), 0.0);
    }
    std::optional<sim::MonitorResult> mon;
    if (a.monitor) {
        const auto fn = construct(a.method, net, x0);
        mon = sim::monitor_lyapunov(net, traj, fn);
        for (const auto& w : mon->warnings) std::cerr << "warning: " << w << "\n";
    }
    std::ostringstream out;
    out.precision(17);
    out << "t";
    for (const auto& name : net.species_names()) out << "," << name;
    if (mon) out << ",f,fdot";
    out << "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << traj.times[k];
        for (double v : traj.states[k]) out << "," << v;
        if (mon) {
            if (k >= mon->first_index && k - mon->first_index < mon->samples.size()) {
                const auto& s = mon->samples[k - mon->first_index];
                out << "," << s.f << "," << s.fdot;
            } else {
                out << ",,";
            }
        }
        out << "\n";
    }
    emit(out.str(), a.out);
    return ok;
}

struct SsaArgs {
    std::string file, n0, out;
    double omega = 1.0, t_end = 100.0;
    std::uint64_t seed = 1;
};

int cmd_simulate_ssa(const SsaArgs& a) {
    const auto doc = load(a.file);
    const auto& net = doc.network;
    CountVec n0;
    if (!a.n0.empty()) {
        n0 = parse_list<long long>(a.n0, "--n0");
    } else if (doc.initial_state) {
        for (double v : *doc.initial_state) n0.push_back(std::llround(v * a.omega));
    } else {
        throw UsageError("--n0 is required when the file has no @init line");
    }
    if (n0.size() != net.num_species()) throw UsageError("--n0: expected " + std::to_string(net.num_species()) + " values");
    for (auto v : n0)
        if (v < 0) throw UsageError("--n0: counts must be nonnegative");
    if (!(a.omega > 0.0)) throw UsageError("--omega must be positive");
    if (!(a.t_end > 0.0)) throw UsageError("--t-end must be positive");

    const auto h = sim::ssa_run(net, n0, a.omega, a.t_end, a.seed);
    std::ostringstream out;
    out.precision(17);
    for (const auto& name : net.species_names()) out << name << ",";
    out << "fraction\n";
    for (const auto& [state, frac] : h.occupancy) {
        for (auto v : state) out << v << ",";
        out << frac << "\n";
    }
    emit(out.str(), a.out);
    std::cerr << "events: " << h.events << "\n";
    if (h.absorbed) {
        std::cerr << "absorbed at t=" << h.absorption_time << " in state (";
        for (std::size_t j = 0; j < h.absorbing_state.size(); ++j) std::cerr << (j ? "," : "") << h.absorbing_state[j];
        std::cerr << "): no reaction can fire; the chain has no positive stationary distribution on this class\n";
    }
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lyapunov functions for mass-action reaction networks"};
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* c_an = app.add_subcommand("analyze", "structure, equilibria, complex balance and decomposition");
    c_an->add_option("file", an.file, ".crn network file")->required();
    c_an->add_option("--x0", an.x0, "initial state, comma separated (default: @init line, else ones)");
    c_an->add_option("--out", an.out, "write JSON here instead of stdout");

    LyapunovArgs ly;
    auto* c_ly = app.add_subcommand("lyapunov", "construct a Lyapunov function");
    c_ly->add_option("file", ly.file, ".crn network file")->required();
    c_ly->add_option("--x0", ly.x0, "initial state selecting the compatibility class");
    c_ly->add_option("--method", ly.method, "auto|gibbs|dim1|composite|cycle3")
        ->check(CLI::IsMember({"auto", "gibbs", "dim1", "composite", "cycle3"}));
    c_ly->add_option("--grid", ly.grid, "a:b:steps per class coordinate around x* (repeatable)");
    c_ly->add_option("--csv", ly.csv, "where to write the grid table");
    c_ly->add_option("--out", ly.out, "write JSON here instead of stdout");

    VerifyArgs ve;
    auto* c_ve = app.add_subcommand("verify", "construct and numerically certify");
    c_ve->add_option("file", ve.file, ".crn network file")->required();
    c_ve->add_option("--x0", ve.x0, "initial state selecting the compatibility class");
    c_ve->add_option("--method", ve.method, "auto|gibbs|dim1|composite|cycle3")
        ->check(CLI::IsMember({"auto", "gibbs", "dim1", "composite", "cycle3"}));
    c_ve->add_option("--samples", ve.opt.samples, "interior class samples")->capture_default_str();
    c_ve->add_option("--seed", ve.opt.seed, "sampling seed")->capture_default_str();
    c_ve->add_option("--tol", ve.opt.residual_tol, "PDE residual tolerance")->capture_default_str();
    c_ve->add_option("--boundary-tol", ve.opt.boundary_tol, "boundary limit tolerance")->capture_default_str();
    c_ve->add_option("--dissipation-tol", ve.opt.dissipation_tol, "dissipation tolerance")->capture_default_str();
    c_ve->add_option("--out", ve.out, "write JSON here instead of stdout");

    auto* c_sim = app.add_subcommand("simulate", "ODE or SSA simulation");
    c_sim->require_subcommand(1);
    OdeArgs od;
    auto* c_ode = c_sim->add_subcommand("ode", "deterministic trajectory as CSV");
    c_ode->add_option("file", od.file, ".crn network file")->required();
    c_ode->add_option("--x0", od.x0, "initial state");
    c_ode->add_option("--t-end", od.t_end, "final time")->capture_default_str();
    c_ode->add_option("--ode-tol", od.ode_tol, "per-step relative error")->capture_default_str();
    c_ode->add_flag("--monitor", od.monitor, "append f and its time derivative");
    c_ode->add_option("--method", od.method, "constructor used by --monitor")
        ->check(CLI::IsMember({"auto", "gibbs", "dim1", "composite", "cycle3"}));
    c_ode->add_option("--out", od.out, "write CSV here instead of stdout");
    SsaArgs ss;
    auto* c_ssa = c_sim->add_subcommand("ssa", "stochastic occupancy histogram as CSV");
    c_ssa->add_option("file", ss.file, ".crn network file")->required();
    c_ssa->add_option("--n0", ss.n0, "initial counts (default: @init scaled by omega)");
    c_ssa->add_option("--omega", ss.omega, "volume scale")->capture_default_str();
    c_ssa->add_option("--t-end", ss.t_end, "simulated time")->capture_default_str();
    c_ssa->add_option("--seed", ss.seed, "RNG seed")->capture_default_str();
    c_ssa->add_option("--out", ss.out, "write CSV here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_input;
    }

    const std::string* file = c_an->parsed() ? &an.file : c_ly->parsed() ? &ly.file : c_ve->parsed() ? &ve.file
                                                          : c_ode->parsed()                     ? &od.file
                                                                                                : &ss.file;
    try {
        if (c_an->parsed()) return cmd_analyze(an);
        if (c_ly->parsed()) return cmd_lyapunov(ly);
        if (c_ve->parsed()) return cmd_verify(ve);
        if (c_ode->parsed()) return cmd_simulate_ode(od);
        return cmd_simulate_ssa(ss);
    } catch (const ParseError& e) {
        std::cerr << *file << ":" << e.what() << "\n";
        return bad_input;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    } catch (const SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << "\n";
        return sim_error;
    } catch (const NoEquilibriumError& e) {
        std::cerr << "no equilibrium: " << e.what() << "\n";
        return no_equilibrium;
    } catch (const PreconditionError& e) {
        std::cerr << "no equilibrium: " << e.what() << "\n";
        return no_equilibrium;
    } catch (const ConstructionError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return unsupported;
    } catch (const StructuralError& e) {
        std::cerr << "unsupported: " << e.what() << "\n";
        return unsupported;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return c_ode->parsed() || c_ssa->parsed() ? sim_error : not_certified;
    }
}
