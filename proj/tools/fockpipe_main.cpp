// fockpipe command-line tool: run circuit files, reproduce the entangled
// photon-added coherent-state pipeline over parameter grids, and validate
// the simulator against its closed-form oracle.
//
// Exit codes: 0 success, 1 validation failure, 2 circuit parse error,
// 3 truncation guard, 4 invalid flags.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <fockpipe/fockpipe.hpp>

namespace {

using namespace fockpipe;

cplx parse_complex(const std::string& s) {
    const char* p = s.c_str();
    char* end = nullptr;
    const double re = std::strtod(p, &end);
    if (end == p) throw std::invalid_argument("bad complex value '" + s + "'");
    double im = 0.0;
    if (*end == ',') {
        const char* q = end + 1;
        im = std::strtod(q, &end);
        if (end == q) throw std::invalid_argument("bad complex value '" + s + "'");
    }
    if (*end != '\0') throw std::invalid_argument("bad complex value '" + s + "'");
    return {re, im};
}

std::optional<int> cutoff_from_env() {
    const char* env = std::getenv("FOCKPIPE_CUTOFF");
    if (!env || !*env) return std::nullopt;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0 || v > 10000)
        throw std::invalid_argument("FOCKPIPE_CUTOFF must be a small non-negative integer");
    return static_cast<int>(v);
}

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open circuit file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    ~Timer() {
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                            std::chrono::steady_clock::now() - start)
                            .count();
        // timing goes to stderr so stdout stays byte-stable across runs
        std::cerr << "# elapsed_ms: " << ms << "\n";
    }
};

int outcome_count(const BranchResult& b, std::size_t k) {
    return b.outcome[k].second;
}

int cmd_run(const std::string& path, std::optional<int> cutoff_flag,
            const std::string& format) {
    Timer timer;
    const Circuit circuit = parse_circuit(read_input(path));
    CutoffPolicy policy;
    if (cutoff_flag)
        policy.fixed_cutoff = cutoff_flag;
    else if (auto env = cutoff_from_env())
        policy.fixed_cutoff = env;
    const int cut = resolve_cutoff(circuit, policy);

    const auto branches = run_circuit(circuit, policy);
    const auto scheme = recognize_paper_circuit(circuit);

    RunReport report;
    report.circuit_name = path;
    report.cutoff = cut;
    report.scheme = scheme;
    for (const auto& b : branches) {
        BranchRecord rec;
        rec.outcome = b.outcome;
        rec.probability = b.probability;
        rec.relative_weight = b.relative_weight;
        rec.tail_mass = b.conditional_state.tail_mass();
        if (b.conditional_state.mode_count() >= 2) {
            rec.entropy_bits = entanglement_entropy(b.conditional_state, 1);
            rec.log_negativity = log_negativity(b.conditional_state, 1);
        }
        if (scheme && b.outcome.size() == 2) {
            rec.fidelity_expected = fidelity_fock(
                b.conditional_state,
                expected_branch_fock(*scheme, b.outcome[0].second,
                                     b.outcome[1].second, cut));
        }
        report.branches.push_back(std::move(rec));
    }
    if (format == "csv")
        write_csv(std::cout, report);
    else
        write_json(std::cout, report);
    return 0;
}

struct SweepSpec {
    std::string param;
    double start = 0.0, stop = 0.0;
    int steps = 1;
};

SweepSpec parse_sweep(const std::string& s) {
    SweepSpec spec;
    std::istringstream ss(s);
    std::string tok;
    std::vector<std::string> parts;
    while (std::getline(ss, tok, ':')) parts.push_back(tok);
    if (parts.size() != 4)
        throw std::invalid_argument("sweep spec must be param:start:stop:steps");
    spec.param = parts[0];
    if (spec.param != "alpha" && spec.param != "beta" && spec.param != "g")
        throw std::invalid_argument("sweep param must be alpha, beta or g");
    std::size_t used = 0;
    spec.start = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("bad sweep start");
    spec.stop = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("bad sweep stop");
    spec.steps = std::stoi(parts[3], &used);
    if (used != parts[3].size() || spec.steps < 1 || spec.steps > 100000)
        throw std::invalid_argument("bad sweep step count");
    return spec;
}

int cmd_paper(const std::string& alpha_s, const std::string& beta_s, double g,
              const std::string& order_s, const std::string& sweep_s,
              const std::string& format) {
    Timer timer;
    SchemeParams base;
    base.alpha = parse_complex(alpha_s);
    base.beta = parse_complex(beta_s);
    base.g = g;
    base.order = order_s == "exact" ? SqueezerOrder::Exact
                                    : SqueezerOrder::FirstOrder;

    std::vector<SchemeParams> points;
    if (sweep_s.empty()) {
        points.push_back(base);
    } else {
        const SweepSpec sweep = parse_sweep(sweep_s);
        for (int k = 0; k < sweep.steps; ++k) {
            const double v =
                sweep.steps == 1
                    ? sweep.start
                    : sweep.start + (sweep.stop - sweep.start) * k / (sweep.steps - 1);
            SchemeParams p = base;
            if (sweep.param == "alpha") p.alpha = cplx(v, 0.0);
            if (sweep.param == "beta") p.beta = cplx(v, 0.0);
            if (sweep.param == "g") p.g = v;
            points.push_back(p);
        }
    }

    CutoffPolicy policy;
    if (auto env = cutoff_from_env()) policy.fixed_cutoff = env;

    std::vector<PaperRow> rows;
    for (const auto& p : points) {
        const Circuit c = build_paper_circuit(p);
        const int cut = resolve_cutoff(c, policy);
        const auto branches = run_circuit(c, policy);
        for (const auto& b : branches) {
            PaperRow row;
            row.alpha = p.alpha;
            row.beta = p.beta;
            row.g = p.g;
            row.outcome = detail::outcome_label(b.outcome);
            row.weight = b.probability;
            row.relative_weight = b.relative_weight;
            row.entropy_bits = entanglement_entropy(b.conditional_state, 1);
            row.fidelity_expected = fidelity_fock(
                b.conditional_state,
                expected_branch_fock(p, outcome_count(b, 0), outcome_count(b, 1),
                                     cut));
            if (p.beta == cplx(0.0, 0.0) && p.alpha != cplx(0.0, 0.0) &&
                outcome_count(b, 0) == 1 && outcome_count(b, 1) == 0) {
                const auto h = hybrid_ideal(p.alpha);
                row.fidelity_ideal = h.fidelity;
                row.omega = h.omega;
            }
            rows.push_back(std::move(row));
        }
    }
    if (format == "csv")
        write_paper_csv(std::cout, rows);
    else
        write_paper_json(std::cout, rows);
    return 0;
}

int cmd_validate(bool inject_fault) {
    ValidateOptions opts;
    opts.inject_bs_sign_fault = inject_fault;
    const auto checks = run_validation(opts);
    int failed = 0;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
                  << " residual=" << fmt_sig12(c.residual)
                  << " tol=" << fmt_sig12(c.tolerance) << "\n";
        if (!c.pass) ++failed;
    }
    std::cout << "RESULT: " << (checks.size() - failed) << "/" << checks.size()
              << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fockpipe: multi-mode Fock simulator for entangled "
                 "photon-added coherent states"};
    app.set_version_flag("--version", std::string("fockpipe ") + version_string);
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a circuit file and report branches");
    std::string run_path;
    std::optional<int> run_cutoff;
    std::string run_format = "json";
    run->add_option("circuit", run_path, "circuit file ('-' for stdin)")->required();
    run->add_option("--cutoff", run_cutoff, "override the photon-number cutoff");
    run->add_option("--format", run_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* paper = app.add_subcommand(
        "paper", "run the built-in generation pipeline over parameters");
    std::string alpha_s = "1.2", beta_s = "0.7", order_s = "first", sweep_s;
    std::string paper_format = "json";
    double g = 0.05;
    paper->add_option("--alpha", alpha_s, "input amplitude alpha ('re' or 're,im')");
    paper->add_option("--beta", beta_s, "input amplitude beta ('re' or 're,im')");
    paper->add_option("--g", g, "squeezer gain");
    paper->add_option("--order", order_s, "squeezer treatment")
        ->check(CLI::IsMember({"first", "exact"}));
    paper->add_option("--sweep", sweep_s, "sweep spec param:start:stop:steps");
    paper->add_option("--format", paper_format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* validate =
        app.add_subcommand("validate", "run the embedded golden checks");
    bool inject_fault = false;
    validate
        ->add_flag("--inject-bs-sign-fault", inject_fault,
                   "test hook: flip a beam-splitter sign to force a failure")
        ->group("");  // hidden

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 4;
    }

    try {
        if (*run) return cmd_run(run_path, run_cutoff, run_format);
        if (*paper)
            return cmd_paper(alpha_s, beta_s, g, order_s, sweep_s, paper_format);
        return cmd_validate(inject_fault);
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const circuit_exec_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const truncation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
