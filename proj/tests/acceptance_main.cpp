// Acceptance suite: one check per release criterion, each printed as a
// single PASS/FAIL line. Returns nonzero if any criterion fails.
//
// Usage: acceptance [path-to-fockpipe-binary]
// The binary path is needed only for the output-determinism criterion.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fockpipe/fockpipe.hpp>

using namespace fockpipe;

namespace {

const double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// --- criterion 1: beam-splitter covariance on 100 random draws ------------

Outcome bs_covariance() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937 rng(20250810);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    const int cut = 40;
    double worst = 0.0;
    for (int it = 0; it < 100; ++it) {
        cplx a, b;
        do { a = cplx(2 * u(rng), 2 * u(rng)); } while (std::abs(a) > 2.0);
        do { b = cplx(2 * u(rng), 2 * u(rng)); } while (std::abs(b) > 2.0);
        const double theta = ang(rng), phi = ang(rng);
        auto st = coherent_fock(a, cut).tensor(coherent_fock(b, cut));
        st = apply_beamsplitter(st, theta, phi, 0, 1);
        AnalyticState want(2);
        want.add_term(1.0, {{a * std::cos(theta) +
                                 b * std::polar(1.0, -phi) * std::sin(theta),
                             0},
                            {-a * std::polar(1.0, phi) * std::sin(theta) +
                                 b * std::cos(theta),
                             0}});
        worst = std::max(worst, 1.0 - fidelity_fock(st, to_fock(want, cut)));
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
    Outcome o;
    o.pass = worst <= 1e-8 && secs < 30.0;
    o.detail = "max fidelity deficit " + fmt(worst) + " (tol 1e-8), " +
               fmt(secs) + " s (limit 30)";
    return o;
}

// --- criterion 2: Kerr cat identity ----------------------------------------

Outcome kerr_cat() {
    double worst = 0.0;
    for (double a : {0.5, 1.0, 2.0, 3.0}) {
        const int cut = std::max(40, static_cast<int>(a * a + 6 * a + 10));
        auto st = apply_kerr(coherent_fock(a, cut), pi / 2, 0);
        AnalyticState cat(1);
        const double s = 1.0 / std::sqrt(2.0);
        cat.add_term(s * std::polar(1.0, -pi / 4), {{cplx(a, 0), 0}});
        cat.add_term(s * std::polar(1.0, pi / 4), {{cplx(-a, 0), 0}});
        worst = std::max(worst, 1.0 - fidelity_fock(st, to_fock(cat, cut)));
    }
    Outcome o;
    o.pass = worst <= 1e-10;
    o.detail = "max fidelity deficit " + fmt(worst) + " (tol 1e-10)";
    return o;
}

// --- criterion 3: interferometer output over an amplitude grid -------------

Outcome sanders_grid() {
    const std::vector<cplx> alphas = {cplx(2, 0), cplx(-1.5, 0), cplx(1.2, 0.9),
                                      cplx(0, 0.6)};
    const std::vector<cplx> betas = {cplx(0, 0), cplx(0.7, 0), cplx(-0.4, 1.1),
                                     cplx(1.9, 0)};
    const int cut = 45;
    double worst = 0.0;
    for (const auto& a : alphas)
        for (const auto& b : betas) {
            auto st = coherent_fock(a, cut).tensor(coherent_fock(b, cut));
            st = apply_beamsplitter(st, pi / 4, 3 * pi / 2, 0, 1);
            st = apply_kerr(st, pi / 2, 0);
            st = apply_beamsplitter(st, pi / 4, 3 * pi / 2, 0, 1);
            worst = std::max(
                worst, 1.0 - fidelity_fock(st, to_fock(sanders_ecs(a, b), cut)));
        }
    Outcome o;
    o.pass = worst <= 1e-8;
    o.detail = "max fidelity deficit " + fmt(worst) + " over 16 points (tol 1e-8)";
    return o;
}

// --- criterion 4: low-gain heralding ---------------------------------------

Outcome heralding() {
    const double g = 0.05;
    const int cut = 30;
    double worst_fid = 0.0, worst_w = 0.0;
    for (const cplx a : {cplx(0.8, 0), cplx(1.3, 0.4), cplx(2, 0)}) {
        auto st = coherent_fock(a, cut).tensor(MultiModeState(1, cut));
        st = apply_tmsq(st, g, 0, 1, SqueezerOrder::FirstOrder);
        const auto ps = postselect(st, 1, 1);
        AnalyticState spacs(1);
        spacs.add_term(1.0, {{a, 1}});
        worst_fid = std::max(
            worst_fid,
            1.0 - fidelity_fock(*ps.state, to_fock(normalized(spacs), cut)));
        const double want = g * g * (1.0 + std::norm(a));
        worst_w = std::max(worst_w, std::abs(ps.weight - want) / want);
    }
    Outcome o;
    o.pass = worst_fid <= 1e-10 && worst_w <= 1e-10;
    o.detail = "fidelity deficit " + fmt(worst_fid) + ", weight rel. err. " +
               fmt(worst_w) + " (tol 1e-10)";
    return o;
}

// --- criterion 5: four-branch table at g = 0.05 ----------------------------

Outcome branch_table() {
    SchemeParams p;
    p.alpha = cplx(1.2, 0);
    p.beta = cplx(0.7, 0);
    p.g = 0.05;
    const Circuit c = build_paper_circuit(p);
    const int cut = resolve_cutoff(c);
    const auto branches = run_circuit(c);
    Outcome o;
    if (branches.size() != 4) {
        o.detail = "expected 4 branches, got " + std::to_string(branches.size());
        return o;
    }
    double w00 = 0.0;
    for (const auto& b : branches)
        if (b.outcome[0].second == 0 && b.outcome[1].second == 0)
            w00 = b.probability;
    double worst_fid = 0.0, worst_ratio = 0.0;
    for (const auto& b : branches) {
        const int na = b.outcome[0].second, nb = b.outcome[1].second;
        worst_fid = std::max(
            worst_fid, 1.0 - fidelity_fock(b.conditional_state,
                                           expected_branch_fock(p, na, nb, cut)));
        if (na == 0 && nb == 0) continue;
        const double want =
            expected_branch_weight(p, na, nb) / expected_branch_weight(p, 0, 0);
        worst_ratio = std::max(worst_ratio,
                               std::abs(b.probability / w00 - want) / want);
    }
    o.pass = worst_fid <= 1e-6 && worst_ratio <= 1e-8;
    o.detail = "fidelity deficit " + fmt(worst_fid) +
               " (tol 1e-6), ratio rel. err. " + fmt(worst_ratio) + " (tol 1e-8)";
    return o;
}

// --- criterion 6: oracle consistency ----------------------------------------

Outcome oracle_consistency() {
    double worst_overlap = 0.0;
    const std::vector<cplx> amps = {cplx(1, 0),    cplx(2, 0),  cplx(1.3, 0.4),
                                    cplx(-0.9, 1.7), cplx(0, -2.5), cplx(2.5, 0)};
    for (const auto& a : amps)
        for (const auto& b : amps)
            for (int ma : {0, 1})
                for (int mb : {0, 1})
                    worst_overlap = std::max(
                        worst_overlap,
                        std::abs(overlap_single_mode(a, ma, b, mb) -
                                 overlap_series_reference(a, ma, b, mb, 80)));

    SchemeParams p;
    p.alpha = cplx(1.2, 0);
    p.beta = cplx(0.7, 0);
    p.g = 0.05;
    double worst_entropy = 0.0;
    for (int na : {0, 1})
        for (int nb : {0, 1}) {
            const auto br = expected_branch(p, na, nb);
            const double exact = schmidt_two_term(br, {0}).entropy_bits;
            const double numeric = entanglement_entropy(to_fock(br, 30), 1);
            worst_entropy = std::max(worst_entropy, std::abs(exact - numeric));
        }
    Outcome o;
    o.pass = worst_overlap <= 1e-10 && worst_entropy <= 1e-6;
    o.detail = "overlap err " + fmt(worst_overlap) +
               " (tol 1e-10), entropy err " + fmt(worst_entropy) + " (tol 1e-6)";
    return o;
}

// --- criterion 7: hybrid limit ----------------------------------------------

Outcome hybrid_limit() {
    const auto h = hybrid_ideal(cplx(3, 0));
    Outcome o;
    o.pass = h.fidelity > 0.99 &&
             std::abs(h.fidelity - kHybridFidelityAlpha3) <= 1e-9;
    o.detail = "fidelity " + fmt(h.fidelity) + " (> 0.99), drift " +
               fmt(std::abs(h.fidelity - kHybridFidelityAlpha3)) +
               " from pinned value (tol 1e-9)";
    return o;
}

// --- criterion 8: type-I vs type-II diagnostics -----------------------------

Outcome hes_diagnostics() {
    double worst_parity = 0.0;
    for (const cplx a : {cplx(2, 0), cplx(1.5, 0.5), cplx(0.4, -0.9)})
        worst_parity = std::max(worst_parity, std::abs(cat_overlap(a)));
    double worst_fock = 0.0;
    for (const cplx a : {cplx(2, 0), cplx(1.3, 0)}) {
        const auto h = compare_hes(a);
        const double want = std::abs(a) * std::exp(-0.5 * std::norm(a));
        worst_fock = std::max(worst_fock,
                              std::abs(h.type2_mode1_overlap - want));
    }
    Outcome o;
    o.pass = worst_parity < 1e-14 && worst_fock <= 1e-10;
    o.detail = "parity overlap " + fmt(worst_parity) +
               " (< 1e-14), Fock overlap err " + fmt(worst_fock) + " (tol 1e-10)";
    return o;
}

// --- criterion 9: byte-identical CLI output ---------------------------------

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism(const std::string& cli) {
    Outcome o;
    if (cli.empty()) {
        o.detail = "no CLI path given";
        return o;
    }
    auto run_twice = [&](const std::string& args, bool& identical, int& code) {
        const std::string f1 = "acc_det_1.txt", f2 = "acc_det_2.txt";
        const int s1 = std::system((cli + " " + args + " > " + f1 + " 2>/dev/null").c_str());
        const int s2 = std::system((cli + " " + args + " > " + f2 + " 2>/dev/null").c_str());
        identical = slurp(f1) == slurp(f2) && !slurp(f1).empty();
        code = (s1 == s2) ? (WIFEXITED(s1) ? WEXITSTATUS(s1) : -1) : -1;
        std::remove(f1.c_str());
        std::remove(f2.c_str());
    };
    bool id_validate = false, id_paper = false;
    int code_validate = -1, code_paper = -1;
    run_twice("validate", id_validate, code_validate);
    run_twice("paper --alpha 2 --beta 0 --g 0.05 --sweep alpha:0.5:3:6 --format csv",
              id_paper, code_paper);
    o.pass = id_validate && id_paper && code_validate == 0 && code_paper == 0;
    o.detail = std::string("validate ") +
               (id_validate ? "byte-identical" : "DIFFERS") + " (exit " +
               std::to_string(code_validate) + "), paper " +
               (id_paper ? "byte-identical" : "DIFFERS") + " (exit " +
               std::to_string(code_paper) + ")";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    struct Entry {
        std::string title;
        Outcome (*fn)();
    };
    const std::vector<Entry> entries = {
        {"beam-splitter coherent covariance", bs_covariance},
        {"Kerr cat identity", kerr_cat},
        {"interferometer entangled coherent state", sanders_grid},
        {"heralded photon addition", heralding},
        {"four-branch conditional table", branch_table},
        {"oracle consistency", oracle_consistency},
        {"hybrid limit fidelity", hybrid_limit},
        {"hybrid-type diagnostics", hes_diagnostics},
    };
    int failures = 0;
    int id = 0;
    for (const auto& e : entries) {
        ++id;
        const Outcome o = e.fn();
        std::printf("[%s] criterion %d: %s — %s\n", o.pass ? "PASS" : "FAIL", id,
                    e.title.c_str(), o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    const Outcome det = determinism(cli);
    std::printf("[%s] criterion %d: output determinism — %s\n",
                det.pass ? "PASS" : "FAIL", ++id, det.detail.c_str());
    if (!det.pass) ++failures;
    std::printf("%d/%d criteria passed\n", id - failures, id);
    return failures == 0 ? 0 : 1;
}
