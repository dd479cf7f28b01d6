#pragma once

// Programmatic builder of the interferometer + down-conversion pipeline and
// of the exact analytic states expected in each detector-outcome branch.
//
// Pipeline: coherent inputs on modes a and b pass a balanced Mach-Zehnder
// (bs, kerr, bs), producing the two-term entangled coherent state
//   (e^{-i pi/4} |i beta>_a |i alpha>_b + e^{+i pi/4} |-alpha>_a |beta>_b)/sqrt(2).
// Each output arm then seeds a low-gain two-mode squeezer with a vacuum
// idler; detecting the idlers in {0,1} splits the state into four branches.
// Expanding (1 + g a^dag ai^dag)(1 + g b^dag bi^dag) against the two-term
// state shows that a click on an idler applies a^dag to that arm in *both*
// terms, which fixes the one-click branch forms used here.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "analytic.hpp"
#include "circuit.hpp"
#include "fock.hpp"

namespace fockpipe {

struct SchemeParams {
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
    double g = 0.05;
    SqueezerOrder order = SqueezerOrder::FirstOrder;

    // Fixed by the scheme.
    static constexpr double theta = std::numbers::pi / 4.0;
    static constexpr double phi = 3.0 * std::numbers::pi / 2.0;
    static constexpr double chi = std::numbers::pi / 2.0;
};

inline void validate_params(const SchemeParams& p) {
    if (!std::isfinite(p.alpha.real()) || !std::isfinite(p.alpha.imag()) ||
        !std::isfinite(p.beta.real()) || !std::isfinite(p.beta.imag()) ||
        !std::isfinite(p.g))
        throw std::invalid_argument("scheme: non-finite parameter");
    if (p.order == SqueezerOrder::FirstOrder && std::abs(p.g) >= 0.3)
        throw std::invalid_argument("scheme: |g| too large for first-order form");
}

// ---------------------------------------------------------------------------
// Circuit construction. Modes: a, b (coherent inputs), a_i, b_i (idlers).

inline Circuit build_paper_circuit(const SchemeParams& p) {
    validate_params(p);
    Circuit c;
    c.modes.push_back({"a", ModeDecl::Init::Coherent, p.alpha, 0});
    c.modes.push_back({"b", ModeDecl::Init::Coherent, p.beta, 0});
    c.modes.push_back({"a_i", ModeDecl::Init::Vacuum, {}, 0});
    c.modes.push_back({"b_i", ModeDecl::Init::Vacuum, {}, 0});
    c.elements.push_back({BeamSplitter{SchemeParams::theta, SchemeParams::phi}, {"a", "b"}});
    c.elements.push_back({Kerr{SchemeParams::chi}, {"a"}});
    c.elements.push_back({BeamSplitter{SchemeParams::theta, SchemeParams::phi}, {"a", "b"}});
    c.elements.push_back({TwoModeSqueezer{p.g, p.order}, {"a", "a_i"}});
    c.elements.push_back({TwoModeSqueezer{p.g, p.order}, {"b", "b_i"}});
    c.detections.push_back({"a_i", {0, 1}});
    c.detections.push_back({"b_i", {0, 1}});
    return c;
}

inline std::optional<SchemeParams> recognize_paper_circuit(const Circuit& c) {
    constexpr double tol = 1e-12;
    if (c.modes.size() != 4 || c.elements.size() != 5 || c.detections.size() != 2)
        return std::nullopt;
    if (c.modes[0].init != ModeDecl::Init::Coherent ||
        c.modes[1].init != ModeDecl::Init::Coherent ||
        c.modes[2].init != ModeDecl::Init::Vacuum ||
        c.modes[3].init != ModeDecl::Init::Vacuum)
        return std::nullopt;
    const std::string a = c.modes[0].name, b = c.modes[1].name;
    const std::string ai = c.modes[2].name, bi = c.modes[3].name;

    auto is_scheme_bs = [&](const Element& e) {
        const auto* bs = std::get_if<BeamSplitter>(&e.op);
        return bs && std::abs(bs->theta - SchemeParams::theta) <= tol &&
               std::abs(bs->phi - SchemeParams::phi) <= tol &&
               e.modes == std::vector<std::string>{a, b};
    };
    if (!is_scheme_bs(c.elements[0]) || !is_scheme_bs(c.elements[2]))
        return std::nullopt;
    const auto* kerr = std::get_if<Kerr>(&c.elements[1].op);
    if (!kerr || std::abs(kerr->chi - SchemeParams::chi) > tol ||
        c.elements[1].modes != std::vector<std::string>{a})
        return std::nullopt;
    const auto* sa = std::get_if<TwoModeSqueezer>(&c.elements[3].op);
    const auto* sb = std::get_if<TwoModeSqueezer>(&c.elements[4].op);
    if (!sa || !sb || sa->order != sb->order || std::abs(sa->g - sb->g) > tol)
        return std::nullopt;
    if (c.elements[3].modes != std::vector<std::string>{a, ai} ||
        c.elements[4].modes != std::vector<std::string>{b, bi})
        return std::nullopt;
    const std::vector<int> zero_one{0, 1};
    if (c.detections[0].mode != ai || c.detections[0].outcomes != zero_one ||
        c.detections[1].mode != bi || c.detections[1].outcomes != zero_one)
        return std::nullopt;
    SchemeParams p;
    p.alpha = c.modes[0].alpha;
    p.beta = c.modes[1].alpha;
    p.g = sa->g;
    p.order = sa->order;
    return p;
}

// ---------------------------------------------------------------------------
// Analytic branch states over the surviving modes (a, b).

// Two-term entangled coherent state produced by the Mach-Zehnder stage.
inline AnalyticState sanders_ecs(cplx alpha, cplx beta) {
    const cplx i(0.0, 1.0);
    const double s = 1.0 / std::sqrt(2.0);
    AnalyticState st(2);
    st.add_term(s * std::polar(1.0, -std::numbers::pi / 4.0),
                {{i * beta, 0}, {i * alpha, 0}});
    st.add_term(s * std::polar(1.0, std::numbers::pi / 4.0),
                {{-alpha, 0}, {beta, 0}});
    return st;
}

namespace detail {

inline AnalyticState raw_branch(const SchemeParams& p, int click_a, int click_b) {
    if ((click_a != 0 && click_a != 1) || (click_b != 0 && click_b != 1))
        throw std::invalid_argument("branch outcome must be 0 or 1 per idler");
    AnalyticState st = sanders_ecs(p.alpha, p.beta);
    for (auto& t : st.terms()) {
        if (click_a) t.modes[0].added = 1;
        if (click_b) t.modes[1].added = 1;
    }
    return st;
}

}  // namespace detail

// Normalized conditional state for idler outcome (click_a, click_b).
inline AnalyticState expected_branch(const SchemeParams& p, int click_a,
                                     int click_b) {
    return normalized(detail::raw_branch(p, click_a, click_b));
}

// Raw relative weight of the outcome: g^{2k} ||unnormalized branch||^2 with
// k clicks, matching what idler post-selection on the first-order state gives.
inline double expected_branch_weight(const SchemeParams& p, int click_a,
                                     int click_b) {
    const int k = click_a + click_b;
    return std::pow(p.g * p.g, k) *
           norm2_analytic(detail::raw_branch(p, click_a, click_b));
}

inline MultiModeState expected_branch_fock(const SchemeParams& p, int click_a,
                                           int click_b, int cutoff) {
    return to_fock(expected_branch(p, click_a, click_b), cutoff);
}

// ---------------------------------------------------------------------------
// Hybrid (beta = 0) limit of the a-click branch.
//
// The exact branch is e^{-i pi/4} |1>_a |i alpha>_b
//                   + e^{+i pi/4} (a^dag |-alpha>)_a |0>_b  (normalized),
// i.e. one arm holds a Fock qubit component and the other a photon-added
// coherent component. The idealized reading replaces the photon-added ket by
// the closest coherent state: the best |gamma> for a^dag|mu> lies along mu
// with radius r = (|mu| + sqrt(|mu|^2 + 4))/2. The reported state is the
// normalized projection of the exact branch onto
//   span{ |1>|i alpha>, |gamma*>|0> },
// the fidelity is the squared projection norm, and omega is the relative
// phase between the two projection coefficients.

struct HybridIdeal {
    AnalyticState ideal{2};
    double fidelity = 0.0;
    double omega = 0.0;     // phase of the second component relative to the first
    cplx gamma{0.0, 0.0};   // fitted coherent amplitude replacing the SPACS
};

inline HybridIdeal hybrid_ideal(cplx alpha) {
    const double a = std::abs(alpha);
    if (a == 0.0)
        throw std::invalid_argument("hybrid_ideal: alpha must be nonzero");
    SchemeParams p;
    p.alpha = alpha;
    p.beta = cplx(0.0, 0.0);
    const AnalyticState branch = expected_branch(p, 1, 0);

    const double r = 0.5 * (a + std::sqrt(a * a + 4.0));
    const cplx gamma = (-alpha / a) * r;
    const cplx i(0.0, 1.0);

    AnalyticState u1(2), u2(2);
    u1.add_term(1.0, {{cplx(0.0, 0.0), 1}, {i * alpha, 0}});
    u2.add_term(1.0, {{gamma, 0}, {cplx(0.0, 0.0), 0}});

    Eigen::Matrix2cd gram;
    gram << inner_analytic(u1, u1), inner_analytic(u1, u2),
            inner_analytic(u2, u1), inner_analytic(u2, u2);
    Eigen::Vector2cd rhs(inner_analytic(u1, branch), inner_analytic(u2, branch));
    const Eigen::Vector2cd x = gram.fullPivLu().solve(rhs);

    HybridIdeal h;
    h.gamma = gamma;
    h.fidelity = rhs.dot(x).real();
    h.omega = std::arg(x(1) / x(0));
    AnalyticState ideal(2);
    ideal.add_term(x(0), u1.terms()[0].modes);
    ideal.add_term(x(1), u2.terms()[0].modes);
    h.ideal = normalized(ideal);
    return h;
}

// ---------------------------------------------------------------------------
// Reference states for the two hybrid-entanglement flavours.

// Overlap <alpha_o | alpha_e> of the odd and even cat states (identically
// zero; evaluated through the same closed forms used everywhere else).
inline cplx cat_overlap(cplx alpha) {
    const double x = std::exp(-2.0 * std::norm(alpha));
    const double no = 1.0 / std::sqrt(2.0 * (1.0 - x));
    const double ne = 1.0 / std::sqrt(2.0 * (1.0 + x));
    const cplx pp = coherent_overlap(alpha, alpha);
    const cplx pm = coherent_overlap(alpha, -alpha);
    const cplx mp = coherent_overlap(-alpha, alpha);
    const cplx mm = coherent_overlap(-alpha, -alpha);
    return no * ne * (pp + pm - mp - mm);
}

// Spin (x) parity-qubit state: (|1>|alpha_o> +- |0>|alpha_e>)/sqrt(2) with
// the spin qubit encoded on Fock {|0>,|1>} of mode 1.
inline AnalyticState build_type1_hes(cplx alpha, int sign) {
    if (std::abs(alpha) == 0.0)
        throw std::invalid_argument("build_type1_hes: alpha must be nonzero");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("build_type1_hes: sign must be +-1");
    const double x = std::exp(-2.0 * std::norm(alpha));
    const double no = 1.0 / std::sqrt(2.0 * (1.0 - x));
    const double ne = 1.0 / std::sqrt(2.0 * (1.0 + x));
    const double xi = 1.0 / std::sqrt(2.0);
    AnalyticState st(2);
    st.add_term(xi * no, {{cplx(0.0, 0.0), 1}, {alpha, 0}});
    st.add_term(-xi * no, {{cplx(0.0, 0.0), 1}, {-alpha, 0}});
    st.add_term(sign * xi * ne, {{cplx(0.0, 0.0), 0}, {alpha, 0}});
    st.add_term(sign * xi * ne, {{cplx(0.0, 0.0), 0}, {-alpha, 0}});
    return st;
}

// The literal two-term hybrid-qubit form N(|1>|i alpha> + e^{i omega} |-alpha>|0>).
inline AnalyticState type2_hes_form(cplx alpha, double omega) {
    const cplx i(0.0, 1.0);
    AnalyticState st(2);
    st.add_term(1.0, {{cplx(0.0, 0.0), 1}, {i * alpha, 0}});
    st.add_term(std::polar(1.0, omega), {{-alpha, 0}, {cplx(0.0, 0.0), 0}});
    return normalized(st);
}

struct HesComparison {
    AnalyticState type2_state{2};
    AnalyticState type1_state{2};
    double entropy_type2_bits = 0.0;
    double entropy_type1_bits = 0.0;
    // Magnitudes of the per-mode branch overlaps (normalized kets).
    double type2_mode1_overlap = 0.0;  // |<1|-alpha>|, generically nonzero
    double type2_mode2_overlap = 0.0;  // |<i alpha|0>|, generically nonzero
    double type1_spin_overlap = 0.0;   // |<1|0>| = 0
    double type1_parity_overlap = 0.0; // |<alpha_o|alpha_e>| = 0
    double omega = 0.0;
};

inline HesComparison compare_hes(cplx alpha) {
    HesComparison h;
    h.omega = hybrid_ideal(alpha).omega;
    h.type2_state = type2_hes_form(alpha, h.omega);
    h.type1_state = build_type1_hes(alpha, +1);

    auto sr2 = schmidt_two_term(h.type2_state, {0});
    h.entropy_type2_bits = sr2.entropy_bits;

    // The type-I state is two-term as a (spin x cat) pair decomposition; its
    // side Gram matrices are exactly the identity.
    Eigen::Matrix2cd gram_u = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd gram_v;
    const cplx oe = cat_overlap(alpha);
    gram_v << cplx(1.0, 0.0), oe, std::conj(oe), cplx(1.0, 0.0);
    const double xi = 1.0 / std::sqrt(2.0);
    auto sr1 = detail::schmidt_from_grams(Eigen::Vector2cd(xi, xi), gram_u, gram_v);
    h.entropy_type1_bits = sr1.entropy_bits;

    h.type2_mode1_overlap =
        std::abs(overlap_single_mode(cplx(0.0, 0.0), 1, -alpha, 0));
    h.type2_mode2_overlap =
        std::abs(overlap_single_mode(cplx(0.0, 1.0) * alpha, 0, cplx(0.0, 0.0), 0));
    h.type1_spin_overlap =
        std::abs(overlap_single_mode(cplx(0.0, 0.0), 1, cplx(0.0, 0.0), 0));
    h.type1_parity_overlap = std::abs(cat_overlap(alpha));
    return h;
}

}  // namespace fockpipe
