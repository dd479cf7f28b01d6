#pragma once

// Exact coherent-state algebra: states represented as finite superpositions
// of mode-wise products of (optionally photon-added) coherent states, with
// closed-form overlaps. Serves as the truncation-free oracle for the Fock
// simulator and as the exact entanglement reference for two-term branches.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "fock.hpp"

namespace fockpipe {

// One mode of a product term: the unnormalized ket (a^dag)^added |alpha>.
// Additions are limited to {0, 1}; the closed forms below rely on it.
struct ModeKet {
    cplx alpha{0.0, 0.0};
    int added = 0;
};

struct CoherentTerm {
    cplx coeff{1.0, 0.0};
    std::vector<ModeKet> modes;
};

class AnalyticState {
public:
    explicit AnalyticState(int mode_count) : mode_count_(mode_count) {
        if (mode_count < 0) throw std::invalid_argument("mode_count must be >= 0");
    }

    int mode_count() const { return mode_count_; }
    const std::vector<CoherentTerm>& terms() const { return terms_; }
    std::vector<CoherentTerm>& terms() { return terms_; }

    AnalyticState& add_term(cplx coeff, std::vector<ModeKet> modes) {
        if (static_cast<int>(modes.size()) != mode_count_)
            throw std::invalid_argument("term rank mismatch");
        for (const auto& m : modes)
            if (m.added != 0 && m.added != 1)
                throw std::invalid_argument("photon additions limited to {0,1}");
        terms_.push_back(CoherentTerm{coeff, std::move(modes)});
        return *this;
    }

private:
    int mode_count_;
    std::vector<CoherentTerm> terms_;
};

// ---------------------------------------------------------------------------
// Closed-form overlaps.
//
// <alpha|beta> = exp(conj(alpha) beta - (|alpha|^2 + |beta|^2)/2), and with
// a a^dag = 1 + a^dag a:
//   <alpha| a^dag |beta> = conj(alpha) <alpha|beta>
//   <alpha| a      |beta> = beta <alpha|beta>
//   <alpha| a a^dag |beta> = (1 + conj(alpha) beta) <alpha|beta>

inline cplx coherent_overlap(cplx alpha, cplx beta) {
    return std::exp(std::conj(alpha) * beta -
                    0.5 * cplx(std::norm(alpha) + std::norm(beta), 0.0));
}

inline cplx overlap_single_mode(cplx alpha, int m_a, cplx beta, int m_b) {
    if ((m_a != 0 && m_a != 1) || (m_b != 0 && m_b != 1))
        throw std::invalid_argument("overlap_single_mode: additions must be 0 or 1");
    const cplx base = coherent_overlap(alpha, beta);
    if (m_a == 0 && m_b == 0) return base;
    if (m_a == 0 && m_b == 1) return std::conj(alpha) * base;
    if (m_a == 1 && m_b == 0) return beta * base;
    return (cplx(1.0, 0.0) + std::conj(alpha) * beta) * base;
}

inline cplx overlap_single_mode(const ModeKet& bra, const ModeKet& ket) {
    return overlap_single_mode(bra.alpha, bra.added, ket.alpha, ket.added);
}

// Brute-force reference: the same overlap by summing the Fock series of both
// kets up to `cutoff`. Kept deliberately independent of the closed forms so
// each hand-derived case has a regression check.
inline cplx overlap_series_reference(cplx alpha, int m_a, cplx beta, int m_b,
                                     int cutoff = 80) {
    auto coeffs = [cutoff](cplx a, int m) {
        std::vector<cplx> v(static_cast<std::size_t>(cutoff) + 1, cplx(0.0, 0.0));
        cplx c = std::exp(cplx(-0.5 * std::norm(a), 0.0));
        for (int n = 0; n <= cutoff; ++n) {
            if (m == 0)
                v[n] = c;                     // <n|a> = c_n
            else if (n + 1 <= cutoff)
                v[n + 1] = std::sqrt(static_cast<double>(n + 1)) * c;  // a^dag shift
            c *= a / std::sqrt(static_cast<double>(n + 1));
        }
        return v;
    };
    const auto va = coeffs(alpha, m_a);
    const auto vb = coeffs(beta, m_b);
    cplx s(0.0, 0.0);
    for (std::size_t n = 0; n < va.size(); ++n) s += std::conj(va[n]) * vb[n];
    return s;
}

inline cplx term_overlap(const CoherentTerm& bra, const CoherentTerm& ket) {
    cplx p(1.0, 0.0);
    for (std::size_t m = 0; m < bra.modes.size(); ++m)
        p *= overlap_single_mode(bra.modes[m], ket.modes[m]);
    return p;
}

// G[k][l] = <term_k | term_l> without coefficients.
inline Eigen::MatrixXcd gram_matrix(const AnalyticState& s) {
    const int n = static_cast<int>(s.terms().size());
    Eigen::MatrixXcd g(n, n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            g(k, l) = term_overlap(s.terms()[k], s.terms()[l]);
    return g;
}

inline cplx inner_analytic(const AnalyticState& a, const AnalyticState& b) {
    if (a.mode_count() != b.mode_count())
        throw std::invalid_argument("inner_analytic: mode count mismatch");
    cplx s(0.0, 0.0);
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms())
            s += std::conj(ta.coeff) * tb.coeff * term_overlap(ta, tb);
    return s;
}

inline double norm2_analytic(const AnalyticState& s) {
    const double n2 = inner_analytic(s, s).real();
    return n2;
}

inline double norm_analytic(const AnalyticState& s) {
    const double n2 = norm2_analytic(s);
    if (n2 <= 0.0) throw error("norm_analytic: zero-norm state");
    return std::sqrt(n2);
}

inline AnalyticState normalized(const AnalyticState& s) {
    const double n = norm_analytic(s);
    AnalyticState out = s;
    for (auto& t : out.terms()) t.coeff /= n;
    return out;
}

inline double fidelity_analytic(const AnalyticState& a, const AnalyticState& b) {
    const double na = norm2_analytic(a);
    const double nb = norm2_analytic(b);
    if (na <= 0.0 || nb <= 0.0) throw error("fidelity_analytic: zero-norm state");
    return std::norm(inner_analytic(a, b)) / (na * nb);
}

// ---------------------------------------------------------------------------
// Bridge to the Fock simulator.

inline MultiModeState to_fock(const AnalyticState& s, int cutoff,
                              double norm_mismatch_limit = 1e-6) {
    if (s.terms().empty()) throw error("to_fock: state has no terms");
    const int mcount = s.mode_count();
    MultiModeState out(mcount, cutoff);
    auto& dst = out.amplitudes();
    std::fill(dst.begin(), dst.end(), cplx(0.0, 0.0));

    const int d = cutoff + 1;
    std::vector<std::vector<cplx>> mode_vec(mcount);
    for (const auto& term : s.terms()) {
        for (int m = 0; m < mcount; ++m) {
            auto& v = mode_vec[m];
            v.assign(d, cplx(0.0, 0.0));
            const auto& k = term.modes[m];
            cplx c = std::exp(cplx(-0.5 * std::norm(k.alpha), 0.0));
            for (int n = 0; n < d; ++n) {
                if (k.added == 0)
                    v[n] = c;
                else if (n + 1 < d)
                    v[n + 1] = std::sqrt(static_cast<double>(n + 1)) * c;
                c *= k.alpha / std::sqrt(static_cast<double>(n + 1));
            }
        }
        // accumulate coeff * prod_m v_m[n_m] over the full tensor
        std::vector<int> digit(mcount, 0);
        if (mcount == 0) {
            dst[0] += term.coeff;
            continue;
        }
        for (std::size_t idx = 0; idx < dst.size(); ++idx) {
            cplx p = term.coeff;
            std::size_t rem = idx;
            for (int m = mcount - 1; m >= 0; --m) {
                digit[m] = static_cast<int>(rem % d);
                rem /= d;
            }
            for (int m = 0; m < mcount; ++m) p *= mode_vec[m][digit[m]];
            dst[idx] += p;
        }
    }

    const double want = norm2_analytic(s);
    const double got = out.norm2();
    const double rel = std::abs(got - want) / std::max(want, 1e-300);
    if (rel > norm_mismatch_limit)
        throw truncation_error("to_fock: cutoff too small for state", rel);
    out.refresh_normalized_flag();
    return out;
}

// ---------------------------------------------------------------------------
// Two-term Schmidt analysis.
//
// For |psi> = sum_k c_k |u_k>|v_k> the nonzero spectrum of the reduced
// density operator on the u side equals the spectrum of
//   T = diag(c) B^T diag(conj(c)) A,
// where A[k][l] = <u_k|u_l> and B[k][l] = <v_k|v_l>.

struct SchmidtResult {
    double lambda1 = 0.0;  // descending
    double lambda2 = 0.0;
    double entropy_bits = 0.0;
};

namespace detail {

inline double entropy_from_weights(double l1, double l2) {
    auto h = [](double x) { return x > 0.0 ? -x * std::log2(x) : 0.0; };
    return h(l1) + h(l2);
}

inline SchmidtResult schmidt_from_grams(const Eigen::Vector2cd& c,
                                        const Eigen::Matrix2cd& gram_u,
                                        const Eigen::Matrix2cd& gram_v) {
    Eigen::Matrix2cd t = c.asDiagonal() * gram_v.transpose() *
                         c.conjugate().asDiagonal() * gram_u;
    const cplx tr = t(0, 0) + t(1, 1);
    const cplx det = t(0, 0) * t(1, 1) - t(0, 1) * t(1, 0);
    const cplx disc = std::sqrt(tr * tr - 4.0 * det);
    double l1 = (0.5 * (tr + disc)).real();
    double l2 = (0.5 * (tr - disc)).real();
    const double total = l1 + l2;
    if (total <= 0.0) throw error("schmidt: zero-norm state");
    l1 = std::max(l1, 0.0) / total;
    l2 = std::max(l2, 0.0) / total;
    if (l1 < l2) std::swap(l1, l2);
    SchmidtResult r;
    r.lambda1 = l1;
    r.lambda2 = l2;
    r.entropy_bits = entropy_from_weights(l1, l2);
    return r;
}

}  // namespace detail

// `side_a_modes` selects the modes forming subsystem A; the rest form B.
inline SchmidtResult schmidt_two_term(const AnalyticState& s,
                                      const std::vector<int>& side_a_modes) {
    if (s.terms().size() != 2)
        throw std::invalid_argument(
            "schmidt_two_term: exactly two terms required (use the numeric path)");
    std::vector<bool> in_a(s.mode_count(), false);
    for (int m : side_a_modes) {
        if (m < 0 || m >= s.mode_count())
            throw std::invalid_argument("schmidt_two_term: bad mode index");
        in_a[m] = true;
    }
    auto side_overlap = [&](const CoherentTerm& bra, const CoherentTerm& ket,
                            bool pick_a) {
        cplx p(1.0, 0.0);
        for (int m = 0; m < s.mode_count(); ++m)
            if (in_a[m] == pick_a)
                p *= overlap_single_mode(bra.modes[m], ket.modes[m]);
        return p;
    };
    Eigen::Matrix2cd a, b;
    for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
            a(k, l) = side_overlap(s.terms()[k], s.terms()[l], true);
            b(k, l) = side_overlap(s.terms()[k], s.terms()[l], false);
        }
    Eigen::Vector2cd c(s.terms()[0].coeff, s.terms()[1].coeff);
    return detail::schmidt_from_grams(c, a, b);
}

}  // namespace fockpipe
