#pragma once

// Multi-mode bosonic states in a truncated Fock basis, plus the device
// operations that act on them: beam splitters, Kerr media, two-mode
// squeezers, photon addition and Fock-level post-selection.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace fockpipe {

using cplx = std::complex<double>;

inline constexpr double kDefaultNormTolerance = 1e-10;
inline constexpr double kDefaultTailHardLimit = 1e-3;

// Dense amplitude tensor over M modes, each truncated at `cutoff` photons.
// Flat storage is row-major with mode 0 varying slowest. A state with zero
// modes is the trivial scalar (one amplitude).
class MultiModeState {
public:
    MultiModeState(int mode_count, int cutoff)
        : mode_count_(mode_count), cutoff_(cutoff) {
        if (mode_count < 0) throw std::invalid_argument("mode_count must be >= 0");
        if (cutoff < 0) throw std::invalid_argument("cutoff must be >= 0");
        std::size_t n = 1;
        for (int m = 0; m < mode_count; ++m) n *= dim();
        amps_.assign(n, cplx(0.0, 0.0));
        amps_[0] = cplx(1.0, 0.0);  // vacuum
    }

    static MultiModeState scalar() { return MultiModeState(0, 0); }

    int mode_count() const { return mode_count_; }
    int cutoff() const { return cutoff_; }
    int dim() const { return cutoff_ + 1; }
    std::size_t size() const { return amps_.size(); }

    std::vector<cplx>& amplitudes() { return amps_; }
    const std::vector<cplx>& amplitudes() const { return amps_; }

    std::size_t stride(int mode) const {
        std::size_t s = 1;
        for (int m = mode_count_ - 1; m > mode; --m) s *= dim();
        return s;
    }

    // Photon number of `mode` encoded in flat index `idx`.
    int level_at(std::size_t idx, int mode) const {
        return static_cast<int>((idx / stride(mode)) % dim());
    }

    const cplx& at(const std::vector<int>& ns) const { return amps_[flat(ns)]; }
    cplx& at(const std::vector<int>& ns) { return amps_[flat(ns)]; }

    std::size_t flat(const std::vector<int>& ns) const {
        if (static_cast<int>(ns.size()) != mode_count_)
            throw std::invalid_argument("index rank mismatch");
        std::size_t idx = 0;
        for (int m = 0; m < mode_count_; ++m) {
            if (ns[m] < 0 || ns[m] > cutoff_)
                throw std::out_of_range("Fock level out of range");
            idx = idx * dim() + static_cast<std::size_t>(ns[m]);
        }
        return idx;
    }

    double norm2() const {
        double s = 0.0;
        for (const auto& a : amps_) s += std::norm(a);
        return s;
    }

    // Probability weight sitting on the truncation boundary: any mode index
    // equal to the cutoff.
    double tail_mass() const {
        if (mode_count_ == 0) return 0.0;
        double s = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (amps_[i] == cplx(0.0, 0.0)) continue;
            for (int m = 0; m < mode_count_; ++m) {
                if (level_at(i, m) == cutoff_) {
                    s += std::norm(amps_[i]);
                    break;
                }
            }
        }
        return s;
    }

    double tail_mass(int mode) const {
        check_mode(mode);
        double s = 0.0;
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if (level_at(i, mode) == cutoff_) s += std::norm(amps_[i]);
        return s;
    }

    bool normalized() const { return normalized_; }
    void set_normalized(bool v) { normalized_ = v; }

    // Recompute the normalized flag from the actual norm.
    void refresh_normalized_flag() {
        normalized_ = std::abs(norm2() - 1.0) <= norm_tolerance;
    }

    void renormalize() {
        const double n = std::sqrt(norm2());
        if (n == 0.0) throw error("cannot renormalize a zero state");
        for (auto& a : amps_) a /= n;
        normalized_ = true;
    }

    // Tensor product: `this` modes first, `other` modes after. Cutoffs must
    // match so device operations stay well-defined on the result.
    MultiModeState tensor(const MultiModeState& other) const {
        if (mode_count_ > 0 && other.mode_count_ > 0 && cutoff_ != other.cutoff_)
            throw std::invalid_argument("tensor: cutoff mismatch");
        const int cut = mode_count_ > 0 ? cutoff_ : other.cutoff_;
        MultiModeState out(mode_count_ + other.mode_count_, cut);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (amps_[i] == cplx(0.0, 0.0)) continue;
            for (std::size_t j = 0; j < other.amps_.size(); ++j)
                out.amps_[i * other.amps_.size() + j] = amps_[i] * other.amps_[j];
        }
        out.normalized_ = normalized_ && other.normalized_;
        out.warnings = warnings;
        out.warnings.insert(out.warnings.end(), other.warnings.begin(),
                            other.warnings.end());
        return out;
    }

    void check_mode(int mode) const {
        if (mode < 0 || mode >= mode_count_)
            throw std::invalid_argument("mode index out of range");
    }

    double norm_tolerance = kDefaultNormTolerance;
    std::vector<std::string> warnings;

private:
    int mode_count_;
    int cutoff_;
    std::vector<cplx> amps_;
    bool normalized_ = true;
};

// ---------------------------------------------------------------------------
// Operator descriptions (used directly and by the circuit executor).

enum class SqueezerOrder { FirstOrder, Exact };

struct BeamSplitter {
    double theta;
    double phi;
    bool operator==(const BeamSplitter&) const = default;
};
struct Kerr {
    double chi;
    bool operator==(const Kerr&) const = default;
};
struct TwoModeSqueezer {
    double g;
    SqueezerOrder order = SqueezerOrder::FirstOrder;
    bool operator==(const TwoModeSqueezer&) const = default;
};
struct PhotonAdd {
    bool operator==(const PhotonAdd&) const = default;
};

using OperatorKind = std::variant<BeamSplitter, Kerr, TwoModeSqueezer, PhotonAdd>;

inline int operator_arity(const OperatorKind& kind) {
    if (std::holds_alternative<BeamSplitter>(kind)) return 2;
    if (std::holds_alternative<TwoModeSqueezer>(kind)) return 2;
    return 1;
}

struct OperatorSpec {
    OperatorKind kind;
    std::array<int, 2> modes{0, 0};  // modes[1] unused for 1-mode operators
};

// ---------------------------------------------------------------------------
// State preparation.

// Coherent state |alpha> as amplitudes e^{-|a|^2/2} a^n / sqrt(n!).
// The series is evaluated iteratively, so no factorials overflow.
inline MultiModeState coherent_fock(cplx alpha, int cutoff,
                                    double tail_hard_limit = kDefaultTailHardLimit) {
    if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
        throw std::invalid_argument("coherent_fock: non-finite amplitude");
    if (cutoff < 0) throw std::invalid_argument("coherent_fock: negative cutoff");
    MultiModeState st(1, cutoff);
    auto& a = st.amplitudes();
    cplx c = std::exp(cplx(-0.5 * std::norm(alpha), 0.0));
    for (int n = 0; n <= cutoff; ++n) {
        a[n] = c;
        c *= alpha / std::sqrt(static_cast<double>(n + 1));
    }
    // The guard must use the total missing mass, not the boundary amplitude:
    // for |alpha|^2 far beyond the cutoff the boundary level is nearly empty
    // while almost everything is lost.
    const double lost = std::max(0.0, 1.0 - st.norm2());
    if (lost > tail_hard_limit)
        throw truncation_error("coherent_fock: cutoff too small for |alpha|", lost);
    if (lost >= st.norm_tolerance)
        st.warnings.push_back("coherent_fock: truncated tail mass " +
                              std::to_string(lost));
    st.refresh_normalized_flag();
    return st;
}

// Single-mode Fock basis vector |n>.
inline MultiModeState fock_basis(int n, int cutoff) {
    if (n < 0 || n > cutoff)
        throw std::invalid_argument("fock_basis: level outside cutoff");
    MultiModeState st(1, cutoff);
    st.amplitudes()[0] = cplx(0.0, 0.0);
    st.amplitudes()[n] = cplx(1.0, 0.0);
    return st;
}

namespace detail {

// Invoke fn(base_offset) for every configuration of the modes other than
// (mi, mj); base_offset has n_mi = n_mj = 0.
template <class Fn>
void for_each_spectator(const MultiModeState& s, int mi, int mj, Fn&& fn) {
    const int mcount = s.mode_count();
    std::vector<int> others;
    others.reserve(mcount);
    for (int m = 0; m < mcount; ++m)
        if (m != mi && m != mj) others.push_back(m);
    std::vector<int> digit(others.size(), 0);
    const int d = s.dim();
    for (;;) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < others.size(); ++k)
            off += static_cast<std::size_t>(digit[k]) * s.stride(others[k]);
        fn(off);
        std::size_t k = 0;
        for (; k < others.size(); ++k) {
            if (++digit[k] < d) break;
            digit[k] = 0;
        }
        if (k == others.size()) break;
    }
}

inline void require_two_distinct(const MultiModeState& s, int mi, int mj,
                                 const char* who) {
    s.check_mode(mi);
    s.check_mode(mj);
    if (mi == mj)
        throw std::invalid_argument(std::string(who) + ": modes must be distinct");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Photon addition: a^dag then renormalization. Returns the renormalized state
// and the pre-normalization norm, whose square is <psi| a a^dag |psi>.
inline std::pair<MultiModeState, double> photon_add(const MultiModeState& in,
                                                    int mode) {
    in.check_mode(mode);
    const std::size_t stride = in.stride(mode);
    const int cut = in.cutoff();
    MultiModeState out = in;
    auto& dst = out.amplitudes();
    const auto& src = in.amplitudes();
    std::fill(dst.begin(), dst.end(), cplx(0.0, 0.0));

    double raised2 = 0.0;  // ||a^dag psi||^2 including what falls off the top
    double lost = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == cplx(0.0, 0.0)) continue;
        const int n = in.level_at(i, mode);
        const double w = static_cast<double>(n + 1) * std::norm(src[i]);
        raised2 += w;
        if (n == cut)
            lost += w;
        else
            dst[i + stride] = std::sqrt(static_cast<double>(n + 1)) * src[i];
    }
    if (raised2 == 0.0) throw error("photon_add: zero state");
    if (lost / raised2 > in.norm_tolerance)
        throw truncation_error("photon_add: top Fock level holds non-negligible amplitude",
                               lost / raised2);
    const double norm_factor = std::sqrt(raised2);
    for (auto& a : dst) a /= norm_factor;
    out.set_normalized(in.normalized());
    return {std::move(out), norm_factor};
}

// ---------------------------------------------------------------------------
// Beam splitter exp[theta (e^{-i phi} a^dag b - e^{i phi} a b^dag)].
//
// The generator conserves N = n_i + n_j, so the two-mode plane splits into
// sectors of dimension N+1. Each sector unitary is built densely from the
// eigendecomposition of the Hermitian generator and applied per spectator
// configuration. Sectors with N <= cutoff are evolved exactly; for larger N
// the part of the sector outside the stored box is clipped and accounted.
inline MultiModeState apply_beamsplitter(const MultiModeState& in, double theta,
                                         double phi, int mode_i, int mode_j) {
    detail::require_two_distinct(in, mode_i, mode_j, "apply_beamsplitter");
    const int cut = in.cutoff();
    const int maxN = 2 * cut;
    const cplx f = theta * std::polar(1.0, -phi);  // coefficient of a^dag b

    std::vector<Eigen::MatrixXcd> sector(maxN + 1);
    for (int N = 0; N <= maxN; ++N) {
        const int dim = N + 1;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
        // H = i K with K the anti-Hermitian generator; U = exp(K) = V e^{-i L} V^dag.
        for (int n = 0; n + 1 <= N; ++n) {
            const double c = std::sqrt(static_cast<double>((n + 1) * (N - n)));
            h(n + 1, n) = cplx(0.0, 1.0) * f * c;
            h(n, n + 1) = std::conj(h(n + 1, n));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        Eigen::VectorXcd phase(dim);
        for (int k = 0; k < dim; ++k)
            phase(k) = std::polar(1.0, -es.eigenvalues()(k));
        sector[N] = es.eigenvectors() * phase.asDiagonal() *
                    es.eigenvectors().adjoint();
    }

    MultiModeState out = in;
    const std::size_t si = in.stride(mode_i);
    const std::size_t sj = in.stride(mode_j);
    const auto& src = in.amplitudes();
    auto& dst = out.amplitudes();
    double clipped = 0.0;

    Eigen::VectorXcd v(maxN + 1), w(maxN + 1);
    detail::for_each_spectator(in, mode_i, mode_j, [&](std::size_t off) {
        for (int N = 0; N <= maxN; ++N) {
            const int nlo = std::max(0, N - cut);
            const int nhi = std::min(N, cut);
            v.head(N + 1).setZero();
            for (int n = nlo; n <= nhi; ++n)
                v(n) = src[off + static_cast<std::size_t>(n) * si +
                           static_cast<std::size_t>(N - n) * sj];
            w.head(N + 1).noalias() = sector[N] * v.head(N + 1);
            for (int n = 0; n <= N; ++n) {
                if (n >= nlo && n <= nhi)
                    dst[off + static_cast<std::size_t>(n) * si +
                        static_cast<std::size_t>(N - n) * sj] = w(n);
                else
                    clipped += std::norm(w(n));
            }
        }
    });
    if (clipped >= in.norm_tolerance)
        out.warnings.push_back("apply_beamsplitter: clipped mass " +
                               std::to_string(clipped));
    return out;
}

// ---------------------------------------------------------------------------
// Kerr medium: diagonal phase e^{-i chi n^2} on one mode.
inline MultiModeState apply_kerr(const MultiModeState& in, double chi, int mode) {
    in.check_mode(mode);
    const int d = in.dim();
    std::vector<cplx> phase(d);
    for (int n = 0; n < d; ++n)
        phase[n] = std::polar(1.0, -chi * static_cast<double>(n) * n);
    MultiModeState out = in;
    auto& a = out.amplitudes();
    for (std::size_t i = 0; i < a.size(); ++i) a[i] *= phase[in.level_at(i, mode)];
    return out;
}

// ---------------------------------------------------------------------------
// Two-mode squeezer exp[g (a_s^dag a_i^dag - a_s a_i)].
//
// FirstOrder keeps the low-gain form (1 + g a_s^dag a_i^dag) and leaves the
// result unnormalized so conditional branch weights stay directly readable.
// Exact exponentiates the generator per photon-number-difference block, with
// extra headroom levels so leakage past the cutoff is tracked, then
// renormalizes; the loss is reported through `truncation_loss`.
inline MultiModeState apply_tmsq(const MultiModeState& in, double g, int mode_s,
                                 int mode_i, SqueezerOrder order,
                                 double* truncation_loss = nullptr,
                                 double first_order_g_limit = 0.3,
                                 double first_order_g_warn = 0.1,
                                 double tail_hard_limit = kDefaultTailHardLimit) {
    detail::require_two_distinct(in, mode_s, mode_i, "apply_tmsq");
    const int cut = in.cutoff();
    const std::size_t ss = in.stride(mode_s);
    const std::size_t si = in.stride(mode_i);
    const auto& src = in.amplitudes();

    if (order == SqueezerOrder::FirstOrder) {
        if (std::abs(g) >= first_order_g_limit)
            throw std::invalid_argument(
                "apply_tmsq: |g| too large for the first-order form");
        MultiModeState out = in;
        if (std::abs(g) > first_order_g_warn)
            out.warnings.push_back(
                "apply_tmsq: first-order form used with |g| > " +
                std::to_string(first_order_g_warn));
        auto& dst = out.amplitudes();
        double lost = 0.0;
        for (std::size_t i = 0; i < src.size(); ++i) {
            if (src[i] == cplx(0.0, 0.0)) continue;
            const int ns = in.level_at(i, mode_s);
            const int ni = in.level_at(i, mode_i);
            const double amp = std::sqrt(static_cast<double>((ns + 1) * (ni + 1)));
            if (ns == cut || ni == cut)
                lost += g * g * amp * amp * std::norm(src[i]);
            else
                dst[i + ss + si] += g * amp * src[i];
        }
        if (lost > tail_hard_limit)
            throw truncation_error("apply_tmsq: first-order term exceeds cutoff", lost);
        if (lost >= in.norm_tolerance)
            out.warnings.push_back("apply_tmsq: clipped mass " + std::to_string(lost));
        if (truncation_loss) *truncation_loss = lost;
        out.set_normalized(false);
        return out;
    }

    // Exact: blocks of constant d = n_s - n_i, indexed by k = min(n_s, n_i).
    // Within a block the generator is the real antisymmetric ladder
    // G[k+1][k] = sqrt((|d|+k+1)(k+1)); headroom rows catch the leakage.
    const int headroom = 16;
    MultiModeState out = in;
    auto& dst = out.amplitudes();
    std::fill(dst.begin(), dst.end(), cplx(0.0, 0.0));
    double clipped = 0.0;
    const double in_norm2 = in.norm2();

    std::vector<Eigen::MatrixXcd> block(cut + 1);  // shared by +d and -d
    for (int ad = 0; ad <= cut; ++ad) {
        const int kmax_stored = cut - ad;
        const int dim = kmax_stored + 1 + headroom;
        Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
        for (int k = 0; k + 1 < dim; ++k) {
            const double c =
                g * std::sqrt(static_cast<double>((ad + k + 1) * (k + 1)));
            h(k + 1, k) = cplx(0.0, 1.0) * c;
            h(k, k + 1) = cplx(0.0, -1.0) * c;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        Eigen::VectorXcd phase(dim);
        for (int k = 0; k < dim; ++k)
            phase(k) = std::polar(1.0, -es.eigenvalues()(k));
        block[ad] = es.eigenvectors() * phase.asDiagonal() *
                    es.eigenvectors().adjoint();
    }

    Eigen::VectorXcd v(cut + 1 + headroom), w(cut + 1 + headroom);
    detail::for_each_spectator(in, mode_s, mode_i, [&](std::size_t off) {
        for (int d = -cut; d <= cut; ++d) {
            const int ad = std::abs(d);
            const int kmax = cut - ad;
            const int dim = kmax + 1 + headroom;
            const std::size_t base =
                off + (d >= 0 ? static_cast<std::size_t>(d) * ss
                              : static_cast<std::size_t>(-d) * si);
            v.head(dim).setZero();
            for (int k = 0; k <= kmax; ++k)
                v(k) = src[base + static_cast<std::size_t>(k) * (ss + si)];
            w.head(dim).noalias() = block[ad] * v.head(dim);
            for (int k = 0; k <= kmax; ++k)
                dst[base + static_cast<std::size_t>(k) * (ss + si)] = w(k);
            for (int k = kmax + 1; k < dim; ++k) clipped += std::norm(w(k));
        }
    });

    const double loss = in_norm2 > 0.0 ? clipped / in_norm2 : 0.0;
    if (loss > tail_hard_limit)
        throw truncation_error("apply_tmsq: tail-mass guard violated", loss);
    if (loss >= in.norm_tolerance)
        out.warnings.push_back("apply_tmsq: truncation loss " + std::to_string(loss));
    if (truncation_loss) *truncation_loss = loss;
    out.renormalize();
    out.set_normalized(true);
    return out;
}

// Generic dispatch used by the circuit executor.
inline MultiModeState apply(const MultiModeState& in, const OperatorSpec& spec) {
    if (const auto* bs = std::get_if<BeamSplitter>(&spec.kind))
        return apply_beamsplitter(in, bs->theta, bs->phi, spec.modes[0], spec.modes[1]);
    if (const auto* k = std::get_if<Kerr>(&spec.kind))
        return apply_kerr(in, k->chi, spec.modes[0]);
    if (const auto* sq = std::get_if<TwoModeSqueezer>(&spec.kind))
        return apply_tmsq(in, sq->g, spec.modes[0], spec.modes[1], sq->order);
    return photon_add(in, spec.modes[0]).first;
}

// ---------------------------------------------------------------------------
// Post-selection: project one mode onto a Fock level and drop the mode.

struct Postselection {
    bool empty = false;          // zero-probability outcome
    double weight = 0.0;         // probability, or relative weight when flagged
    bool relative_weight = false;  // input was unnormalized
    std::optional<MultiModeState> state;  // renormalized conditional state
};

inline Postselection postselect(const MultiModeState& in, int mode, int n_detected) {
    in.check_mode(mode);
    if (n_detected < 0 || n_detected > in.cutoff())
        throw std::invalid_argument("postselect: level outside cutoff");

    const int mcount = in.mode_count();
    MultiModeState cond(mcount - 1, mcount > 1 ? in.cutoff() : 0);
    auto& dst = cond.amplitudes();
    const auto& src = in.amplitudes();
    const std::size_t stride = in.stride(mode);
    const std::size_t d = static_cast<std::size_t>(in.dim());
    const std::size_t outer = stride * d;

    double p = 0.0;
    std::size_t o = 0;
    for (std::size_t hi = 0; hi < src.size(); hi += outer) {
        const std::size_t base = hi + static_cast<std::size_t>(n_detected) * stride;
        for (std::size_t lo = 0; lo < stride; ++lo, ++o) {
            dst[o] = src[base + lo];
            p += std::norm(dst[o]);
        }
    }

    Postselection r;
    r.relative_weight = !in.normalized();
    if (p == 0.0) {
        r.empty = true;
        return r;
    }
    // For normalized inputs this is a genuine probability; for unnormalized
    // inputs the raw projected weight is returned so first-order branch
    // weights keep the form g^2k * ||branch||^2.
    r.weight = in.normalized() ? p / in.norm2() : p;
    const double s = std::sqrt(p);
    for (auto& a : dst) a /= s;
    cond.set_normalized(true);
    cond.warnings = in.warnings;
    r.state = std::move(cond);
    return r;
}

// Inner product <a|b> over identical tensor layouts.
inline cplx inner_fock(const MultiModeState& a, const MultiModeState& b) {
    if (a.mode_count() != b.mode_count() || a.cutoff() != b.cutoff())
        throw std::invalid_argument("inner_fock: shape mismatch");
    cplx s(0.0, 0.0);
    const auto& x = a.amplitudes();
    const auto& y = b.amplitudes();
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

}  // namespace fockpipe
