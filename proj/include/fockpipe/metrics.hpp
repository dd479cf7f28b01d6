#pragma once

// Numeric entanglement and comparison metrics on truncated Fock states:
// partial trace, von Neumann entropy, logarithmic negativity, fidelity.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "errors.hpp"
#include "fock.hpp"

namespace fockpipe {

struct ReducedDensity {
    Eigen::MatrixXcd matrix;
    double trace = 0.0;
};

inline ReducedDensity partial_trace(const MultiModeState& state,
                                    const std::vector<int>& keep_modes) {
    if (keep_modes.empty())
        throw std::invalid_argument("partial_trace: empty keep set");
    const int mcount = state.mode_count();
    std::vector<bool> keep(mcount, false);
    for (int m : keep_modes) {
        state.check_mode(m);
        if (keep[m]) throw std::invalid_argument("partial_trace: duplicate mode");
        keep[m] = true;
    }
    const std::size_t d = static_cast<std::size_t>(state.dim());
    std::size_t dk = 1, dt = 1;
    for (int m = 0; m < mcount; ++m) (keep[m] ? dk : dt) *= d;

    // Gather psi into a (kept x traced) matrix; each side keeps its modes in
    // declaration order, row-major.
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(dk, dt);
    const auto& src = state.amplitudes();
    for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] == cplx(0.0, 0.0)) continue;
        std::size_t k = 0, t = 0;
        for (int m = 0; m < mcount; ++m) {
            const std::size_t digit =
                static_cast<std::size_t>(state.level_at(i, m));
            if (keep[m])
                k = k * d + digit;
            else
                t = t * d + digit;
        }
        psi(k, t) = src[i];
    }
    ReducedDensity r;
    r.matrix = psi * psi.adjoint();
    r.trace = r.matrix.trace().real();
    return r;
}

// Von Neumann entropy in bits. Eigenvalues inside [-1e-10, 0) are clipped to
// zero; anything more negative is treated as a logic error, not noise.
inline double entropy(const ReducedDensity& rho, double clip = 1e-10) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix,
                                                       Eigen::EigenvaluesOnly);
    double h = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        double l = es.eigenvalues()(i);
        if (l < -clip)
            throw error("entropy: eigenvalue below clipping threshold");
        if (l <= 0.0) continue;
        h -= l * std::log2(l);
    }
    return h;
}

// Entropy of the reduced state over the first `split_after` modes.
inline double entanglement_entropy(const MultiModeState& state, int split_after) {
    std::vector<int> keep;
    for (int m = 0; m < split_after; ++m) keep.push_back(m);
    return entropy(partial_trace(state, keep));
}

// log2 of the trace norm of the partial transpose over the bipartition
// (first `split_after` modes | rest). For the pure states handled here the
// partial-transpose spectrum is {l_k} U {+-s_k s_l}, so the trace norm equals
// the squared sum of the Schmidt values, read off an SVD of the amplitude
// matrix.
inline double log_negativity(const MultiModeState& state, int split_after) {
    const int mcount = state.mode_count();
    if (split_after <= 0 || split_after >= mcount)
        throw std::invalid_argument("log_negativity: bad split");
    std::size_t da = 1, db = 1;
    const std::size_t d = static_cast<std::size_t>(state.dim());
    for (int m = 0; m < split_after; ++m) da *= d;
    for (int m = split_after; m < mcount; ++m) db *= d;
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        psi(state.amplitudes().data(), da, db);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(psi);
    const double total2 = svd.singularValues().squaredNorm();
    if (total2 <= 0.0) throw error("log_negativity: zero state");
    const double sum = svd.singularValues().sum() / std::sqrt(total2);
    return 2.0 * std::log2(sum);
}

// |<a|b>|^2 normalized on both sides; equals the plain squared overlap for
// normalized inputs and is global-phase insensitive.
inline double fidelity_fock(const MultiModeState& a, const MultiModeState& b) {
    const double na = a.norm2();
    const double nb = b.norm2();
    if (na <= 0.0 || nb <= 0.0) throw error("fidelity_fock: zero state");
    return std::norm(inner_fock(a, b)) / (na * nb);
}

}  // namespace fockpipe
