#include <catch2/catch_amalgamated.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <complex>
#include <random>

#include <fockpipe/analytic.hpp>
#include <fockpipe/fock.hpp>
#include <fockpipe/metrics.hpp>

using namespace fockpipe;
using Catch::Approx;

namespace {

const double pi = std::numbers::pi;

using mpfloat = boost::multiprecision::cpp_bin_float_50;

// Coherent amplitude |<n|alpha>| for real alpha via 50-digit arithmetic:
// e^{-a^2/2} a^n / sqrt(n!), evaluated term by term.
double coherent_amp_mp(double alpha, int n) {
    mpfloat a(alpha);
    mpfloat c = exp(-a * a / 2);
    for (int k = 1; k <= n; ++k) c *= a / sqrt(mpfloat(k));
    return c.convert_to<double>();
}

// Random state with support only on levels <= max_level per mode, so that
// every occupied photon-number sector fits inside the stored box.
MultiModeState random_state(int modes, int cutoff, std::mt19937& rng,
                            int max_level = -1) {
    if (max_level < 0) max_level = cutoff;
    MultiModeState st(modes, cutoff);
    std::normal_distribution<double> g(0.0, 1.0);
    auto& amps = st.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        bool inside = true;
        for (int m = 0; m < modes; ++m)
            if (st.level_at(i, m) > max_level) inside = false;
        amps[i] = inside ? cplx(g(rng), g(rng)) : cplx(0, 0);
    }
    st.renormalize();
    return st;
}

}  // namespace

TEST_CASE("coherent state at zero displacement is the vacuum", "[fock]") {
    auto st = coherent_fock(cplx(0, 0), 10);
    CHECK(st.amplitudes()[0] == cplx(1, 0));
    for (int n = 1; n <= 10; ++n) CHECK(st.amplitudes()[n] == cplx(0, 0));
    CHECK(st.normalized());
    CHECK(st.tail_mass() == 0.0);
}

TEST_CASE("coherent amplitudes match the defining series at 50 digits", "[fock]") {
    auto st = coherent_fock(cplx(1, 0), 30);
    CHECK(st.amplitudes()[0].real() == Approx(std::exp(-0.5)).epsilon(1e-15));
    for (int n : {0, 1, 5, 12})
        CHECK(st.amplitudes()[n].real() ==
              Approx(coherent_amp_mp(1.0, n)).margin(1e-16));

    auto st2 = coherent_fock(cplx(1.7, 0), 40);
    for (int n : {3, 9, 21})
        CHECK(st2.amplitudes()[n].real() ==
              Approx(coherent_amp_mp(1.7, n)).margin(1e-15));
}

TEST_CASE("coherent state norm is 1 for adequate cutoffs", "[fock]") {
    auto st = coherent_fock(cplx(0, 2), 40);
    CHECK(st.norm2() == Approx(1.0).margin(1e-12));
    CHECK(st.normalized());
}

TEST_CASE("coherent state rejects bad inputs", "[fock]") {
    CHECK_THROWS_AS(coherent_fock(cplx(std::nan(""), 0), 10), std::invalid_argument);
    CHECK_THROWS_AS(
        coherent_fock(cplx(1, 0) / 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(coherent_fock(cplx(3, 0), 3), truncation_error);
}

TEST_CASE("photon addition on vacuum gives |1> with unit norm factor", "[fock]") {
    auto [st, nf] = photon_add(MultiModeState(1, 10), 0);
    CHECK(nf == Approx(1.0).margin(1e-15));
    CHECK(std::abs(st.amplitudes()[1]) == Approx(1.0).margin(1e-15));
}

TEST_CASE("photon addition norm factor is 1 + |alpha|^2", "[fock]") {
    const cplx a(1.5, 0.0);
    auto [st, nf] = photon_add(coherent_fock(a, 30), 0);
    CHECK(nf * nf == Approx(1.0 + std::norm(a)).epsilon(1e-12));
    CHECK(st.norm2() == Approx(1.0).margin(1e-12));
}

TEST_CASE("photon addition matches the analytic photon-added state", "[fock]") {
    const cplx a(1.5, 0.0);
    auto [st, nf] = photon_add(coherent_fock(a, 30), 0);
    AnalyticState spacs(1);
    spacs.add_term(1.0, {{a, 1}});
    CHECK(fidelity_fock(st, to_fock(normalized(spacs), 30)) >= 1.0 - 1e-10);
}

TEST_CASE("photon addition refuses a saturated top level", "[fock]") {
    CHECK_THROWS_AS(photon_add(fock_basis(8, 8), 0), truncation_error);
}

TEST_CASE("beam splitter at theta=0 is the identity", "[fock]") {
    std::mt19937 rng(11);
    auto st = random_state(2, 12, rng);
    auto out = apply_beamsplitter(st, 0.0, 1.3, 0, 1);
    for (std::size_t k = 0; k < st.amplitudes().size(); ++k)
        CHECK(std::abs(out.amplitudes()[k] - st.amplitudes()[k]) < 1e-14);
}

TEST_CASE("beam splitter maps coherent products to coherent products", "[fock]") {
    std::mt19937 rng(20240811);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> ang(0.0, 2 * pi);
    const int cut = 40;
    for (int it = 0; it < 20; ++it) {
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
        CHECK(fidelity_fock(st, to_fock(want, cut)) >= 1.0 - 1e-8);
    }
}

TEST_CASE("balanced quarter-wave splitter mixes (1, 0.5) as stated", "[fock]") {
    const int cut = 30;
    const cplx i(0, 1);
    auto st = coherent_fock(cplx(1, 0), cut).tensor(coherent_fock(cplx(0.5, 0), cut));
    st = apply_beamsplitter(st, pi / 4, 3 * pi / 2, 0, 1);
    AnalyticState want(2);
    const double s = 1.0 / std::sqrt(2.0);
    want.add_term(1.0, {{s * (cplx(1, 0) + i * 0.5), 0},
                        {s * (cplx(0.5, 0) + i * 1.0), 0}});
    CHECK(fidelity_fock(st, to_fock(want, cut)) >= 1.0 - 1e-9);
}

TEST_CASE("beam splitter never mixes photon-number sectors", "[fock]") {
    const int cut = 9;
    // support only on the N = 3 sector
    MultiModeState st(2, cut);
    st.amplitudes()[st.flat({2, 1})] = cplx(0.6, 0.0);
    st.amplitudes()[st.flat({0, 3})] = cplx(0.0, 0.8);
    st.amplitudes()[st.flat({0, 0})] = cplx(0, 0);
    auto out = apply_beamsplitter(st, 0.9, 0.4, 0, 1);
    for (int n = 0; n <= cut; ++n)
        for (int m = 0; m <= cut; ++m)
            if (n + m != 3)
                CHECK(out.amplitudes()[out.flat({n, m})] == cplx(0, 0));
    CHECK(out.norm2() == Approx(1.0).margin(1e-12));
}

TEST_CASE("beam splitter and Kerr preserve the norm", "[fock]") {
    std::mt19937 rng(7);
    for (int it = 0; it < 5; ++it) {
        auto st = random_state(2, 14, rng, 7);
        auto bs = apply_beamsplitter(st, 1.1 + it, 0.3 * it, 0, 1);
        CHECK(bs.norm2() == Approx(1.0).margin(1e-12));
        CHECK(bs.warnings.empty());
        auto kr = apply_kerr(st, 0.7 * it + 0.1, 1);
        CHECK(kr.norm2() == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("Kerr leaves the vacuum alone and phases Fock levels by n^2", "[fock]") {
    auto vac = MultiModeState(1, 8);
    auto out = apply_kerr(vac, 1.234, 0);
    CHECK(out.amplitudes()[0] == cplx(1, 0));

    auto f3 = apply_kerr(fock_basis(3, 8), pi / 2, 0);
    // e^{-i 9 pi / 2} = -i
    CHECK(f3.amplitudes()[3].real() == Approx(0.0).margin(1e-12));
    CHECK(f3.amplitudes()[3].imag() == Approx(-1.0).margin(1e-12));
}

TEST_CASE("half-pi Kerr turns a coherent state into a balanced cat", "[fock]") {
    const int cut = 40;
    auto st = apply_kerr(coherent_fock(cplx(2, 0), cut), pi / 2, 0);
    AnalyticState cat(1);
    const double s = 1.0 / std::sqrt(2.0);
    cat.add_term(s * std::polar(1.0, -pi / 4), {{cplx(2, 0), 0}});
    cat.add_term(s * std::polar(1.0, pi / 4), {{cplx(-2, 0), 0}});
    CHECK(fidelity_fock(st, to_fock(cat, cut)) >= 1.0 - 1e-10);
}

TEST_CASE("squeezer at g=0 is the identity", "[fock]") {
    auto in = coherent_fock(cplx(1, 0), 20).tensor(MultiModeState(1, 20));
    auto fo = apply_tmsq(in, 0.0, 0, 1, SqueezerOrder::FirstOrder);
    CHECK_FALSE(fo.normalized());
    for (std::size_t k = 0; k < in.amplitudes().size(); ++k)
        CHECK(fo.amplitudes()[k] == in.amplitudes()[k]);
    auto ex = apply_tmsq(in, 0.0, 0, 1, SqueezerOrder::Exact);
    CHECK(fidelity_fock(ex, in) == Approx(1.0).margin(1e-13));
}

TEST_CASE("first-order squeezer produces the heralded photon-added branch", "[fock]") {
    const cplx a(0.9, 0.4);
    const double g = 0.05;
    const int cut = 30;
    auto st = coherent_fock(a, cut).tensor(MultiModeState(1, cut));
    st = apply_tmsq(st, g, 0, 1, SqueezerOrder::FirstOrder);
    CHECK_FALSE(st.normalized());

    auto ps = postselect(st, 1, 1);
    REQUIRE_FALSE(ps.empty);
    CHECK(ps.relative_weight);
    const double want = g * g * (1.0 + std::norm(a));
    CHECK(ps.weight == Approx(want).epsilon(1e-10));
    AnalyticState spacs(1);
    spacs.add_term(1.0, {{a, 1}});
    CHECK(fidelity_fock(*ps.state, to_fock(normalized(spacs), cut)) >=
          1.0 - 1e-10);
}

TEST_CASE("first-order squeezer warns above the soft gain limit", "[fock]") {
    auto in = coherent_fock(cplx(0.5, 0), 20).tensor(MultiModeState(1, 20));
    auto out = apply_tmsq(in, 0.2, 0, 1, SqueezerOrder::FirstOrder);
    CHECK_FALSE(out.warnings.empty());
    CHECK_THROWS_AS(apply_tmsq(in, 0.35, 0, 1, SqueezerOrder::FirstOrder),
                    std::invalid_argument);
}

TEST_CASE("exact squeezer converges to the first-order form as g^2", "[fock]") {
    const int cut = 30;
    auto in = coherent_fock(cplx(1, 0), cut).tensor(MultiModeState(1, cut));
    double prev_ratio = 0.0;
    for (double g : {0.02, 0.01, 0.005}) {
        auto ex = apply_tmsq(in, g, 0, 1, SqueezerOrder::Exact);
        auto fo = apply_tmsq(in, g, 0, 1, SqueezerOrder::FirstOrder);
        double d2 = 0.0;
        for (std::size_t k = 0; k < ex.amplitudes().size(); ++k)
            d2 += std::norm(ex.amplitudes()[k] - fo.amplitudes()[k]);
        const double ratio = std::sqrt(d2) / (g * g);
        CHECK(ratio <= 5.0);
        if (prev_ratio != 0.0)
            CHECK(ratio == Approx(prev_ratio).epsilon(0.05));  // ~constant
        prev_ratio = ratio;
    }
}

TEST_CASE("exact squeezer is norm-preserving after truncation accounting", "[fock]") {
    const int cut = 24;
    auto in = coherent_fock(cplx(1.2, 0), cut).tensor(MultiModeState(1, cut));
    double loss = -1.0;
    auto out = apply_tmsq(in, 0.15, 0, 1, SqueezerOrder::Exact, &loss);
    CHECK(out.norm2() == Approx(1.0).margin(1e-12));
    CHECK(loss >= 0.0);
    CHECK(loss < 1e-8);
}

TEST_CASE("post-selection on a Bell-like pair", "[fock]") {
    MultiModeState st(2, 4);
    st.amplitudes()[st.flat({0, 0})] = cplx(1 / std::sqrt(2.0), 0);
    st.amplitudes()[st.flat({1, 1})] = cplx(1 / std::sqrt(2.0), 0);
    auto ps = postselect(st, 1, 1);
    REQUIRE_FALSE(ps.empty);
    CHECK(ps.weight == Approx(0.5).margin(1e-14));
    CHECK_FALSE(ps.relative_weight);
    CHECK(std::abs(ps.state->amplitudes()[1]) == Approx(1.0).margin(1e-14));
}

TEST_CASE("post-selection outcomes of a normalized state sum to one", "[fock]") {
    const int cut = 18;
    auto st = coherent_fock(cplx(1, 0), cut).tensor(coherent_fock(cplx(0.5, -0.5), cut));
    st = apply_beamsplitter(st, 0.8, 0.2, 0, 1);
    double total = 0.0;
    for (int n = 0; n <= cut; ++n) {
        auto ps = postselect(st, 1, n);
        if (!ps.empty) total += ps.weight;
    }
    CHECK(total == Approx(1.0).margin(1e-10));
}

TEST_CASE("impossible detection returns an explicit empty branch", "[fock]") {
    const cplx a(1.0, 0.0);
    const int cut = 25;
    auto st = coherent_fock(a, cut).tensor(MultiModeState(1, cut));
    st = apply_tmsq(st, 0.05, 0, 1, SqueezerOrder::FirstOrder);
    auto ps = postselect(st, 1, 2);  // no two-photon idler term at first order
    CHECK(ps.empty);
    CHECK_FALSE(ps.state.has_value());
    CHECK(ps.weight == 0.0);
}

TEST_CASE("tail mass tracks the truncation boundary", "[fock]") {
    auto tight = coherent_fock(cplx(2, 0), 12);
    auto roomy = coherent_fock(cplx(2, 0), 40);
    CHECK(tight.tail_mass() > roomy.tail_mass());
    CHECK(roomy.tail_mass() < 1e-12);
    CHECK(tight.tail_mass(0) == Approx(tight.tail_mass()).margin(1e-18));
}

TEST_CASE("tensor products factorize", "[fock]") {
    auto a = coherent_fock(cplx(0.8, 0.1), 10);
    auto b = fock_basis(2, 10);
    auto t = a.tensor(b);
    CHECK(t.mode_count() == 2);
    CHECK(t.at({3, 2}) == a.amplitudes()[3]);
    CHECK(t.at({3, 1}) == cplx(0, 0));
}
