#pragma once

// Declarative circuit model with a line-oriented text format, a parser that
// reports positioned diagnostics, and an executor that drives the Fock
// simulator and enumerates detection branches.
//
// Grammar (one statement per line, `#` starts a comment):
//   mode <name> = vacuum | coherent(<re>, <im>) | fock(<n>)
//   bs(<theta>, <phi>) <m1> <m2>
//   kerr(<chi>) <m>
//   tmsq(<g>, first|exact) <ms> <mi>
//   addphoton <m>
//   detect <m> in {<n>, ...}
// Numbers accept pi expressions: pi, pi/4, 3*pi/2, -pi/3, plus plain floats.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fock.hpp"

namespace fockpipe {

// ---------------------------------------------------------------------------
// Diagnostics.

enum class DiagCode {
    UnknownMode,
    MalformedNumber,
    ModeAfterDetect,
    DuplicateMode,
    DuplicateDetect,
    BadModeArity,
    BadCount,
    SyntaxError,
};

inline const char* to_string(DiagCode c) {
    switch (c) {
        case DiagCode::UnknownMode: return "UNKNOWN_MODE";
        case DiagCode::MalformedNumber: return "MALFORMED_NUMBER";
        case DiagCode::ModeAfterDetect: return "MODE_AFTER_DETECT";
        case DiagCode::DuplicateMode: return "DUPLICATE_MODE";
        case DiagCode::DuplicateDetect: return "DUPLICATE_DETECT";
        case DiagCode::BadModeArity: return "BAD_MODE_ARITY";
        case DiagCode::BadCount: return "BAD_COUNT";
        case DiagCode::SyntaxError: return "SYNTAX_ERROR";
    }
    return "UNKNOWN";
}

struct Diagnostic {
    DiagCode code;
    int line = 0;    // 1-based
    int column = 0;  // 1-based
    std::string message;

    std::string render() const {
        std::ostringstream os;
        os << to_string(code) << " at line " << line << ", column " << column
           << ": " << message;
        return os.str();
    }
};

class parse_error : public error {
public:
    explicit parse_error(Diagnostic d) : error(d.render()), diagnostic(std::move(d)) {}
    Diagnostic diagnostic;
};

class circuit_exec_error : public error {
public:
    circuit_exec_error(int element_index, const std::string& what)
        : error("element " + std::to_string(element_index) + ": " + what),
          element_index(element_index) {}
    int element_index;
};

// ---------------------------------------------------------------------------
// Model.

struct ModeDecl {
    enum class Init { Vacuum, Coherent, Fock };
    std::string name;
    Init init = Init::Vacuum;
    cplx alpha{0.0, 0.0};  // Coherent
    int n = 0;             // Fock
    bool operator==(const ModeDecl&) const = default;
};

struct Element {
    OperatorKind op;
    std::vector<std::string> modes;
    bool operator==(const Element&) const = default;
};

struct Detection {
    std::string mode;
    std::vector<int> outcomes;
    bool operator==(const Detection&) const = default;
};

struct Circuit {
    std::vector<ModeDecl> modes;
    std::vector<Element> elements;
    std::vector<Detection> detections;
    bool operator==(const Circuit&) const = default;
};

// ---------------------------------------------------------------------------
// Parser.

namespace detail {

class LineScanner {
public:
    LineScanner(std::string line, int lineno)
        : line_(std::move(line)), lineno_(lineno) {}

    int column() const { return static_cast<int>(pos_) + 1; }

    void skip_ws() {
        while (pos_ < line_.size() && std::isspace(static_cast<unsigned char>(line_[pos_])))
            ++pos_;
    }

    bool at_end() {
        skip_ws();
        return pos_ >= line_.size();
    }

    char peek() const { return pos_ < line_.size() ? line_[pos_] : '\0'; }

    bool consume(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        skip_ws();
        if (!consume(c))
            fail(DiagCode::SyntaxError, std::string("expected '") + c + "'");
    }

    // Identifiers: [A-Za-z_][A-Za-z0-9_]*
    std::string ident() {
        skip_ws();
        const std::size_t start = pos_;
        auto head = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; };
        auto body = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
        if (pos_ >= line_.size() || !head(line_[pos_]))
            fail(DiagCode::SyntaxError, "expected identifier");
        ++pos_;
        while (pos_ < line_.size() && body(line_[pos_])) ++pos_;
        return line_.substr(start, pos_ - start);
    }

    // number := [sign] ( "pi" ["/" float] | float ["*" "pi"] ["/" float] )
    double number() {
        skip_ws();
        const int start_col = column();
        double sign = 1.0;
        if (peek() == '+' || peek() == '-') {
            if (line_[pos_] == '-') sign = -1.0;
            ++pos_;
        }
        double value;
        if (match_pi()) {
            value = std::numbers::pi;
        } else {
            value = raw_float(start_col);
            if (consume('*')) {
                if (!match_pi())
                    fail(DiagCode::MalformedNumber, "expected 'pi' after '*'",
                         start_col);
                value *= std::numbers::pi;
            }
        }
        if (consume('/')) value /= raw_float(start_col);
        return sign * value;
    }

    // Photon counts: plain non-negative integers.
    int count() {
        skip_ws();
        const int start_col = column();
        std::size_t p = pos_;
        while (p < line_.size() && std::isdigit(static_cast<unsigned char>(line_[p]))) ++p;
        if (p == pos_)
            fail(DiagCode::BadCount, "expected a non-negative photon count", start_col);
        int v = 0;
        for (std::size_t q = pos_; q < p; ++q) {
            v = v * 10 + (line_[q] - '0');
            if (v > 1'000'000)
                fail(DiagCode::BadCount, "photon count too large", start_col);
        }
        pos_ = p;
        return v;
    }

    void expect_end() {
        if (!at_end())
            fail(DiagCode::SyntaxError, "unexpected trailing input");
    }

    [[noreturn]] void fail(DiagCode code, const std::string& msg, int col = -1) {
        throw parse_error(Diagnostic{code, lineno_, col < 0 ? column() : col, msg});
    }

private:
    bool match_pi() {
        skip_ws();
        if (pos_ + 1 < line_.size() + 1 && line_.compare(pos_, 2, "pi") == 0) {
            const std::size_t after = pos_ + 2;
            if (after >= line_.size() ||
                !(std::isalnum(static_cast<unsigned char>(line_[after])) ||
                  line_[after] == '_')) {
                pos_ += 2;
                return true;
            }
        }
        return false;
    }

    double raw_float(int number_col) {
        skip_ws();
        const char* begin = line_.c_str() + pos_;
        char* end = nullptr;
        // strtod would also eat a sign or hex/"inf"/"nan"; restrict to an
        // explicit digit so diagnostics stay predictable.
        if (pos_ >= line_.size() ||
            !(std::isdigit(static_cast<unsigned char>(*begin)) || *begin == '.'))
            fail(DiagCode::MalformedNumber, "expected a number", number_col);
        const double v = std::strtod(begin, &end);
        if (end == begin)
            fail(DiagCode::MalformedNumber, "expected a number", number_col);
        if (!std::isfinite(v))
            fail(DiagCode::MalformedNumber, "number out of range", number_col);
        pos_ += static_cast<std::size_t>(end - begin);
        return v;
    }

    std::string line_;
    int lineno_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline Circuit parse_circuit(std::string_view text) {
    Circuit circuit;
    std::map<std::string, int, std::less<>> mode_index;
    std::map<std::string, bool, std::less<>> detected;

    auto resolve_mode = [&](detail::LineScanner& sc, bool for_element) {
        sc.skip_ws();
        const int col = sc.column();
        const std::string name = sc.ident();
        auto it = mode_index.find(name);
        if (it == mode_index.end())
            sc.fail(DiagCode::UnknownMode, "mode '" + name + "' is not declared", col);
        if (for_element && detected[name])
            sc.fail(DiagCode::ModeAfterDetect,
                    "mode '" + name + "' was already detected", col);
        return name;
    };

    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view raw = text.substr(
            pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++lineno;
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;

        std::string line(raw);
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        detail::LineScanner sc(line, lineno);
        if (sc.at_end()) continue;

        const int kw_col = sc.column();
        const std::string kw = sc.ident();

        if (kw == "mode") {
            sc.skip_ws();
            const int name_col = sc.column();
            const std::string name = sc.ident();
            if (mode_index.count(name))
                sc.fail(DiagCode::DuplicateMode,
                        "mode '" + name + "' is already declared", name_col);
            sc.expect('=');
            ModeDecl decl;
            decl.name = name;
            const std::string init = sc.ident();
            if (init == "vacuum") {
                decl.init = ModeDecl::Init::Vacuum;
            } else if (init == "coherent") {
                decl.init = ModeDecl::Init::Coherent;
                sc.expect('(');
                const double re = sc.number();
                sc.expect(',');
                const double im = sc.number();
                sc.expect(')');
                decl.alpha = cplx(re, im);
            } else if (init == "fock") {
                decl.init = ModeDecl::Init::Fock;
                sc.expect('(');
                decl.n = sc.count();
                sc.expect(')');
            } else {
                sc.fail(DiagCode::SyntaxError,
                        "expected vacuum, coherent(re, im) or fock(n)");
            }
            sc.expect_end();
            mode_index[name] = static_cast<int>(circuit.modes.size());
            detected[name] = false;
            circuit.modes.push_back(std::move(decl));
        } else if (kw == "bs") {
            sc.expect('(');
            const double theta = sc.number();
            sc.expect(',');
            const double phi = sc.number();
            sc.expect(')');
            const std::string m1 = resolve_mode(sc, true);
            sc.skip_ws();
            const int m2_col = sc.column();
            const std::string m2 = resolve_mode(sc, true);
            if (m1 == m2)
                sc.fail(DiagCode::BadModeArity, "bs needs two distinct modes", m2_col);
            sc.expect_end();
            circuit.elements.push_back(Element{BeamSplitter{theta, phi}, {m1, m2}});
        } else if (kw == "kerr") {
            sc.expect('(');
            const double chi = sc.number();
            sc.expect(')');
            const std::string m = resolve_mode(sc, true);
            sc.expect_end();
            circuit.elements.push_back(Element{Kerr{chi}, {m}});
        } else if (kw == "tmsq") {
            sc.expect('(');
            const double g = sc.number();
            sc.expect(',');
            sc.skip_ws();
            const int ord_col = sc.column();
            const std::string ord = sc.ident();
            SqueezerOrder order;
            if (ord == "first")
                order = SqueezerOrder::FirstOrder;
            else if (ord == "exact")
                order = SqueezerOrder::Exact;
            else
                sc.fail(DiagCode::SyntaxError, "expected 'first' or 'exact'", ord_col);
            sc.expect(')');
            const std::string ms = resolve_mode(sc, true);
            sc.skip_ws();
            const int mi_col = sc.column();
            const std::string mi = resolve_mode(sc, true);
            if (ms == mi)
                sc.fail(DiagCode::BadModeArity, "tmsq needs two distinct modes", mi_col);
            sc.expect_end();
            circuit.elements.push_back(Element{TwoModeSqueezer{g, order}, {ms, mi}});
        } else if (kw == "addphoton") {
            const std::string m = resolve_mode(sc, true);
            sc.expect_end();
            circuit.elements.push_back(Element{PhotonAdd{}, {m}});
        } else if (kw == "detect") {
            sc.skip_ws();
            const int name_col = sc.column();
            const std::string m = resolve_mode(sc, false);
            if (detected[m])
                sc.fail(DiagCode::DuplicateDetect,
                        "mode '" + m + "' is already detected", name_col);
            const std::string in_kw = sc.ident();
            if (in_kw != "in") sc.fail(DiagCode::SyntaxError, "expected 'in'");
            sc.expect('{');
            std::vector<int> outcomes;
            sc.skip_ws();
            const int set_col = sc.column();
            if (!sc.consume('}')) {
                for (;;) {
                    outcomes.push_back(sc.count());
                    if (sc.consume('}')) break;
                    sc.expect(',');
                }
            }
            if (outcomes.empty())
                sc.fail(DiagCode::BadCount, "detect needs at least one outcome", set_col);
            std::sort(outcomes.begin(), outcomes.end());
            outcomes.erase(std::unique(outcomes.begin(), outcomes.end()),
                           outcomes.end());
            sc.expect_end();
            detected[m] = true;
            circuit.detections.push_back(Detection{m, std::move(outcomes)});
        } else {
            sc.fail(DiagCode::SyntaxError, "unknown statement '" + kw + "'", kw_col);
        }
    }
    return circuit;
}

// ---------------------------------------------------------------------------
// Unparse: canonical text that reparses to an equal Circuit.

namespace detail {

inline std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline std::string unparse_circuit(const Circuit& c) {
    std::ostringstream os;
    for (const auto& m : c.modes) {
        os << "mode " << m.name << " = ";
        switch (m.init) {
            case ModeDecl::Init::Vacuum: os << "vacuum"; break;
            case ModeDecl::Init::Coherent:
                os << "coherent(" << detail::fmt17(m.alpha.real()) << ", "
                   << detail::fmt17(m.alpha.imag()) << ")";
                break;
            case ModeDecl::Init::Fock: os << "fock(" << m.n << ")"; break;
        }
        os << "\n";
    }
    for (const auto& e : c.elements) {
        if (const auto* bs = std::get_if<BeamSplitter>(&e.op))
            os << "bs(" << detail::fmt17(bs->theta) << ", " << detail::fmt17(bs->phi)
               << ") " << e.modes[0] << " " << e.modes[1];
        else if (const auto* k = std::get_if<Kerr>(&e.op))
            os << "kerr(" << detail::fmt17(k->chi) << ") " << e.modes[0];
        else if (const auto* sq = std::get_if<TwoModeSqueezer>(&e.op))
            os << "tmsq(" << detail::fmt17(sq->g) << ", "
               << (sq->order == SqueezerOrder::FirstOrder ? "first" : "exact")
               << ") " << e.modes[0] << " " << e.modes[1];
        else
            os << "addphoton " << e.modes[0];
        os << "\n";
    }
    for (const auto& d : c.detections) {
        os << "detect " << d.mode << " in {";
        for (std::size_t i = 0; i < d.outcomes.size(); ++i)
            os << (i ? ", " : "") << d.outcomes[i];
        os << "}\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Execution.

struct CutoffPolicy {
    std::optional<int> fixed_cutoff;
    double tail_hard_limit = kDefaultTailHardLimit;
};

// Default cutoff: with E the total input energy (sum of |alpha|^2 and Fock
// levels), take ceil(E + 6 sqrt(E) + 10). Passive elements cannot push any
// single mode's amplitude above sqrt(E), so the Poisson tail bound applies
// to every intermediate state, not just the inputs.
inline int resolve_cutoff(const Circuit& c, const CutoffPolicy& policy = {}) {
    double energy = 0.0;
    int max_fock = 0;
    for (const auto& m : c.modes) {
        if (m.init == ModeDecl::Init::Coherent) energy += std::norm(m.alpha);
        if (m.init == ModeDecl::Init::Fock) {
            energy += m.n;
            max_fock = std::max(max_fock, m.n);
        }
    }
    int max_detect = 0;
    for (const auto& d : c.detections)
        for (int n : d.outcomes) max_detect = std::max(max_detect, n);
    if (policy.fixed_cutoff) {
        if (*policy.fixed_cutoff < 0)
            throw std::invalid_argument("cutoff must be >= 0");
        if (*policy.fixed_cutoff < max_fock || *policy.fixed_cutoff < max_detect)
            throw truncation_error(
                "cutoff below a declared Fock level or detection outcome", 1.0);
        return *policy.fixed_cutoff;
    }
    const double a = std::sqrt(energy);
    int cut = static_cast<int>(std::ceil(energy + 6.0 * a + 10.0));
    cut = std::max({cut, max_fock + 6, max_detect + 2});
    return cut;
}

struct BranchResult {
    // (detected mode, photon count) in detection-declaration order.
    std::vector<std::pair<std::string, int>> outcome;
    double probability = 0.0;
    bool relative_weight = false;
    MultiModeState conditional_state{0, 0};
    std::vector<std::string> surviving_modes;
};

inline std::vector<BranchResult> run_circuit(const Circuit& circuit,
                                             const CutoffPolicy& policy = {}) {
    const int cut = resolve_cutoff(circuit, policy);

    MultiModeState state = MultiModeState::scalar();
    for (const auto& m : circuit.modes) {
        MultiModeState one(1, cut);
        switch (m.init) {
            case ModeDecl::Init::Vacuum: break;
            case ModeDecl::Init::Coherent:
                one = coherent_fock(m.alpha, cut, policy.tail_hard_limit);
                break;
            case ModeDecl::Init::Fock: one = fock_basis(m.n, cut); break;
        }
        state = state.tensor(one);
    }

    std::vector<std::string> names;
    for (const auto& m : circuit.modes) names.push_back(m.name);
    auto index_of = [](const std::vector<std::string>& v, const std::string& n) {
        return static_cast<int>(std::find(v.begin(), v.end(), n) - v.begin());
    };

    for (std::size_t i = 0; i < circuit.elements.size(); ++i) {
        const auto& e = circuit.elements[i];
        OperatorSpec spec;
        spec.kind = e.op;
        spec.modes[0] = index_of(names, e.modes[0]);
        if (e.modes.size() > 1) spec.modes[1] = index_of(names, e.modes[1]);
        try {
            state = apply(state, spec);
        } catch (const truncation_error& t) {
            throw circuit_exec_error(static_cast<int>(i), t.what());
        }
    }

    std::vector<BranchResult> branches;
    const auto& det = circuit.detections;
    if (det.empty()) {
        BranchResult b;
        b.relative_weight = !state.normalized();
        b.probability = state.normalized() ? 1.0 : state.norm2();
        if (!state.normalized() && state.norm2() > 0.0) state.renormalize();
        b.conditional_state = state;
        b.surviving_modes = names;
        branches.push_back(std::move(b));
        return branches;
    }

    std::vector<std::size_t> pick(det.size(), 0);
    for (;;) {
        MultiModeState work = state;
        std::vector<std::string> alive = names;
        BranchResult b;
        b.relative_weight = false;
        b.probability = 1.0;
        bool dead = false;
        for (std::size_t k = 0; k < det.size(); ++k) {
            const int n = det[k].outcomes[pick[k]];
            b.outcome.emplace_back(det[k].mode, n);
            if (dead) continue;
            const int mi = index_of(alive, det[k].mode);
            auto ps = postselect(work, mi, n);
            b.relative_weight = b.relative_weight || ps.relative_weight;
            if (ps.empty) {
                dead = true;
                continue;
            }
            b.probability *= ps.weight;
            work = std::move(*ps.state);
            alive.erase(alive.begin() + mi);
        }
        if (!dead) {
            b.conditional_state = std::move(work);
            b.surviving_modes = std::move(alive);
            branches.push_back(std::move(b));
        }
        std::size_t k = 0;
        for (; k < det.size(); ++k) {
            if (++pick[k] < det[k].outcomes.size()) break;
            pick[k] = 0;
        }
        if (k == det.size()) break;
    }

    std::sort(branches.begin(), branches.end(),
              [](const BranchResult& x, const BranchResult& y) {
                  if (x.probability != y.probability)
                      return x.probability > y.probability;
                  for (std::size_t i = 0; i < x.outcome.size(); ++i)
                      if (x.outcome[i].second != y.outcome[i].second)
                          return x.outcome[i].second < y.outcome[i].second;
                  return false;
              });
    return branches;
}

}  // namespace fockpipe
