#pragma once

// Machine-readable run reports. Writers are hand-rolled so stdout is
// byte-stable: fixed key order, floats at 12 significant digits.

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "scheme.hpp"
#include "version.hpp"

namespace fockpipe {

inline std::string fmt_sig12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

inline std::string outcome_label(
    const std::vector<std::pair<std::string, int>>& outcome) {
    if (outcome.empty()) return "all";
    std::string s;
    for (std::size_t i = 0; i < outcome.size(); ++i) {
        if (i) s += ";";
        s += outcome[i].first + "=" + std::to_string(outcome[i].second);
    }
    return s;
}

inline std::string opt_json(const std::optional<double>& v) {
    return v ? fmt_sig12(*v) : std::string("null");
}

inline std::string opt_csv(const std::optional<double>& v) {
    return v ? fmt_sig12(*v) : std::string();
}

}  // namespace detail

struct BranchRecord {
    std::vector<std::pair<std::string, int>> outcome;
    double probability = 0.0;
    bool relative_weight = false;
    std::optional<double> fidelity_expected;
    std::optional<double> entropy_bits;
    std::optional<double> log_negativity;
    double tail_mass = 0.0;
};

struct RunReport {
    std::string circuit_name;
    int cutoff = 0;
    std::optional<SchemeParams> scheme;
    std::vector<BranchRecord> branches;
};

inline void write_json(std::ostream& os, const RunReport& r) {
    os << "{\n";
    os << "  \"tool\": \"fockpipe\",\n";
    os << "  \"version\": \"" << version_string << "\",\n";
    os << "  \"circuit\": \"" << detail::json_escape(r.circuit_name) << "\",\n";
    os << "  \"cutoff\": " << r.cutoff << ",\n";
    if (r.scheme) {
        os << "  \"scheme\": {\"alpha_re\": " << fmt_sig12(r.scheme->alpha.real())
           << ", \"alpha_im\": " << fmt_sig12(r.scheme->alpha.imag())
           << ", \"beta_re\": " << fmt_sig12(r.scheme->beta.real())
           << ", \"beta_im\": " << fmt_sig12(r.scheme->beta.imag())
           << ", \"g\": " << fmt_sig12(r.scheme->g) << ", \"order\": \""
           << (r.scheme->order == SqueezerOrder::FirstOrder ? "first" : "exact")
           << "\"},\n";
    } else {
        os << "  \"scheme\": null,\n";
    }
    os << "  \"branches\": [";
    for (std::size_t i = 0; i < r.branches.size(); ++i) {
        const auto& b = r.branches[i];
        os << (i ? ",\n    " : "\n    ");
        os << "{\"outcome\": \"" << detail::outcome_label(b.outcome) << "\""
           << ", \"probability\": " << fmt_sig12(b.probability)
           << ", \"relative_weight\": " << (b.relative_weight ? "true" : "false")
           << ", \"fidelity_expected\": " << detail::opt_json(b.fidelity_expected)
           << ", \"entropy\": " << detail::opt_json(b.entropy_bits)
           << ", \"log_negativity\": " << detail::opt_json(b.log_negativity)
           << ", \"tail_mass\": " << fmt_sig12(b.tail_mass) << "}";
    }
    os << (r.branches.empty() ? "]\n" : "\n  ]\n");
    os << "}\n";
}

inline void write_csv(std::ostream& os, const RunReport& r) {
    os << "# tool: fockpipe " << version_string << "\n";
    os << "# circuit: " << r.circuit_name << "\n";
    os << "# cutoff: " << r.cutoff << "\n";
    if (r.scheme) {
        os << "# scheme: alpha_re=" << fmt_sig12(r.scheme->alpha.real())
           << " alpha_im=" << fmt_sig12(r.scheme->alpha.imag())
           << " beta_re=" << fmt_sig12(r.scheme->beta.real())
           << " beta_im=" << fmt_sig12(r.scheme->beta.imag())
           << " g=" << fmt_sig12(r.scheme->g) << " order="
           << (r.scheme->order == SqueezerOrder::FirstOrder ? "first" : "exact")
           << "\n";
    }
    os << "outcome,probability,relative_weight,fidelity_expected,entropy,"
          "log_negativity,tail_mass\n";
    for (const auto& b : r.branches) {
        os << detail::outcome_label(b.outcome) << "," << fmt_sig12(b.probability)
           << "," << (b.relative_weight ? 1 : 0) << ","
           << detail::opt_csv(b.fidelity_expected) << ","
           << detail::opt_csv(b.entropy_bits) << ","
           << detail::opt_csv(b.log_negativity) << "," << fmt_sig12(b.tail_mass)
           << "\n";
    }
}

// ---------------------------------------------------------------------------
// Parameter-sweep rows for the pipeline reproduction command.

struct PaperRow {
    cplx alpha;
    cplx beta;
    double g = 0.0;
    std::string outcome;
    double weight = 0.0;
    bool relative_weight = false;
    double fidelity_expected = 0.0;
    double entropy_bits = 0.0;
    std::optional<double> fidelity_ideal;  // beta = 0 a-click rows only
    std::optional<double> omega;
};

inline void write_paper_json(std::ostream& os, const std::vector<PaperRow>& rows) {
    os << "{\n  \"tool\": \"fockpipe\",\n  \"version\": \"" << version_string
       << "\",\n  \"rows\": [";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << (i ? ",\n    " : "\n    ");
        os << "{\"alpha_re\": " << fmt_sig12(r.alpha.real())
           << ", \"alpha_im\": " << fmt_sig12(r.alpha.imag())
           << ", \"beta_re\": " << fmt_sig12(r.beta.real())
           << ", \"beta_im\": " << fmt_sig12(r.beta.imag())
           << ", \"g\": " << fmt_sig12(r.g) << ", \"outcome\": \"" << r.outcome
           << "\", \"weight\": " << fmt_sig12(r.weight)
           << ", \"relative_weight\": " << (r.relative_weight ? "true" : "false")
           << ", \"fidelity_expected\": " << fmt_sig12(r.fidelity_expected)
           << ", \"entropy\": " << fmt_sig12(r.entropy_bits)
           << ", \"fidelity_ideal\": " << detail::opt_json(r.fidelity_ideal)
           << ", \"omega\": " << detail::opt_json(r.omega) << "}";
    }
    os << (rows.empty() ? "]\n" : "\n  ]\n") << "}\n";
}

inline void write_paper_csv(std::ostream& os, const std::vector<PaperRow>& rows) {
    os << "# tool: fockpipe " << version_string << "\n";
    os << "alpha_re,alpha_im,beta_re,beta_im,g,outcome,weight,relative_weight,"
          "fidelity_expected,entropy,fidelity_ideal,omega\n";
    for (const auto& r : rows) {
        os << fmt_sig12(r.alpha.real()) << "," << fmt_sig12(r.alpha.imag()) << ","
           << fmt_sig12(r.beta.real()) << "," << fmt_sig12(r.beta.imag()) << ","
           << fmt_sig12(r.g) << "," << r.outcome << "," << fmt_sig12(r.weight)
           << "," << (r.relative_weight ? 1 : 0) << ","
           << fmt_sig12(r.fidelity_expected) << "," << fmt_sig12(r.entropy_bits)
           << "," << detail::opt_csv(r.fidelity_ideal) << ","
           << detail::opt_csv(r.omega) << "\n";
    }
}

}  // namespace fockpipe
