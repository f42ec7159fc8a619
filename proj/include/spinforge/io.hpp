#pragma once

#include "cloning.hpp"
#include "ghz_ising.hpp"
#include "graphs.hpp"
#include "isoflow.hpp"
#include "pst.hpp"
#include "synthesis.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>

// JSON documents for chains and reports, CSV for series.

namespace spinforge {

using json = nlohmann::ordered_json;

class IoError : public Error {
public:
    using Error::Error;
};

inline constexpr int chain_schema_version = 1;

enum class ChainKind { pst, ising, zy, xx };

inline const char* to_string(ChainKind k) {
    switch (k) {
        case ChainKind::pst: return "pst";
        case ChainKind::ising: return "ising";
        case ChainKind::zy: return "zy";
        default: return "xx";
    }
}

inline ChainKind chain_kind_from(const std::string& s) {
    if (s == "pst") return ChainKind::pst;
    if (s == "ising") return ChainKind::ising;
    if (s == "zy") return ChainKind::zy;
    if (s == "xx") return ChainKind::xx;
    throw IoError("unknown chain kind '" + s + "'");
}

struct Provenance {
    std::string command;
    std::uint64_t seed = 0;
    std::map<std::string, double> tolerances;
};

// pst, xx: n-1 couplings on a zero-field chain. ising: H = sum B X + sum J ZZ.
// zy: upper band J(1+gamma), lower band J(1-gamma), fields on the diagonal.
struct ChainDocument {
    int schema_version = chain_schema_version;
    ChainKind kind = ChainKind::pst;
    int n = 0;
    std::vector<double> couplings;
    std::vector<double> fields;
    std::optional<double> gamma;
    std::optional<double> time;
    Provenance provenance;

    void validate() const {
        if (schema_version != chain_schema_version)
            throw IoError("unsupported schema version " + std::to_string(schema_version));
        if (n < 1) throw IoError("chain needs n >= 1");
        if (static_cast<int>(couplings.size()) != n - 1) throw IoError("chain needs n-1 couplings");
        if (static_cast<int>(fields.size()) != n) throw IoError("chain needs n fields");
        if (!detail::all_finite(couplings) || !detail::all_finite(fields)) throw IoError("chain has non-finite entries");
        if (kind == ChainKind::zy && !gamma) throw IoError("zy chains need gamma");
        if ((kind == ChainKind::pst || kind == ChainKind::xx))
            for (double f : fields)
                if (f != 0.0) throw IoError(std::string(to_string(kind)) + " chains have zero fields");
    }
};

inline json to_json(const Provenance& p) {
    json t = json::object();
    for (const auto& [k, v] : p.tolerances) t[k] = v;
    return json{{"command", p.command}, {"seed", p.seed}, {"tolerances", t}};
}

inline json to_json(const ChainDocument& d) {
    d.validate();
    json j{{"schema_version", d.schema_version}, {"kind", to_string(d.kind)}, {"n", d.n},
           {"couplings", d.couplings}, {"fields", d.fields}};
    if (d.gamma) j["gamma"] = *d.gamma;
    if (d.time) j["time"] = *d.time;
    j["provenance"] = to_json(d.provenance);
    return j;
}

inline ChainDocument chain_from_json(const json& j) {
    try {
        ChainDocument d;
        d.schema_version = j.at("schema_version").get<int>();
        d.kind = chain_kind_from(j.at("kind").get<std::string>());
        d.n = j.at("n").get<int>();
        d.couplings = j.at("couplings").get<std::vector<double>>();
        d.fields = j.at("fields").get<std::vector<double>>();
        if (j.contains("gamma")) d.gamma = j.at("gamma").get<double>();
        if (j.contains("time")) d.time = j.at("time").get<double>();
        if (j.contains("provenance")) {
            const json& p = j.at("provenance");
            d.provenance.command = p.value("command", "");
            d.provenance.seed = p.value("seed", std::uint64_t{0});
            if (p.contains("tolerances"))
                for (const auto& [k, v] : p.at("tolerances").items()) d.provenance.tolerances[k] = v.get<double>();
        }
        d.validate();
        return d;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed chain document: ") + e.what());
    }
}

inline ChainDocument chain_document(const PstChain& c) {
    c.validate();
    ChainDocument d;
    d.kind = ChainKind::pst;
    d.n = c.n;
    d.couplings = c.couplings;
    d.fields.assign(static_cast<std::size_t>(c.n), 0.0);
    d.time = c.transfer_time;
    return d;
}

inline ChainDocument chain_document(const IsingChain& c) {
    c.validate();
    ChainDocument d;
    d.kind = ChainKind::ising;
    d.n = c.n;
    d.couplings = c.j;
    d.fields = c.b;
    d.time = ghz_time();
    return d;
}

inline ChainDocument chain_document(const StructuredX& x) {
    ChainDocument d;
    d.kind = ChainKind::zy;
    d.n = x.n();
    d.fields = x.diag();
    const auto up = x.upper(), lo = x.lower();
    // J(1+g) + J(1-g) = 2J for every gamma
    for (std::size_t k = 0; k < up.size(); ++k) d.couplings.push_back(0.5 * (up[k] + lo[k]));
    d.gamma = x.gamma;
    d.time = ghz_time();
    return d;
}

inline ChainDocument chain_document(const RealSymTridiag& w, double time) {
    ChainDocument d;
    d.kind = ChainKind::xx;
    d.n = static_cast<int>(w.n());
    d.couplings = w.offdiag;
    d.fields.assign(w.n(), 0.0);
    for (std::size_t k = 0; k < w.n(); ++k)
        if (std::abs(w.diag[k]) > 1e-10) throw IoError("xx chains must have zero fields");
    d.time = time;
    return d;
}

inline PstChain to_pst(const ChainDocument& d) {
    d.validate();
    if (d.kind != ChainKind::pst && d.kind != ChainKind::xx) throw IoError("document does not hold a pst chain");
    PstChain c;
    c.n = d.n;
    c.couplings = d.couplings;
    if (d.time) c.transfer_time = *d.time;
    return c;
}

inline IsingChain to_ising(const ChainDocument& d) {
    d.validate();
    if (d.kind == ChainKind::pst) return ising_from_pst(to_pst(d));
    if (d.kind != ChainKind::ising) throw IoError("document does not hold an Ising chain");
    IsingChain c;
    c.n = d.n;
    c.j = d.couplings;
    c.b = d.fields;
    return c;
}

inline StructuredX to_structured(const ChainDocument& d) {
    d.validate();
    if (d.kind != ChainKind::zy) throw IoError("document does not hold a zy chain");
    const double g = *d.gamma;
    std::vector<double> up, lo;
    for (double j : d.couplings) {
        up.push_back(j * (1.0 + g));
        lo.push_back(j * (1.0 - g));
    }
    return StructuredX::from_bands(d.fields, up, lo, g);
}

inline RealSymTridiag to_tridiag(const ChainDocument& d) {
    d.validate();
    if (d.kind != ChainKind::xx && d.kind != ChainKind::pst) throw IoError("document does not hold an exchange chain");
    return RealSymTridiag::zero_diagonal(d.couplings);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

inline json read_json_file(const std::string& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw IoError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline ChainDocument load_chain(const std::string& path) { return chain_from_json(read_json_file(path)); }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Shortest text that reads back to the same double.
inline std::string csv_number(double v) {
    char buf[40];
    for (int p = 15; p <= 17; ++p) {
        std::snprintf(buf, sizeof buf, "%.*g", p, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline std::string sweep_csv(const std::vector<SweepPoint>& pts) {
    std::string s = "x_percent,sample_index,overlap_estimate\n";
    for (const auto& p : pts) {
        for (std::size_t k = 0; k < p.values.size(); ++k)
            s += csv_number(p.x_percent) + "," + std::to_string(k) + "," + csv_number(p.values[k]) + "\n";
        s += csv_number(p.x_percent) + ",mean," + csv_number(p.mean) + "\n";
    }
    return s;
}

inline std::string sweep_summary_csv(const std::vector<SweepPoint>& pts) {
    std::string s = "x_percent,mean,stddev,samples\n";
    for (const auto& p : pts)
        s += csv_number(p.x_percent) + "," + csv_number(p.mean) + "," + csv_number(p.stddev) + "," +
             std::to_string(p.values.size()) + "\n";
    return s;
}

inline std::string flow_trace_csv(const FlowTrace& t) {
    std::string s = "step,gamma,sv_drift,structure_residual\n";
    for (const auto& r : t)
        s += std::to_string(r.step) + "," + csv_number(r.gamma) + "," + csv_number(r.sv_drift) + "," +
             csv_number(r.structure_residual) + "\n";
    return s;
}

inline std::string synthesis_trace_csv(const std::vector<SynthesisTraceRow>& t) {
    std::string s = "iteration,chi,delta,off_band_residual\n";
    for (const auto& r : t)
        s += std::to_string(r.iteration) + "," + csv_number(r.chi) + "," + csv_number(r.delta) + "," +
             csv_number(r.off_band) + "\n";
    return s;
}

inline json to_json(const GhzReport& r) {
    return json{{"n", r.chain.n},
                {"method", to_string(r.method)},
                {"time", r.time},
                {"overlap", r.overlap},
                {"raw_overlap", r.raw_overlap},
                {"det_sign", r.det_sign},
                {"transfer_amplitude", r.transfer_amplitude}};
}

inline json to_json(const CloneReport& r) {
    return json{{"n_clones", r.profile.n_clones},
                {"betas", r.profile.betas},
                {"fidelities", r.fidelities},
                {"method", to_string(r.method)},
                {"max_stage_residual", r.max_stage_residual},
                {"input_spread", r.spread}};
}

inline json complex_array(const CVec& v) {
    json a = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) a.push_back({v[k].real(), v[k].imag()});
    return a;
}

inline json to_json(const RevivalInstance& r) {
    json j{{"name", r.name}, {"vertices", r.graph.n}, {"source", r.source}, {"time", r.time}};
    j["printed_time"] = r.printed_time ? json(*r.printed_time) : json(nullptr);
    j["located_time"] = r.located_time;
    j["deviation"] = r.deviation;
    return j;
}

}  // namespace spinforge
