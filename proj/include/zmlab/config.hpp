#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "zmlab/detail/format.hpp"
#include "zmlab/errors.hpp"
#include "zmlab/field.hpp"
#include "zmlab/ssf.hpp"
#include "zmlab/toeplitz.hpp"
#include "zmlab/zeromodes.hpp"

namespace zmlab {

// Run configuration, one INI-style text file: [section] headers, key = value
// lines, '#' comments.  Repeated "mode" keys accumulate.  Every numeric
// constraint of the domain types is re-validated at parse time.

struct FieldSpec {
    double b0 = 0.0;
    std::vector<std::array<double, 4>> modes;  // lambda_x lambda_y re im
};

struct BasisSpec {
    int K = 0;
    int radial_nodes = 0;   // 0 = auto: 2K + 32
    int angular_nodes = 0;  // 0 = auto: max(4K + 16, ceil(8 |lambda|max R))
    bool self_check = true;
    bool truncation_check = true;
};

struct OscSpec {
    double radius = 0.0;  // 0 = auto: one period of the coarsest mode
    int density = 512;
};

struct KernelSpec {
    double grid_radius = 0.0;  // 0 = auto: R(K)
    int grid_points = 21;      // per axis; 0 = header-only table
};

struct SymbolSpec {
    std::string kind = "gaussian";  // power | gaussian | disc
    double beta = 1.0, eta = 1.0;   // gaussian
    double alpha = 4.0, c1 = 1.0;   // power
    std::vector<double> u0{1.0};    // power: cosine coefficients
    double radius = 1.0, height = 1.0;  // disc
};

struct PerturbationSpec {
    SymbolSpec u;
    std::string g_kind = "boxcar";  // gaussian | boxcar | power
    double g_sigma = 1.0, g_halfwidth = 0.5, g_m3 = 3.0;
    std::string decay = "compact";  // power | exponential | compact
    double decay_m = 5.0, decay_beta = 1.0, decay_eta = 1.0;
};

struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    int points = 0;
    bool log = true;
};

struct RunSpec {
    double epsilon = 1e-2;
    int sign = -1;  // -1: H0 - V, +1: H0 + V
};

struct RunConfig {
    FieldSpec field;
    std::optional<BasisSpec> basis;
    OscSpec osc;
    KernelSpec kernel;
    std::optional<SymbolSpec> symbol;
    std::optional<PerturbationSpec> perturbation;
    std::optional<SweepSpec> sweep;
    RunSpec run;
};

namespace detail {

inline double parse_double(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad number '" + s + "' for " + where);
    }
}

inline long parse_long(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer '" + s + "' for " + where);
    }
}

inline bool parse_bool(const std::string& s, const std::string& where) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("config: bad boolean '" + s + "' for " + where);
}

inline std::vector<double> parse_doubles(const std::string& s, const std::string& where) {
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(tok, where));
    if (out.empty()) throw ConfigError("config: empty value for " + where);
    return out;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace detail

RunConfig parse_config(const std::string& text);

// Factories: turn validated specs into domain objects.

inline MagneticField make_field(const FieldSpec& spec) {
    std::vector<FourierMode> modes;
    modes.reserve(spec.modes.size());
    for (const auto& m : spec.modes)
        modes.push_back(FourierMode{Vec2(m[0], m[1]), std::complex<double>(m[2], m[3])});
    try {
        return MagneticField(spec.b0, std::move(modes));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [field] ") + e.what());
    }
}

inline SymbolU make_symbol(const SymbolSpec& spec) {
    try {
        if (spec.kind == "power") return SymbolU::power(spec.alpha, CosineSeries(spec.u0), spec.c1);
        if (spec.kind == "gaussian") return SymbolU::gaussian(spec.beta, spec.eta);
        if (spec.kind == "disc") return SymbolU::disc(spec.radius, spec.height);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [symbol] ") + e.what());
    }
    throw ConfigError("config: unknown symbol kind '" + spec.kind + "'");
}

inline PerturbationProfile make_profile(const PerturbationSpec& spec) {
    const SymbolU u = make_symbol(spec.u);
    std::optional<LongitudinalProfile> g;
    try {
        if (spec.g_kind == "gaussian") g = LongitudinalProfile::gaussian(spec.g_sigma);
        else if (spec.g_kind == "boxcar") g = LongitudinalProfile::boxcar(spec.g_halfwidth);
        else if (spec.g_kind == "power") g = LongitudinalProfile::power(spec.g_m3);
        else throw ConfigError("config: unknown g kind '" + spec.g_kind + "'");
        DecayClass decay;
        if (spec.decay == "power") decay = DecayClass::power(spec.decay_m);
        else if (spec.decay == "exponential") decay = DecayClass::exponential(spec.decay_beta, spec.decay_eta);
        else if (spec.decay == "compact") decay = DecayClass::compact();
        else throw ConfigError("config: unknown decay class '" + spec.decay + "'");
        return PerturbationProfile{u, *g, decay};
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [perturbation] ") + e.what());
    }
}

inline ZeroModeBasis make_basis(const RunConfig& cfg, int threads) {
    if (!cfg.basis) throw ConfigError("config: [basis] section with K is required");
    ZeroModeBasis::Options opt;
    opt.radial_nodes = cfg.basis->radial_nodes;
    opt.angular_nodes = cfg.basis->angular_nodes;
    opt.self_check = cfg.basis->self_check;
    opt.threads = threads;
    try {
        return ZeroModeBasis(make_field(cfg.field), cfg.basis->K, opt);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: [basis] ") + e.what());
    }
}

inline std::vector<double> sweep_values(const SweepSpec& spec) {
    if (spec.points < 1) throw ConfigError("config: [sweep] points must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<size_t>(spec.points));
    if (spec.points == 1) {
        out.push_back(spec.start);
        return out;
    }
    if (spec.log) {
        if (!(spec.start > 0.0) || !(spec.stop > 0.0))
            throw ConfigError("config: [sweep] log spacing requires positive endpoints");
        const double la = std::log(spec.start), lb = std::log(spec.stop);
        for (int i = 0; i < spec.points; ++i)
            out.push_back(std::exp(la + (lb - la) * i / (spec.points - 1)));
    } else {
        for (int i = 0; i < spec.points; ++i)
            out.push_back(spec.start + (spec.stop - spec.start) * i / (spec.points - 1));
    }
    return out;
}

// Canonical echo: fixed section and key order, resolved values, 17
// significant digits.  parse(canonical_config(c)) reproduces c.
inline std::string canonical_config(const RunConfig& cfg) {
    using detail::fmt17;
    using detail::fmt_int;
    std::ostringstream out;
    out << "[field]\n";
    out << "b0 = " << fmt17(cfg.field.b0) << "\n";
    for (const auto& m : cfg.field.modes)
        out << "mode = " << fmt17(m[0]) << " " << fmt17(m[1]) << " " << fmt17(m[2]) << " "
            << fmt17(m[3]) << "\n";
    if (cfg.basis) {
        out << "\n[basis]\n";
        out << "K = " << fmt_int(cfg.basis->K) << "\n";
        out << "radial_nodes = " << fmt_int(cfg.basis->radial_nodes) << "\n";
        out << "angular_nodes = " << fmt_int(cfg.basis->angular_nodes) << "\n";
        out << "self_check = " << (cfg.basis->self_check ? "true" : "false") << "\n";
        out << "truncation_check = " << (cfg.basis->truncation_check ? "true" : "false") << "\n";
    }
    out << "\n[osc]\n";
    out << "radius = " << fmt17(cfg.osc.radius) << "\n";
    out << "density = " << fmt_int(cfg.osc.density) << "\n";
    out << "\n[kernel]\n";
    out << "grid_radius = " << fmt17(cfg.kernel.grid_radius) << "\n";
    out << "grid_points = " << fmt_int(cfg.kernel.grid_points) << "\n";
    auto emit_symbol = [&out](const SymbolSpec& s, const std::string& prefix) {
        out << prefix << "kind = " << s.kind << "\n";
        if (s.kind == "gaussian") {
            out << prefix << "beta = " << fmt17(s.beta) << "\n";
            out << prefix << "eta = " << fmt17(s.eta) << "\n";
        } else if (s.kind == "power") {
            out << prefix << "alpha = " << fmt17(s.alpha) << "\n";
            out << prefix << "c1 = " << fmt17(s.c1) << "\n";
            out << prefix << "u0 =";
            for (const double c : s.u0) out << " " << fmt17(c);
            out << "\n";
        } else if (s.kind == "disc") {
            out << prefix << "radius = " << fmt17(s.radius) << "\n";
            out << prefix << "height = " << fmt17(s.height) << "\n";
        }
    };
    if (cfg.symbol) {
        out << "\n[symbol]\n";
        emit_symbol(*cfg.symbol, "");
    }
    if (cfg.perturbation) {
        const auto& p = *cfg.perturbation;
        out << "\n[perturbation]\n";
        emit_symbol(p.u, "u_");
        out << "g_kind = " << p.g_kind << "\n";
        if (p.g_kind == "gaussian") out << "g_sigma = " << fmt17(p.g_sigma) << "\n";
        else if (p.g_kind == "boxcar") out << "g_halfwidth = " << fmt17(p.g_halfwidth) << "\n";
        else if (p.g_kind == "power") out << "g_m3 = " << fmt17(p.g_m3) << "\n";
        out << "decay = " << p.decay << "\n";
        if (p.decay == "power") out << "decay_m = " << fmt17(p.decay_m) << "\n";
        else if (p.decay == "exponential") {
            out << "decay_beta = " << fmt17(p.decay_beta) << "\n";
            out << "decay_eta = " << fmt17(p.decay_eta) << "\n";
        }
    }
    if (cfg.sweep) {
        out << "\n[sweep]\n";
        out << "start = " << fmt17(cfg.sweep->start) << "\n";
        out << "stop = " << fmt17(cfg.sweep->stop) << "\n";
        out << "points = " << fmt_int(cfg.sweep->points) << "\n";
        out << "log = " << (cfg.sweep->log ? "true" : "false") << "\n";
    }
    out << "\n[run]\n";
    out << "epsilon = " << fmt17(cfg.run.epsilon) << "\n";
    out << "sign = " << (cfg.run.sign >= 0 ? "+1" : "-1") << "\n";
    return out.str();
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    bool saw_field = false;
    int lineno = 0;
    auto fail = [&lineno](const std::string& msg) {
        throw ConfigError("config line " + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("malformed section header");
            section = line.substr(1, line.size() - 2);
            if (section == "field") saw_field = true;
            else if (section == "basis" && !cfg.basis) cfg.basis = BasisSpec{};
            else if (section == "symbol" && !cfg.symbol) cfg.symbol = SymbolSpec{};
            else if (section == "perturbation" && !cfg.perturbation) cfg.perturbation = PerturbationSpec{};
            else if (section == "sweep" && !cfg.sweep) cfg.sweep = SweepSpec{};
            else if (section == "osc" || section == "kernel" || section == "run") {
            } else if (section != "field" && section != "basis" && section != "symbol" &&
                       section != "perturbation" && section != "sweep")
                fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (value.empty()) fail("empty value for " + key);
        const std::string where = "[" + section + "] " + key;

        if (section == "field") {
            if (key == "b0") cfg.field.b0 = detail::parse_double(value, where);
            else if (key == "mode") {
                const auto v = detail::parse_doubles(value, where);
                if (v.size() != 4) fail("mode needs 4 numbers: lambda_x lambda_y re im");
                cfg.field.modes.push_back({v[0], v[1], v[2], v[3]});
            } else fail("unknown key " + where);
        } else if (section == "basis") {
            auto& b = *cfg.basis;
            if (key == "K") b.K = static_cast<int>(detail::parse_long(value, where));
            else if (key == "radial_nodes") b.radial_nodes = static_cast<int>(detail::parse_long(value, where));
            else if (key == "angular_nodes") b.angular_nodes = static_cast<int>(detail::parse_long(value, where));
            else if (key == "self_check") b.self_check = detail::parse_bool(value, where);
            else if (key == "truncation_check") b.truncation_check = detail::parse_bool(value, where);
            else fail("unknown key " + where);
        } else if (section == "osc") {
            if (key == "radius") cfg.osc.radius = detail::parse_double(value, where);
            else if (key == "density") cfg.osc.density = static_cast<int>(detail::parse_long(value, where));
            else fail("unknown key " + where);
        } else if (section == "kernel") {
            if (key == "grid_radius") cfg.kernel.grid_radius = detail::parse_double(value, where);
            else if (key == "grid_points") cfg.kernel.grid_points = static_cast<int>(detail::parse_long(value, where));
            else fail("unknown key " + where);
        } else if (section == "symbol") {
            auto& s = *cfg.symbol;
            if (key == "kind") s.kind = value;
            else if (key == "beta") s.beta = detail::parse_double(value, where);
            else if (key == "eta") s.eta = detail::parse_double(value, where);
            else if (key == "alpha") s.alpha = detail::parse_double(value, where);
            else if (key == "c1") s.c1 = detail::parse_double(value, where);
            else if (key == "u0") s.u0 = detail::parse_doubles(value, where);
            else if (key == "radius") s.radius = detail::parse_double(value, where);
            else if (key == "height") s.height = detail::parse_double(value, where);
            else fail("unknown key " + where);
        } else if (section == "perturbation") {
            auto& p = *cfg.perturbation;
            if (key == "u_kind") p.u.kind = value;
            else if (key == "u_beta") p.u.beta = detail::parse_double(value, where);
            else if (key == "u_eta") p.u.eta = detail::parse_double(value, where);
            else if (key == "u_alpha") p.u.alpha = detail::parse_double(value, where);
            else if (key == "u_c1") p.u.c1 = detail::parse_double(value, where);
            else if (key == "u_u0") p.u.u0 = detail::parse_doubles(value, where);
            else if (key == "u_radius") p.u.radius = detail::parse_double(value, where);
            else if (key == "u_height") p.u.height = detail::parse_double(value, where);
            else if (key == "g_kind") p.g_kind = value;
            else if (key == "g_sigma") p.g_sigma = detail::parse_double(value, where);
            else if (key == "g_halfwidth") p.g_halfwidth = detail::parse_double(value, where);
            else if (key == "g_m3") p.g_m3 = detail::parse_double(value, where);
            else if (key == "decay") p.decay = value;
            else if (key == "decay_m") p.decay_m = detail::parse_double(value, where);
            else if (key == "decay_beta") p.decay_beta = detail::parse_double(value, where);
            else if (key == "decay_eta") p.decay_eta = detail::parse_double(value, where);
            else fail("unknown key " + where);
        } else if (section == "sweep") {
            auto& s = *cfg.sweep;
            if (key == "start") s.start = detail::parse_double(value, where);
            else if (key == "stop") s.stop = detail::parse_double(value, where);
            else if (key == "points") s.points = static_cast<int>(detail::parse_long(value, where));
            else if (key == "log") s.log = detail::parse_bool(value, where);
            else fail("unknown key " + where);
        } else if (section == "run") {
            if (key == "epsilon") cfg.run.epsilon = detail::parse_double(value, where);
            else if (key == "sign") {
                const long v = detail::parse_long(value, where);
                if (v != 1 && v != -1) fail("sign must be +1 or -1");
                cfg.run.sign = static_cast<int>(v);
            } else fail("unknown key " + where);
        } else {
            fail("key outside any section");
        }
    }
    if (!saw_field) throw ConfigError("config: [field] section is required");

    // re-validate domain constraints now, so every command starts from a
    // consistent config
    make_field(cfg.field);
    if (cfg.symbol) make_symbol(*cfg.symbol);
    if (cfg.perturbation) make_profile(*cfg.perturbation);
    if (cfg.basis && cfg.basis->K < 1) throw ConfigError("config: [basis] K must be positive");
    if (cfg.osc.density < 2) throw ConfigError("config: [osc] density must be >= 2");
    if (!(cfg.run.epsilon > 0.0) || !(cfg.run.epsilon < 1.0))
        throw ConfigError("config: [run] epsilon must lie in (0,1)");
    if (cfg.sweep) sweep_values(*cfg.sweep);
    return cfg;
}

// Default osc radius resolution used by commands.
inline OscEstimate resolve_osc(const RunConfig& cfg, const MagneticField& field) {
    const double radius = cfg.osc.radius > 0.0 ? cfg.osc.radius : default_osc_radius(field);
    return osc_phitilde(field, radius, cfg.osc.density);
}

}  // namespace zmlab
