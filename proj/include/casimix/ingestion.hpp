#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "casimix/dielectric.hpp"
#include "casimix/lifshitz.hpp"
#include "casimix/mixing.hpp"

// Loading and validation of material definitions, optical data tables and
// scenario files. File formats are flat INI-style sections (human-diffable)
// plus CSV for sampled loss spectra. Every validation failure names the
// file, the line or field, and the violated invariant.

namespace casimix {

class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
    ParseError(const std::string& file, int line, const std::string& what)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + what) {}
    ParseError(const std::string& file, const std::string& field, const std::string& what)
        : std::runtime_error(file + ": [" + field + "]: " + what) {}
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline double parse_double(const std::string& file, const std::string& field,
                           const std::string& text) {
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size())
        throw ParseError(file, field, "expected a number, got '" + text + "'");
    return v;
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

// FNV-1a over raw file bytes; used to stamp output metadata.
inline std::uint64_t file_hash(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open");
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (in.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

// ---------------------------------------------------------------------------
// Minimal INI reader with line tracking

class IniFile {
public:
    struct Entry {
        std::string value;
        int line;
        mutable bool used = false;
    };

    static IniFile load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ParseError(path + ": cannot open");
        IniFile ini;
        ini.path_ = path;
        std::string line;
        std::string section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = detail::trim(line);
            if (t.empty() || t[0] == '#' || t[0] == ';') continue;
            if (t.front() == '[') {
                if (t.back() != ']')
                    throw ParseError(path, lineno, "malformed section header '" + t + "'");
                section = detail::trim(t.substr(1, t.size() - 2));
                if (section.empty()) throw ParseError(path, lineno, "empty section name");
                if (ini.sections_.count(section))
                    throw ParseError(path, lineno, "duplicate section [" + section + "]");
                ini.sections_[section];
                ini.order_.push_back(section);
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos)
                throw ParseError(path, lineno, "expected 'key = value', got '" + t + "'");
            if (section.empty())
                throw ParseError(path, lineno, "entry outside any [section]");
            const std::string key = detail::trim(t.substr(0, eq));
            const std::string value = detail::trim(t.substr(eq + 1));
            auto& sec = ini.sections_[section];
            if (sec.count(key))
                throw ParseError(path, lineno, "duplicate key '" + key + "' in [" + section + "]");
            sec[key] = Entry{value, lineno};
        }
        return ini;
    }

    const std::string& path() const { return path_; }
    bool has_section(const std::string& s) const { return sections_.count(s) != 0; }
    const std::vector<std::string>& section_order() const { return order_; }

    bool has(const std::string& sec, const std::string& key) const {
        auto it = sections_.find(sec);
        return it != sections_.end() && it->second.count(key) != 0;
    }

    std::string get(const std::string& sec, const std::string& key) const {
        auto it = sections_.find(sec);
        if (it == sections_.end())
            throw ParseError(path_, sec, "missing required section");
        auto kit = it->second.find(key);
        if (kit == it->second.end())
            throw ParseError(path_, sec + "." + key, "missing required key");
        kit->second.used = true;
        return kit->second.value;
    }

    std::optional<std::string> get_optional(const std::string& sec, const std::string& key) const {
        if (!has(sec, key)) return std::nullopt;
        return get(sec, key);
    }

    double get_double(const std::string& sec, const std::string& key) const {
        return detail::parse_double(path_, sec + "." + key, get(sec, key));
    }

    std::optional<double> get_double_optional(const std::string& sec,
                                              const std::string& key) const {
        if (!has(sec, key)) return std::nullopt;
        return get_double(sec, key);
    }

private:
    std::string path_;
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::vector<std::string> order_;
};

// ---------------------------------------------------------------------------
// Optical data CSV: '#' comments, header line, rows omega_eV,eps2

inline std::vector<std::pair<double, double>> load_spectrum_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open");
    std::vector<std::pair<double, double>> rows;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!header_seen) {
            if (t.find("omega_eV") == std::string::npos || t.find("eps2") == std::string::npos)
                throw ParseError(path, lineno, "expected header 'omega_eV,eps2', got '" + t + "'");
            header_seen = true;
            continue;
        }
        const auto cols = detail::split(t, ',');
        if (cols.size() != 2)
            throw ParseError(path, lineno, "expected 2 columns, got " + std::to_string(cols.size()));
        const double omega = detail::parse_double(path, "line " + std::to_string(lineno), cols[0]);
        const double eps2 = detail::parse_double(path, "line " + std::to_string(lineno), cols[1]);
        if (!(omega > 0.0))
            throw ParseError(path, lineno, "omega_eV must be positive");
        if (!(eps2 >= 0.0))
            throw ParseError(path, lineno, "eps2 must be >= 0 (passivity)");
        if (!rows.empty() && !(omega > rows.back().first))
            throw ParseError(path, lineno, "omega_eV must be strictly increasing");
        rows.emplace_back(omega, eps2);
    }
    if (rows.size() < 2) throw ParseError(path + ": need at least 2 data rows");
    return rows;
}

// ---------------------------------------------------------------------------
// Material files

enum class MaterialKind { drude, oscillators, tabulated };

inline std::string material_kind_name(MaterialKind k) {
    switch (k) {
        case MaterialKind::drude: return "drude";
        case MaterialKind::oscillators: return "oscillators";
        case MaterialKind::tabulated: return "tabulated";
    }
    throw std::logic_error("material_kind_name");
}

// File-level image of a material definition; resolves to a DielectricModel.
struct MaterialFile {
    std::string name;
    MaterialKind kind = MaterialKind::drude;
    std::string provenance;

    std::optional<double> drude_omega_p, drude_gamma;       // [drude]
    std::vector<Oscillator> oscillators;                    // [oscillator.k]
    std::string data_path;                                  // [tabulated] path
    std::optional<double> tail_exponent;                    // [tabulated]
    std::optional<double> extrap_omega_p, extrap_gamma;     // [extrapolation]

    bool operator==(const MaterialFile&) const = default;
};

inline MaterialFile load_material_file(const std::string& path) {
    const IniFile ini = IniFile::load(path);
    MaterialFile m;
    m.name = ini.get("material", "name");
    const std::string kind = ini.get("material", "kind");
    if (auto prov = ini.get_optional("material", "provenance")) m.provenance = *prov;

    if (kind == "drude") {
        m.kind = MaterialKind::drude;
        m.drude_omega_p = ini.get_double("drude", "omega_p_eV");
        m.drude_gamma = ini.get_double("drude", "gamma_eV");
        if (!(*m.drude_omega_p > 0.0))
            throw ParseError(path, "drude.omega_p_eV", "must be > 0");
        if (!(*m.drude_gamma >= 0.0))
            throw ParseError(path, "drude.gamma_eV", "must be >= 0");
    } else if (kind == "oscillators") {
        m.kind = MaterialKind::oscillators;
        for (int k = 1;; ++k) {
            const std::string sec = "oscillator." + std::to_string(k);
            if (!ini.has_section(sec)) break;
            Oscillator o{ini.get_double(sec, "C"), ini.get_double(sec, "omega_eV")};
            if (!(o.strength > 0.0)) throw ParseError(path, sec + ".C", "must be > 0");
            if (!(o.omega_ev > 0.0)) throw ParseError(path, sec + ".omega_eV", "must be > 0");
            m.oscillators.push_back(o);
        }
        if (m.oscillators.empty())
            throw ParseError(path, "oscillator.1",
                             "oscillator material needs at least one [oscillator.k] section");
    } else if (kind == "tabulated") {
        m.kind = MaterialKind::tabulated;
        m.data_path = ini.get("tabulated", "path");
        m.tail_exponent = ini.get_double_optional("tabulated", "tail_exponent");
        if (m.tail_exponent && !(*m.tail_exponent > 0.0))
            throw ParseError(path, "tabulated.tail_exponent", "must be > 0");
        if (ini.has_section("extrapolation")) {
            m.extrap_omega_p = ini.get_double("extrapolation", "omega_p_eV");
            m.extrap_gamma = ini.get_double("extrapolation", "gamma_eV");
            if (!(*m.extrap_omega_p > 0.0))
                throw ParseError(path, "extrapolation.omega_p_eV", "must be > 0");
            if (!(*m.extrap_gamma >= 0.0))
                throw ParseError(path, "extrapolation.gamma_eV", "must be >= 0");
        }
        // A missing [extrapolation] block is tolerated here; the rotation
        // itself rejects evaluations it cannot cover.
    } else {
        throw ParseError(path, "material.kind",
                         "unknown kind '" + kind + "' (expected drude|oscillators|tabulated)");
    }
    return m;
}

inline void save_material_file(const MaterialFile& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    out << "[material]\n";
    out << "name = " << m.name << "\n";
    out << "kind = " << material_kind_name(m.kind) << "\n";
    if (!m.provenance.empty()) out << "provenance = " << m.provenance << "\n";
    if (m.kind == MaterialKind::drude) {
        out << "\n[drude]\n";
        out << "omega_p_eV = " << detail::format_double(*m.drude_omega_p) << "\n";
        out << "gamma_eV = " << detail::format_double(*m.drude_gamma) << "\n";
    } else if (m.kind == MaterialKind::oscillators) {
        for (std::size_t k = 0; k < m.oscillators.size(); ++k) {
            out << "\n[oscillator." << k + 1 << "]\n";
            out << "C = " << detail::format_double(m.oscillators[k].strength) << "\n";
            out << "omega_eV = " << detail::format_double(m.oscillators[k].omega_ev) << "\n";
        }
    } else {
        out << "\n[tabulated]\n";
        out << "path = " << m.data_path << "\n";
        if (m.tail_exponent)
            out << "tail_exponent = " << detail::format_double(*m.tail_exponent) << "\n";
        if (m.extrap_omega_p) {
            out << "\n[extrapolation]\n";
            out << "omega_p_eV = " << detail::format_double(*m.extrap_omega_p) << "\n";
            out << "gamma_eV = " << detail::format_double(*m.extrap_gamma) << "\n";
        }
    }
}

struct LoadedMaterial {
    MaterialFile file;
    DielectricModel model;
    std::string source_path;
    std::vector<std::string> warnings;
};

// Build the immutable model; tabulated data is read and validated here.
inline LoadedMaterial load_material(const std::string& path) {
    MaterialFile m = load_material_file(path);
    std::vector<std::string> warnings;
    if (m.kind == MaterialKind::tabulated && !m.extrap_omega_p)
        warnings.push_back(path +
                           ": tabulated material has no [extrapolation] block; evaluation at "
                           "frequencies the table cannot cover will fail");
    DielectricModel model;
    if (m.kind == MaterialKind::drude) {
        model = DielectricModel(DrudeParams(*m.drude_omega_p, *m.drude_gamma));
    } else if (m.kind == MaterialKind::oscillators) {
        model = DielectricModel(OscillatorParams(m.oscillators));
    } else {
        const auto base = std::filesystem::path(path).parent_path();
        const std::string data = (base / m.data_path).string();
        const auto rows = load_spectrum_csv(data);
        std::vector<double> omega, eps2;
        omega.reserve(rows.size());
        eps2.reserve(rows.size());
        for (const auto& [w, y] : rows) {
            omega.push_back(w);
            eps2.push_back(y);
        }
        std::optional<DrudeParams> extrap;
        if (m.extrap_omega_p) extrap = DrudeParams(*m.extrap_omega_p, *m.extrap_gamma);
        try {
            model = DielectricModel(
                SpectrumTable(std::move(omega), std::move(eps2), extrap,
                              m.tail_exponent.value_or(3.0)));
        } catch (const std::invalid_argument& e) {
            throw ParseError(data + ": " + e.what());
        }
    }
    return {std::move(m), std::move(model), path, std::move(warnings)};
}

// ---------------------------------------------------------------------------
// Scenario files

enum class SweepAxis { f, l, zeta };

inline std::string sweep_axis_name(SweepAxis a) {
    switch (a) {
        case SweepAxis::f: return "f";
        case SweepAxis::l: return "L";
        case SweepAxis::zeta: return "zeta";
    }
    throw std::logic_error("sweep_axis_name");
}

struct SlabFileSpec {
    std::string host;       // material file path or "vacuum"
    std::string inclusion;
    double f = 0.0;
    std::string rule;
    std::string shape = "sphere";
    double a_nm = 1.0;

    bool operator==(const SlabFileSpec&) const = default;
};

struct SpectralFileSpec {
    std::vector<std::pair<double, double>> poles;  // weight@position
    std::vector<double> grid_l, grid_g;

    bool operator==(const SpectralFileSpec&) const = default;
};

struct ScenarioFile {
    SlabFileSpec slab1;
    std::optional<SlabFileSpec> slab2;  // absent: identical slabs
    std::string gap_material = "vacuum";
    std::optional<double> l_nm;
    std::string axis = "f";
    std::optional<double> from, to, step;
    std::vector<double> list;
    std::vector<std::string> rules;
    std::vector<double> zeta_ev;
    std::optional<SpectralFileSpec> spectral;

    bool operator==(const ScenarioFile&) const = default;
};

namespace detail {

inline SlabFileSpec load_slab_section(const IniFile& ini, const std::string& sec) {
    SlabFileSpec s;
    s.host = ini.get(sec, "host");
    s.inclusion = ini.get(sec, "inclusion");
    s.f = ini.get_double(sec, "f");
    s.rule = ini.get(sec, "rule");
    if (auto sh = ini.get_optional(sec, "shape")) s.shape = *sh;
    if (auto a = ini.get_double_optional(sec, "a_nm")) s.a_nm = *a;
    if (!(s.f >= 0.0 && s.f <= 1.0))
        throw ParseError(ini.path(), sec + ".f", "filling fraction must be in [0,1]");
    if (!(s.a_nm > 0.0))
        throw ParseError(ini.path(), sec + ".a_nm", "inclusion radius must be > 0");
    return s;
}

inline InclusionShape parse_shape(const std::string& file, const std::string& field,
                                  const std::string& text) {
    if (text == "sphere") return InclusionShape(Sphere{});
    if (text.rfind("prolate:", 0) == 0) {
        const double e = parse_double(file, field, text.substr(8));
        if (!(e >= 0.0 && e < 1.0))
            throw ParseError(file, field, "prolate eccentricity must be in [0,1)");
        return InclusionShape(Prolate{e});
    }
    if (text.rfind("depol:", 0) == 0) {
        const auto parts = split(text.substr(6), ',');
        if (parts.size() != 3)
            throw ParseError(file, field, "depol: needs three comma-separated factors");
        std::array<double, 3> l{};
        for (int i = 0; i < 3; ++i)
            l[static_cast<std::size_t>(i)] = parse_double(file, field, parts[static_cast<std::size_t>(i)]);
        try {
            return InclusionShape(ExplicitDepolarization{l});
        } catch (const std::exception& e) {
            throw ParseError(file, field, e.what());
        }
    }
    throw ParseError(file, field,
                     "unknown shape '" + text + "' (expected sphere|prolate:<e>|depol:<L1>,<L2>,<L3>)");
}

inline std::vector<double> parse_number_list(const std::string& file, const std::string& field,
                                             const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split(text, ','))
        if (!part.empty()) out.push_back(parse_double(file, field, part));
    return out;
}

}  // namespace detail

inline ScenarioFile load_scenario_file(const std::string& path) {
    const IniFile ini = IniFile::load(path);
    ScenarioFile sc;
    sc.slab1 = detail::load_slab_section(ini, "slab1");
    if (ini.has_section("slab2")) sc.slab2 = detail::load_slab_section(ini, "slab2");

    if (auto g = ini.get_optional("gap", "material")) sc.gap_material = *g;
    sc.l_nm = ini.get_double_optional("gap", "L_nm");
    if (sc.l_nm && !(*sc.l_nm > 0.0))
        throw ParseError(path, "gap.L_nm", "separation must be > 0");

    sc.axis = ini.get("sweep", "axis");
    if (sc.axis != "f" && sc.axis != "L" && sc.axis != "zeta")
        throw ParseError(path, "sweep.axis", "expected f, L or zeta, got '" + sc.axis + "'");
    sc.from = ini.get_double_optional("sweep", "from");
    sc.to = ini.get_double_optional("sweep", "to");
    sc.step = ini.get_double_optional("sweep", "step");
    if (auto l = ini.get_optional("sweep", "list"))
        sc.list = detail::parse_number_list(path, "sweep.list", *l);
    if (sc.list.empty()) {
        if (!sc.from || !sc.to || !sc.step)
            throw ParseError(path, "sweep", "need either list or from/to/step");
        if (!(*sc.step > 0.0)) throw ParseError(path, "sweep.step", "step must be > 0");
        if (!(*sc.to >= *sc.from)) throw ParseError(path, "sweep.to", "need to >= from");
    }
    if (auto r = ini.get_optional("sweep", "rules")) {
        for (const auto& name : detail::split(*r, ','))
            if (!name.empty()) sc.rules.push_back(name);
    }
    if (auto zl = ini.get_optional("sweep", "zeta_eV"))
        sc.zeta_ev = detail::parse_number_list(path, "sweep.zeta_eV", *zl);

    if (ini.has_section("spectral")) {
        SpectralFileSpec sp;
        const auto poles = detail::split(ini.get("spectral", "poles"), ',');
        for (const auto& p : poles) {
            if (p.empty()) continue;
            const auto at = p.find('@');
            if (at == std::string::npos)
                throw ParseError(path, "spectral.poles", "expected weight@position, got '" + p + "'");
            sp.poles.emplace_back(detail::parse_double(path, "spectral.poles", p.substr(0, at)),
                                  detail::parse_double(path, "spectral.poles", p.substr(at + 1)));
        }
        if (auto gl = ini.get_optional("spectral", "grid_L"))
            sp.grid_l = detail::parse_number_list(path, "spectral.grid_L", *gl);
        if (auto gg = ini.get_optional("spectral", "grid_G"))
            sp.grid_g = detail::parse_number_list(path, "spectral.grid_G", *gg);
        sc.spectral = std::move(sp);
    }
    return sc;
}

inline void save_scenario_file(const ScenarioFile& sc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError(path + ": cannot open for writing");
    auto emit_slab = [&out](const char* sec, const SlabFileSpec& s) {
        out << "[" << sec << "]\n";
        out << "host = " << s.host << "\n";
        out << "inclusion = " << s.inclusion << "\n";
        out << "f = " << detail::format_double(s.f) << "\n";
        out << "rule = " << s.rule << "\n";
        out << "shape = " << s.shape << "\n";
        out << "a_nm = " << detail::format_double(s.a_nm) << "\n";
    };
    emit_slab("slab1", sc.slab1);
    if (sc.slab2) {
        out << "\n";
        emit_slab("slab2", *sc.slab2);
    }
    out << "\n[gap]\n";
    out << "material = " << sc.gap_material << "\n";
    if (sc.l_nm) out << "L_nm = " << detail::format_double(*sc.l_nm) << "\n";
    out << "\n[sweep]\n";
    out << "axis = " << sc.axis << "\n";
    if (!sc.list.empty()) {
        out << "list = ";
        for (std::size_t i = 0; i < sc.list.size(); ++i)
            out << (i ? ", " : "") << detail::format_double(sc.list[i]);
        out << "\n";
    } else {
        out << "from = " << detail::format_double(*sc.from) << "\n";
        out << "to = " << detail::format_double(*sc.to) << "\n";
        out << "step = " << detail::format_double(*sc.step) << "\n";
    }
    if (!sc.rules.empty()) {
        out << "rules = ";
        for (std::size_t i = 0; i < sc.rules.size(); ++i)
            out << (i ? ", " : "") << sc.rules[i];
        out << "\n";
    }
    if (!sc.zeta_ev.empty()) {
        out << "zeta_eV = ";
        for (std::size_t i = 0; i < sc.zeta_ev.size(); ++i)
            out << (i ? ", " : "") << detail::format_double(sc.zeta_ev[i]);
        out << "\n";
    }
    if (sc.spectral) {
        out << "\n[spectral]\n";
        out << "poles = ";
        for (std::size_t i = 0; i < sc.spectral->poles.size(); ++i)
            out << (i ? ", " : "") << detail::format_double(sc.spectral->poles[i].first) << "@"
                << detail::format_double(sc.spectral->poles[i].second);
        out << "\n";
        if (!sc.spectral->grid_l.empty()) {
            out << "grid_L = ";
            for (std::size_t i = 0; i < sc.spectral->grid_l.size(); ++i)
                out << (i ? ", " : "") << detail::format_double(sc.spectral->grid_l[i]);
            out << "\n";
            out << "grid_G = ";
            for (std::size_t i = 0; i < sc.spectral->grid_g.size(); ++i)
                out << (i ? ", " : "") << detail::format_double(sc.spectral->grid_g[i]);
            out << "\n";
        }
    }
}

// Fully resolved scenario: models constructed, rules parsed, sweep expanded.
struct Scenario {
    std::string path;
    std::uint64_t hash = 0;
    ScenarioFile file;

    Slab slab1, slab2;
    DielectricModel gap;
    double l_nm = 0.0;  // fixed separation; meaningful when axis != L
    SweepAxis axis = SweepAxis::f;
    std::vector<double> values;
    std::vector<std::string> rule_names;  // canonical order
    std::vector<MixingRule> rules;
    std::vector<double> zeta_ev;
    std::vector<std::string> material_notes;
    std::vector<std::string> warnings;

    SlabSystem system_at(double axis_value, const MixingRule& rule) const {
        Slab s1 = slab1;
        Slab s2 = slab2;
        s1.rule = rule;
        s2.rule = rule;
        double l = l_nm;
        if (axis == SweepAxis::f) {
            s1.composite.f = FillingFraction(axis_value);
            s2.composite.f = FillingFraction(axis_value);
        } else if (axis == SweepAxis::l) {
            l = axis_value;
        }
        return SlabSystem(std::move(s1), std::move(s2), gap, l);
    }

    CompositeSpec composite1_at(double filling) const {
        CompositeSpec c = slab1.composite;
        c.f = FillingFraction(filling);
        return c;
    }

    std::vector<SlabSystem> systems() const {
        std::vector<SlabSystem> out;
        if (axis == SweepAxis::zeta) {
            out.push_back(system_at(0.0, slab1.rule));
            return out;
        }
        out.reserve(values.size());
        for (double v : values) out.push_back(system_at(v, slab1.rule));
        return out;
    }
};

namespace detail {

inline DielectricModel resolve_material_ref(const std::string& scenario_path,
                                            const std::string& field, const std::string& ref,
                                            std::vector<std::string>& notes,
                                            std::vector<std::string>& warnings) {
    if (ref == "vacuum") return DielectricModel(Vacuum{});
    const auto base = std::filesystem::path(scenario_path).parent_path();
    const std::string mat_path = (base / ref).string();
    if (!std::filesystem::exists(mat_path))
        throw ParseError(scenario_path, field, "cannot resolve material '" + ref + "'");
    LoadedMaterial m = load_material(mat_path);
    std::string note = m.file.name;
    if (!m.file.provenance.empty()) note += " (" + m.file.provenance + ")";
    if (std::find(notes.begin(), notes.end(), note) == notes.end()) notes.push_back(note);
    for (auto& w : m.warnings)
        if (std::find(warnings.begin(), warnings.end(), w) == warnings.end())
            warnings.push_back(std::move(w));
    return std::move(m.model);
}

inline MixingRule resolve_rule(const std::string& path, const std::string& field,
                               const std::string& name,
                               const std::optional<SpectralFileSpec>& sp) {
    RuleKind kind;
    try {
        kind = rule_kind_from_name(name);
    } catch (const std::invalid_argument& e) {
        throw ParseError(path, field, e.what());
    }
    if (kind != RuleKind::spectral) return MixingRule(kind);
    if (!sp)
        throw ParseError(path, field, "rule 'spectral' requires a [spectral] section");
    std::vector<SpectralFunction::Pole> poles;
    poles.reserve(sp->poles.size());
    for (const auto& [w, l] : sp->poles) poles.push_back({w, l});
    try {
        return MixingRule(RuleKind::spectral, SpectralFunction(std::move(poles), sp->grid_l, sp->grid_g));
    } catch (const std::invalid_argument& e) {
        throw ParseError(path, "spectral", e.what());
    }
}

inline Slab resolve_slab(const std::string& path, const std::string& sec, const SlabFileSpec& s,
                         const std::optional<SpectralFileSpec>& sp,
                         std::vector<std::string>& notes, std::vector<std::string>& warnings) {
    DielectricModel host = resolve_material_ref(path, sec + ".host", s.host, notes, warnings);
    DielectricModel incl =
        resolve_material_ref(path, sec + ".inclusion", s.inclusion, notes, warnings);
    InclusionShape shape = parse_shape(path, sec + ".shape", s.shape);
    MixingRule rule = resolve_rule(path, sec + ".rule", s.rule, sp);
    CompositeSpec comp(std::move(host), std::move(incl), FillingFraction(s.f), shape, s.a_nm);
    return Slab{std::move(comp), std::move(rule)};
}

}  // namespace detail

inline Scenario load_scenario(const std::string& path) {
    Scenario sc;
    sc.path = path;
    sc.hash = file_hash(path);
    sc.file = load_scenario_file(path);
    const ScenarioFile& f = sc.file;

    sc.slab1 =
        detail::resolve_slab(path, "slab1", f.slab1, f.spectral, sc.material_notes, sc.warnings);
    sc.slab2 = f.slab2 ? detail::resolve_slab(path, "slab2", *f.slab2, f.spectral,
                                              sc.material_notes, sc.warnings)
                       : sc.slab1;
    sc.gap = detail::resolve_material_ref(path, "gap.material", f.gap_material, sc.material_notes,
                                          sc.warnings);

    sc.axis = f.axis == "f" ? SweepAxis::f : f.axis == "L" ? SweepAxis::l : SweepAxis::zeta;
    if (!f.list.empty()) {
        sc.values = f.list;
    } else {
        const long long n = static_cast<long long>(
            std::floor((*f.to - *f.from) / *f.step + 1e-9));
        for (long long i = 0; i <= n; ++i)
            sc.values.push_back(*f.from + static_cast<double>(i) * *f.step);
    }
    for (double v : sc.values) {
        if (sc.axis == SweepAxis::f && !(v >= 0.0 && v <= 1.0))
            throw ParseError(path, "sweep", "f value " + std::to_string(v) + " outside [0,1]");
        if (sc.axis == SweepAxis::l && !(v > 0.0))
            throw ParseError(path, "sweep", "separation " + std::to_string(v) + " must be > 0");
        if (sc.axis == SweepAxis::zeta && !(v > 0.0))
            throw ParseError(path, "sweep", "zeta " + std::to_string(v) + " must be > 0");
    }

    if (sc.axis != SweepAxis::l) {
        if (!f.l_nm)
            throw ParseError(path, "gap.L_nm", "fixed separation required when axis != L");
        sc.l_nm = *f.l_nm;
    } else if (f.l_nm) {
        sc.l_nm = *f.l_nm;
    }

    // Rule list: [sweep].rules, falling back to the slab rules; sorted into
    // canonical order and de-duplicated for reproducible output.
    std::vector<std::string> names = f.rules;
    if (names.empty()) {
        names.push_back(f.slab1.rule);
        if (f.slab2 && f.slab2->rule != f.slab1.rule) names.push_back(f.slab2->rule);
    }
    std::vector<std::pair<int, std::string>> keyed;
    for (const auto& n : names) {
        MixingRule r = detail::resolve_rule(path, "sweep.rules", n, f.spectral);
        keyed.emplace_back(rule_canonical_index(r.kind), n);
    }
    std::sort(keyed.begin(), keyed.end());
    keyed.erase(std::unique(keyed.begin(), keyed.end()), keyed.end());
    for (const auto& [idx, n] : keyed) {
        sc.rule_names.push_back(n);
        sc.rules.push_back(detail::resolve_rule(path, "sweep.rules", n, f.spectral));
    }

    sc.zeta_ev = f.zeta_ev;
    return sc;
}

}  // namespace casimix
