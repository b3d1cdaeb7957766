#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "casimix/ingestion.hpp"
#include "casimix/lifshitz.hpp"

// Command layer behind the casimix binary. Each command reads a scenario,
// evaluates a grid (in parallel; output order is fixed up front so results
// are byte-identical regardless of thread count) and writes one CSV with a
// '#'-prefixed metadata header. Output is written to a temporary file and
// renamed on success, so failures leave no partial CSV behind.

namespace casimix {

struct CommandOptions {
    std::string scenario_path;
    std::string out_path;
    double force_rel_tol = 1e-5;
    unsigned jobs = 0;  // 0: available parallelism
};

namespace detail {

template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    unsigned workers = jobs ? jobs : std::max(1u, std::thread::hardware_concurrency());
    if (workers > n) workers = static_cast<unsigned>(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

// axis labels stay short; computed values carry full working precision
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

inline std::string fmt_val(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string hash_hex(std::uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline void write_meta(std::ostream& out, const char* verb, const Scenario& sc,
                       const CommandOptions& opt) {
    out << "# casimix " << verb << "\n";
    out << "# scenario: " << std::filesystem::path(sc.path).filename().string()
        << " hash: " << hash_hex(sc.hash) << "\n";
    out << "# force_rel_tol: " << fmt(opt.force_rel_tol)
        << " dielectric_rel_tol: " << fmt(QuadratureSpec::dielectric_default().rel_tol) << "\n";
    out << "# materials: ";
    for (std::size_t i = 0; i < sc.material_notes.size(); ++i)
        out << (i ? "; " : "") << sc.material_notes[i];
    out << "\n";
}

// Write-then-rename so a failed run leaves no partial CSV.
inline void commit_output(const std::string& out_path, const std::string& content) {
    const std::string tmp = out_path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw ParseError(tmp + ": cannot open for writing");
        out << content;
        if (!out) throw std::runtime_error(tmp + ": write failed");
    }
    std::filesystem::rename(tmp, out_path);
}

struct ScopedTmpCleanup {
    std::string path;
    ~ScopedTmpCleanup() {
        std::error_code ec;
        std::filesystem::remove(path, ec);
    }
};

inline QuadratureSpec force_spec(const CommandOptions& opt) {
    QuadratureSpec q = QuadratureSpec::force_default();
    return QuadratureSpec(opt.force_rel_tol, q.abs_tol, q.max_subdivisions);
}

}  // namespace detail

// Effective permittivity versus filling fraction (or versus zeta when the
// sweep axis is zeta), one row per (f, rule, zeta).
inline void cmd_epsilon_sweep(const CommandOptions& opt) {
    const Scenario sc = load_scenario(opt.scenario_path);
    detail::ScopedTmpCleanup cleanup{opt.out_path + ".tmp"};

    std::vector<double> f_grid, zetas;
    if (sc.axis == SweepAxis::f) {
        f_grid = sc.values;
        zetas = sc.zeta_ev;
        if (zetas.empty())
            throw ParseError(sc.path, "sweep.zeta_eV",
                             "epsilon-sweep with axis = f needs zeta_eV values");
    } else if (sc.axis == SweepAxis::zeta) {
        f_grid.push_back(sc.slab1.composite.f.value);
        zetas = sc.values;
    } else {
        throw ParseError(sc.path, "sweep.axis", "epsilon-sweep needs axis = f or zeta");
    }
    for (const auto& r : sc.rules)
        if (r.kind == RuleKind::ideal)
            throw ParseError(sc.path, "sweep.rules",
                             "the 'ideal' rule has no effective permittivity");

    // Constituent permittivities depend only on zeta; evaluate each once.
    const QuadratureSpec q = QuadratureSpec::dielectric_default();
    std::vector<std::pair<double, double>> eps_ih(zetas.size());
    detail::parallel_for(zetas.size(), opt.jobs, [&](std::size_t i) {
        const ImaginaryFrequency z{zetas[i]};
        eps_ih[i] = {eval_model(sc.slab1.composite.inclusion, z, q),
                     eval_model(sc.slab1.composite.host, z, q)};
    });

    std::ostringstream csv;
    detail::write_meta(csv, "epsilon-sweep", sc, opt);
    csv << "f,rule,zeta_eV,eps_eff\n";
    for (double f : f_grid)
        for (std::size_t r = 0; r < sc.rules.size(); ++r)
            for (std::size_t zi = 0; zi < zetas.size(); ++zi) {
                const double eps =
                    apply_mixing_rule(sc.rules[r], eps_ih[zi].first, eps_ih[zi].second,
                                      FillingFraction(f), sc.slab1.composite.shape, q);
                csv << detail::fmt(f) << ',' << sc.rule_names[r] << ',' << detail::fmt(zetas[zi])
                    << ',' << detail::fmt_val(eps) << "\n";
            }
    detail::commit_output(opt.out_path, csv.str());
}

// Reduction factor and force versus separation, one row per (L, rule).
inline void cmd_force_vs_separation(const CommandOptions& opt) {
    const Scenario sc = load_scenario(opt.scenario_path);
    detail::ScopedTmpCleanup cleanup{opt.out_path + ".tmp"};
    if (sc.axis != SweepAxis::l)
        throw ParseError(sc.path, "sweep.axis", "force-vs-L needs axis = L");

    const QuadratureSpec q = detail::force_spec(opt);
    const std::size_t n = sc.values.size() * sc.rules.size();
    std::vector<ForceResult> results(n);
    detail::parallel_for(n, opt.jobs, [&](std::size_t i) {
        const std::size_t li = i / sc.rules.size();
        const std::size_t ri = i % sc.rules.size();
        results[i] = force_per_area(sc.system_at(sc.values[li], sc.rules[ri]), q);
    });

    std::ostringstream csv;
    detail::write_meta(csv, "force-vs-L", sc, opt);
    csv << "L_nm,rule,eta,F_Pa,quad_err,validity_ok\n";
    for (std::size_t li = 0; li < sc.values.size(); ++li)
        for (std::size_t ri = 0; ri < sc.rules.size(); ++ri) {
            const ForceResult& fr = results[li * sc.rules.size() + ri];
            csv << detail::fmt(sc.values[li]) << ',' << sc.rule_names[ri] << ','
                << detail::fmt_val(fr.eta) << ',' << detail::fmt_val(fr.force_pa) << ','
                << detail::fmt_val(fr.quad_error) << ',' << (fr.validity_ok ? "true" : "false")
                << "\n";
        }
    detail::commit_output(opt.out_path, csv.str());
}

// Reduction factor versus filling fraction at fixed separation.
inline void cmd_eta_vs_filling(const CommandOptions& opt) {
    const Scenario sc = load_scenario(opt.scenario_path);
    detail::ScopedTmpCleanup cleanup{opt.out_path + ".tmp"};
    if (sc.axis != SweepAxis::f)
        throw ParseError(sc.path, "sweep.axis", "eta-vs-f needs axis = f");

    const QuadratureSpec q = detail::force_spec(opt);
    const std::size_t n = sc.values.size() * sc.rules.size();
    std::vector<double> eta(n);
    detail::parallel_for(n, opt.jobs, [&](std::size_t i) {
        const std::size_t fi = i / sc.rules.size();
        const std::size_t ri = i % sc.rules.size();
        eta[i] = reduction_factor(sc.system_at(sc.values[fi], sc.rules[ri]), q);
    });

    std::ostringstream csv;
    detail::write_meta(csv, "eta-vs-f", sc, opt);
    csv << "f,rule,eta\n";
    for (std::size_t fi = 0; fi < sc.values.size(); ++fi)
        for (std::size_t ri = 0; ri < sc.rules.size(); ++ri)
            csv << detail::fmt(sc.values[fi]) << ',' << sc.rule_names[ri] << ','
                << detail::fmt_val(eta[fi * sc.rules.size() + ri]) << "\n";
    detail::commit_output(opt.out_path, csv.str());
}

// Reduction factors of two rules over the scenario grid. rel_diff is
// |eta_a - eta_b|: eta is already a force normalized by the ideal-conductor
// force F0, so this is the models' force difference relative to F0.
inline void cmd_compare_rules(const CommandOptions& opt, const std::string& rule_a,
                              const std::string& rule_b) {
    const Scenario sc = load_scenario(opt.scenario_path);
    detail::ScopedTmpCleanup cleanup{opt.out_path + ".tmp"};
    if (sc.axis == SweepAxis::zeta)
        throw ParseError(sc.path, "sweep.axis", "compare needs axis = f or L");

    const MixingRule ra = detail::resolve_rule(sc.path, "rule-a", rule_a, sc.file.spectral);
    const MixingRule rb = detail::resolve_rule(sc.path, "rule-b", rule_b, sc.file.spectral);

    const QuadratureSpec q = detail::force_spec(opt);
    std::vector<double> eta_a(sc.values.size()), eta_b(sc.values.size());
    detail::parallel_for(2 * sc.values.size(), opt.jobs, [&](std::size_t i) {
        const std::size_t vi = i / 2;
        if (i % 2 == 0)
            eta_a[vi] = reduction_factor(sc.system_at(sc.values[vi], ra), q);
        else
            eta_b[vi] = reduction_factor(sc.system_at(sc.values[vi], rb), q);
    });

    std::ostringstream csv;
    detail::write_meta(csv, "compare", sc, opt);
    csv << "# rule_a: " << rule_a << " rule_b: " << rule_b << " axis: "
        << sweep_axis_name(sc.axis) << "\n";
    csv << "# rel_diff = |eta_a - eta_b| (force difference relative to the ideal-conductor force)\n";
    csv << "axis_value,eta_a,eta_b,rel_diff\n";
    double max_diff = 0.0;
    double max_at = sc.values.empty() ? 0.0 : sc.values.front();
    for (std::size_t i = 0; i < sc.values.size(); ++i) {
        const double d = std::abs(eta_a[i] - eta_b[i]);
        if (d > max_diff) {
            max_diff = d;
            max_at = sc.values[i];
        }
        csv << detail::fmt(sc.values[i]) << ',' << detail::fmt_val(eta_a[i]) << ','
            << detail::fmt_val(eta_b[i]) << ',' << detail::fmt_val(d) << "\n";
    }
    csv << "# summary: max_rel_diff = " << detail::fmt(max_diff) << " at "
        << sweep_axis_name(sc.axis) << " = " << detail::fmt(max_at) << "\n";
    detail::commit_output(opt.out_path, csv.str());
}

// Load-and-check only; reports what was resolved.
inline void cmd_validate(const std::string& scenario_path, std::ostream& report) {
    const Scenario sc = load_scenario(scenario_path);
    report << "scenario: " << sc.path << " (hash " << detail::hash_hex(sc.hash) << ")\n";
    report << "materials: ";
    for (std::size_t i = 0; i < sc.material_notes.size(); ++i)
        report << (i ? "; " : "") << sc.material_notes[i];
    report << "\n";
    report << "rules: ";
    for (std::size_t i = 0; i < sc.rule_names.size(); ++i)
        report << (i ? ", " : "") << sc.rule_names[i];
    report << "\n";
    for (const auto& w : sc.warnings) report << "warning: " << w << "\n";
    report << "sweep: axis " << sweep_axis_name(sc.axis) << ", " << sc.values.size()
           << " grid points\n";
    const auto systems = sc.systems();
    std::size_t invalid = 0;
    for (const auto& s : systems)
        if (!validity_check(s)) ++invalid;
    report << "systems: " << systems.size() << " (" << invalid
           << " fail the 4*pi*L > a validity condition)\n";
    report << "OK\n";
}

}  // namespace casimix
