#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "casimix/ingestion.hpp"

using namespace casimix;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("casimix_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string write(const std::string& name, const std::string& content) const {
        const fs::path p = path / name;
        std::ofstream out(p);
        out << content;
        return p.string();
    }
};

const std::string drude_mat =
    "[material]\n"
    "name = gold\n"
    "kind = drude\n"
    "provenance = test fixture\n"
    "\n[drude]\n"
    "omega_p_eV = 9.0\n"
    "gamma_eV = 0.035\n";

const std::string osc_mat =
    "[material]\n"
    "name = silica\n"
    "kind = oscillators\n"
    "\n[oscillator.1]\n"
    "C = 1.098\n"
    "omega_eV = 13.3815\n"
    "\n[oscillator.2]\n"
    "C = 0.829\n"
    "omega_eV = 0.05707\n";

std::string scenario_text(const std::string& extra_sweep = "") {
    return "[slab1]\n"
           "host = silica.mat\n"
           "inclusion = gold.mat\n"
           "f = 0.1\n"
           "rule = bruggeman\n"
           "shape = sphere\n"
           "a_nm = 20\n"
           "\n[gap]\n"
           "material = vacuum\n"
           "L_nm = 100\n"
           "\n[sweep]\n"
           "axis = f\n"
           "from = 0\n"
           "to = 0.3\n"
           "step = 0.015\n" +
           extra_sweep;
}

}  // namespace

TEST_CASE("material: drude file loads and evaluates") {
    TempDir tmp;
    const auto path = tmp.write("gold.mat", drude_mat);
    const LoadedMaterial m = load_material(path);
    REQUIRE(m.file.name == "gold");
    REQUIRE(m.file.kind == MaterialKind::drude);
    REQUIRE(eval_model(m.model, ImaginaryFrequency(1.0)) ==
            Approx(1.0 + 81.0 / 1.035).epsilon(1e-12));
}

TEST_CASE("material: oscillator file with no oscillators fails validation") {
    TempDir tmp;
    const auto path = tmp.write("empty.mat",
                                "[material]\nname = x\nkind = oscillators\n");
    try {
        load_material(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(std::string(e.what()).find("oscillator") != std::string::npos);
        REQUIRE(std::string(e.what()).find(path) != std::string::npos);
    }
}

TEST_CASE("material: tabulated with non-monotone frequencies names the line") {
    TempDir tmp;
    tmp.write("bad.csv", "omega_eV,eps2\n1.0,2.0\n0.5,1.0\n");
    const auto path = tmp.write("bad.mat",
                                "[material]\nname = x\nkind = tabulated\n"
                                "[tabulated]\npath = bad.csv\n");
    try {
        load_material(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string what = e.what();
        REQUIRE(what.find("increasing") != std::string::npos);
        REQUIRE(what.find("bad.csv:3") != std::string::npos);  // offending line
    }
}

TEST_CASE("material: csv header and column checks") {
    TempDir tmp;
    tmp.write("h.csv", "frequency,loss\n1,2\n");
    const auto p1 = tmp.write("h.mat",
                              "[material]\nname = x\nkind = tabulated\n[tabulated]\npath = h.csv\n");
    REQUIRE_THROWS_AS(load_material(p1), ParseError);

    tmp.write("c.csv", "omega_eV,eps2\n1,2,3\n");
    const auto p2 = tmp.write("c.mat",
                              "[material]\nname = x\nkind = tabulated\n[tabulated]\npath = c.csv\n");
    REQUIRE_THROWS_AS(load_material(p2), ParseError);
}

TEST_CASE("material: unknown kind and malformed lines carry location") {
    TempDir tmp;
    const auto p1 = tmp.write("k.mat", "[material]\nname = x\nkind = metal\n");
    try {
        load_material_file(p1);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(std::string(e.what()).find("material.kind") != std::string::npos);
    }
    const auto p2 = tmp.write("m.mat", "[material]\nname = x\nbroken line\n");
    try {
        load_material_file(p2);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(std::string(e.what()).find(":3:") != std::string::npos);
    }
}

TEST_CASE("material: load-save-load round trip") {
    TempDir tmp;
    for (const std::string* text : {&drude_mat, &osc_mat}) {
        const auto path = tmp.write("m.mat", *text);
        const MaterialFile a = load_material_file(path);
        const auto saved = (tmp.path / "m2.mat").string();
        save_material_file(a, saved);
        const MaterialFile b = load_material_file(saved);
        REQUIRE(a == b);
    }
    // tabulated variant, with extrapolation
    tmp.write("t.csv", "omega_eV,eps2\n0.5,3.25\n1.0,1.0\n2.0,0.125\n");
    const auto path = tmp.write("t.mat",
                                "[material]\nname = t\nkind = tabulated\nprovenance = fixture\n"
                                "[tabulated]\npath = t.csv\ntail_exponent = 3.5\n"
                                "[extrapolation]\nomega_p_eV = 9\ngamma_eV = 0.02\n");
    const MaterialFile a = load_material_file(path);
    const auto saved = (tmp.path / "t2.mat").string();
    save_material_file(a, saved);
    REQUIRE(load_material_file(saved) == a);
}

TEST_CASE("scenario: f sweep expansion yields 21 systems") {
    TempDir tmp;
    tmp.write("gold.mat", drude_mat);
    tmp.write("silica.mat", osc_mat);
    const auto path = tmp.write("s.scn", scenario_text());
    const Scenario sc = load_scenario(path);
    REQUIRE(sc.values.size() == 21);
    REQUIRE(sc.systems().size() == 21);
    REQUIRE(sc.values.front() == Approx(0.0));
    REQUIRE(sc.values.back() == Approx(0.3));
    // slab2 defaults to a copy of slab1
    const SlabSystem sys = sc.systems()[10];
    REQUIRE(sys.slab1.composite.f.value == Approx(sys.slab2.composite.f.value));
    REQUIRE(sys.separation_nm == Approx(100.0));
}

TEST_CASE("scenario: unresolved material reference") {
    TempDir tmp;
    tmp.write("silica.mat", osc_mat);  // gold.mat deliberately missing
    const auto path = tmp.write("s.scn", scenario_text());
    try {
        load_scenario(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        REQUIRE(std::string(e.what()).find("gold.mat") != std::string::npos);
        REQUIRE(std::string(e.what()).find("slab1.inclusion") != std::string::npos);
    }
}

TEST_CASE("scenario: spectral rule needs a spectral section") {
    TempDir tmp;
    tmp.write("gold.mat", drude_mat);
    tmp.write("silica.mat", osc_mat);
    std::string text = scenario_text();
    text.replace(text.find("rule = bruggeman"), 16, "rule = spectral\n");
    const auto path = tmp.write("s.scn", text);
    REQUIRE_THROWS_AS(load_scenario(path), ParseError);

    // and works once the section exists
    const auto ok = tmp.write("ok.scn", text + "\n[spectral]\npoles = 1.0@0.3\n");
    REQUIRE_NOTHROW(load_scenario(ok));
}

TEST_CASE("scenario: invalid filling fraction and separation") {
    TempDir tmp;
    tmp.write("gold.mat", drude_mat);
    tmp.write("silica.mat", osc_mat);
    std::string text = scenario_text();
    text.replace(text.find("f = 0.1"), 7, "f = 1.5");
    REQUIRE_THROWS_AS(load_scenario(tmp.write("f.scn", text)), ParseError);

    std::string text2 = scenario_text();
    text2.replace(text2.find("L_nm = 100"), 10, "L_nm = -5");
    REQUIRE_THROWS_AS(load_scenario(tmp.write("l.scn", text2)), ParseError);
}

TEST_CASE("scenario: sweep rule list is canonically ordered and deduplicated") {
    TempDir tmp;
    tmp.write("gold.mat", drude_mat);
    tmp.write("silica.mat", osc_mat);
    const auto path = tmp.write(
        "s.scn", scenario_text("rules = looyenga, wiener-upper, looyenga, bruggeman\n"));
    const Scenario sc = load_scenario(path);
    REQUIRE(sc.rule_names == std::vector<std::string>{"wiener-upper", "bruggeman", "looyenga"});
}

TEST_CASE("scenario: load-save-load round trip") {
    TempDir tmp;
    tmp.write("gold.mat", drude_mat);
    tmp.write("silica.mat", osc_mat);
    const auto path = tmp.write(
        "s.scn", scenario_text("rules = bruggeman, wiener-upper\nzeta_eV = 0.18, 4.5\n") +
                     "\n[spectral]\npoles = 0.4@0.3, 0.6@0.5\n");
    const ScenarioFile a = load_scenario_file(path);
    const auto saved = (tmp.path / "s2.scn").string();
    save_scenario_file(a, saved);
    const ScenarioFile b = load_scenario_file(saved);
    REQUIRE(a == b);
}

TEST_CASE("scenario: shape strings") {
    TempDir tmp;
    tmp.write("gold.mat", drude_mat);
    tmp.write("silica.mat", osc_mat);
    std::string text = scenario_text();
    text.replace(text.find("shape = sphere"), 14, "shape = prolate:0.5");
    const Scenario sc = load_scenario(tmp.write("p.scn", text));
    REQUIRE(sc.slab1.composite.shape.depolarization()[0] ==
            Approx(3.0 * (std::log(3.0) - 1.0)).epsilon(1e-12));

    std::string bad = scenario_text();
    bad.replace(bad.find("shape = sphere"), 14, "shape = cube");
    REQUIRE_THROWS_AS(load_scenario(tmp.write("c.scn", bad)), ParseError);

    std::string depol = scenario_text();
    depol.replace(depol.find("shape = sphere"), 14, "shape = depol:0.2,0.4,0.4");
    REQUIRE(load_scenario(tmp.write("d.scn", depol))
                .slab1.composite.shape.depolarization()[0] == Approx(0.2));
}

TEST_CASE("material: missing extrapolation is a warning, not a load error") {
    TempDir tmp;
    tmp.write("t.csv", "omega_eV,eps2\n1.0,2.0\n2.0,0.25\n");
    const auto path = tmp.write("t.mat",
                                "[material]\nname = x\nkind = tabulated\n"
                                "[tabulated]\npath = t.csv\n");
    const LoadedMaterial m = load_material(path);
    REQUIRE(m.warnings.size() == 1);
    REQUIRE(m.warnings[0].find("extrapolation") != std::string::npos);
    // the hard error comes only when the rotation actually needs coverage
    REQUIRE_THROWS_AS(eval_model(m.model, ImaginaryFrequency(0.5)), IncompleteSpectrumError);
    REQUIRE_NOTHROW(eval_model(m.model, ImaginaryFrequency(150.0)));
}

TEST_CASE("shipped default materials load") {
    const std::string root = CASIMIX_SOURCE_DIR;
    const LoadedMaterial sio2 = load_material(root + "/data/sio2_oscillator.mat");
    REQUIRE(sio2.file.kind == MaterialKind::oscillators);
    REQUIRE(eval_model(sio2.model, ImaginaryFrequency(1e-4)) == Approx(2.927).epsilon(1e-3));

    const LoadedMaterial gold = load_material(root + "/data/au_drude_tab.mat");
    REQUIRE(gold.file.kind == MaterialKind::tabulated);
    // dominated by the free-electron part at 1 eV; interband terms add a bit
    const double eps = eval_model(gold.model, ImaginaryFrequency(1.0));
    REQUIRE(eps > 79.0);
    REQUIRE(eps < 90.0);
    REQUIRE(gold.file.provenance.find("user-overridable") != std::string::npos);
}
