#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dstlab/scenarios_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace dst;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

GridPtr square(int n = 16) { return make_lattice(kTwoPi, cplx(0.0, kTwoPi), n, n); }

} // namespace

TEST_CASE("parse_config: minimal clifford config fills defaults") {
    ScenarioConfig c = parse_config(
        "[scenario]\nname = clifford\n"
        "[lattice]\ngamma1 = 6.283185307179586 0\ngamma2 = 0 6.283185307179586\n");
    CHECK(c.scenario == ScenarioKind::clifford);
    CHECK(c.n1 == 32);
    CHECK(c.n2 == 32);
    CHECK(c.dt == doctest::Approx(1e-3));
}

TEST_CASE("parse_config: mode lists and sections") {
    ScenarioConfig c = parse_config(
        "[scenario]\nname = ds3_flow\n"
        "[potential]\nfixture = floquet\nmodes = (1,0):0.1+0.05i (0,-1):-0.02i\n"
        "[flow]\ndt = 2e-4\nt_end = 0.5\n");
    REQUIRE(c.modes.size() == 2);
    CHECK(c.modes[0].first[0] == 1);
    CHECK(c.modes[0].second == cplx(0.1, 0.05));
    CHECK(c.modes[1].first[1] == -1);
    CHECK(c.modes[1].second == cplx(0.0, -0.02));
    CHECK(c.t_end == doctest::Approx(0.5));
}

TEST_CASE("parse_config: errors carry line numbers and field names") {
    CHECK_THROWS_WITH_AS(parse_config("[scenario]\nname = clifford\nbogus_key = 1\n"),
                         doctest::Contains("line 3"), ParseError);
    CHECK_THROWS_AS(parse_config("[scenario]\nname = clifford\n[flow]\nt_end = -1\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config("[scenario]\nname = no_such_scenario\n"), ValidationError);
    CHECK_THROWS_AS(parse_config("[scenario]\nname = clifford\n[grid]\nn1 = 9\n"),
                    ValidationError);
    CHECK_THROWS_AS(parse_config("just text\n"), ParseError);
}

TEST_CASE("export_mesh: product torus, reimport reproduces vertices exactly") {
    auto g = square();
    WeierstrassForms f = forms_from_spinors(clifford_data(g));
    Immersion x = integrate_surface(f, {0, 0, 0, 0});
    std::string obj = export_mesh(x, "drop4");
    auto verts = parse_obj_vertices(obj);
    REQUIRE(static_cast<int>(verts.size()) == g->size());
    double err = 0.0;
    for (int j2 = 0; j2 < g->n2; ++j2)
        for (int j1 = 0; j1 < g->n1; ++j1) {
            auto p = x.value(j1, j2);
            auto q = verts[static_cast<size_t>(j2 * g->n1 + j1)];
            // %.17g text round-trips doubles exactly
            CHECK(q[0] == p[0]);
            CHECK(q[1] == p[1]);
            CHECK(q[2] == p[2]);
            err = std::max(err, std::abs(q[0] - (std::cos(kTwoPi * j1 / g->n1) - 1.0)));
        }
    CHECK(err < 1e-12);
    // quad faces with wraparound
    size_t faces = 0, pos = 0;
    while ((pos = obj.find("\nf ", pos)) != std::string::npos) { ++faces; ++pos; }
    CHECK(faces == static_cast<size_t>(g->size()));
}

TEST_CASE("export_mesh: zero immersion is a valid single-point mesh") {
    auto g = square();
    Immersion x;
    x.grid = g;
    for (int k = 0; k < 4; ++k) x.periodic[static_cast<size_t>(k)] = PeriodicField(g);
    x.basepoint = {1.0, 2.0, 3.0, 4.0};
    std::string obj = export_mesh(x, "drop4");
    auto verts = parse_obj_vertices(obj);
    REQUIRE(static_cast<int>(verts.size()) == g->size());
    for (const auto& v : verts) {
        CHECK(v[0] == 1.0);
        CHECK(v[1] == 2.0);
        CHECK(v[2] == 3.0);
    }
}

TEST_CASE("export_mesh: projections and failure modes") {
    auto g = square();
    WeierstrassForms f = forms_from_spinors(clifford_data(g));
    Immersion x = integrate_surface(f, {0, 0, 0, 0});
    CHECK_NOTHROW(export_mesh(x, "orth:0,0,0,1"));
    CHECK_THROWS_AS(export_mesh(x, "sideways"), UnsupportedProjection);
    CHECK_THROWS_AS(export_mesh(x, "orth:1,0,0"), UnsupportedProjection);
    // stereo needs a basepoint keeping |x| > 0; recentre onto the 3-sphere
    Immersion centered = x;
    centered.basepoint = {1.0, 0.0, 1.0, 0.0};
    CHECK_NOTHROW(export_mesh(centered, "stereo:0,0,0,1"));
    CHECK_THROWS_AS(export_mesh(x, "stereo:0,0,0,1"), DomainError);
}

TEST_CASE("export_trace: header only when empty, fixed Willmore column") {
    CHECK(export_trace({}) ==
          "t,willmore,V1g1,V1g2,V2g1,V2g2,V3g1,V3g2,V4g1,V4g2,"
          "ReJ1,ImJ1,ReJ2,ImJ2,ReJ3,ImJ3,ReJ4,ImJ4,dirac_psi,dirac_phi,closedness\n");
    auto g = square(32);
    FlowState s = make_flow_state(clifford_data(g), FlowLevel::ds2);
    std::vector<InvariantRecord> recs{monitor(s), monitor(s), monitor(s)};
    std::string csv = export_trace(recs);
    size_t count = 0, pos = 0;
    while ((pos = csv.find("19.739208802178716", pos)) != std::string::npos) { ++count; ++pos; }
    CHECK(count == 3);
}

TEST_CASE("run_scenario: clifford on a small grid, deterministic artifacts") {
    ScenarioConfig c;
    c.scenario = ScenarioKind::clifford;
    c.n1 = c.n2 = 16;
    c.b_choice = {1, 1};
    c.out_dir = "scn_out/clifford_a";
    RunResult r1 = run_scenario(c);
    CHECK(r1.exit_code == 0);
    c.out_dir = "scn_out/clifford_b";
    RunResult r2 = run_scenario(c);
    CHECK(slurp("scn_out/clifford_a/initial_mesh.obj") == slurp("scn_out/clifford_b/initial_mesh.obj"));
    CHECK(slurp("scn_out/clifford_a/trace.csv") == slurp("scn_out/clifford_b/trace.csv"));
}

TEST_CASE("run_scenario: gauge family spread check") {
    ScenarioConfig c;
    c.scenario = ScenarioKind::gauge_family;
    c.n1 = c.n2 = 16;
    c.out_dir = "scn_out/family";
    RunResult r = run_scenario(c);
    CHECK(r.exit_code == 0);
    REQUIRE(!r.checks.empty());
    CHECK(r.checks[0].value < 1e-12);
}

TEST_CASE("run_scenario: short ds2 flow on the torus fixture") {
    ScenarioConfig c;
    c.scenario = ScenarioKind::ds2_flow;
    c.n1 = c.n2 = 16;
    c.fixture = "clifford";
    c.dt = 1e-3;
    c.t_end = 0.01;
    c.monitor_every = 5;
    c.out_dir = "scn_out/ds2";
    RunResult r = run_scenario(c);
    CHECK(r.exit_code == 0);
    CHECK(std::filesystem::exists("scn_out/ds2/final_mesh.obj"));
    CHECK(std::filesystem::exists("scn_out/ds2/metadata.json"));
}

TEST_CASE("run_scenario: constant potential cylinder") {
    ScenarioConfig c;
    c.scenario = ScenarioKind::constant_potential;
    c.n1 = c.n2 = 16;
    c.out_dir = "scn_out/cyl";
    RunResult r = run_scenario(c);
    CHECK(r.exit_code == 0);
}

TEST_CASE("run_scenario: tiny spectral scan") {
    ScenarioConfig c;
    c.scenario = ScenarioKind::spectral_scan;
    c.n1 = c.n2 = 16;
    c.cutoff = 4;
    c.resolution = {10, 10};
    c.out_dir = "scn_out/scan";
    RunResult r = run_scenario(c);
    CHECK(r.exit_code == 0);
    std::string csv = slurp("scn_out/scan/spectrum.csv");
    CHECK(csv.rfind("k1,k2,sigma_min", 0) == 0);
}

TEST_CASE("run_scenario: curve torus flow from a config file") {
    std::filesystem::create_directories("scn_out");
    {
        std::ofstream cfg("scn_out/curve.cfg");
        cfg << "[scenario]\nname = ds3_flow\n"
               "[grid]\nn1 = 32\nn2 = 32\n"
               "[potential]\nfixture = curve_torus\ncurve = 0.05 0.0\n"
               "[flow]\ndt = 1e-3\nt_end = 0.01\nmonitor_every = 5\n"
               "[output]\nout_dir = scn_out/curve\n";
    }
    ScenarioConfig c = load_config_file("scn_out/curve.cfg");
    CHECK(c.fixture == "curve_torus");
    RunResult r = run_scenario(c);
    CHECK(r.exit_code == 0);
    std::string trace = slurp("scn_out/curve/trace.csv");
    CHECK(trace.find("nan") == std::string::npos);
}
