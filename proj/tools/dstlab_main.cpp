// Command-line front end: lift / flow / spectrum shortcuts plus full scenario
// files. Every subcommand builds a ScenarioConfig and hands it to
// run_scenario, so CLI runs and config-file runs produce identical artifacts.

#include <CLI11.hpp>

#include "dstlab/scenarios_io.hpp"

#include <cstdio>
#include <iostream>

namespace {

int finish(const dst::RunResult& r) {
    for (const auto& c : r.checks)
        std::printf("%-38s %-12s value=%.3e threshold=%.3e\n", c.name.c_str(),
                    c.pass ? "pass" : "FAIL", c.value, c.threshold);
    for (const auto& n : r.notes) std::printf("note: %s\n", n.c_str());
    for (const auto& a : r.artifacts) std::printf("wrote %s\n", a.c_str());
    return r.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"dstlab: Weierstrass-representation surfaces in R^4, "
                 "Davey-Stewartson flows, and Floquet spectral scans on tori"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool strict = false;
    app.add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", seed, "seed for random band-limited data")->capture_default_str();
    app.add_flag("--strict", strict, "treat warnings as failures");

    dst::ScenarioConfig cfg;

    auto* lift = app.add_subcommand("lift", "product-torus Gauss map -> Dirac spinor lift");
    int n = 32;
    double radius = 1.0;
    std::vector<int> b_choice{0, 0};
    lift->add_option("--n", n, "grid samples per direction")->capture_default_str();
    lift->add_option("--radius", radius, "product torus radius")->capture_default_str();
    lift->add_option("--b-choice", b_choice, "lattice index of the spinor branch")
        ->expected(2);

    auto* flow = app.add_subcommand("flow", "integrate a DS flow and trace invariants");
    std::string level = "ds2";
    std::string fixture = "clifford";
    double dt = 1e-3, t_end = 0.1;
    int monitor_every = 100;
    double amplitude = 0.01;
    int max_mode = 2;
    flow->add_option("--level", level, "ds1 | ds2 | ds3 | mnv")->capture_default_str();
    flow->add_option("--fixture", fixture, "clifford | plane_wave | floquet | curve_torus")
        ->capture_default_str();
    flow->add_option("--n", n, "grid samples per direction")->capture_default_str();
    flow->add_option("--dt", dt, "time step")->capture_default_str();
    flow->add_option("--t-end", t_end, "final time")->capture_default_str();
    flow->add_option("--monitor-every", monitor_every, "steps between trace rows")
        ->capture_default_str();
    flow->add_option("--amplitude", amplitude, "random perturbation amplitude")
        ->capture_default_str();
    flow->add_option("--max-mode", max_mode, "random perturbation band")->capture_default_str();

    auto* spectrum = app.add_subcommand("spectrum", "scan the zero-energy Floquet set");
    std::vector<double> potential{0.5, 0.0};
    int cutoff = 8;
    std::vector<int> resolution{64, 64};
    std::vector<double> window;
    spectrum->add_option("--potential", potential, "constant potential re im")->expected(2);
    spectrum->add_option("--cutoff", cutoff, "Fourier modes per direction")
        ->capture_default_str();
    spectrum->add_option("--resolution", resolution, "k-grid samples")->expected(2);
    spectrum->add_option("--window", window, "k1min k2min k1max k2max")->expected(4);
    spectrum->add_option("--n", n, "grid samples per direction")->capture_default_str();

    auto* scenario = app.add_subcommand("scenario", "run or list scenario files");
    auto* scenario_run = scenario->add_subcommand("run", "run a scenario config file");
    std::string config_path;
    scenario_run->add_option("file", config_path, "config file")->required();
    auto* scenario_list = scenario->add_subcommand("list", "list scenario names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (scenario_list->parsed()) {
            for (const auto& s : dst::scenario_names()) std::printf("%s\n", s.c_str());
            return 0;
        }
        if (scenario_run->parsed()) {
            cfg = dst::load_config_file(config_path);
        } else if (lift->parsed()) {
            cfg.scenario = dst::ScenarioKind::clifford;
            cfg.n1 = cfg.n2 = n;
            cfg.radius = radius;
            cfg.b_choice = {b_choice[0], b_choice[1]};
        } else if (flow->parsed()) {
            if (level == "ds1") cfg.scenario = dst::ScenarioKind::ds1_flow;
            else if (level == "ds2") cfg.scenario = dst::ScenarioKind::ds2_flow;
            else if (level == "ds3") cfg.scenario = dst::ScenarioKind::ds3_flow;
            else if (level == "mnv") cfg.scenario = dst::ScenarioKind::mnv_flow;
            else throw dst::ValidationError("unknown flow level '" + level + "'");
            cfg.n1 = cfg.n2 = n;
            cfg.fixture = fixture;
            cfg.dt = dt;
            cfg.t_end = t_end;
            cfg.monitor_every = monitor_every;
            cfg.amplitude = amplitude;
            cfg.max_mode = max_mode;
            if (cfg.scenario == dst::ScenarioKind::mnv_flow) cfg.floquet_base = dst::cplx(0.25, 0.0);
        } else if (spectrum->parsed()) {
            cfg.scenario = dst::ScenarioKind::spectral_scan;
            cfg.n1 = cfg.n2 = n;
            cfg.spectral_potential = dst::cplx(potential[0], potential[1]);
            cfg.cutoff = cutoff;
            cfg.resolution = {resolution[0], resolution[1]};
            if (!window.empty()) cfg.window = dst::ScanWindow{window[0], window[1], window[2], window[3]};
        }
        // scenario files keep their own out_dir unless overridden
        if (app.count("--out-dir") || !scenario_run->parsed()) cfg.out_dir = out_dir;
        if (app.count("--seed")) cfg.seed = seed;
        if (strict) cfg.strict = true;
        return finish(dst::run_scenario(cfg));
    } catch (const dst::ParseError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const dst::ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
