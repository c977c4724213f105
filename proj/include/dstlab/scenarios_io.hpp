#pragma once

// Configuration parsing, scenario orchestration, and serialization: runs
// lift / flow / spectrum scenarios and emits OBJ meshes, CSV invariant
// traces, spectral CSV clouds, and JSON run metadata. All data artifacts are
// byte-deterministic for a fixed config (fixed iteration order, fixed float
// formatting); wall-clock timings live only in the JSON metadata.

#include "dstlab/ds_flows.hpp"
#include "dstlab/spectral_curve.hpp"
#include "dstlab/weierstrass.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dst {

enum class ScenarioKind {
    clifford,
    constant_potential,
    ds2_flow,
    ds3_flow,
    mnv_flow,
    ds1_flow,
    spectral_scan,
    gauge_family,
};

const char* scenario_name(ScenarioKind k);
std::vector<std::string> scenario_names();

struct ScenarioConfig {
    ScenarioKind scenario = ScenarioKind::clifford;

    // [lattice] + [grid]
    cplx gamma1{kTwoPi, 0.0}, gamma2{0.0, kTwoPi};
    int n1 = 32, n2 = 32;

    // [flow]
    double dt = 1e-3;
    double t_end = 0.0;
    int monitor_every = 100;

    // [potential]
    std::string fixture = "clifford"; // clifford | plane_wave | floquet
    double radius = 1.0;              // clifford scale
    double plane_wave_s = 0.5;
    cplx floquet_base{0.25, 0.25};
    std::vector<std::pair<std::array<int, 2>, cplx>> modes; // perturbation / potential modes
    int floquet_cutoff = 6;
    double amplitude = 0.01; // seeded random perturbation scale
    int max_mode = 2;
    std::array<double, 2> curve_eps{0.05, 0.0}; // curve_torus deformation

    // [gauge]
    cplx gauge_a{0.0, 0.0};
    cplx gauge_b{0.0, 0.0};
    std::array<int, 2> b_choice{0, 0};

    // [spectral]
    int cutoff = 8;
    std::array<int, 2> resolution{64, 64};
    std::optional<ScanWindow> window; // default: one dual-lattice cell
    cplx spectral_potential{0.5, 0.0};

    // [output]
    std::string out_dir = "out";
    std::string mesh_projection = "drop4";

    // [tolerances]
    double closedness_tol = 1e-8;
    double conservation_tol = 1e-6;
    double gauge_tol = 1e-9;

    std::uint64_t seed = 0;
    bool strict = false;
};

// One `key = value` per line, sections in square brackets, '#' comments.
// Unknown keys or malformed lines -> ParseError with the line number;
// out-of-range values -> ValidationError naming the field.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct RunResult {
    int exit_code = 0; // 0 iff all configured checks passed
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts; // paths written
    std::vector<std::string> notes;
};

RunResult run_scenario(const ScenarioConfig& config);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

// OBJ text: `v x y z` per node in grid order (j2 rows, j1 fastest) and quad
// faces with wraparound. Projections: "drop4", "orth:u1,u2,u3,u4",
// "stereo:p1,p2,p3,p4". The header comment records what was discarded.
std::string export_mesh(const Immersion& x, const std::string& projection);
std::vector<std::array<double, 3>> parse_obj_vertices(const std::string& text);

// CSV with header t,willmore,V1g1,...,V4g2,ReJ1,ImJ1,...,ImJ4,dirac_psi,
// dirac_phi,closedness; 17 significant digits.
std::string export_trace(const std::vector<InvariantRecord>& records);

std::string export_spectral_csv(const std::vector<SpectralSample>& samples);

std::string format_double(double v); // %.17g

// write-then-rename
void atomic_write(const std::string& path, const std::string& content);

} // namespace dst
