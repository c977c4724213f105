#include "dstlab/scenarios_io.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace dst {

using nlohmann::json;

const char* scenario_name(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::clifford: return "clifford";
        case ScenarioKind::constant_potential: return "constant_potential";
        case ScenarioKind::ds2_flow: return "ds2_flow";
        case ScenarioKind::ds3_flow: return "ds3_flow";
        case ScenarioKind::mnv_flow: return "mnv_flow";
        case ScenarioKind::ds1_flow: return "ds1_flow";
        case ScenarioKind::spectral_scan: return "spectral_scan";
        case ScenarioKind::gauge_family: return "gauge_family";
    }
    return "?";
}

std::vector<std::string> scenario_names() {
    std::vector<std::string> out;
    for (int i = 0; i <= static_cast<int>(ScenarioKind::gauge_family); ++i)
        out.push_back(scenario_name(static_cast<ScenarioKind>(i)));
    return out;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp + " for writing");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Config parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& msg) {
    throw ParseError("line " + std::to_string(line) + ": " + msg);
}

double to_double(const std::string& s, int line, const std::string& key) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) parse_fail(line, "trailing junk in value of " + key);
        return v;
    } catch (ParseError&) {
        throw;
    } catch (...) {
        parse_fail(line, "cannot parse number '" + s + "' for " + key);
    }
}

int to_int(const std::string& s, int line, const std::string& key) {
    double v = to_double(s, line, key);
    int i = static_cast<int>(std::llround(v));
    if (std::abs(v - i) > 1e-12) parse_fail(line, key + " must be an integer");
    return i;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

cplx to_complex_pair(const std::string& s, int line, const std::string& key) {
    auto parts = split_ws(s);
    if (parts.size() != 2) parse_fail(line, key + " expects 're im'");
    return cplx(to_double(parts[0], line, key), to_double(parts[1], line, key));
}

std::array<int, 2> to_int_pair(const std::string& s, int line, const std::string& key) {
    auto parts = split_ws(s);
    if (parts.size() != 2) parse_fail(line, key + " expects two integers");
    return {to_int(parts[0], line, key), to_int(parts[1], line, key)};
}

// compact complex literal: "0.1", "0.1+0.05i", "-0.2i"
cplx to_compact_complex(const std::string& s, int line, const std::string& key) {
    std::string t = trim(s);
    if (t.empty()) parse_fail(line, "empty complex literal for " + key);
    if (t.back() != 'i') return cplx(to_double(t, line, key), 0.0);
    std::string body = t.substr(0, t.size() - 1);
    size_t split = std::string::npos;
    for (size_t i = body.size(); i-- > 1;) {
        if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    if (split == std::string::npos) {
        if (body.empty() || body == "+" || body == "-") body += "1";
        return cplx(0.0, to_double(body, line, key));
    }
    std::string re = body.substr(0, split);
    std::string im = body.substr(split);
    if (im == "+" || im == "-") im += "1";
    return cplx(to_double(re, line, key), to_double(im, line, key));
}

// "(m1,m2):amp (m1,m2):amp ..."
std::vector<std::pair<std::array<int, 2>, cplx>> to_mode_list(const std::string& s, int line,
                                                              const std::string& key) {
    std::vector<std::pair<std::array<int, 2>, cplx>> out;
    for (const auto& tok : split_ws(s)) {
        size_t close = tok.find(')');
        if (tok.empty() || tok[0] != '(' || close == std::string::npos || close + 1 >= tok.size() ||
            tok[close + 1] != ':')
            parse_fail(line, key + " entries look like (m1,m2):re+imi");
        std::string inside = tok.substr(1, close - 1);
        size_t comma = inside.find(',');
        if (comma == std::string::npos) parse_fail(line, key + " mode needs two indices");
        int m1 = to_int(trim(inside.substr(0, comma)), line, key);
        int m2 = to_int(trim(inside.substr(comma + 1)), line, key);
        cplx amp = to_compact_complex(tok.substr(close + 2), line, key);
        out.push_back({{m1, m2}, amp});
    }
    return out;
}

void validate(const ScenarioConfig& c) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ValidationError(std::string(name) + " must be positive");
    };
    if (c.t_end < 0.0) throw ValidationError("flow.t_end must be >= 0");
    positive(c.dt, "flow.dt");
    if (c.monitor_every < 1) throw ValidationError("flow.monitor_every must be >= 1");
    if (c.n1 < 8 || c.n2 < 8 || c.n1 % 2 || c.n2 % 2)
        throw ValidationError("grid.n1/n2 must be even and >= 8");
    positive(c.closedness_tol, "tolerances.closedness");
    positive(c.conservation_tol, "tolerances.conservation");
    positive(c.gauge_tol, "tolerances.gauge");
    if (c.cutoff < 0) throw ValidationError("spectral.cutoff must be >= 0");
    if (c.resolution[0] < 2 || c.resolution[1] < 2)
        throw ValidationError("spectral.resolution must be >= 2");
    if (c.fixture != "clifford" && c.fixture != "plane_wave" && c.fixture != "floquet" &&
        c.fixture != "curve_torus")
        throw ValidationError(
            "potential.fixture must be clifford, plane_wave, floquet or curve_torus");
    if (c.radius <= 0.0) throw ValidationError("potential.radius must be positive");
    if (c.floquet_cutoff < 1) throw ValidationError("potential.cutoff must be >= 1");
    if (c.max_mode < 1) throw ValidationError("potential.max_mode must be >= 1");
}

} // namespace

ScenarioConfig parse_config(const std::string& text) {
    ScenarioConfig c;
    std::istringstream is(text);
    std::string raw;
    std::string section;
    int line = 0;
    bool scenario_seen = false;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = raw;
        size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') parse_fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        size_t eq = s.find('=');
        if (eq == std::string::npos) parse_fail(line, "expected key = value");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty() || val.empty()) parse_fail(line, "empty key or value");
        std::string full = section.empty() ? key : section + "." + key;

        if (full == "scenario.name") {
            bool ok = false;
            for (int i = 0; i <= static_cast<int>(ScenarioKind::gauge_family); ++i)
                if (val == scenario_name(static_cast<ScenarioKind>(i))) {
                    c.scenario = static_cast<ScenarioKind>(i);
                    ok = true;
                }
            if (!ok) throw ValidationError("unknown scenario name '" + val + "'");
            scenario_seen = true;
        } else if (full == "lattice.gamma1") {
            c.gamma1 = to_complex_pair(val, line, full);
        } else if (full == "lattice.gamma2") {
            c.gamma2 = to_complex_pair(val, line, full);
        } else if (full == "grid.n1") {
            c.n1 = to_int(val, line, full);
        } else if (full == "grid.n2") {
            c.n2 = to_int(val, line, full);
        } else if (full == "flow.dt") {
            c.dt = to_double(val, line, full);
        } else if (full == "flow.t_end") {
            c.t_end = to_double(val, line, full);
        } else if (full == "flow.monitor_every") {
            c.monitor_every = to_int(val, line, full);
        } else if (full == "potential.fixture") {
            c.fixture = val;
        } else if (full == "potential.radius") {
            c.radius = to_double(val, line, full);
        } else if (full == "potential.s") {
            c.plane_wave_s = to_double(val, line, full);
        } else if (full == "potential.base") {
            c.floquet_base = to_complex_pair(val, line, full);
        } else if (full == "potential.modes") {
            c.modes = to_mode_list(val, line, full);
        } else if (full == "potential.cutoff") {
            c.floquet_cutoff = to_int(val, line, full);
        } else if (full == "potential.amplitude") {
            c.amplitude = to_double(val, line, full);
        } else if (full == "potential.max_mode") {
            c.max_mode = to_int(val, line, full);
        } else if (full == "potential.curve") {
            auto parts = split_ws(val);
            if (parts.size() != 2) parse_fail(line, "potential.curve expects two numbers");
            c.curve_eps = {to_double(parts[0], line, full), to_double(parts[1], line, full)};
        } else if (full == "gauge.a") {
            c.gauge_a = to_complex_pair(val, line, full);
        } else if (full == "gauge.b") {
            c.gauge_b = to_complex_pair(val, line, full);
        } else if (full == "gauge.b_choice") {
            c.b_choice = to_int_pair(val, line, full);
        } else if (full == "spectral.cutoff") {
            c.cutoff = to_int(val, line, full);
        } else if (full == "spectral.resolution") {
            c.resolution = to_int_pair(val, line, full);
        } else if (full == "spectral.window") {
            auto parts = split_ws(val);
            if (parts.size() != 4) parse_fail(line, "spectral.window expects 4 numbers");
            ScanWindow w{to_double(parts[0], line, full), to_double(parts[1], line, full),
                         to_double(parts[2], line, full), to_double(parts[3], line, full)};
            c.window = w;
        } else if (full == "spectral.potential") {
            c.spectral_potential = to_complex_pair(val, line, full);
        } else if (full == "output.out_dir") {
            c.out_dir = val;
        } else if (full == "output.mesh_projection") {
            c.mesh_projection = val;
        } else if (full == "tolerances.closedness") {
            c.closedness_tol = to_double(val, line, full);
        } else if (full == "tolerances.conservation") {
            c.conservation_tol = to_double(val, line, full);
        } else if (full == "tolerances.gauge") {
            c.gauge_tol = to_double(val, line, full);
        } else if (full == "run.seed") {
            c.seed = static_cast<std::uint64_t>(to_int(val, line, full));
        } else if (full == "run.strict") {
            c.strict = val == "true" || val == "1";
        } else {
            parse_fail(line, "unknown key '" + full + "'");
        }
    }
    if (!scenario_seen) throw ValidationError("scenario.name is required");
    validate(c);
    return c;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------------------
// Exporters
// ---------------------------------------------------------------------------

namespace {

struct Projection {
    std::string kind;
    std::array<double, 4> vec{};
};

Projection parse_projection(const std::string& request) {
    Projection p;
    auto colon = request.find(':');
    p.kind = request.substr(0, colon == std::string::npos ? request.size() : colon);
    if (p.kind == "drop4") {
        if (colon != std::string::npos) throw UnsupportedProjection(request);
        return p;
    }
    if (p.kind != "orth" && p.kind != "stereo") throw UnsupportedProjection(request);
    if (colon == std::string::npos) throw UnsupportedProjection(request + " (needs 4 components)");
    std::string rest = request.substr(colon + 1);
    for (auto& ch : rest)
        if (ch == ',') ch = ' ';
    auto parts = split_ws(rest);
    if (parts.size() != 4) throw UnsupportedProjection(request + " (needs 4 components)");
    double n2 = 0.0;
    for (int i = 0; i < 4; ++i) {
        p.vec[static_cast<size_t>(i)] = std::stod(parts[static_cast<size_t>(i)]);
        n2 += p.vec[static_cast<size_t>(i)] * p.vec[static_cast<size_t>(i)];
    }
    if (n2 < 1e-14) throw UnsupportedProjection(request + " (zero vector)");
    for (auto& v : p.vec) v /= std::sqrt(n2);
    return p;
}

std::array<std::array<double, 4>, 3> orth_basis(const std::array<double, 4>& u) {
    std::array<std::array<double, 4>, 3> basis{};
    int skip = 0;
    double best = 0.0;
    for (int i = 0; i < 4; ++i)
        if (std::abs(u[static_cast<size_t>(i)]) > best) {
            best = std::abs(u[static_cast<size_t>(i)]);
            skip = i;
        }
    int row = 0;
    for (int i = 0; i < 4 && row < 3; ++i) {
        if (i == skip) continue;
        std::array<double, 4> e{};
        e[static_cast<size_t>(i)] = 1.0;
        double d = 0.0;
        for (int k = 0; k < 4; ++k) d += e[static_cast<size_t>(k)] * u[static_cast<size_t>(k)];
        for (int k = 0; k < 4; ++k) e[static_cast<size_t>(k)] -= d * u[static_cast<size_t>(k)];
        for (int r = 0; r < row; ++r) {
            double dd = 0.0;
            for (int k = 0; k < 4; ++k) dd += e[static_cast<size_t>(k)] * basis[static_cast<size_t>(r)][static_cast<size_t>(k)];
            for (int k = 0; k < 4; ++k) e[static_cast<size_t>(k)] -= dd * basis[static_cast<size_t>(r)][static_cast<size_t>(k)];
        }
        double n = 0.0;
        for (double v : e) n += v * v;
        n = std::sqrt(n);
        for (auto& v : e) v /= n;
        basis[static_cast<size_t>(row++)] = e;
    }
    return basis;
}

} // namespace

std::string export_mesh(const Immersion& x, const std::string& projection) {
    Projection proj = parse_projection(projection);
    const auto& g = *x.grid;
    std::ostringstream out;
    out << "# dstlab mesh, grid " << g.n1 << " x " << g.n2 << ", vertices row-major (j2 rows)\n";

    std::array<std::array<double, 4>, 3> basis{};
    if (proj.kind == "orth" || proj.kind == "stereo") basis = orth_basis(proj.vec);

    if (proj.kind == "drop4") {
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (int j2 = 0; j2 < g.n2; ++j2)
            for (int j1 = 0; j1 < g.n1; ++j1) {
                double v = x.value(j1, j2)[3];
                lo = first ? v : std::min(lo, v);
                hi = first ? v : std::max(hi, v);
                first = false;
            }
        out << "# projection: drop4 (discarded x4 in [" << format_double(lo) << ", "
            << format_double(hi) << "])\n";
    } else if (proj.kind == "orth") {
        out << "# projection: orth, axis (" << format_double(proj.vec[0]) << ", "
            << format_double(proj.vec[1]) << ", " << format_double(proj.vec[2]) << ", "
            << format_double(proj.vec[3]) << ") discarded\n";
    } else {
        out << "# projection: stereo from pole (" << format_double(proj.vec[0]) << ", "
            << format_double(proj.vec[1]) << ", " << format_double(proj.vec[2]) << ", "
            << format_double(proj.vec[3]) << ") after radial normalization\n";
    }

    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1) {
            auto p = x.value(j1, j2);
            std::array<double, 3> q{};
            if (proj.kind == "drop4") {
                q = {p[0], p[1], p[2]};
            } else if (proj.kind == "orth") {
                for (int r = 0; r < 3; ++r) {
                    double acc = 0.0;
                    for (int k = 0; k < 4; ++k)
                        acc += basis[static_cast<size_t>(r)][static_cast<size_t>(k)] * p[static_cast<size_t>(k)];
                    q[static_cast<size_t>(r)] = acc;
                }
            } else { // stereo
                double n = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]);
                if (n < 1e-12)
                    throw DomainError("stereo projection undefined at the origin; move the basepoint");
                double dp = 0.0;
                for (int k = 0; k < 4; ++k) dp += p[static_cast<size_t>(k)] / n * proj.vec[static_cast<size_t>(k)];
                double denom = 1.0 - dp;
                if (std::abs(denom) < 1e-12) denom = denom < 0 ? -1e-12 : 1e-12;
                for (int r = 0; r < 3; ++r) {
                    double acc = 0.0;
                    for (int k = 0; k < 4; ++k)
                        acc += basis[static_cast<size_t>(r)][static_cast<size_t>(k)] * (p[static_cast<size_t>(k)] / n);
                    q[static_cast<size_t>(r)] = acc / denom;
                }
            }
            out << "v " << format_double(q[0]) << " " << format_double(q[1]) << " "
                << format_double(q[2]) << "\n";
        }

    auto vid = [&](int j1, int j2) {
        return ((j2 % g.n2 + g.n2) % g.n2) * g.n1 + ((j1 % g.n1 + g.n1) % g.n1) + 1;
    };
    for (int j2 = 0; j2 < g.n2; ++j2)
        for (int j1 = 0; j1 < g.n1; ++j1)
            out << "f " << vid(j1, j2) << " " << vid(j1 + 1, j2) << " " << vid(j1 + 1, j2 + 1)
                << " " << vid(j1, j2 + 1) << "\n";
    return out.str();
}

std::vector<std::array<double, 3>> parse_obj_vertices(const std::string& text) {
    std::vector<std::array<double, 3>> verts;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.rfind("v ", 0) != 0) continue;
        std::istringstream ls(line.substr(2));
        std::array<double, 3> v{};
        ls >> v[0] >> v[1] >> v[2];
        verts.push_back(v);
    }
    return verts;
}

std::string export_trace(const std::vector<InvariantRecord>& records) {
    std::ostringstream out;
    out << "t,willmore,V1g1,V1g2,V2g1,V2g2,V3g1,V3g2,V4g1,V4g2,"
           "ReJ1,ImJ1,ReJ2,ImJ2,ReJ3,ImJ3,ReJ4,ImJ4,dirac_psi,dirac_phi,closedness\n";
    for (const auto& r : records) {
        out << format_double(r.t) << "," << format_double(r.willmore);
        for (const auto& vk : r.period_vectors)
            out << "," << format_double(vk[0]) << "," << format_double(vk[1]);
        for (const auto& j : r.closure_integrals)
            out << "," << format_double(j.real()) << "," << format_double(j.imag());
        out << "," << format_double(r.dirac_psi) << "," << format_double(r.dirac_phi) << ","
            << format_double(r.closedness) << "\n";
    }
    return out.str();
}

std::string export_spectral_csv(const std::vector<SpectralSample>& samples) {
    std::ostringstream out;
    out << "k1,k2,sigma_min,Re_mu1,Im_mu1,Re_mu2,Im_mu2\n";
    for (const auto& s : samples)
        out << format_double(s.k1) << "," << format_double(s.k2) << ","
            << format_double(s.sigma_min) << "," << format_double(s.mu1.real()) << ","
            << format_double(s.mu1.imag()) << "," << format_double(s.mu2.real()) << ","
            << format_double(s.mu2.imag()) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Scenario runner
// ---------------------------------------------------------------------------

namespace {

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

struct Runner {
    const ScenarioConfig& cfg;
    RunResult result;
    json meta;
    json timings = json::object();
    std::filesystem::path dir;

    explicit Runner(const ScenarioConfig& c) : cfg(c), dir(c.out_dir) {
        meta["tool"] = {{"name", "dstlab"}, {"version", "0.1.0"}};
        meta["scenario"] = scenario_name(c.scenario);
        meta["grid"] = {{"n1", c.n1},
                        {"n2", c.n2},
                        {"gamma1", {c.gamma1.real(), c.gamma1.imag()}},
                        {"gamma2", {c.gamma2.real(), c.gamma2.imag()}}};
        meta["tolerances"] = {{"closedness", c.closedness_tol},
                              {"conservation", c.conservation_tol},
                              {"gauge", c.gauge_tol}};
        meta["seed"] = c.seed;
    }

    void check(const std::string& name, double value, double threshold) {
        CheckResult cr{name, value, threshold, value <= threshold};
        result.checks.push_back(cr);
    }
    void note(const std::string& n) { result.notes.push_back(n); }

    void write(const std::string& name, const std::string& content) {
        std::string path = (dir / name).string();
        atomic_write(path, content);
        result.artifacts.push_back(path);
    }

    void finish() {
        json checks = json::array();
        bool all_pass = true;
        for (const auto& c : result.checks) {
            checks.push_back({{"name", c.name},
                              {"value", c.value},
                              {"threshold", c.threshold},
                              {"pass", c.pass}});
            all_pass = all_pass && c.pass;
        }
        meta["checks"] = checks;
        meta["notes"] = result.notes;
        meta["timings_ms"] = timings;
        meta["status"] = all_pass ? "ok" : "failed";
        write("metadata.json", meta.dump(2) + "\n");
        result.exit_code = all_pass ? 0 : 1;
    }
};

GridPtr config_grid(const ScenarioConfig& c) {
    return make_lattice(c.gamma1, c.gamma2, c.n1, c.n2);
}

PeriodicField config_potential_field(const ScenarioConfig& c, const GridPtr& grid,
                                     bool real_valued) {
    PeriodicField U(grid, c.floquet_base);
    if (!c.modes.empty()) {
        U += field_from_mode_list(grid, c.modes);
    } else {
        U += random_band_limited(grid, c.max_mode, c.amplitude, c.seed, real_valued);
    }
    if (real_valued && max_abs_imag(U) > 1e-12)
        throw ValidationError("the mNV flow needs a real potential; use a real base and "
                              "conjugate-symmetric modes");
    return dealias(U);
}

WeierstrassData build_initial_data(const ScenarioConfig& c, const GridPtr& grid, Runner& run) {
    if (c.fixture == "clifford") return clifford_data(grid, c.radius);
    if (c.fixture == "plane_wave") return plane_wave_data(grid, c.plane_wave_s);
    if (c.fixture == "curve_torus") {
        // deformed flat torus (closed unit-speed curve x circle); lift its
        // Gauss map and rebuild the spinors from the Floquet kernel
        Immersion torus = curve_torus_immersion(grid, c.curve_eps[0], c.curve_eps[1]);
        GaussDecomposition dec = decompose_gauss_map(torus);
        LiftResult lift = lift_to_dirac(dec.g_psi, c.b_choice, grid);
        WeierstrassData lifted = complete_weierstrass(dec, lift);
        WeierstrassData flipped = gauge_transform(lifted, cplx(0.0, kPi / 2.0), 0.0);
        WeierstrassData data = weierstrass_from_potential(
            flipped.U, flipped.psi.lambda(), flipped.psi.rho(),
            std::min(c.floquet_cutoff + 4, std::min(grid->dealias_max1(), grid->dealias_max2())));
        run.note("curve torus data: dirac residuals " +
                 format_double(dirac_residual(data.psi, data.U)) + " / " +
                 format_double(dirac_vee_residual(data.phi, data.U)));
        return data;
    }
    // floquet: spinors from the Bloch kernel of the configured potential
    const bool real_potential = c.scenario == ScenarioKind::mnv_flow;
    PeriodicField U = config_potential_field(c, grid, real_potential);
    cplx l0, r0;
    if (std::abs(c.floquet_base.imag()) < 1e-14) {
        l0 = cplx(0.0, 0.25); // branch through |kappa| = 1/2, real potentials
        r0 = cplx(0.0, 0.25);
    } else {
        l0 = cplx(-0.25, -0.25); // product-torus branch
        r0 = cplx(0.25, -0.25);
    }
    // generic potentials are not torus potentials and carry no exact kernel
    // on the compatible family; take the best available point and say so
    AdmissibleSearchResult found = find_admissible_exponents(U, l0, r0, c.floquet_cutoff);
    auto npsi = nullspace_at_exponents(U, found.lambda, found.rho, c.floquet_cutoff, false);
    auto nphi = nullspace_at_exponents(U, -found.lambda, -found.rho, c.floquet_cutoff, true);
    auto scaled = [](const SpinorPair& s) {
        double m = std::max(max_abs(s.c1.part), max_abs(s.c2.part));
        cplx f = cplx(0.70710678118654752440 / m, 0.0);
        return SpinorPair(f * s.c1, f * s.c2);
    };
    WeierstrassData data{scaled(npsi.spinor), scaled(nphi.spinor), U};
    require_weierstrass_consistent(data);
    if (!found.converged)
        run.note("no exact Floquet kernel on the compatible family (sigma = " +
                 format_double(found.sigma) + "); using the least-residual spinors");
    run.note("floquet data: dirac residuals " + format_double(dirac_residual(data.psi, data.U)) +
             " / " + format_double(dirac_vee_residual(data.phi, data.U)));
    return data;
}

FlowLevel scenario_level(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::ds1_flow: return FlowLevel::ds1;
        case ScenarioKind::ds2_flow: return FlowLevel::ds2;
        case ScenarioKind::mnv_flow: return FlowLevel::mnv;
        default: return FlowLevel::ds3;
    }
}

void run_lift_like(Runner& run, bool family) {
    const auto& c = run.cfg;
    GridPtr grid = config_grid(c);
    Timer t;
    // product torus immersion fixture
    Immersion torus;
    torus.grid = grid;
    for (int k = 0; k < 4; ++k) torus.periodic[static_cast<size_t>(k)] = PeriodicField(grid);
    for (int j2 = 0; j2 < grid->n2; ++j2)
        for (int j1 = 0; j1 < grid->n1; ++j1) {
            double u = kTwoPi * j1 / grid->n1, v = kTwoPi * j2 / grid->n2;
            torus.periodic[0].at(j1, j2) = c.radius * std::cos(u);
            torus.periodic[1].at(j1, j2) = c.radius * std::sin(u);
            torus.periodic[2].at(j1, j2) = c.radius * std::cos(v);
            torus.periodic[3].at(j1, j2) = c.radius * std::sin(v);
        }
    torus.basepoint = {c.radius, 0.0, c.radius, 0.0};

    GaussDecomposition dec = decompose_gauss_map(torus);
    run.timings["decompose"] = t.ms();

    if (!family) {
        Timer tl;
        LiftResult lift = lift_to_dirac(dec.g_psi, c.b_choice, grid);
        WeierstrassData data = complete_weierstrass(dec, lift);
        run.timings["lift"] = tl.ms();

        double u_target = std::sqrt(0.125); // |U| = |H| e^alpha / 2 on the product torus
        double udev = 0.0;
        for (const auto& uv : data.U.v) udev = std::max(udev, std::abs(std::abs(uv) - u_target));
        run.check("lift.abs_potential_constant", udev, 1e-9);
        run.check("lift.dirac_residual_psi", dirac_residual(data.psi, data.U), 1e-9);
        run.check("lift.dirac_residual_phi", dirac_vee_residual(data.phi, data.U), 1e-9);
        double w = willmore(data.U);
        run.check("lift.willmore_value", std::abs(w - 2.0 * kPi * kPi), 1e-8);
        ClosureReport rep = closure_report(data);
        run.check("closure.periods", rep.max_period(), 1e-10);
        run.check("closure.integrals", rep.max_closure_integral(), 1e-10);

        WeierstrassForms forms = forms_from_spinors(data);
        Immersion x = integrate_surface(forms, {0, 0, 0, 0}, c.closedness_tol);
        run.write("initial_mesh.obj", export_mesh(x, c.mesh_projection));
        std::vector<InvariantRecord> recs{monitor(make_flow_state(data, FlowLevel::ds2))};
        run.write("trace.csv", export_trace(recs));
    } else {
        // gauge family over b_choice in (-1..1)^2: |U| must agree pointwise
        std::vector<double> base_abs;
        double spread = 0.0;
        std::ostringstream fam;
        fam << "n1,n2,b_re,b_im,max_absU_dev_from_first\n";
        for (int n2 = -1; n2 <= 1; ++n2)
            for (int n1 = -1; n1 <= 1; ++n1) {
                LiftResult lift = lift_to_dirac(dec.g_psi, {n1, n2}, grid);
                double dev = 0.0;
                if (base_abs.empty()) {
                    base_abs.resize(lift.U.v.size());
                    for (size_t i = 0; i < lift.U.v.size(); ++i)
                        base_abs[i] = std::abs(lift.U.v[i]);
                } else {
                    for (size_t i = 0; i < lift.U.v.size(); ++i)
                        dev = std::max(dev, std::abs(std::abs(lift.U.v[i]) - base_abs[i]));
                }
                spread = std::max(spread, dev);
                fam << n1 << "," << n2 << "," << format_double(lift.b.real()) << ","
                    << format_double(lift.b.imag()) << "," << format_double(dev) << "\n";
            }
        run.write("gauge_family.csv", fam.str());
        run.check("gauge_family.absU_spread", spread, 1e-12);
    }
    run.timings["total"] = t.ms();
}

void run_constant_potential(Runner& run) {
    const auto& c = run.cfg;
    GridPtr grid = config_grid(c);
    Timer t;
    WeierstrassData data = plane_wave_data(grid, c.plane_wave_s);
    run.check("dirac_residual_psi", dirac_residual(data.psi, data.U), 1e-9);
    run.check("dirac_residual_phi", dirac_vee_residual(data.phi, data.U), 1e-9);
    WeierstrassForms forms = forms_from_spinors(data);
    run.check("closedness", closedness_residual(forms), c.closedness_tol);
    Immersion x = integrate_surface(forms, {0, 0, 0, 0}, c.closedness_tol);
    ClosureReport rep = closure_report(data);
    run.note("period vectors max |V| = " + format_double(rep.max_period()) +
             " (a cylinder does not close)");
    run.write("initial_mesh.obj", export_mesh(x, c.mesh_projection));
    std::vector<InvariantRecord> recs{monitor(make_flow_state(data, FlowLevel::ds2))};
    run.write("trace.csv", export_trace(recs));
    run.timings["total"] = t.ms();
}

void run_flow(Runner& run) {
    const auto& c = run.cfg;
    GridPtr grid = config_grid(c);
    Timer t;
    WeierstrassData data0 = build_initial_data(c, grid, run);
    FlowLevel level = scenario_level(c.scenario);
    FlowState state = make_flow_state(data0, level);

    FlowOptions opt;
    opt.level = level;
    opt.dt = c.dt;

    const int steps = static_cast<int>(std::llround(c.t_end / c.dt));
    std::vector<InvariantRecord> recs;
    recs.push_back(monitor(state));
    const double w0 = recs.front().willmore;

    // data with visible Dirac residuals is not closed enough for a mesh;
    // the invariant trace is still meaningful, so keep going
    auto try_mesh = [&](const char* name, const WeierstrassData& d) {
        try {
            Immersion x = integrate_surface(forms_from_spinors(d), {0, 0, 0, 0}, c.closedness_tol);
            run.write(name, export_mesh(x, c.mesh_projection));
        } catch (const NotClosed& e) {
            run.note(std::string(name) + " skipped: " + e.what());
        }
    };
    try_mesh("initial_mesh.obj", state.data);

    bool blowup = false;
    int warnings = 0;
    for (int s = 1; s <= steps; ++s) {
        StepInfo info;
        try {
            state = flow_step(state, opt, &info);
        } catch (const NumericalBlowup& e) {
            InvariantRecord bad;
            bad.t = state.t + c.dt;
            bad.willmore = std::nan("");
            recs.push_back(bad);
            run.note(std::string("aborted: ") + e.what());
            blowup = true;
            break;
        }
        if (info.stiffness_warning) ++warnings;
        if (s % c.monitor_every == 0 || s == steps) recs.push_back(monitor(state));
    }
    run.timings["flow"] = t.ms();
    run.write("trace.csv", export_trace(recs));

    if (!blowup) {
        try_mesh("final_mesh.obj", state.data);

        double wdrift = 0.0, vdrift = 0.0, jdrift = 0.0;
        for (const auto& r : recs) {
            wdrift = std::max(wdrift, std::abs(r.willmore - w0) / std::max(std::abs(w0), 1e-30));
            for (int k = 0; k < 4; ++k)
                for (int gidx = 0; gidx < 2; ++gidx)
                    vdrift = std::max(vdrift,
                                      std::abs(r.period_vectors[static_cast<size_t>(k)][static_cast<size_t>(gidx)] -
                                               recs.front().period_vectors[static_cast<size_t>(k)][static_cast<size_t>(gidx)]));
            for (int k = 0; k < 4; ++k)
                jdrift = std::max(jdrift, std::abs(r.closure_integrals[static_cast<size_t>(k)] -
                                                   recs.front().closure_integrals[static_cast<size_t>(k)]));
        }
        run.check("flow.willmore_drift", wdrift, c.conservation_tol);
        run.check("flow.period_drift", vdrift, c.conservation_tol);
        run.check("flow.closure_drift", jdrift, c.conservation_tol);
        if (warnings > 0) {
            run.note(std::to_string(warnings) + " stiffness warnings (u moved >10% in a step)");
            if (c.strict) run.check("flow.stiffness_warnings", warnings, 0.0);
        }
    } else {
        run.check("flow.finite", 1.0, 0.0); // blowup forces failure
    }
}

void run_spectral_scan(Runner& run) {
    const auto& c = run.cfg;
    GridPtr grid = config_grid(c);
    Timer t;
    PeriodicField U(grid, c.spectral_potential);
    if (!c.modes.empty()) U += field_from_mode_list(grid, c.modes);
    U = dealias(U);

    ScanOptions opt;
    opt.resolution1 = c.resolution[0];
    opt.resolution2 = c.resolution[1];
    opt.cutoff = c.cutoff;
    ScanWindow window = c.window ? *c.window : dual_cell_window(*grid);
    ScanResult scan = scan_zero_set(U, window, opt);
    run.timings["scan"] = t.ms();

    run.write("spectrum.csv", export_spectral_csv(scan.samples));
    if (scan.empty_zero_set) {
        run.note("empty zero set in the scanned window");
    } else {
        double mu_dev = 0.0;
        for (const auto& s : scan.samples)
            mu_dev = std::max({mu_dev, std::abs(std::abs(s.mu1) - 1.0),
                               std::abs(std::abs(s.mu2) - 1.0)});
        run.check("scan.multiplier_modulus", mu_dev, 1e-10);
        run.note("samples: " + std::to_string(scan.samples.size()));
    }
}

} // namespace

RunResult run_scenario(const ScenarioConfig& config) {
    Runner run(config);
    switch (config.scenario) {
        case ScenarioKind::clifford: run_lift_like(run, false); break;
        case ScenarioKind::gauge_family: run_lift_like(run, true); break;
        case ScenarioKind::constant_potential: run_constant_potential(run); break;
        case ScenarioKind::spectral_scan: run_spectral_scan(run); break;
        default: run_flow(run); break;
    }
    run.finish();
    return run.result;
}

} // namespace dst
