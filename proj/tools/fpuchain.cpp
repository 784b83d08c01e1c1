#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fpu/dynamics.hpp"
#include "fpu/errors.hpp"
#include "fpu/fiber.hpp"
#include "fpu/lattice.hpp"
#include "fpu/normalform.hpp"
#include "fpu/transform.hpp"
#include "json.hpp"
#include "validate.hpp"

using json = nlohmann::ordered_json;

namespace {

struct Common {
    std::string out;
    std::string format;
};

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(r);
    }
    return rows;
}

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

json complex_json(const std::vector<std::complex<double>>& ev) {
    json a = json::array();
    for (const auto& z : ev) a.push_back({z.real(), z.imag()});
    return a;
}

// --out, else $FPU_OUT_DIR/<name>, else stdout.
void emit(const std::string& out, const std::string& default_name, const std::string& body) {
    std::string path = out;
    if (path.empty()) {
        if (const char* dir = std::getenv("FPU_OUT_DIR"); dir && *dir) path = std::string(dir) + "/" + default_name;
    }
    if (path.empty()) {
        std::cout << body;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw fpu::PreconditionError("cannot open output file " + path);
    f << body;
}

void emit_json(const Common& c, const std::string& name, const json& j) {
    emit(c.out, name + ".json", j.dump(2) + "\n");
}

std::string csv_header(const json& config) { return "# config: " + config.dump() + "\n"; }

void check_format(const std::string& f, bool csv_ok) {
    if (f != "json" && !(csv_ok && f == "csv"))
        throw CLI::ValidationError("--format", "unsupported format '" + f + "'");
}

// ---------------------------------------------------------------- spectrum

struct SpectrumArgs {
    std::vector<double> masses;
    bool inverse = false;
};

void run_spectrum(const Common& c, const SpectrumArgs& a) {
    check_format(c.format, false);
    fpu::Vec v = Eigen::Map<const fpu::Vec>(a.masses.data(), Eigen::Index(a.masses.size()));
    const fpu::Vec inv = a.inverse ? v : fpu::inverse_from_masses(v);
    const fpu::Spectrum s = fpu::spectrum(inv);
    const auto cp = fpu::char_poly_identities(inv);
    json config{{"subcommand", "spectrum"}, {"values", a.masses}, {"inverse", a.inverse}};
    json j{{"config", config},
           {"inverse_masses", vector_json(inv)},
           {"eigenvalues", vector_json(s.values)},
           {"eigenvectors", matrix_json(s.vectors)},
           {"zero_index", s.zero_index},
           {"char_poly", {{"p_nm1", cp.p_nm1}, {"p_nm2", cp.p_nm2}}}};
    emit_json(c, "spectrum", j);
}

// ---------------------------------------------------------------- fiber

struct FiberArgs {
    std::string ratio;
    double u = NAN, eta2 = NAN;
    bool classify = false, spherical = false;
    int grid = 10000, samples = 50;
};

json point_json(const fpu::FiberPoint& p, bool spherical) {
    json j{{"a", p.a}, {"parameter", p.parameter}, {"stabilizer", p.stabilizer}};
    if (spherical) {
        const auto sc = fpu::spherical_coords(p.a);
        j["spherical"] = {{"phi", sc.phi}, {"psi", sc.psi}, {"rho", sc.rho}, {"x", sc.x}};
    }
    return j;
}

json end_json(const fpu::BranchEnd& e) {
    return {{"eta2", e.eta2}, {"kind", fpu::to_string(e.kind)}, {"a", e.a}, {"degenerate", e.degenerate}};
}

void run_fiber(const Common& c, const FiberArgs& a) {
    check_format(c.format, true);
    const int modes = int(!std::isnan(a.u)) + int(!std::isnan(a.eta2)) + int(a.classify);
    if (modes != 1) throw CLI::ValidationError("fiber", "give exactly one of --u, --eta2, --classify");
    const fpu::Ratio r = fpu::parse_ratio(a.ratio);
    const fpu::XiEta xe = fpu::xi_eta(fpu::target_spectrum(r));
    json config{{"subcommand", "fiber"}, {"ratio", fpu::to_string(r)}, {"spherical", a.spherical},
                {"format", c.format}};

    std::vector<fpu::FiberPoint> rows;  // for csv
    json j{{"config", nullptr}, {"xi", xe.xi}, {"eta", xe.eta}};
    if (!std::isnan(a.u)) {
        if (fpu::canonical_ratio(1, 2, 3).n != r.n) throw fpu::DomainError("--u is only defined for 1:2:3");
        config["u"] = a.u;
        const auto p = fpu::fiber123(a.u);
        j["point"] = point_json(p, a.spherical);
        rows.push_back(p);
    } else if (!std::isnan(a.eta2)) {
        config["eta2"] = a.eta2;
        const auto pts = fpu::solve_fiber_at(xe.xi, xe.eta, a.eta2);
        j["points"] = json::array();
        for (const auto& p : pts) j["points"].push_back(point_json(p, a.spherical));
        rows = pts;
    } else {
        config["classify"] = true;
        config["grid"] = a.grid;
        const auto rt = fpu::region_tests(xe.xi, xe.eta);
        const auto cl = fpu::fiber_classify(xe.xi, xe.eta, a.grid);
        j["region"] = {{"T", rt.T},           {"in_image", rt.in_image},       {"nonempty", rt.nonempty},
                       {"compact", rt.compact}, {"noncompact", rt.noncompact},
                       {"on_exceptional_line", rt.on_exceptional_line}};
        j["kind"] = fpu::to_string(cl.kind);
        j["count"] = cl.count;
        j["branches"] = json::array();
        for (const auto& b : cl.branches) j["branches"].push_back({{"lo", end_json(b.lo)}, {"hi", end_json(b.hi)}});
        j["points"] = json::array();
        for (const auto& p : cl.points) j["points"].push_back(point_json(p, a.spherical));
        j["components"] = json::array();
        for (const auto& m : cl.components) j["components"].push_back({{"open", m.open}, {"pieces", m.pieces}});
        j["isolated_total"] = cl.isolated_total;
        if (c.format == "csv") {
            config["samples"] = a.samples;
            for (const auto& b : cl.branches)
                for (int k = 0; k < a.samples; ++k)
                    rows.push_back(b.sample(a.samples == 1 ? 0.5 : double(k) / (a.samples - 1)));
            for (const auto& p : cl.points) rows.push_back(p);
        }
    }
    j["config"] = config;
    if (c.format == "json") {
        emit_json(c, "fiber", j);
        return;
    }
    std::string body = csv_header(config) + "param,a1,a2,a3,a4,phi,psi\n";
    for (const auto& p : rows) {
        std::string phi = "nan", psi = "nan";
        try {
            const auto sc = fpu::spherical_coords(p.a);
            phi = g17(sc.phi);
            psi = g17(sc.psi);
        } catch (const fpu::UndefinedAnglesError&) {
        }
        body += g17(p.parameter) + "," + g17(p.a[0]) + "," + g17(p.a[1]) + "," + g17(p.a[2]) + "," + g17(p.a[3]) +
                "," + phi + "," + psi + "\n";
    }
    emit(c.out, "fiber.csv", body);
}

// ---------------------------------------------------------------- transform

struct TransformArgs {
    double u = 0.0;
    std::string emit = "all";
    double alpha = 1.0;
};

void run_transform(const Common& c, const TransformArgs& a) {
    check_format(c.format, false);
    const fpu::TransformPair t = fpu::transform_for_u(a.u);
    json j{{"config", {{"subcommand", "transform"}, {"u", a.u}, {"emit", a.emit}, {"alpha", a.alpha}}},
           {"u", a.u},
           {"lambda", vector_json(t.lambda)}};
    if (a.emit == "K" || a.emit == "all") j["K"] = matrix_json(t.K);
    if (a.emit == "L" || a.emit == "all") j["L"] = matrix_json(t.L);
    if (a.emit == "dcoeffs" || a.emit == "all") {
        const auto tab = fpu::cubic_from_table(a.u, a.alpha);
        const auto num = fpu::cubic_from_transform(t.L, a.alpha);
        json d = json::array();
        for (int i = 0; i < 10; ++i)
            d.push_back({{"name", "d" + std::to_string(i + 1)},
                         {"monomial", fpu::kMonomialNames[i]},
                         {"table", tab.d[i]},
                         {"transform", num.d[i]}});
        j["dcoeffs"] = d;
    }
    emit_json(c, "transform", j);
}

// ---------------------------------------------------------------- stability

struct StabilityArgs {
    double u = NAN, d6 = NAN, d9 = NAN;
    std::string mode = "2";
    double A = 1.0, B = 0.0, E0 = 7.0;
    std::string scan;
    int grid = 200;
};

json report_json(const fpu::StabilityReport& r) {
    return {{"class", fpu::to_string(r.cls)}, {"eigenvalues", complex_json(r.eigenvalues)},
            {"scale", r.scale_per_eps}};
}

void run_stability(const Common& c, const StabilityArgs& a) {
    check_format(c.format, false);
    json config{{"subcommand", "stability"}, {"mode", a.mode}, {"A", a.A}, {"B", a.B}};
    json j;
    if (!a.scan.empty()) {
        double u0, u1;
        int steps;
        char x, y;
        std::istringstream ss(a.scan);
        if (!(ss >> u0 >> x >> u1 >> y >> steps) || x != ':' || y != ':' || steps < 1 || !ss.eof())
            throw CLI::ValidationError("--scan", "expected u0:u1:steps");
        std::vector<double> g;
        for (int i = 0; i < steps; ++i) g.push_back(steps == 1 ? u0 : u0 + (u1 - u0) * i / (steps - 1));
        if (a.mode != "2") throw CLI::ValidationError("--scan", "scans follow the x2 mode only");
        config["scan"] = a.scan;
        j["config"] = config;
        j["scan"] = json::array();
        for (const auto& h : fpu::hopf_scan(g, a.A, a.B)) {
            json e = report_json(h.report);
            e["u"] = h.u;
            e["d6"] = h.d6;
            e["d9"] = h.d9;
            j["scan"].push_back(e);
        }
        emit_json(c, "stability", j);
        return;
    }
    double d6 = a.d6, d9 = a.d9;
    if (!std::isnan(a.u)) {
        const auto cc = fpu::cubic_from_table(a.u);
        if (std::isnan(d6)) d6 = cc(6);
        if (std::isnan(d9)) d9 = cc(9);
        config["u"] = a.u;
    }
    if (std::isnan(d6) || std::isnan(d9)) throw CLI::ValidationError("stability", "give --u or both --d6 and --d9");
    config["d6"] = d6;
    config["d9"] = d9;
    if (a.mode == "general") {
        config["E0"] = a.E0;
        config["grid"] = a.grid;
        j["config"] = config;
        j["solutions"] = json::array();
        for (const auto& s : fpu::find_periodic_general(a.E0, d9 / d6, a.grid))
            j["solutions"].push_back({{"r", s.r},
                                      {"chi1", s.chi1},
                                      {"chi2", s.chi2},
                                      {"residual", s.residual},
                                      {"stability", report_json(s.stability)}});
        emit_json(c, "stability", j);
        return;
    }
    const fpu::ModeKind m = fpu::parse_mode(a.mode);
    j["config"] = config;
    j.update(report_json(fpu::normal_mode_stability(m, d6, d9, a.A, a.B)));
    if (m == fpu::ModeKind::Mode2) {
        const auto l2 = fpu::mode2_lambda_squared(d6, d9, a.A, a.B);
        j["lambda_squared"] = complex_json({l2[0], l2[1]});
        j["condition_C"] = d6 * d6 > 6 * d9 * d9;
    }
    if (m == fpu::ModeKind::Edge) {
        const auto e = fpu::edge_family(a.A, a.B, d6, d9);
        j["edge"] = {{"C", e.C}, {"D", e.D}};
    }
    emit_json(c, "stability", j);
}

// ---------------------------------------------------------------- simulate / ensemble

struct SystemOverrides {
    std::string preset = "case0";
    double eps = NAN, d6 = NAN, d9 = NAN, alpha = NAN, a2 = NAN, a3 = NAN, b = NAN;
    std::vector<double> masses;  // inverse masses for the chain
    double rtol = 1e-10, atol = 1e-10;
};

json spec_json(const fpu::SystemSpec& s) {
    json j{{"kind", fpu::kind_name(s)}, {"eps", s.eps}};
    std::visit(
        [&](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, fpu::FullChain>) {
                j["a"] = vector_json(k.a);
                j["alpha"] = k.alpha;
            } else if constexpr (std::is_same_v<K, fpu::Modal>) {
                j["d"] = k.d;
            } else if constexpr (std::is_same_v<K, fpu::ComparisonHHC>) {
                j["a2"] = k.a2;
                j["a3"] = k.a3;
                j["b"] = k.b;
            } else {
                j["d6"] = k.d6;
                j["d9"] = k.d9;
            }
        },
        s.kind);
    return j;
}

void apply_overrides(fpu::SystemSpec& s, const SystemOverrides& o) {
    if (!std::isnan(o.eps)) s.eps = o.eps;
    std::visit(
        [&](auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, fpu::FullChain>) {
                if (!std::isnan(o.alpha)) k.alpha = o.alpha;
                if (!o.masses.empty()) {
                    if (o.masses.size() != 4) throw fpu::DimensionError("--masses needs four inverse masses");
                    k.a = Eigen::Vector4d(o.masses[0], o.masses[1], o.masses[2], o.masses[3]);
                }
            } else if constexpr (std::is_same_v<K, fpu::ComparisonHHC>) {
                if (!std::isnan(o.a2)) k.a2 = o.a2;
                if (!std::isnan(o.a3)) k.a3 = o.a3;
                if (!std::isnan(o.b)) k.b = o.b;
            } else if constexpr (std::is_same_v<K, fpu::Modal>) {
                if (!std::isnan(o.d6)) k.d[5] = o.d6;
                if (!std::isnan(o.d9)) k.d[8] = o.d9;
            } else {
                if (!std::isnan(o.d6)) k.d6 = o.d6;
                if (!std::isnan(o.d9)) k.d9 = o.d9;
            }
        },
        s.kind);
    fpu::check_spec(s);
}

std::vector<std::string> state_names(const fpu::SystemSpec& s) {
    if (std::holds_alternative<fpu::FullChain>(s.kind)) return {"q1", "q2", "q3", "q4", "v1", "v2", "v3", "v4"};
    if (std::holds_alternative<fpu::AveragedNF>(s.kind)) return {"y1", "y2", "z1", "z2", "u1", "u2"};
    return {"x1", "x2", "x3", "v1", "v2", "v3"};
}

struct SimulateArgs {
    SystemOverrides sys;
    double T = NAN, dt = NAN, leapfrog = 0.0;
    std::vector<double> x0;
};

std::string trajectory_csv(const json& config, const fpu::SystemSpec& spec,
                           const std::vector<fpu::TrajectoryRecord>& recs) {
    std::string body = csv_header(config) + "t";
    for (const auto& n : state_names(spec)) body += "," + n;
    body += ",H,H2,momentum,tau1,tau2,tau3\n";
    for (const auto& r : recs) {
        body += g17(r.t);
        for (double v : r.state) body += "," + g17(v);
        body += "," + g17(r.H) + "," + g17(r.H2) + "," + g17(r.momentum);
        for (double v : r.tau) body += "," + g17(v);
        body += "\n";
    }
    return body;
}

json trajectory_json(const json& config, const std::vector<fpu::TrajectoryRecord>& recs) {
    json rows = json::array();
    for (const auto& r : recs)
        rows.push_back({{"t", r.t}, {"state", r.state}, {"H", r.H}, {"H2", r.H2},
                        {"momentum", std::isnan(r.momentum) ? json(nullptr) : json(r.momentum)}, {"tau", r.tau}});
    return {{"config", config}, {"records", rows}};
}

void run_simulate(const Common& c, const SimulateArgs& a) {
    check_format(c.format, true);
    fpu::Preset p = fpu::preset(a.sys.preset);
    apply_overrides(p.spec, a.sys);
    if (!std::isnan(a.T)) p.T = a.T;
    if (!std::isnan(a.dt)) p.sample_dt = a.dt;
    if (!a.x0.empty()) p.state0 = Eigen::Map<const Eigen::VectorXd>(a.x0.data(), Eigen::Index(a.x0.size()));
    json config{{"subcommand", "simulate"}, {"preset", p.name},  {"system", spec_json(p.spec)},
                {"state0", vector_json(p.state0)}, {"T", p.T}, {"sample_dt", p.sample_dt},
                {"method", a.leapfrog > 0 ? "leapfrog" : "dopri5"}};
    if (a.leapfrog > 0) {
        config["step"] = a.leapfrog;
    } else {
        config["rtol"] = a.sys.rtol;
        config["atol"] = a.sys.atol;
    }

    std::vector<fpu::TrajectoryRecord> recs;
    try {
        if (a.leapfrog > 0) {
            recs = fpu::leapfrog(p.spec, p.state0, p.T, a.leapfrog, p.sample_dt);
        } else {
            fpu::OdeOptions o;
            o.rtol = a.sys.rtol;
            o.atol = a.sys.atol;
            recs = fpu::integrate(p.spec, p.state0, p.T, p.sample_dt, o);
        }
    } catch (const fpu::IntegrationFailure& e) {
        // keep what was computed, then report the failure
        for (std::size_t i = 0; i < e.partial().t.size(); ++i)
            recs.push_back(fpu::make_record(p.spec, e.partial().t[i], e.partial().y[i]));
        config["failed_at"] = e.failed_at();
        if (c.format == "json")
            emit_json(c, "simulate", trajectory_json(config, recs));
        else
            emit(c.out, "simulate.csv", trajectory_csv(config, p.spec, recs));
        throw;
    }
    if (c.format == "json")
        emit_json(c, "simulate", trajectory_json(config, recs));
    else
        emit(c.out, "simulate.csv", trajectory_csv(config, p.spec, recs));
}

struct EnsembleArgs {
    SystemOverrides sys;
    int vertex = 1, count = 98;
    double spread = -1.0, H2 = 4.5;
    std::uint64_t seed = 0;
    std::vector<double> times{0, 225, 450};
};

void run_ensemble(const Common& c, const EnsembleArgs& a) {
    check_format(c.format, true);
    fpu::Preset p = fpu::preset(a.sys.preset);
    SystemOverrides o = a.sys;
    if (std::isnan(o.eps)) o.eps = 0.2;
    apply_overrides(p.spec, o);
    fpu::EnsembleSpec e;
    e.vertex = a.vertex;
    e.count = a.count;
    e.spread = a.spread;
    e.seed = a.seed;
    e.H2 = a.H2;
    fpu::OdeOptions opt;
    opt.rtol = o.rtol;
    opt.atol = o.atol;
    const double spread = a.spread < 0 ? 0.05 * std::sqrt(2 * a.H2) : a.spread;
    json config{{"subcommand", "ensemble"}, {"preset", p.name}, {"system", spec_json(p.spec)},
                {"vertex", a.vertex}, {"count", a.count}, {"spread", spread}, {"H2", a.H2},
                {"seed", a.seed}, {"times", a.times}, {"rtol", o.rtol}, {"atol", o.atol}};
    const auto snaps = fpu::ensemble_simplex(p.spec, e, a.times, opt);
    if (c.format == "json") {
        json s = json::array();
        for (const auto& sn : snaps) s.push_back({{"t", sn.t}, {"points", sn.points}});
        emit_json(c, "ensemble", {{"config", config}, {"snapshots", s}});
        return;
    }
    std::string body = csv_header(config) + "t,index,s1,s2,s3\n";
    for (const auto& sn : snaps)
        for (std::size_t i = 0; i < sn.points.size(); ++i)
            body += g17(sn.t) + "," + std::to_string(i) + "," + g17(sn.points[i][0]) + "," + g17(sn.points[i][1]) +
                    "," + g17(sn.points[i][2]) + "\n";
    emit(c.out, "ensemble.csv", body);
}

// ---------------------------------------------------------------- validate

int run_validate(const Common& c) {
    check_format(c.format, false);
    json report{{"config", {{"subcommand", "validate"}}}};
    std::ostringstream text;
    const bool ok = run_validation(report, text);
    std::cout << text.str();
    if (!c.out.empty() || std::getenv("FPU_OUT_DIR")) emit_json(c, "validate", report);
    return ok ? 0 : 1;
}

void add_system_flags(CLI::App* s, SystemOverrides& o) {
    s->add_option("--preset", o.preset, "preset name")->capture_default_str();
    s->add_option("--eps", o.eps, "perturbation parameter");
    s->add_option("--d6", o.d6);
    s->add_option("--d9", o.d9);
    s->add_option("--alpha", o.alpha, "chain cubic coupling");
    s->add_option("--masses", o.masses, "chain inverse masses a1,a2,a3,a4")->delimiter(',');
    s->add_option("--a2", o.a2);
    s->add_option("--a3", o.a3);
    s->add_option("--b", o.b);
    s->add_option("--rtol", o.rtol)->capture_default_str();
    s->add_option("--atol", o.atol)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic FPU chain with four particles: spectra, fibers, modal reduction, dynamics"};
    app.require_subcommand(1);
    Common common;
    common.format = "json";
    auto add_common = [&](CLI::App* s, const std::string& def_format) {
        s->add_option("--out", common.out, "output file (default $FPU_OUT_DIR/<subcommand>.<ext> or stdout)");
        s->add_option("--format", common.format, "json or csv")->default_str(def_format);
    };

    SpectrumArgs sa;
    auto* sp = app.add_subcommand("spectrum", "eigenvalues of A C for given masses");
    sp->add_option("--masses", sa.masses, "comma separated masses (or inverse masses with --inverse)")
        ->delimiter(',')
        ->required();
    sp->add_flag("--inverse", sa.inverse, "values are inverse masses a_j");
    add_common(sp, "json");

    FiberArgs fa;
    auto* fb = app.add_subcommand("fiber", "mass distributions with a prescribed frequency ratio");
    fb->add_option("--ratio", fa.ratio, "n1:n2:n3")->required();
    fb->add_option("--u", fa.u, "parameter of the 1:2:3 branch");
    fb->add_option("--eta2", fa.eta2);
    fb->add_flag("--classify", fa.classify);
    fb->add_flag("--spherical", fa.spherical);
    fb->add_option("--grid", fa.grid)->capture_default_str();
    fb->add_option("--samples", fa.samples, "csv samples per branch")->capture_default_str();
    add_common(fb, "json");

    TransformArgs ta;
    auto* tr = app.add_subcommand("transform", "modal transformation and cubic coefficients on the 1:2:3 branch");
    tr->add_option("--u", ta.u)->required();
    tr->add_option("--emit", ta.emit)->check(CLI::IsMember({"K", "L", "dcoeffs", "all"}))->capture_default_str();
    tr->add_option("--alpha", ta.alpha)->capture_default_str();
    add_common(tr, "json");

    StabilityArgs st;
    auto* sb = app.add_subcommand("stability", "linear stability of normal-form periodic solutions");
    sb->add_option("--u", st.u);
    sb->add_option("--d6", st.d6);
    sb->add_option("--d9", st.d9);
    sb->add_option("--mode", st.mode, "1, 2, 3, edge or general")
        ->check(CLI::IsMember({"1", "2", "3", "edge", "general"}))
        ->capture_default_str();
    sb->add_option("--A", st.A)->capture_default_str();
    sb->add_option("--B", st.B)->capture_default_str();
    sb->add_option("--E0", st.E0)->capture_default_str();
    sb->add_option("--grid", st.grid)->capture_default_str();
    sb->add_option("--scan", st.scan, "u0:u1:steps");
    add_common(sb, "json");

    SimulateArgs si;
    auto* sm = app.add_subcommand("simulate", "integrate one trajectory");
    add_system_flags(sm, si.sys);
    sm->add_option("--T", si.T);
    sm->add_option("--dt", si.dt, "sampling interval");
    sm->add_option("--x0", si.x0, "initial state, comma separated")->delimiter(',');
    sm->add_option("--leapfrog", si.leapfrog, "fixed step; selects the leapfrog integrator");
    add_common(sm, "csv");

    EnsembleArgs ea;
    auto* en = app.add_subcommand("ensemble", "action-simplex snapshots of an ensemble near a normal mode");
    add_system_flags(en, ea.sys);
    en->add_option("--vertex", ea.vertex)->check(CLI::Range(1, 3))->capture_default_str();
    en->add_option("--count", ea.count)->capture_default_str();
    en->add_option("--spread", ea.spread, "default 0.05 sqrt(2 H2)");
    en->add_option("--H2", ea.H2)->capture_default_str();
    en->add_option("--seed", ea.seed)->capture_default_str();
    en->add_option("--times", ea.times)->delimiter(',');
    add_common(en, "csv");

    auto* va = app.add_subcommand("validate", "cross-oracle suite");
    add_common(va, "json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    for (CLI::App* s : {sm, en})
        if (s->parsed() && s->get_option("--format")->count() == 0) common.format = "csv";

    try {
        if (sp->parsed()) run_spectrum(common, sa);
        if (fb->parsed()) run_fiber(common, fa);
        if (tr->parsed()) run_transform(common, ta);
        if (sb->parsed()) run_stability(common, st);
        if (sm->parsed()) run_simulate(common, si);
        if (en->parsed()) run_ensemble(common, ea);
        if (va->parsed()) return run_validate(common);
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    } catch (const fpu::Error& e) {
        std::cerr << json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
    return 0;
}
