#include "fpu/dynamics.hpp"

#include <boost/random/sobol.hpp>
#include <boost/random/uniform_01.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "fpu/errors.hpp"
#include "fpu/normalform.hpp"
#include "fpu/transform.hpp"

namespace fpu {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::array<double, 3> kOmega{3.0, 2.0, 1.0};

Modal as_modal(const IntermediateNF& n) {
    Modal m;
    m.d[5] = n.d6;
    m.d[8] = n.d9;
    return m;
}

std::array<double, 3> cubic_gradient(const std::array<double, 10>& d, double x1, double x2, double x3) {
    return {3 * d[0] * x1 * x1 + 2 * d[1] * x1 * x2 + 2 * d[2] * x1 * x3 + d[3] * x2 * x2 + d[4] * x3 * x3 +
                d[5] * x2 * x3,
            d[1] * x1 * x1 + 2 * d[3] * x1 * x2 + d[5] * x1 * x3 + 3 * d[6] * x2 * x2 + d[8] * x3 * x3 +
                2 * d[9] * x2 * x3,
            d[2] * x1 * x1 + 2 * d[4] * x1 * x3 + d[5] * x1 * x2 + 3 * d[7] * x3 * x3 + 2 * d[8] * x2 * x3 +
                d[9] * x2 * x2};
}

double cubic(const std::array<double, 10>& d, double x1, double x2, double x3) {
    CubicCoefficients c;
    c.d = d;
    return cubic_value(c, x1, x2, x3);
}

void check_dim(const SystemSpec& s, const Eigen::VectorXd& x) {
    if (x.size() != state_dim(s))
        throw DimensionError(std::string(kind_name(s)) + " expects a state of length " +
                             std::to_string(state_dim(s)) + ", got " + std::to_string(x.size()));
}

Eigen::VectorXd modal_rhs(const Modal& m, double eps, const Eigen::VectorXd& x) {
    const auto g = cubic_gradient(m.d, x[0], x[1], x[2]);
    Eigen::VectorXd f(6);
    f << x[3], x[4], x[5], -9 * x[0] - 14 * eps * g[0], -4 * x[1] - 14 * eps * g[1],
        -x[2] - 14 * eps * g[2];
    return f;
}

// Pairs (P_i, Q_i) with E_i = (P_i^2 + Q_i^2) / 2, three-dof systems only.
std::array<double, 6> normalized(const SystemSpec& s, const Eigen::VectorXd& x) {
    return std::visit(
        overloaded{
            [&](const FullChain&) -> std::array<double, 6> {
                throw PreconditionError("the chain has no three-mode normalised coordinates");
            },
            [&](const ComparisonHHC&) -> std::array<double, 6> {
                std::array<double, 6> n{};
                for (int k = 0; k < 3; ++k) {
                    const double w = std::sqrt(k + 1.0);
                    n[2 * k] = w * x[k];
                    n[2 * k + 1] = x[3 + k] / w;
                }
                return n;
            },
            [&](const AveragedNF&) -> std::array<double, 6> {
                return {3 * x[0], x[1], 2 * x[2], x[3], x[4], x[5]};
            },
            [&](const auto&) -> std::array<double, 6> {
                return {3 * x[0], x[3], 2 * x[1], x[4], x[2], x[5]};
            }},
        s.kind);
}

Eigen::VectorXd from_normalized(const SystemSpec& s, const std::array<double, 6>& n) {
    Eigen::VectorXd x(6);
    std::visit(overloaded{[&](const FullChain&) {
                              throw PreconditionError("the chain has no three-mode normalised coordinates");
                          },
                          [&](const ComparisonHHC&) {
                              for (int k = 0; k < 3; ++k) {
                                  const double w = std::sqrt(k + 1.0);
                                  x[k] = n[2 * k] / w;
                                  x[3 + k] = n[2 * k + 1] * w;
                              }
                          },
                          [&](const AveragedNF&) { x << n[0] / 3, n[1], n[2] / 2, n[3], n[4], n[5]; },
                          [&](const auto&) { x << n[0] / 3, n[2] / 2, n[4], n[1], n[3], n[5]; }},
               s.kind);
    return x;
}

}  // namespace

const char* kind_name(const SystemSpec& s) {
    return std::visit(overloaded{[](const FullChain&) { return "FullChain"; },
                                 [](const Modal&) { return "Modal"; },
                                 [](const IntermediateNF&) { return "IntermediateNF"; },
                                 [](const ComparisonHHC&) { return "ComparisonHHC"; },
                                 [](const AveragedNF&) { return "AveragedNF"; }},
                      s.kind);
}

int state_dim(const SystemSpec& s) { return std::holds_alternative<FullChain>(s.kind) ? 8 : 6; }

void check_spec(const SystemSpec& s) {
    if (!(s.eps >= 0) || !std::isfinite(s.eps)) throw DomainError("eps must be finite and >= 0");
    if (const auto* c = std::get_if<FullChain>(&s.kind)) {
        for (int i = 0; i < 4; ++i)
            if (!(c->a[i] > 0) || !std::isfinite(c->a[i])) throw DomainError("inverse masses must be positive");
        if (!std::isfinite(c->alpha)) throw DomainError("alpha must be finite");
    }
}

Eigen::VectorXd rhs(const SystemSpec& s, const Eigen::VectorXd& x) {
    check_dim(s, x);
    const double eps = s.eps;
    return std::visit(
        overloaded{
            [&](const FullChain& c) {
                Eigen::VectorXd f(8);
                for (int j = 0; j < 4; ++j) {
                    const double q = x[j], qp = x[(j + 1) % 4], qm = x[(j + 3) % 4];
                    f[j] = x[4 + j];
                    f[4 + j] = c.a[j] * (qp - 2 * q + qm - eps * c.alpha * ((q - qm) * (q - qm) - (qp - q) * (qp - q)));
                }
                return f;
            },
            [&](const Modal& m) { return modal_rhs(m, eps, x); },
            [&](const IntermediateNF& n) { return modal_rhs(as_modal(n), eps, x); },
            [&](const ComparisonHHC& h) {
                const double q1 = x[0], q2 = x[1], q3 = x[2];
                Eigen::VectorXd f(6);
                f << x[3], x[4], x[5], -q1 + eps * (2 * q1 * (h.a2 * q2 + h.a3 * q3) + h.b * q2 * q3),
                    2 * (-2 * q2 + eps * (h.a2 * q1 * q1 + h.b * q1 * q3)),
                    3 * (-3 * q3 + eps * (h.a3 * q1 * q1 + h.b * q1 * q2));
                return f;
            },
            [&](const AveragedNF& a) {
                CoMovingState c;
                for (int i = 0; i < 6; ++i) c[i] = x[i];
                const auto d = nf_comoving_rhs(c, a.d6, a.d9, eps);
                return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(d.data(), 6));
            }},
        s.kind);
}

double h2_of_state(const SystemSpec& s, const Eigen::VectorXd& x) {
    check_dim(s, x);
    if (const auto* c = std::get_if<FullChain>(&s.kind)) {
        double e = 0.0;
        for (int j = 0; j < 4; ++j) {
            const double z = x[(j + 1) % 4] - x[j];
            e += x[4 + j] * x[4 + j] / (2 * c->a[j]) + z * z / 2;
        }
        return e;
    }
    const auto m = mode_energies(s, x);
    return m[0] + m[1] + m[2];
}

double energy(const SystemSpec& s, const Eigen::VectorXd& x) {
    const double h2 = h2_of_state(s, x);
    const double eps = s.eps;
    return std::visit(overloaded{[&](const FullChain& c) {
                                     double e = 0.0;
                                     for (int j = 0; j < 4; ++j) {
                                         const double z = x[(j + 1) % 4] - x[j];
                                         e += z * z * z;
                                     }
                                     return h2 + eps * c.alpha / 3 * e;
                                 },
                                 [&](const Modal& m) { return h2 + 14 * eps * cubic(m.d, x[0], x[1], x[2]); },
                                 [&](const IntermediateNF& n) {
                                     return h2 + 14 * eps * cubic(as_modal(n).d, x[0], x[1], x[2]);
                                 },
                                 [&](const ComparisonHHC& h) {
                                     const double q1 = x[0], q2 = x[1], q3 = x[2];
                                     return h2 - eps * q1 * q1 * (h.a2 * q2 + h.a3 * q3) - eps * h.b * q1 * q2 * q3;
                                 },
                                 // the co-moving averaged flow conserves H2 itself
                                 [&](const AveragedNF&) { return h2; }},
                      s.kind);
}

double momentum(const SystemSpec& s, const Eigen::VectorXd& x) {
    check_dim(s, x);
    const auto* c = std::get_if<FullChain>(&s.kind);
    if (!c) return std::numeric_limits<double>::quiet_NaN();
    double p = 0.0;
    for (int j = 0; j < 4; ++j) p += x[4 + j] / c->a[j];
    return p;
}

std::array<double, 3> frequencies(const SystemSpec& s) {
    if (const auto* c = std::get_if<FullChain>(&s.kind)) {
        const TransformPair t = transform_numeric(c->a);
        return {std::sqrt(t.lambda[0]), std::sqrt(t.lambda[1]), std::sqrt(t.lambda[2])};
    }
    if (std::holds_alternative<ComparisonHHC>(s.kind)) return {1.0, 2.0, 3.0};
    return kOmega;
}

std::array<double, 3> mode_energies(const SystemSpec& s, const Eigen::VectorXd& x) {
    check_dim(s, x);
    if (const auto* c = std::get_if<FullChain>(&s.kind)) {
        // q = L xi, L = A K and K^T A K = I, hence xi = K^T q and likewise for velocities.
        const TransformPair t = transform_numeric(c->a);
        const Eigen::Vector4d xi = t.K.transpose() * x.head<4>();
        const Eigen::Vector4d eta = t.K.transpose() * x.tail<4>();
        return {0.5 * (eta[0] * eta[0] + t.lambda[0] * xi[0] * xi[0]),
                0.5 * (eta[1] * eta[1] + t.lambda[1] * xi[1] * xi[1]),
                0.5 * (eta[2] * eta[2] + t.lambda[2] * xi[2] * xi[2])};
    }
    const auto n = normalized(s, x);
    return {0.5 * (n[0] * n[0] + n[1] * n[1]), 0.5 * (n[2] * n[2] + n[3] * n[3]),
            0.5 * (n[4] * n[4] + n[5] * n[5])};
}

std::array<double, 3> actions(const SystemSpec& s, const Eigen::VectorXd& x) {
    const auto e = mode_energies(s, x);
    const auto w = frequencies(s);
    return {e[0] / w[0], e[1] / w[1], e[2] / w[2]};
}

std::array<double, 3> simplex_point(const SystemSpec& s, const Eigen::VectorXd& x) {
    const auto e = mode_energies(s, x);
    const double sum = e[0] + e[1] + e[2];
    if (!(sum > 0)) throw DomainError("simplex point undefined at zero energy");
    return {e[0] / sum, e[1] / sum, e[2] / sum};
}

TrajectoryRecord make_record(const SystemSpec& s, double t, const Eigen::VectorXd& x) {
    TrajectoryRecord r;
    r.t = t;
    r.state.assign(x.data(), x.data() + x.size());
    r.H = energy(s, x);
    r.H2 = h2_of_state(s, x);
    r.momentum = momentum(s, x);
    r.tau = actions(s, x);
    return r;
}

std::vector<TrajectoryRecord> integrate_at(const SystemSpec& s, const Eigen::VectorXd& state0,
                                           const std::vector<double>& times, const OdeOptions& opt) {
    check_spec(s);
    check_dim(s, state0);
    if (times.empty()) return {};
    const double T = times.back();
    if (!(T >= 0)) throw DomainError("times must be nonnegative");
    const OdeResult res = dopri5([&](const Eigen::VectorXd& y) { return rhs(s, y); }, state0, 0.0, T, times, opt);
    std::vector<TrajectoryRecord> out;
    out.reserve(res.t.size());
    for (std::size_t i = 0; i < res.t.size(); ++i) out.push_back(make_record(s, res.t[i], res.y[i]));
    return out;
}

std::vector<TrajectoryRecord> integrate(const SystemSpec& s, const Eigen::VectorXd& state0, double T,
                                        double sample_dt, const OdeOptions& opt) {
    if (!(T > 0)) throw DomainError("T must be positive");
    return integrate_at(s, state0, sample_grid(0.0, T, sample_dt), opt);
}

Eigen::VectorXd propagate(const SystemSpec& s, const Eigen::VectorXd& state0, double t, const OdeOptions& opt) {
    check_spec(s);
    check_dim(s, state0);
    const OdeResult res = dopri5([&](const Eigen::VectorXd& y) { return rhs(s, y); }, state0, 0.0, t, {t}, opt);
    return res.y.back();
}

std::vector<TrajectoryRecord> leapfrog(const SystemSpec& s, const Eigen::VectorXd& state0, double T, double h,
                                       double sample_dt) {
    check_spec(s);
    check_dim(s, state0);
    if (std::holds_alternative<AveragedNF>(s.kind))
        throw PreconditionError("leapfrog needs a second-order system");
    if (!(T > 0) || !(h > 0) || !(sample_dt > 0)) throw DomainError("T, h and sample_dt must be positive");
    const long per = std::lround(sample_dt / h);
    if (per < 1 || std::abs(per * h - sample_dt) > 1e-9 * sample_dt)
        throw DomainError("sample_dt must be a multiple of the step");
    const int n = state_dim(s) / 2;
    Eigen::VectorXd x = state0;
    auto accel = [&](const Eigen::VectorXd& y) { return Eigen::VectorXd(rhs(s, y).tail(n)); };
    Eigen::VectorXd acc = accel(x);
    std::vector<TrajectoryRecord> out{make_record(s, 0.0, x)};
    const long steps = std::lround(T / h);
    for (long k = 1; k <= steps; ++k) {
        x.tail(n) += 0.5 * h * acc;
        x.head(n) += h * x.tail(n);
        acc = accel(x);
        x.tail(n) += 0.5 * h * acc;
        if (k % per == 0 || k == steps) out.push_back(make_record(s, k * h, x));
    }
    return out;
}

std::vector<Eigen::VectorXd> ensemble_states(const SystemSpec& s, const EnsembleSpec& e) {
    check_spec(s);
    if (std::holds_alternative<FullChain>(s.kind)) throw PreconditionError("ensembles need a three-dof system");
    if (e.count < 1) throw DomainError("count must be >= 1");

    std::array<double, 6> c{};
    int vertex = e.vertex;
    double H2 = e.H2;
    if (e.center) {
        check_dim(s, *e.center);
        c = normalized(s, *e.center);
        const auto m = mode_energies(s, *e.center);
        vertex = 1 + int(std::max_element(m.begin(), m.end()) - m.begin());
        H2 = m[0] + m[1] + m[2];
    } else {
        if (vertex < 1 || vertex > 3) throw DomainError("vertex must be 1, 2 or 3");
        c[2 * (vertex - 1)] = std::sqrt(2 * H2);
    }
    if (!(H2 > 0)) throw DomainError("H2 must be positive");
    const double spread = e.spread < 0 ? 0.05 * std::sqrt(2 * H2) : e.spread;

    std::mt19937_64 rng(e.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::array<double, 4> shift;
    for (double& v : shift) v = uni(rng);

    std::array<int, 4> slots;
    for (int k = 0, j = 0; k < 6; ++k)
        if (k / 2 != vertex - 1) slots[j++] = k;

    boost::random::sobol qrng(4);
    boost::random::uniform_01<double> u01;
    std::vector<Eigen::VectorXd> out;
    while (int(out.size()) < e.count) {
        std::array<double, 4> p;
        double r2 = 0.0;
        for (int k = 0; k < 4; ++k) {
            double v = u01(qrng) + shift[k];
            v -= std::floor(v);
            p[k] = 2 * v - 1;
            r2 += p[k] * p[k];
        }
        if (r2 > 1.0) continue;
        std::array<double, 6> n = c;
        for (int k = 0; k < 4; ++k) n[slots[k]] += spread * p[k];
        double E = 0.0;
        for (double v : n) E += 0.5 * v * v;
        const double scale = std::sqrt(H2 / E);
        for (double& v : n) v *= scale;
        out.push_back(from_normalized(s, n));
    }
    return out;
}

std::vector<SimplexSnapshot> ensemble_simplex(const SystemSpec& s, const EnsembleSpec& e,
                                              const std::vector<double>& times, const OdeOptions& opt) {
    const auto states = ensemble_states(s, e);
    std::vector<SimplexSnapshot> snaps(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) snaps[i].t = times[i];
    // sequential; the order of points is the ensemble index
    for (const auto& x0 : states) {
        const OdeResult r = dopri5([&](const Eigen::VectorXd& y) { return rhs(s, y); }, x0, 0.0,
                                   times.empty() ? 0.0 : times.back(), times, opt);
        for (std::size_t i = 0; i < times.size(); ++i) snaps[i].points.push_back(simplex_point(s, r.y[i]));
    }
    return snaps;
}

Eigen::Vector4d case_masses(int which) {
    switch (which) {
        case 0: return {0.0357143, 0.126804, 0.0357143, 0.301767};
        case 1: return {0.00510292, 0.117265, 0.0854008, 0.292231};
        case 2: return {0.000685158, 0.11239, 0.100269, 0.286656};
    }
    throw DomainError("case must be 0, 1 or 2");
}

IntermediateNF case_nf(int which) {
    switch (which) {
        case 0: return {-3 * std::sqrt(14.0) / 490, 0.0};
        case 1: return {-0.0306229, -0.0089438};
        case 2: return {-0.0337877, -0.0105601};
    }
    throw DomainError("case must be 0, 1 or 2");
}

Modal case_modal(int which) {
    Modal m;
    switch (which) {
        case 0:
            m.d[2] = -9 * std::sqrt(21.0) / 490;
            m.d[5] = -3 * std::sqrt(14.0) / 490;
            m.d[9] = 2 * std::sqrt(21.0) / 245;
            return m;
        case 1:
            m.d = {0.0281999, -0.0258437, -0.0777574, -0.0275058, -0.00252349,
                   -0.0306229, 0.0157538, 0.000502655, -0.0089438, 0.028527};
            return m;
        case 2:
            m.d = {0.0352657, -0.0272316, -0.0743155, -0.0366184, -0.00260064,
                   -0.0337877, 0.0181144, 0.000760425, -0.0105601, 0.023904};
            return m;
    }
    throw DomainError("case must be 0, 1 or 2");
}

namespace {

Eigen::VectorXd rest_state(double x1, double x2, double x3) {
    Eigen::VectorXd s(6);
    s << x1, x2, x3, 0, 0, 0;
    return s;
}

Eigen::VectorXd chain_state(const Eigen::Vector4d& a) {
    Eigen::VectorXd s(8);
    Eigen::Vector4d v(0.04, -0.06, 0.02, 0.05);
    v -= a * (v.cwiseQuotient(a).sum() / 4);
    s << 0.15, -0.05, 0.1, -0.2, v;
    return s;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"case0",        "case0_x2",     "case1",        "case1_x2",    "case2",
            "case2_x2",     "modal_case0",  "modal_case1",  "modal_case2", "averaged_case0",
            "averaged_case1", "hhc_left",   "hhc_right",    "chain_case0", "chain_case1",
            "chain_case2"};
}

Preset preset(const std::string& name) {
    // Times are in the rescaled variable (omega = 3, 2, 1) except for the
    // chain presets, which use the original time.
    for (int c = 0; c < 3; ++c) {
        const std::string k = std::to_string(c);
        if (name == "case" + k)
            return {name, "intermediate normal form, case " + k + ", x(0) = (1, 0.1, 0.1)",
                    {case_nf(c), 0.5}, rest_state(1, 0.1, 0.1), 1000, 0.5};
        if (name == "case" + k + "_x2")
            return {name, "intermediate normal form, case " + k + ", x(0) = (0.1, 1.5, 0.1)",
                    {case_nf(c), 0.5}, rest_state(0.1, 1.5, 0.1), 1000, 0.5};
        if (name == "modal_case" + k)
            return {name, "full modal cubic, case " + k + ", x(0) = (1, 0.1, 0.1)",
                    {case_modal(c), 0.5}, rest_state(1, 0.1, 0.1), 1000, 0.5};
        if (name == "chain_case" + k)
            return {name, "four-particle chain, case " + k + " inverse masses, zero momentum, original time",
                    {FullChain{case_masses(c), 1.0}, 0.5}, chain_state(case_masses(c)), 1000, 0.5};
    }
    for (int c = 0; c < 2; ++c) {
        const std::string k = std::to_string(c);
        if (name == "averaged_case" + k) {
            const IntermediateNF n = case_nf(c);
            Eigen::VectorXd s(6);
            s << 1, 0, 0.1, 0, 0.1, 0;
            return {name, "averaged flow in co-moving coordinates, case " + k,
                    {AveragedNF{n.d6, n.d9}, 0.2}, s, 1000, 0.5};
        }
    }
    if (name == "hhc_left")
        return {name, "comparison Hamiltonian a2=3 a3=1 b=1, x(0) = (0.1, 1, 0.5)",
                {ComparisonHHC{3, 1, 1}, 0.5}, rest_state(0.1, 1, 0.5), 500, 0.25};
    if (name == "hhc_right")
        return {name, "comparison Hamiltonian a2=3 a3=1 b=1, x(0) = (2, 1, -0.05)",
                {ComparisonHHC{3, 1, 1}, 0.5}, rest_state(2, 1, -0.05), 500, 0.25};
    throw UnknownPresetError("unknown preset '" + name + "'");
}

}  // namespace fpu
