#include "fpu/normalform.hpp"

#include <algorithm>
#include <cmath>

#include "fpu/errors.hpp"
#include "fpu/transform.hpp"

namespace fpu {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

PolarState nf_polar_rhs(const PolarState& s, double d6, double d9, double eps) {
    const double r1 = s.r1, r2 = s.r2, r3 = s.r3;
    if (r1 < 1e-8 || r2 < 1e-8 || r3 < 1e-8)
        throw CoordinateSingularityError("polar form is singular near the coordinate planes");
    const double s1 = std::sin(s.chi1), c1 = std::cos(s.chi1);
    const double s2 = std::sin(s.chi2), c2 = std::cos(s.chi2);
    const double F = r2 * r2 * r3 * r3 / 3 - r1 * r1 * r3 * r3 / 2 - r1 * r1 * r2 * r2;
    PolarState d;
    d.r1 = eps * 7.0 / 6 * d6 * r2 * r3 * s1;
    d.r2 = -eps * 7.0 / 4 * (d6 * r1 * r3 * s1 + d9 * r3 * r3 * s2);
    d.r3 = -eps * 7.0 / 2 * (d6 * r1 * r2 * s1 - 2 * d9 * r2 * r3 * s2);
    d.chi1 = eps * 7.0 / 2 *
             (d6 * c1 / (r1 * r2 * r3) * F - d9 * c2 / r2 * (r3 * r3 / 2 + 2 * r2 * r2));
    d.chi2 = eps * 7.0 / 4 *
             (d6 * r1 * c1 / (r2 * r3) * (4 * r2 * r2 - r3 * r3) + d9 * c2 / r2 * (8 * r2 * r2 - r3 * r3));
    return d;
}

CoMovingState nf_comoving_rhs(const CoMovingState& s, double d6, double d9, double eps) {
    const auto [y1, y2, z1, z2, u1, u2] = s;
    const double k = eps * 3.5;
    return {eps * 7.0 / 6 * d6 * (z1 * u2 + 0.5 * z2 * u1),
            -k * d6 * (z1 * u1 - 0.5 * z2 * u2),
            k * (0.5 * d6 * (-y1 * u2 + y2 * u1 / 3) + d9 * u1 * u2),
            -k * (d6 * (y1 * u1 + y2 * u2 / 3) + d9 * (u1 * u1 - u2 * u2)),
            k * (d6 * (-0.5 * y1 * z2 + y2 * z1 / 3) + d9 * (-2 * z1 * u2 + z2 * u1)),
            -k * (d6 * (y1 * z1 + y2 * z2 / 6) + d9 * (2 * z1 * u1 + z2 * u2))};
}

NFIntegrals nf_integrals(const PolarState& s) {
    const double a = s.r1 * s.r1, b = s.r2 * s.r2, c = s.r3 * s.r3;
    return {9 * a + 4 * b + c, 2 * b - c};
}

NFIntegrals nf_integrals(const CoMovingState& c) {
    const double a = c[0] * c[0] + c[1] * c[1] / 9;
    const double b = c[2] * c[2] + c[3] * c[3] / 4;
    const double d = c[4] * c[4] + c[5] * c[5];
    return {9 * a + 4 * b + d, 2 * b - d};
}

AmplitudePhase comoving_to_amplitude_phase(const CoMovingState& c) {
    AmplitudePhase ap;
    ap.r = {std::hypot(c[0], c[1] / 3), std::hypot(c[2], c[3] / 2), std::hypot(c[4], c[5])};
    ap.psi = {std::atan2(-c[1] / 3, c[0]), std::atan2(-c[3] / 2, c[2]), std::atan2(-c[5], c[4])};
    return ap;
}

CoMovingState comoving_from_amplitude_phase(const AmplitudePhase& ap) {
    const auto& r = ap.r;
    const auto& p = ap.psi;
    return {r[0] * std::cos(p[0]),  -3 * r[0] * std::sin(p[0]), r[1] * std::cos(p[1]),
            -2 * r[1] * std::sin(p[1]), r[2] * std::cos(p[2]),   -r[2] * std::sin(p[2])};
}

CoMovingState comoving_from_polar(const PolarState& s) {
    const double psi2 = 0.0, psi3 = 0.5 * s.chi2;
    return comoving_from_amplitude_phase({{s.r1, s.r2, s.r3}, {s.chi1 + psi2 + psi3, psi2, psi3}});
}

double tori_residual(double E0, double r2, double r3) {
    const double b = r2 * r2, c = r3 * r3;
    return 2 * b * c + 4.0 / 3 * b * b + c * c / 6 - E0 / 3 * (2 * b + c);
}

std::vector<std::array<double, 3>> find_tori_case0(double E0, int samples) {
    if (!(E0 > 0)) throw DomainError("E0 must be positive");
    if (samples < 1) throw DomainError("samples must be positive");
    std::vector<std::array<double, 3>> out;
    const double r2max = std::sqrt(E0 / 2);
    for (int k = 1; k <= samples; ++k) {
        const double r2 = r2max * k / (samples + 1);
        const double R2 = r2 * r2;
        // (1/6) R3^2 + (2 R2 - E0/3) R3 + (4/3) R2^2 - (2/3) E0 R2 = 0, positive root.
        const double a = 1.0 / 6, b = 2 * R2 - E0 / 3, c = 4.0 / 3 * R2 * R2 - 2.0 / 3 * E0 * R2;
        const double sq = std::sqrt(b * b - 4 * a * c);
        const double R3 = b >= 0 ? 2 * c / (-b - sq) : (-b + sq) / (2 * a);
        const double R1 = std::max(0.0, (2 * E0 - 4 * R2 - R3) / 9);
        out.push_back({std::sqrt(R1), r2, std::sqrt(R3)});
    }
    return out;
}

const char* to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::EE: return "EE";
        case StabilityClass::EH: return "EH";
        case StabilityClass::HH: return "HH";
        case StabilityClass::C: return "C";
    }
    return "?";
}

StabilityClass classify_spectrum(const std::vector<std::complex<double>>& ev, double rel_tol) {
    double big = 0.0;
    for (const auto& z : ev) big = std::max(big, std::abs(z));
    const double tol = rel_tol * big;
    int real = 0, imag = 0, cplx = 0;
    for (const auto& z : ev) {
        if (std::abs(z) <= tol) continue;
        const bool re = std::abs(z.real()) > tol, im = std::abs(z.imag()) > tol;
        if (re && im) ++cplx;
        else if (re) ++real;
        else ++imag;
    }
    if (cplx > 0) return StabilityClass::C;
    if (real == 0) return StabilityClass::EE;
    if (imag == 0) return StabilityClass::HH;
    return StabilityClass::EH;
}

const char* to_string(PeriodicKind k) {
    switch (k) {
        case PeriodicKind::NormalMode1: return "NormalMode1";
        case PeriodicKind::NormalMode2: return "NormalMode2";
        case PeriodicKind::NormalMode3: return "NormalMode3";
        case PeriodicKind::EdgeFamily: return "EdgeFamily";
        case PeriodicKind::GeneralPosition: return "GeneralPosition";
    }
    return "?";
}

namespace {

std::vector<std::complex<double>> sorted_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                         es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return ev;
}

// Jacobian of the reduced polar field (r1, r2, r3, chi1, chi2), scaled like
// the normal-mode matrices.
Eigen::MatrixXd polar_jacobian(const PolarState& p, double d6, double d9) {
    auto f = [&](const std::array<double, 5>& v) {
        PolarState d = nf_polar_rhs({v[0], v[1], v[2], v[3], v[4]}, d6, d9, 1.0);
        return std::array<double, 5>{d.r1, d.r2, d.r3, d.chi1, d.chi2};
    };
    const std::array<double, 5> x{p.r1, p.r2, p.r3, p.chi1, p.chi2};
    Eigen::MatrixXd J(5, 5);
    for (int j = 0; j < 5; ++j) {
        const double h = 1e-6 * std::max(1.0, std::abs(x[j]));
        auto xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const auto fp = f(xp), fm = f(xm);
        for (int i = 0; i < 5; ++i) J(i, j) = (fp[i] - fm[i]) / (2 * h) / 3.5;
    }
    return J;
}

}  // namespace

std::vector<PeriodicSolution> find_periodic_general(double E0, double q, int grid) {
    if (!(E0 > 0)) throw DomainError("E0 must be positive");
    if (!(q > 0)) throw DomainError("q = d9/d6 must be positive");
    if (grid < 4) throw DomainError("grid too coarse");

    struct Amp {
        int sigma;
        double r1, r2, r3;
    };
    std::vector<Amp> amps;

    for (int sigma : {1, -1}) {
        auto r1_of = [&](double R2, double R3) {
            return sigma * q * std::sqrt(R3) * (R3 - 8 * R2) / (4 * R2 - R3);
        };
        // Unknowns (R2, R3) = (r2^2, r3^2), residuals scaled by E0.
        auto G = [&](const Eigen::Vector2d& v) {
            const double R2 = v[0], R3 = v[1];
            const double r1 = r1_of(R2, R3), r3 = std::sqrt(R3);
            const double F = R2 * R3 / 3 - r1 * r1 * R3 / 2 - r1 * r1 * R2;
            return Eigen::Vector2d((9 * r1 * r1 + 4 * R2 + R3 - 2 * E0) / E0,
                                   (F - sigma * q * r1 * r3 * (R3 / 2 + 2 * R2)) / (E0 * E0));
        };
        auto inside = [&](const Eigen::Vector2d& v) {
            return v[0] > 0 && v[1] > 0 && v[0] < E0 / 2 && v[1] < 2 * E0;
        };
        for (int i = 1; i <= grid; ++i) {
            for (int j = 1; j <= grid; ++j) {
                Eigen::Vector2d v(E0 / 2 * i / (grid + 1), 2 * E0 * j / (grid + 1));
                Eigen::Vector2d g = G(v);
                if (!g.allFinite()) continue;
                bool ok = false;
                for (int it = 0; it < 60; ++it) {
                    if (g.norm() < 1e-15) {
                        ok = true;
                        break;
                    }
                    Eigen::Matrix2d J;
                    for (int k = 0; k < 2; ++k) {
                        const double h = 1e-7 * E0;
                        Eigen::Vector2d vp = v, vm = v;
                        vp[k] += h;
                        vm[k] -= h;
                        J.col(k) = (G(vp) - G(vm)) / (2 * h);
                    }
                    const Eigen::Vector2d step = J.fullPivLu().solve(-g);
                    if (!step.allFinite()) break;
                    double t = 1.0;
                    bool moved = false;
                    for (int ls = 0; ls < 30; ++ls, t *= 0.5) {
                        const Eigen::Vector2d w = v + t * step;
                        if (!inside(w)) continue;
                        const Eigen::Vector2d gw = G(w);
                        if (gw.allFinite() && gw.norm() < g.norm()) {
                            v = w;
                            g = gw;
                            moved = true;
                            break;
                        }
                    }
                    if (!moved) {
                        ok = g.norm() < 1e-13;
                        break;
                    }
                }
                if (!ok) continue;
                const double r1 = r1_of(v[0], v[1]), r2 = std::sqrt(v[0]), r3 = std::sqrt(v[1]);
                const double floor = 1e-6 * std::sqrt(E0);
                if (!(r1 > floor && r2 > floor && r3 > floor)) continue;
                const bool dup = std::any_of(amps.begin(), amps.end(), [&](const Amp& a) {
                    return a.sigma == sigma && std::abs(a.r1 - r1) < 1e-8 && std::abs(a.r2 - r2) < 1e-8 &&
                           std::abs(a.r3 - r3) < 1e-8;
                });
                if (!dup) amps.push_back({sigma, r1, r2, r3});
            }
        }
    }

    std::sort(amps.begin(), amps.end(), [](const Amp& a, const Amp& b) {
        return a.sigma != b.sigma ? a.sigma > b.sigma : a.r2 < b.r2;
    });

    std::vector<PeriodicSolution> out;
    for (const Amp& a : amps) {
        for (double chi1 : {0.0, kPi}) {
            // cos chi1 cos chi2 = sigma
            const double chi2 = a.sigma > 0 ? chi1 : kPi - chi1;
            const PolarState p{a.r1, a.r2, a.r3, chi1, chi2};
            const PolarState d = nf_polar_rhs(p, 1.0, q, 1.0);
            PeriodicSolution s;
            s.kind = PeriodicKind::GeneralPosition;
            s.r = {a.r1, a.r2, a.r3};
            s.chi1 = chi1;
            s.chi2 = chi2;
            s.E0 = E0;
            s.residual = std::max({std::abs(d.r1), std::abs(d.r2), std::abs(d.r3), std::abs(d.chi1),
                                   std::abs(d.chi2)});
            s.stability.eigenvalues = sorted_eigenvalues(polar_jacobian(p, 1.0, q));
            s.stability.cls = classify_spectrum(s.stability.eigenvalues, 1e-6);
            out.push_back(s);
        }
    }
    return out;
}

EdgeAmplitudes edge_family(double A, double B, double d6, double d9) {
    if (d6 == 0.0) throw DomainError("edge family needs d6 != 0");
    const double n = A * A + B * B;
    if (!(n > 0)) throw DomainError("edge family needs A^2 + B^2 > 0");
    const double q = d9 / d6;
    return {q * A * (3 * B * B - A * A) / n, -q * B * (3 * A * A - B * B) / n};
}

ModeKind parse_mode(const std::string& s) {
    if (s == "1") return ModeKind::Mode1;
    if (s == "2") return ModeKind::Mode2;
    if (s == "3") return ModeKind::Mode3;
    if (s == "edge") return ModeKind::Edge;
    throw DomainError("mode must be 1, 2, 3 or edge");
}

const char* to_string(ModeKind m) {
    switch (m) {
        case ModeKind::Mode1: return "1";
        case ModeKind::Mode2: return "2";
        case ModeKind::Mode3: return "3";
        case ModeKind::Edge: return "edge";
    }
    return "?";
}

Eigen::MatrixXd stability_matrix(ModeKind mode, double d6, double d9, double A, double B) {
    if (!(A * A + B * B > 0)) throw DomainError("normal mode needs A^2 + B^2 > 0");
    switch (mode) {
        case ModeKind::Mode1: {
            // variables (z1, z2, u1, u2)
            Eigen::MatrixXd m(4, 4);
            m << 0, 0, -d6 * B / 2, d6 * A / 2,
                 0, 0, d6 * A, d6 * B,
                 -d6 * B, d6 * A / 2, 0, 0,
                 d6 * A, d6 * B / 2, 0, 0;
            return m;
        }
        case ModeKind::Mode2: {
            // variables (y1, y2, u1, u2)
            Eigen::MatrixXd m(4, 4);
            m << 0, 0, d6 * B / 3, d6 * A / 3,
                 0, 0, -d6 * A, d6 * B,
                 -d6 * B, d6 * A / 3, 2 * d9 * B, -2 * d9 * A,
                 -d6 * A, -d6 * B / 3, -2 * d9 * A, -2 * d9 * B;
            return m;
        }
        case ModeKind::Mode3: {
            if (std::abs(d9) > 1e-12) throw ModeNonexistentError("the x3 normal mode requires d9 = 0");
            // variables (y1, y2, z1, z2)
            Eigen::MatrixXd m(4, 4);
            m << 0, 0, -d6 * B / 3, -d6 * A / 6,
                 0, 0, d6 * A, -d6 * B / 2,
                 d6 * B / 2, -d6 * A / 6, 0, 0,
                 d6 * A, d6 * B / 3, 0, 0;
            return m;
        }
        case ModeKind::Edge: {
            const auto [C, D] = edge_family(A, B, d6, d9);
            // variables (y1, y2, z1, z2, u1, u2)
            Eigen::MatrixXd m(6, 6);
            m << 0, 0, d6 * B / 3, d6 * A / 6, 0, 0,
                 0, 0, -d6 * A, d6 * B / 2, 0, 0,
                 -d6 * B / 2, d6 * A / 6, 0, 0, d6 * D / 2 + d9 * B, -d6 * C / 2 + d9 * A,
                 -d6 * A, -d6 * B / 3, 0, 0, -d6 * C - 2 * d9 * A, -d6 * D + 2 * d9 * B,
                 0, 0, d6 * D - 2 * d9 * B, -d6 * C / 2 + d9 * A, 0, 0,
                 0, 0, -d6 * C - 2 * d9 * A, -d6 * D / 2 - d9 * B, 0, 0;
            return m;
        }
    }
    throw DomainError("unknown mode");
}

StabilityReport normal_mode_stability(ModeKind mode, double d6, double d9, double A, double B) {
    StabilityReport r;
    r.eigenvalues = sorted_eigenvalues(stability_matrix(mode, d6, d9, A, B));
    r.cls = classify_spectrum(r.eigenvalues, 1e-6);
    return r;
}

std::array<std::complex<double>, 2> mode2_lambda_squared(double d6, double d9, double A, double B) {
    const std::complex<double> root = std::sqrt(std::complex<double>(d9 * d9 - d6 * d6 / 3, 0.0));
    const double n = A * A + B * B;
    const double base = d6 * d6 / 3 - 2 * d9 * d9;
    return {-n * (base + 2 * d9 * root), -n * (base - 2 * d9 * root)};
}

Eigen::MatrixXd comoving_jacobian(const CoMovingState& c, double d6, double d9, double h) {
    Eigen::MatrixXd J(6, 6);
    for (int j = 0; j < 6; ++j) {
        CoMovingState p = c, m = c;
        p[j] += h;
        m[j] -= h;
        const auto fp = nf_comoving_rhs(p, d6, d9, 1.0), fm = nf_comoving_rhs(m, d6, d9, 1.0);
        for (int i = 0; i < 6; ++i) J(i, j) = (fp[i] - fm[i]) / (2 * h) / 3.5;
    }
    return J;
}

std::vector<HopfPoint> hopf_scan(const std::vector<double>& u_grid, double A, double B) {
    std::vector<HopfPoint> out;
    for (double u : u_grid) {
        const CubicCoefficients c = cubic_from_table(u);
        out.push_back({u, c(6), c(9), normal_mode_stability(ModeKind::Mode2, c(6), c(9), A, B)});
    }
    return out;
}

}  // namespace fpu
