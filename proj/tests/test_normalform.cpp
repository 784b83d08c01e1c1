#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "fpu/errors.hpp"
#include "fpu/integrator.hpp"
#include "fpu/normalform.hpp"
#include "fpu/transform.hpp"

using namespace fpu;
using cd = std::complex<double>;

namespace {

constexpr double kD6 = -0.0306229, kD9 = -0.0089438;

double norm5(const PolarState& s) {
    return std::max({std::abs(s.r1), std::abs(s.r2), std::abs(s.r3), std::abs(s.chi1), std::abs(s.chi2)});
}

bool has(const std::vector<cd>& ev, cd z, double tol) {
    return std::any_of(ev.begin(), ev.end(), [&](cd w) { return std::abs(w - z) < tol; });
}

// every eigenvalue of a appears in b and vice versa
bool same_spectrum(const std::vector<cd>& a, const std::vector<cd>& b, double tol) {
    if (a.size() != b.size()) return false;
    for (cd z : a)
        if (!has(b, z, tol)) return false;
    for (cd z : b)
        if (!has(a, z, tol)) return false;
    return true;
}

std::vector<cd> eig(const Eigen::MatrixXd& m) {
    Eigen::EigenSolver<Eigen::MatrixXd> s(m, false);
    std::vector<cd> out;
    for (int i = 0; i < m.rows(); ++i) out.push_back(s.eigenvalues()[i]);
    return out;
}

Eigen::MatrixXd block(const Eigen::MatrixXd& J, std::array<int, 4> idx) {
    Eigen::MatrixXd b(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) b(i, j) = J(idx[i], idx[j]);
    return b;
}

Eigen::VectorXd to_vec(const CoMovingState& c) { return Eigen::Map<const Eigen::VectorXd>(c.data(), 6); }
CoMovingState from_vec(const Eigen::VectorXd& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

}  // namespace

TEST_CASE("polar vector field") {
    const PolarState s{0.7, 1.1, 0.4, 0, 0};
    const PolarState d = nf_polar_rhs(s, kD6, kD9, 0.3);
    CHECK(d.r1 == 0);
    CHECK(d.r2 == 0);
    CHECK(d.r3 == 0);
    // r1' from the amplitude equation
    const PolarState t{0.7, 1.1, 0.4, 0.5, 0.2};
    CHECK(nf_polar_rhs(t, kD6, 0, 0.3).r1 == doctest::Approx(0.3 * 7.0 / 6 * kD6 * 1.1 * 0.4 * std::sin(0.5)));
    // d9 = 0: chi2 leaves the amplitude equations
    const PolarState a = nf_polar_rhs(t, kD6, 0, 0.3), b = nf_polar_rhs({0.7, 1.1, 0.4, 0.5, 1.7}, kD6, 0, 0.3);
    CHECK(a.r1 == b.r1);
    CHECK(a.r2 == b.r2);
    CHECK(a.r3 == b.r3);
    CHECK(a.chi1 == b.chi1);
    CHECK_THROWS_AS(nf_polar_rhs({1e-9, 1, 1, 0, 0}, kD6, kD9, 0.1), CoordinateSingularityError);
}

TEST_CASE("co-moving vector field") {
    const CoMovingState zero{};
    for (double v : nf_comoving_rhs(zero, kD6, kD9, 0.2)) CHECK(v == 0);
    // pure x1 and pure x2 states are invariant
    for (double v : nf_comoving_rhs({0.8, -0.3, 0, 0, 0, 0}, kD6, kD9, 0.2)) CHECK(v == 0);
    for (double v : nf_comoving_rhs({0, 0, 0.8, -0.3, 0, 0}, kD6, kD9, 0.2)) CHECK(v == 0);
    // pure x3 state is invariant only when d9 = 0
    for (double v : nf_comoving_rhs({0, 0, 0, 0, 0.8, -0.3}, kD6, 0, 0.2)) CHECK(v == 0);
    const auto d = nf_comoving_rhs({0, 0, 0, 0, 0.8, -0.3}, kD6, kD9, 0.2);
    CHECK(std::abs(d[2]) + std::abs(d[3]) > 1e-4);
}

TEST_CASE("polar and co-moving forms agree") {
    // amplitudes from the co-moving flow match the polar r', chain rule on a
    // small step
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ur(0.3, 1.5), ua(-3, 3);
    for (double d9 : {0.0, kD9}) {
        for (int k = 0; k < 20; ++k) {
            const PolarState p{ur(rng), ur(rng), ur(rng), ua(rng), ua(rng)};
            const CoMovingState c = comoving_from_polar(p);
            const auto ap = comoving_to_amplitude_phase(c);
            CHECK(std::abs(ap.r[0] - p.r1) < 1e-14);
            CHECK(std::abs(ap.r[2] - p.r3) < 1e-14);
            const double h = 1e-6;
            const auto f = nf_comoving_rhs(c, kD6, d9, 1.0);
            CoMovingState cp = c, cm = c;
            for (int i = 0; i < 6; ++i) {
                cp[i] += h * f[i];
                cm[i] -= h * f[i];
            }
            const auto app = comoving_to_amplitude_phase(cp), apm = comoving_to_amplitude_phase(cm);
            const PolarState d = nf_polar_rhs(p, kD6, d9, 1.0);
            CHECK(std::abs((app.r[0] - apm.r[0]) / (2 * h) - d.r1) < 1e-7);
            CHECK(std::abs((app.r[1] - apm.r[1]) / (2 * h) - d.r2) < 1e-7);
            CHECK(std::abs((app.r[2] - apm.r[2]) / (2 * h) - d.r3) < 1e-7);
            auto chi1 = [](const AmplitudePhase& a) { return a.psi[0] - a.psi[1] - a.psi[2]; };
            auto chi2 = [](const AmplitudePhase& a) { return 2 * a.psi[2] - a.psi[1]; };
            CHECK(std::abs(std::remainder(chi1(app) - chi1(apm), 2 * M_PI) / (2 * h) - d.chi1) < 1e-6);
            CHECK(std::abs(std::remainder(chi2(app) - chi2(apm), 2 * M_PI) / (2 * h) - d.chi2) < 1e-6);
        }
    }
}

TEST_CASE("integrals") {
    const auto v = nf_integrals(PolarState{1, 1, 1, 0, 0});
    CHECK(v.h2 == 14);
    CHECK(v.third == 1);
    const PolarState p{0.6, 0.9, 1.3, 0.4, 1.0};
    const auto w = nf_integrals(comoving_from_polar(p));
    CHECK(w.h2 == doctest::Approx(nf_integrals(p).h2).epsilon(1e-14));
    CHECK(w.third == doctest::Approx(nf_integrals(p).third).epsilon(1e-14));
}

TEST_CASE("integrals along the flows") {
    const double eps = 0.2;
    // polar, d9 = 0, t eps = 100
    {
        auto f = [&](const Eigen::VectorXd& y) {
            const PolarState d = nf_polar_rhs({y[0], y[1], y[2], y[3], y[4]}, kD6, 0, eps);
            Eigen::VectorXd o(5);
            o << d.r1, d.r2, d.r3, d.chi1, d.chi2;
            return o;
        };
        Eigen::VectorXd y0(5);
        y0 << 0.6, 0.9, 1.3, 0.4, 1.0;
        const auto r = dopri5(f, y0, 0, 500, sample_grid(0, 500, 5));
        const auto i0 = nf_integrals(PolarState{y0[0], y0[1], y0[2], y0[3], y0[4]});
        double dh = 0, dt = 0;
        for (const auto& y : r.y) {
            const auto i = nf_integrals(PolarState{y[0], y[1], y[2], y[3], y[4]});
            dh = std::max(dh, std::abs(i.h2 / i0.h2 - 1));
            dt = std::max(dt, std::abs(i.third / i0.third - 1));
        }
        CHECK(dh < 1e-8);
        CHECK(dt < 1e-8);
    }
    // co-moving, case-1 coefficients, t in [0, 1000]
    {
        auto f = [&](const Eigen::VectorXd& y) { return to_vec(nf_comoving_rhs(from_vec(y), kD6, kD9, eps)); };
        const CoMovingState c0{1, 0, 0.1, 0, 0.1, 0};
        const auto r = dopri5(f, to_vec(c0), 0, 1000, sample_grid(0, 1000, 1));
        const auto i0 = nf_integrals(c0);
        double dh = 0, lo = 1e300, hi = -1e300;
        for (const auto& y : r.y) {
            const auto i = nf_integrals(from_vec(y));
            dh = std::max(dh, std::abs(i.h2 / i0.h2 - 1));
            lo = std::min(lo, i.third);
            hi = std::max(hi, i.third);
        }
        CHECK(dh < 1e-8);
        CHECK(hi - lo > 0.1 * std::abs(i0.third));
    }
}

TEST_CASE("case-0 tori") {
    const double E0 = 7;
    const auto tori = find_tori_case0(E0, 400);
    REQUIRE(tori.size() == 400);
    for (const auto& r : tori) {
        CHECK(std::abs(tori_residual(E0, r[1], r[2])) < 1e-12 * E0 * E0);
        const PolarState p{r[0], r[1], r[2], 0, 0};
        CHECK(std::abs(nf_integrals(p).h2 - 2 * E0) < 1e-12);
        CHECK(r[1] < std::sqrt(E0 / 2));
        CHECK(r[2] < std::sqrt(2 * E0));
    }
    // ends: x2 mode on one side, x3 mode on the other
    CHECK(std::abs(tori.back()[1] - std::sqrt(E0 / 2)) < 0.01);
    CHECK(tori.back()[2] < 0.2);
    CHECK(tori.front()[1] < 0.01);
    CHECK(std::abs(tori.front()[2] - std::sqrt(2 * E0)) < 0.1);
    // relative equilibria of the d9 = 0 flow for chi1 in {0, pi}
    for (double chi : {0.0, M_PI}) {
        for (size_t k = 20; k < tori.size(); k += 40) {
            const auto& r = tori[k];
            if (r[0] < 1e-6) continue;
            const PolarState d = nf_polar_rhs({r[0], r[1], r[2], chi, 0.3}, kD6, 0, 1.0);
            CHECK(std::abs(d.r1) + std::abs(d.r2) + std::abs(d.r3) < 1e-14);
            CHECK(std::abs(d.chi1) < 1e-10);
        }
    }
    CHECK_THROWS_AS(find_tori_case0(0), DomainError);
}

TEST_CASE("general-position periodic solutions") {
    const double q = kD9 / kD6;
    const auto sols = find_periodic_general(7, q);
    REQUIRE(sols.size() == 4);
    for (const auto& s : sols) {
        CHECK(s.kind == PeriodicKind::GeneralPosition);
        CHECK(std::sin(s.chi1) == doctest::Approx(0).epsilon(1e-15));
        CHECK(std::sin(s.chi2) == doctest::Approx(0).epsilon(1e-15));
        const PolarState p{s.r[0], s.r[1], s.r[2], s.chi1, s.chi2};
        CHECK(norm5(nf_polar_rhs(p, kD6, kD9, 1.0)) < 1e-9);
        CHECK(nf_integrals(p).h2 == doctest::Approx(14).epsilon(1e-12));
        for (const cd& z : s.stability.eigenvalues) {
            CHECK(has(s.stability.eigenvalues, -z, 1e-8));
            CHECK(has(s.stability.eigenvalues, std::conj(z), 1e-8));
        }
    }
    CHECK_THROWS_AS(find_periodic_general(7, -0.1), DomainError);
}

TEST_CASE("general-position solutions approach the tori as q -> 0") {
    const double E0 = 7;
    const auto tori = find_tori_case0(E0, 20000);
    auto dist = [&](const std::array<double, 3>& r) {
        double best = 1e300;
        for (const auto& t : tori)
            best = std::min(best, std::max({std::abs(t[0] - r[0]), std::abs(t[1] - r[1]), std::abs(t[2] - r[2])}));
        return best;
    };
    double prev = 1e300;
    for (double q : {0.1, 0.01, 0.001}) {
        const auto sols = find_periodic_general(E0, q);
        REQUIRE(sols.size() == 4);
        double worst = 0;
        for (const auto& s : sols) worst = std::max(worst, dist(s.r));
        CHECK(worst < prev);
        prev = worst;
    }
    CHECK(prev < 5e-3);
}

TEST_CASE("edge family") {
    const auto a = edge_family(1, 0, kD6, kD9);
    CHECK(a.C == doctest::Approx(-kD9 / kD6).epsilon(1e-15));
    CHECK(a.D == 0);
    const auto b = edge_family(1, 1, kD6, kD9);
    CHECK(b.C == doctest::Approx(kD9 / kD6).epsilon(1e-15));
    CHECK(b.D == doctest::Approx(-kD9 / kD6).epsilon(1e-15));
    const auto z = edge_family(0.3, 0.7, kD6, 0);
    CHECK(z.C == 0);
    CHECK(z.D == 0);
    CHECK_THROWS_AS(edge_family(1, 0, 0, kD9), DomainError);
    CHECK_THROWS_AS(edge_family(0, 0, kD6, kD9), DomainError);
}

TEST_CASE("normal mode stability classes") {
    for (double u : {0.0, 0.534105, 0.826713}) {
        const auto c = cubic_from_table(u);
        const auto m1 = normal_mode_stability(ModeKind::Mode1, c(6), c(9), 1, 0);
        CHECK(m1.cls == StabilityClass::HH);
        for (const cd& z : m1.eigenvalues) {
            CHECK(std::abs(z.imag()) < 1e-12);
            CHECK(std::abs(std::abs(z.real()) - std::abs(m1.eigenvalues[0].real())) < 1e-12);
        }
        CHECK(normal_mode_stability(ModeKind::Edge, c(6), c(9), 1, 0.5).cls == StabilityClass::EE);
        if (u == 0) {
            CHECK(normal_mode_stability(ModeKind::Mode3, c(6), c(9), 1, 0).cls == StabilityClass::EE);
        } else {
            CHECK_THROWS_AS(normal_mode_stability(ModeKind::Mode3, c(6), c(9), 1, 0), ModeNonexistentError);
        }
    }
    const auto m2 = normal_mode_stability(ModeKind::Mode2, kD6, 0, 1, 0);
    CHECK(m2.cls == StabilityClass::EE);
    for (const cd& z : m2.eigenvalues) CHECK(std::abs(z.real()) < 1e-12);
    CHECK(kD6 * kD6 > 6 * kD9 * kD9);
    CHECK(normal_mode_stability(ModeKind::Mode2, kD6, kD9, 1, 0).cls == StabilityClass::C);
    CHECK(normal_mode_stability(ModeKind::Mode2, -0.0337877, -0.0105601, 1, 0).cls == StabilityClass::C);
    CHECK(parse_mode("edge") == ModeKind::Edge);
    CHECK_THROWS_AS(parse_mode("4"), DomainError);
    CHECK_THROWS_AS(normal_mode_stability(ModeKind::Mode1, kD6, kD9, 0, 0), DomainError);
}

TEST_CASE("hopf scan") {
    std::vector<double> g{0.0, 0.1};
    for (int k = 1; k <= 17; ++k) g.push_back(0.05 * k);
    const auto s = hopf_scan(g);
    CHECK(s[0].report.cls == StabilityClass::EE);
    for (size_t i = 1; i < s.size(); ++i) CHECK(s[i].report.cls == StabilityClass::C);
    CHECK(hopf_scan({0.826713})[0].report.cls == StabilityClass::C);
}

TEST_CASE("spectral symmetry, mode-2 formula and phase invariance") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int k = 0; k < 100; ++k) {
        const double d6 = u(rng), d9 = u(rng), A = u(rng), B = u(rng);
        for (ModeKind m : {ModeKind::Mode1, ModeKind::Mode2, ModeKind::Edge}) {
            const auto r = normal_mode_stability(m, d6, d9, A, B);
            for (const cd& z : r.eigenvalues) {
                CHECK(has(r.eigenvalues, -z, 1e-9));
                CHECK(has(r.eigenvalues, std::conj(z), 1e-9));
            }
        }
        const auto r = normal_mode_stability(ModeKind::Mode2, d6, d9, A, B);
        const auto l2 = mode2_lambda_squared(d6, d9, A, B);
        for (const cd& z : r.eigenvalues) {
            const double d = std::min(std::abs(z * z - l2[0]), std::abs(z * z - l2[1]));
            CHECK(d < 1e-12);
        }
        // rotate (A, B)
        const double th = u(rng) * M_PI, c = std::cos(th), s = std::sin(th);
        for (ModeKind m : {ModeKind::Mode1, ModeKind::Mode2}) {
            const auto a = normal_mode_stability(m, d6, d9, A, B);
            const auto b = normal_mode_stability(m, d6, d9, c * A - s * B, s * A + c * B);
            CHECK(a.cls == b.cls);
            CHECK(same_spectrum(a.eigenvalues, b.eigenvalues, 1e-12));
        }
    }
}

TEST_CASE("printed matrices against the linearised co-moving field") {
    const double A = 0.9;
    for (double u : {0.0, 0.534105}) {
        const auto c = cubic_from_table(u);
        const double d6 = c(6), d9 = c(9);
        // x1 mode: y1 = A, transverse (z1, z2, u1, u2)
        {
            const auto J = comoving_jacobian({A, 0, 0, 0, 0, 0}, d6, d9);
            const Eigen::MatrixXd M = stability_matrix(ModeKind::Mode1, d6, d9, A, 0);
            CHECK((M + block(J, {2, 3, 4, 5})).cwiseAbs().maxCoeff() < 1e-8);
        }
        // x2 mode: z1 = A, transverse (y1, y2, u1, u2)
        {
            const auto J = comoving_jacobian({0, 0, A, 0, 0, 0}, d6, d9);
            const Eigen::MatrixXd M = stability_matrix(ModeKind::Mode2, d6, d9, A, 0);
            CHECK((M - block(J, {0, 1, 4, 5})).cwiseAbs().maxCoeff() < 1e-8);
            CHECK(same_spectrum(eig(M), eig(block(J, {0, 1, 4, 5})), 1e-8));
        }
        if (u == 0) {
            const auto J = comoving_jacobian({0, 0, 0, 0, A, 0}, d6, d9);
            const Eigen::MatrixXd M = stability_matrix(ModeKind::Mode3, d6, d9, A, 0);
            CHECK((M + block(J, {0, 1, 2, 3})).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}
