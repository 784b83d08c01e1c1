#include <boost/rational.hpp>
#include <cmath>

#include "doctest.h"
#include "fpu/errors.hpp"
#include "fpu/fiber.hpp"
#include "fpu/lattice.hpp"

using namespace fpu;

namespace {

XiEta data(const char* r) { return xi_eta(target_spectrum(parse_ratio(r))); }

Vec as_vec(const std::array<double, 4>& a) {
    Vec v(4);
    v << a[0], a[1], a[2], a[3];
    return v;
}

// positive spectrum of a matches the target to rel
bool round_trip(const std::array<double, 4>& a, const TargetSpectrum& t, double rel) {
    const Vec ev = spectrum(as_vec(a)).positive();
    for (int i = 0; i < 3; ++i)
        if (std::abs(ev[i] / t[i] - 1) > rel) return false;
    return true;
}

double quadric_residual(const std::array<double, 4>& a, double eta) {
    // x = coordinates along the C4 eigenvectors with eigenvalues (4, 2, 2)
    const SphericalCoords s = spherical_coords(a);
    return s.x[0] * s.x[0] + 2 * s.x[1] * s.x[1] + 2 * s.x[2] * s.x[2] - (5.0 / 16 - eta);
}

}  // namespace

TEST_CASE("ratios and target spectra") {
    const auto t = target_spectrum(parse_ratio("1:2:3"));
    CHECK(t[0] == doctest::Approx(9.0 / 14).epsilon(1e-15));
    CHECK(t[1] == doctest::Approx(2.0 / 7).epsilon(1e-15));
    CHECK(t[2] == doctest::Approx(1.0 / 14).epsilon(1e-15));
    const auto e = target_spectrum(parse_ratio("1:1:1"));
    CHECK(e[0] == doctest::Approx(1.0 / 3));
    const auto f = target_spectrum(parse_ratio("2:3:4"));
    CHECK(f[1] == doctest::Approx(9.0 / 29).epsilon(1e-15));
    CHECK(parse_ratio("6:2:4").n == canonical_ratio(1, 2, 3).n);
    CHECK_THROWS_AS(parse_ratio("1:2"), DomainError);
    CHECK_THROWS_AS(parse_ratio("1:x:2"), DomainError);
    CHECK_THROWS_AS(canonical_ratio(1, 0, 2), DomainError);
}

TEST_CASE("xi and eta") {
    auto x = data("1:2:3");
    CHECK(x.xi == doctest::Approx(9.0 / 686).epsilon(1e-14));
    CHECK(x.eta == doctest::Approx(0.25).epsilon(1e-14));
    x = data("1:2:2");
    CHECK(x.xi == doctest::Approx(16.0 / 729).epsilon(1e-14));
    CHECK(x.eta == doctest::Approx(8.0 / 27).epsilon(1e-14));
    x = data("2:3:4");
    CHECK(x.xi == doctest::Approx(576.0 / 24389).epsilon(1e-14));
    CHECK(x.eta == doctest::Approx(244.0 / 841).epsilon(1e-14));
}

TEST_CASE("region tests") {
    using Q = boost::rational<long long>;
    CHECK(region_T(Q(1, 27), Q(1, 3)) == Q(0));
    CHECK(region_T(Q(1, 54), Q(1, 4)) == Q(0));
    const auto r = region_tests(16.0 / 729, 8.0 / 27);
    CHECK_FALSE(r.nonempty);
    CHECK(8.0 / 27 > 2 * 16.0 / 729 + 0.25);
    const auto c = data("1:1:2");
    CHECK(std::abs(region_tests(c.xi, c.eta).T) < 1e-15);
    const auto k = xi_eta(target_spectrum(canonical_ratio(1, 1, std::sqrt(2.0))));
    CHECK(region_tests(k.xi, k.eta).on_exceptional_line);
}

TEST_CASE("solve_fiber_at") {
    const auto x = data("1:1:2");
    const auto pts = solve_fiber_at(x.xi, x.eta, 1.0 / 18);
    REQUIRE(pts.size() == 1);
    const double r2 = std::sqrt(2.0);
    const std::array<double, 4> want{1.0 / 12, (2 - r2) / 12, 1.0 / 12, (2 + r2) / 12};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(pts[0].a[i] - want[i]) < 1e-10);
    CHECK(pts[0].stabilizer == "{(13)}");

    // u = 0 corresponds to sqrt(1 - 16 eta2) = 5/7
    const auto y = data("1:2:3");
    const double eta2 = (1 - 25.0 / 49) / 16;
    const auto p = solve_fiber_at(y.xi, y.eta, eta2);
    REQUIRE(p.size() == 1);
    const std::array<double, 4> c0{0.0357143, 0.126804, 0.0357143, 0.301767};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(p[0].a[i] - c0[i]) < 1e-5);

    const auto z = data("1:2:2");
    for (int k = 1; k < 200; ++k) CHECK(solve_fiber_at(z.xi, z.eta, k / 200.0 / 16).empty());

    CHECK_THROWS_AS(solve_fiber_at(y.xi, y.eta, 0.07), DomainError);
    CHECK_THROWS_AS(solve_fiber_at(y.xi, y.eta, 0.0), DomainError);
    // a point on the exceptional line
    CHECK_THROWS_AS(solve_fiber_at(0.01, 0.04 + 3.0 / 16, 0.03), IncompleteSchemeError);
}

TEST_CASE("fiber points round-trip and lie on the quadric") {
    for (const auto& row : resonance_table()) {
        const TargetSpectrum t = target_spectrum(row.ratio);
        const XiEta x = xi_eta(t);
        const FiberClassification c = fiber_classify(x.xi, x.eta);
        for (const auto& b : c.branches) {
            for (double s : {0.1, 0.5, 0.9}) {
                const FiberPoint p = b.sample(s);
                CHECK(round_trip(p.a, t, 1e-9));
                CHECK(std::abs(quadric_residual(p.a, x.eta)) < 1e-10);
                // D4 images are in the fiber as well
                for (const Vec& g : dihedral_orbit(as_vec(p.a))) {
                    const Vec ev = spectrum(g).positive();
                    CHECK(std::abs(ev[0] / t[0] - 1) < 1e-9);
                }
            }
        }
        for (const auto& p : c.points) {
            CHECK(round_trip(p.a, t, 1e-9));
        }
    }
}

TEST_CASE("classification examples") {
    auto x = data("1:2:3");
    auto c = fiber_classify(x.xi, x.eta);
    CHECK(c.kind == FiberKind::OpenCurves);
    CHECK(c.count == 4);
    x = data("1:1:2");
    c = fiber_classify(x.xi, x.eta);
    CHECK(c.kind == FiberKind::FinitePoints);
    CHECK(c.count == 4);
    x = data("2:3:4");
    c = fiber_classify(x.xi, x.eta);
    CHECK(c.kind == FiberKind::CompactCurves);
    CHECK(c.count == 2);
    REQUIRE(c.branches.size() == 1);
    CHECK(std::abs(c.branches[0].lo.eta2 - 42.0 / 841) < 1e-8);
    CHECK(std::abs(c.branches[0].hi.eta2 - 99.0 / 1682) < 1e-8);
    x = data("1:2:2");
    CHECK(fiber_classify(x.xi, x.eta).kind == FiberKind::Empty);
    CHECK_THROWS_AS(fiber_classify(0, 0.1), DomainError);
}

TEST_CASE("the 1:2:3 branch") {
    CHECK(u1_limit() == doctest::Approx(0.887732).epsilon(1e-6));
    CHECK(std::abs(u1_limit() - 0.88773223418537) < 1e-12);
    const std::array<std::pair<double, std::array<double, 4>>, 3> cases{{
        {0.0, {0.0357143, 0.126804, 0.0357143, 0.301767}},
        {0.534105, {0.00510292, 0.117265, 0.0854008, 0.292231}},
        {0.826713, {0.000685158, 0.11239, 0.100269, 0.286656}},
    }};
    for (const auto& [u, a] : cases) {
        const FiberPoint p = fiber123(u);
        for (int i = 0; i < 4; ++i) CHECK(std::abs(p.a[i] - a[i]) < 1e-5);
        CHECK(round_trip(p.a, {9.0 / 14, 2.0 / 7, 1.0 / 14}, 1e-10));
    }
    CHECK(fiber123(0).a[0] == fiber123(0).a[2]);
    CHECK(fiber123(u1_limit() - 1e-12).a[0] < 1e-6);
    double prev = fiber123(0).a[0];
    for (int k = 1; k <= 1000; ++k) {
        const double a1 = fiber123((u1_limit() - 1e-6) * k / 1000).a[0];
        CHECK(std::abs(a1 - prev) < 5e-3);
        prev = a1;
    }
    CHECK_THROWS_AS(fiber123(-0.1), DomainError);
    CHECK_THROWS_AS(fiber123(u1_limit()), DomainError);
}

TEST_CASE("spherical coordinates") {
    CHECK_THROWS_AS(spherical_coords({0.125, 0.125, 0.125, 0.125}), UndefinedAnglesError);
    const FiberPoint p = fiber123(0);
    const SphericalCoords s = spherical_coords(p.a);
    CHECK(std::abs(s.x[2]) < 1e-15);
    CHECK((std::abs(s.phi) < 1e-12 || std::abs(std::abs(s.phi) - M_PI) < 1e-12));
    CHECK(s.rho == doctest::Approx(std::sqrt(5.0 / 16 - 0.25)).epsilon(1e-12));
    const FiberPoint q = fiber123(0.6);
    const SphericalCoords t = spherical_coords(q.a);
    CHECK(std::abs(t.rho * std::sin(t.psi) - t.x[0]) < 1e-12);
    CHECK(std::abs(t.rho / std::sqrt(2.0) * std::cos(t.psi) * std::cos(t.phi) - t.x[1]) < 1e-12);
    CHECK(std::abs(t.rho / std::sqrt(2.0) * std::cos(t.psi) * std::sin(t.phi) - t.x[2]) < 1e-12);
    CHECK_THROWS_AS(spherical_coords({0.1, 0.1, 0.1, 0.1}), PreconditionError);
}
