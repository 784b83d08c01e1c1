#include "validate.hpp"

#include <boost/rational.hpp>
#include <cmath>
#include <string>

#include "fpu/fiber.hpp"
#include "fpu/lattice.hpp"
#include "fpu/transform.hpp"

namespace {

struct Suite {
    nlohmann::ordered_json& report;
    std::ostream& text;
    bool ok = true;

    void check(const std::string& name, bool pass, const std::string& detail) {
        text << (pass ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
        report["checks"].push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
        ok = ok && pass;
    }
};

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::vector<double> u_grid(int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(0.85 * i / (n - 1));
    return g;
}

}  // namespace

bool run_validation(nlohmann::ordered_json& report, std::ostream& text) {
    using namespace fpu;
    report["checks"] = nlohmann::ordered_json::array();
    Suite s{report, text};
    const auto grid = u_grid(50);
    const Mat4 C = coupling_matrix(4);
    const Vec4 target(9.0 / 14, 2.0 / 7, 1.0 / 14, 0.0);

    // cubic coefficients: closed-form table against the transform route
    double dcoef = 0.0;
    for (double u : grid) {
        const auto a = cubic_from_table(u), b = cubic_from_transform(transform_closed_form(u));
        for (int j = 0; j < 10; ++j) dcoef = std::max(dcoef, std::abs(a.d[j] - b.d[j]));
    }
    s.check("cubic coefficients table vs transform", dcoef < 1e-10, "max diff " + sci(dcoef));

    // transform identities, closed form and numeric
    double dk = 0.0, dl = 0.0, dnum = 0.0;
    for (double u : grid) {
        const FiberPoint p = fiber123(u);
        const Vec4 a(p.a[0], p.a[1], p.a[2], p.a[3]);
        const Mat4 L = transform_closed_form(u);
        const Mat4 K = a.cwiseInverse().asDiagonal() * L;
        dk = std::max(dk, (K.transpose() * a.asDiagonal() * K - Mat4::Identity()).cwiseAbs().maxCoeff());
        dl = std::max(dl, (L.transpose() * C * L - Mat4(target.asDiagonal())).cwiseAbs().maxCoeff());
        const TransformPair t = transform_for_u(u);
        dnum = std::max(dnum, (t.L - L).cwiseAbs().maxCoeff());
    }
    s.check("K^T A K = I (closed form)", dk < 1e-10, "max dev " + sci(dk));
    s.check("L^T C L = diag(9/14, 2/7, 1/14, 0) (closed form)", dl < 1e-10, "max dev " + sci(dl));
    s.check("numeric L equals closed form", dnum < 1e-10, "max diff " + sci(dnum));

    // spectrum round trip on the 1:2:3 branch
    double dspec = 0.0;
    for (double u : grid) {
        const FiberPoint p = fiber123(u);
        Vec a(4);
        a << p.a[0], p.a[1], p.a[2], p.a[3];
        const Vec ev = spectrum(a).positive();
        for (int i = 0; i < 3; ++i) dspec = std::max(dspec, std::abs(ev[i] / target[i] - 1));
    }
    s.check("spectrum of fiber123(u)", dspec < 1e-10, "max rel dev " + sci(dspec));

    // region polynomial at (1/27, 1/3), exact
    using Q = boost::rational<long long>;
    const Q T = region_T(Q(1, 27), Q(1, 3));
    s.check("T(1/27, 1/3) = 0 exactly", T == Q(0), "T = " + std::to_string(T.numerator()) + "/" +
                                                       std::to_string(T.denominator()));

    // fiber classification of the resonance table
    for (const auto& row : resonance_table()) {
        const XiEta xe = xi_eta(target_spectrum(row.ratio));
        const FiberClassification c = fiber_classify(xe.xi, xe.eta);
        const bool pass = c.kind == row.kind && c.count == row.count;
        s.check("fiber " + row.label,
                pass,
                std::string("expected ") + to_string(row.kind) + "(" + std::to_string(row.count) + "), got " +
                    to_string(c.kind) + "(" + std::to_string(c.count) + ")");
    }
    report["all_passed"] = s.ok;
    return s.ok;
}
