#include "fpu/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace fpu {

namespace {

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense output
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double err_norm(const Eigen::VectorXd& e, const Eigen::VectorXd& y, const Eigen::VectorXd& yn,
                const OdeOptions& o) {
    double m = 0.0;
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        const double sc = o.atol + o.rtol * std::max(std::abs(y[i]), std::abs(yn[i]));
        m = std::max(m, std::abs(e[i]) / sc);
    }
    return m;
}

}  // namespace

std::vector<double> sample_grid(double t0, double t1, double dt) {
    if (!(dt > 0)) throw DomainError("sample step must be positive");
    const double span = std::abs(t1 - t0), dir = t1 >= t0 ? 1.0 : -1.0;
    std::vector<double> g;
    for (long k = 0;; ++k) {
        const double s = k * dt;
        if (s >= span - 1e-9 * dt) break;
        g.push_back(t0 + dir * s);
    }
    g.push_back(t1);
    return g;
}

OdeResult dopri5(const OdeRhs& f, const Eigen::VectorXd& y0, double t0, double t1,
                 const std::vector<double>& samples, const OdeOptions& opt) {
    OdeResult out;
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (dir * (samples[i] - t0) < -1e-12 * std::max(1.0, std::abs(t0)) ||
            dir * (samples[i] - t1) > 1e-12 * std::max(1.0, std::abs(t1)))
            throw DomainError("sample time outside the integration interval");
        if (i > 0 && dir * (samples[i] - samples[i - 1]) < 0) throw DomainError("sample times not monotone");
    }
    std::size_t next = 0;
    auto emit = [&](double t, const Eigen::VectorXd& y) {
        out.t.push_back(t);
        out.y.push_back(y);
    };
    while (next < samples.size() && samples[next] == t0) emit(samples[next++], y0);
    if (t1 == t0) {
        while (next < samples.size()) emit(samples[next++], y0);
        return out;
    }

    auto F = [&](const Eigen::VectorXd& y) {
        ++out.stats.evaluations;
        return f(y);
    };

    Eigen::VectorXd y = y0, k1 = F(y);
    double t = t0;
    double h = std::abs(opt.h0);
    if (h == 0.0) {
        // rough first guess, refined by the controller
        Eigen::VectorXd sc = (opt.atol + opt.rtol * y.cwiseAbs().array()).matrix();
        const double dy = (y.array() / sc.array()).abs().maxCoeff();
        const double df = (k1.array() / sc.array()).abs().maxCoeff();
        h = (dy < 1e-5 || df < 1e-5) ? 1e-6 : 0.01 * dy / df;
        h = std::min(h, std::abs(t1 - t0));
    }
    double err_old = 1e-4;
    bool rejected_last = false;

    while (dir * (t1 - t) > 0) {
        if (out.stats.accepted + out.stats.rejected >= opt.max_steps)
            throw IntegrationFailure("step budget exhausted", out, t);
        const double hmin = 1e-14 * std::max(1.0, std::abs(t));
        if (h < hmin) throw IntegrationFailure("step size underflow", out, t);
        bool last = false;
        if (h >= std::abs(t1 - t)) {
            h = std::abs(t1 - t);
            last = true;
        }
        const double hs = dir * h;
        const Eigen::VectorXd k2 = F(y + hs * a21 * k1);
        const Eigen::VectorXd k3 = F(y + hs * (a31 * k1 + a32 * k2));
        const Eigen::VectorXd k4 = F(y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
        const Eigen::VectorXd k5 = F(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Eigen::VectorXd k6 = F(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Eigen::VectorXd yn = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        const Eigen::VectorXd k7 = F(yn);
        const Eigen::VectorXd e = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double err = err_norm(e, y, yn, opt);
        if (!std::isfinite(err)) {
            ++out.stats.rejected;
            h *= 0.2;
            rejected_last = true;
            continue;
        }
        if (err <= 1.0) {
            const double tn = last ? t1 : t + hs;
            if (next < samples.size() && dir * (samples[next] - tn) <= 0) {
                const Eigen::VectorXd dyv = yn - y;
                const Eigen::VectorXd b = hs * k1 - dyv;
                const Eigen::VectorXd r4 = dyv - hs * k7 - b;
                const Eigen::VectorXd r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (next < samples.size() && dir * (samples[next] - tn) <= 0) {
                    const double th = (samples[next] - t) / hs, th1 = 1.0 - th;
                    if (samples[next] == tn)
                        emit(samples[next], yn);
                    else
                        emit(samples[next], y + th * (dyv + th1 * (b + th * (r4 + th1 * r5))));
                    ++next;
                }
            }
            t = tn;
            y = yn;
            k1 = k7;
            ++out.stats.accepted;
            if (!y.allFinite()) throw IntegrationFailure("state became non-finite", out, t);
            double fac = err > 0 ? 0.9 * std::pow(err, -0.7 / 5) * std::pow(err_old, 0.4 / 5) : 5.0;
            fac = std::clamp(fac, 0.2, 5.0);
            if (rejected_last) fac = std::min(fac, 1.0);
            h *= fac;
            err_old = std::max(err, 1e-4);
            rejected_last = false;
        } else {
            ++out.stats.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            rejected_last = true;
        }
    }
    return out;
}

}  // namespace fpu
