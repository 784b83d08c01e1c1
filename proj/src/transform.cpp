#include "fpu/transform.hpp"

#include <algorithm>
#include <cmath>

#include "fpu/errors.hpp"
#include "fpu/fiber.hpp"
#include "fpu/lattice.hpp"

namespace fpu {

const std::array<const char*, 10> kMonomialNames = {
    "x1^3", "x1^2 x2", "x1^2 x3", "x2^2 x1", "x3^2 x1",
    "x1 x2 x3", "x2^3", "x3^3", "x3^2 x2", "x2^2 x3"};

TransformPair transform_numeric(const Vec4& a) {
    const Spectrum s = spectrum(a);
    const double big = s.values.cwiseAbs().maxCoeff();
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(s.values[i] - s.values[j]) < 1e-8 * big)
                throw DegenerateSpectrumError("eigenvalues of A C collide");
    TransformPair t;
    t.L = s.vectors;
    t.lambda = s.values;
    t.K = a.cwiseInverse().asDiagonal() * t.L;
    return t;
}

void align_columns(TransformPair& t, const Mat4& reference) {
    for (int j = 0; j < 4; ++j) {
        if (t.L.col(j).dot(reference.col(j)) < 0) {
            t.L.col(j) *= -1.0;
            t.K.col(j) *= -1.0;
        }
    }
}

namespace {

void check_u(double u) {
    if (!(u >= 0.0 && u < u1_limit())) throw DomainError("u must lie in [0, u1)");
}

}  // namespace

Mat4 transform_closed_form(double u) {
    check_u(u);
    auto s = [](double v) { return std::sqrt(v); };
    const double w = u - 5;
    // Shared factor of the zero-mode column (constant over rows).
    const double z = -s(1200 - u * (3 * (u - 22) * u + 484)) * s(40 - u * (3 * (u - 8) * u + 64)) /
                     (96 * s(14) * w);
    Mat4 L;
    L(0, 0) = s(u + 6) * (s(16 - u) * (20 - 3 * (u - 4) * u) - 18 * s(2) * s(5 - u) * s(6 - u) * s(u)) /
              (192 * s(35) * w);
    L(0, 1) = s(4 - u) * (s(2) * s(6 - u) * (u * (3 * u - 22) - 20) + 16 * s(5 - u) * s(-(u - 16) * u)) /
              (64 * s(105) * w);
    L(0, 2) = s(10 - u) * (s(u) * ((28 - 3 * u) * u - 76) + 2 * s(2) * s(5 - u) * s(6 - u) * s(16 - u)) /
              (64 * s(21) * w);
    L(1, 0) = s(16 - u) * (s(u + 6) * (-3 * (u - 16) * u - 160) + 18 * s(8 - 2 * u) * s(5 - u) * s(10 - u)) /
              (192 * s(35) * w);
    L(1, 1) = s(6 - u) * (s(8 - 2 * u) * (u * (3 * u - 38) + 60) + 16 * s(5 - u) * s(-(u - 10) * (u + 6))) /
              (64 * s(105) * w);
    L(1, 2) = -s(u) * (s(10 - u) * (u * (3 * u - 32) + 96) + 2 * s(8 - 2 * u) * s(-(u - 5) * (u + 6))) /
              (64 * s(21) * w);
    L(2, 0) = s(u + 6) * (s(16 - u) * (20 - 3 * (u - 4) * u) + 18 * s(2) * s(5 - u) * s(-(u - 6) * u)) /
              (192 * s(35) * w);
    L(2, 1) = s(4 - u) * (s(2) * s(6 - u) * (u * (3 * u - 22) - 20) - 16 * s(5 - u) * s(-(u - 16) * u)) /
              (64 * s(105) * w);
    L(2, 2) = -s(10 - u) * (s(u) * (u * (3 * u - 28) + 76) + 2 * s(2) * s(5 - u) * s(6 - u) * s(16 - u)) /
              (64 * s(21) * w);
    L(3, 0) = -s(16 - u) * (s(u + 6) * (3 * (u - 16) * u + 160) + 18 * s(8 - 2 * u) * s(5 - u) * s(10 - u)) /
              (192 * s(35) * w);
    L(3, 1) = s(6 - u) * (s(8 - 2 * u) * (u * (3 * u - 38) + 60) - 16 * s(5 - u) * s(-(u - 10) * (u + 6))) /
              (64 * s(105) * w);
    L(3, 2) = s(u) * (s(10 - u) * ((32 - 3 * u) * u - 96) + 2 * s(8 - 2 * u) * s(-(u - 5) * (u + 6))) /
              (64 * s(21) * w);
    for (int i = 0; i < 4; ++i) L(i, 3) = z;
    return L;
}

TransformPair transform_for_u(double u) {
    const FiberPoint p = fiber123(u);
    TransformPair t = transform_numeric(Vec4(p.a[0], p.a[1], p.a[2], p.a[3]));
    align_columns(t, transform_closed_form(u));
    t.u = u;
    return t;
}

CubicCoefficients cubic_from_table(double u, double alpha) {
    check_u(u);
    auto r = [](double v) { return std::sqrt(v); };
    const double w = 5 - u;
    std::array<double, 10> d{};
    d[0] = r(u) * 27 * r(4 - u) * r(6 - u) * r(10 - u) * (16 - u) * (u + 6) / (35840 * r(35) * w);
    d[1] = -r(u) * 3 * r(3) * r(10 - u) * r(16 - u) * r(u + 6) * (3 * u * u - 30 * u + 52) / (4480 * r(70) * w);
    d[2] = -3 * r(3) * r(4 - u) * r(6 - u) * r(16 - u) * r(u + 6) * (3 * u * u - 30 * u + 160) /
           (35840 * r(7) * w);
    d[3] = -r(u) * r(4 - u) * r(6 - u) * r(10 - u) * (-3 * u * u + 30 * u + 68) / (1120 * r(35) * w);
    d[4] = -r(u) * r(4 - u) * r(6 - u) * r(10 - u) * (3 * u * u - 30 * u + 64) / (7168 * r(35) * w);
    d[5] = -(-3 * std::pow(u, 4) + 60 * std::pow(u, 3) - 352 * u * u + 520 * u + 960) / (2240 * r(14) * w);
    d[6] = r(u) * r(10 - u) * r(16 - u) * (6 - u) * (4 - u) * r(u + 6) / (420 * r(210) * w);
    d[7] = u * r(4 - u) * r(6 - u) * r(16 - u) * (10 - u) * r(u + 6) / (21504 * r(21) * w);
    d[8] = -r(u) * r(10 - u) * r(16 - u) * r(u + 6) * (u * u - 10 * u + 28) / (896 * r(210) * w);
    d[9] = r(4 - u) * r(6 - u) * r(16 - u) * r(u + 6) * (u * u - 10 * u + 20) / (1120 * r(21) * w);
    CubicCoefficients c;
    for (int j = 0; j < 10; ++j) c.d[j] = alpha * d[j];
    c.u = u;
    c.alpha = alpha;
    return c;
}

CubicCoefficients cubic_from_transform(const Mat4& L, double alpha) {
    // (alpha/3) sum_j (q_{j+1} - q_j)^3 with q = L x is the symmetric trilinear
    // form T(x, x, x), T(a,b,c) = (alpha/3) sum_j l_ja l_jb l_jc.
    Mat4 l;
    for (int j = 0; j < 4; ++j) l.row(j) = L.row((j + 1) % 4) - L.row(j);
    auto T = [&](int a, int b, int c) {
        double s = 0.0;
        for (int j = 0; j < 4; ++j) s += l(j, a) * l(j, b) * l(j, c);
        return alpha / 3.0 * s;
    };
    double x4 = 0.0;
    for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) x4 = std::max(x4, std::abs(T(3, b, c)));
    if (x4 > 1e-10) throw InconsistentTransformError("zero mode couples into the cubic term");

    // Multiplicity = number of distinct orderings of the index triple.
    CubicCoefficients out;
    out.alpha = alpha;
    out.d = {T(0, 0, 0),     3 * T(0, 0, 1), 3 * T(0, 0, 2), 3 * T(1, 1, 0), 3 * T(2, 2, 0),
             6 * T(0, 1, 2), T(1, 1, 1),     T(2, 2, 2),     3 * T(2, 2, 1), 3 * T(1, 1, 2)};
    return out;
}

double cubic_value(const CubicCoefficients& c, double x1, double x2, double x3) {
    const auto& d = c.d;
    return d[0] * x1 * x1 * x1 + d[1] * x1 * x1 * x2 + d[2] * x1 * x1 * x3 + d[3] * x2 * x2 * x1 +
           d[4] * x3 * x3 * x1 + d[5] * x1 * x2 * x3 + d[6] * x2 * x2 * x2 + d[7] * x3 * x3 * x3 +
           d[8] * x3 * x3 * x2 + d[9] * x2 * x2 * x3;
}

}  // namespace fpu
