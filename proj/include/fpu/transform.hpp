#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>

namespace fpu {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

// q = L x, p = K y; K^T A K = I and L^T C L = diag(lambda).
struct TransformPair {
    double u = std::numeric_limits<double>::quiet_NaN();
    Mat4 K;
    Mat4 L;
    Vec4 lambda;
};

// Columns ordered by descending eigenvalue with the zero mode last; column
// signs canonical (first nonzero entry positive).
TransformPair transform_numeric(const Vec4& a);

// Flip columns of t so that each has a nonnegative dot product with the
// matching column of reference.
void align_columns(TransformPair& t, const Mat4& reference);

// Closed-form L(u) on the 1:2:3 branch.
Mat4 transform_closed_form(double u);

// Numeric transform of fiber123(u), re-signed to match the closed form.
TransformPair transform_for_u(double u);

// Coefficients of x1^3, x1^2 x2, x1^2 x3, x2^2 x1, x3^2 x1, x1 x2 x3, x2^3,
// x3^3, x3^2 x2, x2^2 x3 in H3. d[0] holds d1.
struct CubicCoefficients {
    std::array<double, 10> d{};
    double u = std::numeric_limits<double>::quiet_NaN();
    double alpha = 1.0;

    double operator()(int j) const { return d[j - 1]; }  // 1-based
};

extern const std::array<const char*, 10> kMonomialNames;

CubicCoefficients cubic_from_table(double u, double alpha = 1.0);
CubicCoefficients cubic_from_transform(const Mat4& L, double alpha = 1.0);

// H3 evaluated at modal coordinates.
double cubic_value(const CubicCoefficients& c, double x1, double x2, double x3);

}  // namespace fpu
