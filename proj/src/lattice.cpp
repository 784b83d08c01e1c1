#include "fpu/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fpu/errors.hpp"

namespace fpu {

void check_inverse_masses(const Vec& a) {
    if (a.size() < 3) throw DomainError("chain needs at least 3 particles");
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0) || !std::isfinite(a[i]))
            throw DomainError("inverse masses must be positive and finite");
    }
}

Vec inverse_from_masses(const Vec& m) {
    Vec a(m.size());
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        if (!(m[i] > 0.0)) throw DomainError("masses must be positive");
        a[i] = 1.0 / m[i];
    }
    return a;
}

Mat coupling_matrix(int n) {
    if (n < 3) throw DimensionError("coupling matrix needs n >= 3");
    Mat c = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        c(i, i) = 2.0;
        c(i, (i + 1) % n) = -1.0;
        c(i, (i + n - 1) % n) = -1.0;
    }
    return c;
}

namespace {

double off_norm(const Mat& m) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j) s += m(i, j) * m(i, j);
    return std::sqrt(s);
}

}  // namespace

SymmetricEigen symmetric_eigen(const Mat& m) {
    const Eigen::Index n = m.rows();
    if (m.cols() != n) throw DimensionError("symmetric_eigen needs a square matrix");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw PreconditionError("symmetric_eigen: input is not symmetric");

    Mat a = m;
    Mat v = Mat::Identity(n, n);
    const double target = 1e-14 * m.norm();

    // Rotations follow the symmetric Schur decomposition in row-cyclic order.
    for (int sweep = 0; sweep < 100 && off_norm(a) > target; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });
    SymmetricEigen out{Vec(n), Mat(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        out.vectors.col(k) = v.col(order[k]);
    }
    return out;
}

namespace {

void canonical_sign(Eigen::Ref<Vec> v) {
    const double tol = 1e-14 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > tol) {
            if (v[i] < 0) v = -v;
            return;
        }
    }
}

}  // namespace

Spectrum spectrum(const Vec& a) {
    check_inverse_masses(a);
    const Eigen::Index n = a.size();
    const Vec root = a.cwiseSqrt();
    const Mat s = root.asDiagonal() * coupling_matrix(static_cast<int>(n)) * root.asDiagonal();
    SymmetricEigen e = symmetric_eigen(s);

    Spectrum out;
    out.values = e.values;
    out.vectors = root.asDiagonal() * e.vectors;
    const double big = out.values.cwiseAbs().maxCoeff();
    out.zero_index = static_cast<int>(n - 1);
    if (std::abs(out.values[n - 1]) < 1e-10 * big) out.values[n - 1] = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) canonical_sign(out.vectors.col(k));
    return out;
}

CharPolyIdentities char_poly_identities(const Vec& a) {
    check_inverse_masses(a);
    const Eigen::Index n = a.size();
    CharPolyIdentities r{2.0 * a.sum(), 0.0};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const bool adjacent = (j - i == 1) || (i == 0 && j == n - 1);
            r.p_nm2 += (adjacent ? 3.0 : 4.0) * a[i] * a[j];
        }
    }
    return r;
}

double elementary_symmetric(const Vec& x, int k) {
    // e_0..e_k by the usual recurrence over entries.
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        for (int j = k; j >= 1; --j) e[j] += x[i] * e[j - 1];
    return e[k];
}

Eigen::Vector4d eigenvector_closed_form(const Eigen::Vector4d& a, double lambda) {
    Eigen::Vector4d mu;
    for (int j = 0; j < 4; ++j) {
        const double den = 2.0 - lambda / a[j];
        if (std::abs(den) < 1e-12) throw SingularFormulaError("lambda coincides with 2 a_j");
        mu[j] = 1.0 / den;
    }
    return {mu[0] * (mu[1] + mu[3]), mu[1], mu[2] * (mu[1] + mu[3]), mu[3]};
}

double momentum(const Vec& a, const Vec& qdot) {
    if (a.size() != qdot.size()) throw DimensionError("momentum: length mismatch");
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += qdot[i] / a[i];
    return s;
}

Vec dihedral_apply(const Vec& a, int shift, bool reflect) {
    const Eigen::Index n = a.size();
    Vec b(n);
    for (Eigen::Index i = 0; i < n; ++i) b[i] = a[(i + shift) % n];
    if (reflect) b.reverseInPlace();
    return b;
}

std::vector<Vec> dihedral_orbit(const Vec& a) {
    std::vector<Vec> out;
    const int n = static_cast<int>(a.size());
    for (int k = 0; k < n; ++k) {
        for (bool r : {false, true}) {
            Vec b = dihedral_apply(a, k, r);
            const bool seen = std::any_of(out.begin(), out.end(),
                                          [&](const Vec& c) { return c == b; });
            if (!seen) out.push_back(b);
        }
    }
    return out;
}

}  // namespace fpu
