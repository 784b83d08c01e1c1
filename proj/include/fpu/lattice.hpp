#pragma once

#include <Eigen/Dense>
#include <vector>

namespace fpu {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Inverse masses a_j = 1/m_j. Throws DomainError unless n >= 3 and all a_j > 0.
void check_inverse_masses(const Vec& a);
Vec inverse_from_masses(const Vec& m);

// C_n: 2 on the diagonal, -1 on the cyclic neighbours.
Mat coupling_matrix(int n);

struct SymmetricEigen {
    Vec values;   // descending
    Mat vectors;  // orthonormal columns
};

// Cyclic Jacobi. Deterministic for identical input.
SymmetricEigen symmetric_eigen(const Mat& m);

struct Spectrum {
    Vec values;   // descending, zero mode last and snapped to 0
    Mat vectors;  // eigenvectors of A C, v = A^{1/2} w, first nonzero entry positive
    int zero_index = -1;

    Vec positive() const { return values.head(values.size() - 1); }
};

Spectrum spectrum(const Vec& a);

struct CharPolyIdentities {
    double p_nm1;  // 2 sum a
    double p_nm2;  // sum_{i<j} c_ij a_i a_j
};

CharPolyIdentities char_poly_identities(const Vec& a);

// e_k of the entries of x.
double elementary_symmetric(const Vec& x, int k);

// Closed-form eigenvector for n = 4. Throws SingularFormulaError if lambda is
// within tolerance of some 2 a_j.
Eigen::Vector4d eigenvector_closed_form(const Eigen::Vector4d& a, double lambda);

// sum_j qdot_j / a_j
double momentum(const Vec& a, const Vec& qdot);

// b_i = a_{(i + shift) mod n}, reversed afterwards when reflect is set.
Vec dihedral_apply(const Vec& a, int shift, bool reflect);

// Orbit under D_n, duplicates removed by exact comparison.
std::vector<Vec> dihedral_orbit(const Vec& a);

}  // namespace fpu
