#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

namespace fpu {

// Averaged 1:2:3 normal form of the intermediate system in rescaled time,
// where the modal frequencies are 3, 2, 1.

// Amplitudes and the combination angles chi1 = psi1 - psi2 - psi3,
// chi2 = 2 psi3 - psi2.
struct PolarState {
    double r1, r2, r3, chi1, chi2;
};

// (y1, y2, z1, z2, u1, u2): co-moving coordinates of the x1, x2, x3 modes.
using CoMovingState = std::array<double, 6>;

PolarState nf_polar_rhs(const PolarState& s, double d6, double d9, double eps);
CoMovingState nf_comoving_rhs(const CoMovingState& s, double d6, double d9, double eps);

struct NFIntegrals {
    double h2;     // 9 r1^2 + 4 r2^2 + r3^2
    double third;  // 2 r2^2 - r3^2, conserved only when d9 = 0
};

NFIntegrals nf_integrals(const PolarState& s);
NFIntegrals nf_integrals(const CoMovingState& c);

// Amplitudes r and phases psi of x_i = r_i cos(w_i t + psi_i).
struct AmplitudePhase {
    std::array<double, 3> r;
    std::array<double, 3> psi;
};

AmplitudePhase comoving_to_amplitude_phase(const CoMovingState& c);
CoMovingState comoving_from_amplitude_phase(const AmplitudePhase& ap);
// psi2 = 0 and psi3 = chi2/2 fix the representative.
CoMovingState comoving_from_polar(const PolarState& s);

// Case-0 tori: sampled (r1, r2, r3) with h2 = 2 E0.
std::vector<std::array<double, 3>> find_tori_case0(double E0, int samples = 200);

// Residual of the torus condition at amplitudes r.
double tori_residual(double E0, double r2, double r3);

enum class StabilityClass { EE, EH, HH, C };
const char* to_string(StabilityClass c);

struct StabilityReport {
    std::vector<std::complex<double>> eigenvalues;  // without the factor below
    double scale_per_eps = 3.5;                     // exponents = eps * scale * eigenvalues
    StabilityClass cls = StabilityClass::EE;
};

// Class of a Hamiltonian spectrum. Eigenvalues below rel_tol * max|lambda|
// in modulus are ignored (trivial directions of a family).
StabilityClass classify_spectrum(const std::vector<std::complex<double>>& ev, double rel_tol = 1e-7);

enum class PeriodicKind { NormalMode1, NormalMode2, NormalMode3, EdgeFamily, GeneralPosition };
const char* to_string(PeriodicKind k);

struct PeriodicSolution {
    PeriodicKind kind;
    std::array<double, 3> r;
    double chi1, chi2;
    double E0;
    double residual;
    StabilityReport stability;
};

// General-position periodic solutions for q = d9/d6 > 0. Each amplitude
// solution comes with its two phase pairs.
std::vector<PeriodicSolution> find_periodic_general(double E0, double q, int grid = 200);

struct EdgeAmplitudes {
    double C, D;
};

EdgeAmplitudes edge_family(double A, double B, double d6, double d9);

enum class ModeKind { Mode1, Mode2, Mode3, Edge };
ModeKind parse_mode(const std::string& s);
const char* to_string(ModeKind m);

// Normalised linearisation matrices, factor 7 eps / 2 omitted.
Eigen::MatrixXd stability_matrix(ModeKind mode, double d6, double d9, double A, double B);

StabilityReport normal_mode_stability(ModeKind mode, double d6, double d9, double A, double B);

// lambda^2 of the x2 normal mode, both roots.
std::array<std::complex<double>, 2> mode2_lambda_squared(double d6, double d9, double A, double B);

// Central differences of nf_comoving_rhs / (7 eps / 2) at c.
Eigen::MatrixXd comoving_jacobian(const CoMovingState& c, double d6, double d9, double h = 1e-6);

struct HopfPoint {
    double u;
    double d6, d9;
    StabilityReport report;
};

std::vector<HopfPoint> hopf_scan(const std::vector<double>& u_grid, double A = 1.0, double B = 0.0);

}  // namespace fpu
