#pragma once

#include <array>
#include <string>
#include <vector>

namespace fpu {

// Frequency ratio n1:n2:n3. Entries may be non-integer (the classical chain
// has 1:1:sqrt 2); integer ratios are gcd-reduced and sorted.
struct Ratio {
    std::array<double, 3> n{1, 1, 1};
};

Ratio canonical_ratio(double n1, double n2, double n3);
Ratio parse_ratio(const std::string& text);  // "1:2:3", "1:1:1.41421356"
std::string to_string(const Ratio& r);

// Positive eigenvalues, descending, normalised to sum 1.
using TargetSpectrum = std::array<double, 3>;

TargetSpectrum target_spectrum(const Ratio& r);

struct XiEta {
    double xi;
    double eta;
};

XiEta xi_eta(const TargetSpectrum& t);

template <class R>
R region_T(const R& xi, const R& eta) {
    return R(27) * xi * xi + R(4) * eta * eta * eta - R(18) * xi * eta - eta * eta + R(4) * xi;
}

struct RegionReport {
    double T;
    bool in_image;
    bool nonempty;
    bool noncompact;
    bool compact;  // nonempty and not noncompact
    bool on_exceptional_line;
};

RegionReport region_tests(double xi, double eta);

// Intermediate quantities of the n = 4 inverse scheme at a given eta2.
struct FiberQuantities {
    double r, s13, s24, eta1, p13, p24, d13, d24;
    bool admissible() const;
};

FiberQuantities fiber_quantities(double xi, double eta, double eta2);

struct FiberPoint {
    std::array<double, 4> a{};
    double parameter = 0.0;  // eta2 or u, depending on the producer
    std::string stabilizer;  // D4 elements fixing a, or "trivial"
};

std::string stabilizer_label(const std::array<double, 4>& a, double tol = 1e-12);

// Points with a1 <= a3, a2 <= a4 at one eta2. Empty when a constraint fails.
std::vector<FiberPoint> solve_fiber_at(double xi, double eta, double eta2);

enum class EndKind { Eta1, P13, P24, D13, D24, GridEdge };
const char* to_string(EndKind k);

struct BranchEnd {
    double eta2;
    EndKind kind;
    std::array<double, 4> a;
    bool degenerate;  // some a_j reaches 0 here
};

// One fundamental piece of a curve, parametrised by eta2.
struct FiberBranch {
    double xi, eta;
    BranchEnd lo, hi;

    FiberPoint sample(double s) const;  // s in [0, 1]
};

struct FiberComponent {
    bool open;
    int pieces;  // D4 images of fundamental pieces glued into this component
};

enum class FiberKind { Empty, FinitePoints, OpenCurves, CompactCurves, Mixed };
const char* to_string(FiberKind k);

struct FiberClassification {
    FiberKind kind = FiberKind::Empty;
    int count = 0;
    std::vector<FiberBranch> branches;    // fundamental pieces
    std::vector<FiberPoint> points;       // fundamental isolated points
    std::vector<FiberComponent> components;
    int isolated_total = 0;               // isolated points counted over D4
};

FiberClassification fiber_classify(double xi, double eta, int grid = 10000);

// Published fiber types of the low-order resonances plus the classical
// equal-mass point.
struct ResonanceFiber {
    std::string label;
    Ratio ratio;
    FiberKind kind;
    int count;
};

std::vector<ResonanceFiber> resonance_table();

// The closed-form 1:2:3 branch, u in [0, u1).
double u1_limit();
FiberPoint fiber123(double u);

struct SphericalCoords {
    double phi, psi, rho;
    std::array<double, 3> x;
};

SphericalCoords spherical_coords(const std::array<double, 4>& a);

}  // namespace fpu
