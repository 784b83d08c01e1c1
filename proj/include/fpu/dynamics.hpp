#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fpu/integrator.hpp"

namespace fpu {

// Periodic chain of four particles, state (q1..q4, qdot1..qdot4),
// qdot_j = a_j p_j. Cubic term eps * alpha / 3 * sum (q_{j+1} - q_j)^3.
struct FullChain {
    Eigen::Vector4d a;
    double alpha = 1.0;
};

// Modal system in rescaled time, omega = (3, 2, 1):
// xddot_i = -omega_i^2 x_i - 14 eps dH3/dx_i, state (x, xdot).
struct Modal {
    std::array<double, 10> d{};  // d1..d10, same order as CubicCoefficients
};

// Modal system keeping only d6 x1 x2 x3 + d9 x2 x3^2.
struct IntermediateNF {
    double d6 = 0.0, d9 = 0.0;
};

// H = (p1^2+q1^2)/2 + (p2^2+q2^2) + 3(p3^2+q3^2)/2 - eps q1^2 (a2 q2 + a3 q3) - eps b q1 q2 q3,
// integrated in the form (q, qdot).
struct ComparisonHHC {
    double a2 = 3.0, a3 = 1.0, b = 1.0;
};

// First-order averaged flow of IntermediateNF in co-moving coordinates
// (y1, y2, z1, z2, u1, u2), see nf_comoving_rhs.
struct AveragedNF {
    double d6 = 0.0, d9 = 0.0;
};

using SystemKind = std::variant<FullChain, Modal, IntermediateNF, ComparisonHHC, AveragedNF>;

struct SystemSpec {
    SystemKind kind;
    double eps = 0.0;
};

const char* kind_name(const SystemSpec& s);
int state_dim(const SystemSpec& s);
// Throws DomainError for invalid parameters.
void check_spec(const SystemSpec& s);

Eigen::VectorXd rhs(const SystemSpec& s, const Eigen::VectorXd& state);
double energy(const SystemSpec& s, const Eigen::VectorXd& state);
double h2_of_state(const SystemSpec& s, const Eigen::VectorXd& state);
// sum_j qdot_j / a_j for the chain, NaN for the three-dof systems.
double momentum(const SystemSpec& s, const Eigen::VectorXd& state);
// Quadratic energy carried by each of the three oscillating modes.
std::array<double, 3> mode_energies(const SystemSpec& s, const Eigen::VectorXd& state);
// tau_i = E_i / omega_i.
std::array<double, 3> actions(const SystemSpec& s, const Eigen::VectorXd& state);
std::array<double, 3> frequencies(const SystemSpec& s);
// E_i / sum E, on the simplex by construction.
std::array<double, 3> simplex_point(const SystemSpec& s, const Eigen::VectorXd& state);

struct TrajectoryRecord {
    double t = 0.0;
    std::vector<double> state;
    double H = 0.0, H2 = 0.0, momentum = 0.0;
    std::array<double, 3> tau{};
};

TrajectoryRecord make_record(const SystemSpec& s, double t, const Eigen::VectorXd& state);

// Records at 0, dt, ..., T.
std::vector<TrajectoryRecord> integrate(const SystemSpec& s, const Eigen::VectorXd& state0, double T,
                                        double sample_dt, const OdeOptions& opt = {});
// Records at the given (increasing) times, starting from state0 at t = 0.
std::vector<TrajectoryRecord> integrate_at(const SystemSpec& s, const Eigen::VectorXd& state0,
                                           const std::vector<double>& times, const OdeOptions& opt = {});
// State at time t (either sign).
Eigen::VectorXd propagate(const SystemSpec& s, const Eigen::VectorXd& state0, double t,
                          const OdeOptions& opt = {});

// Fixed-step velocity Verlet on the kinetic/potential splitting. Not
// available for AveragedNF.
std::vector<TrajectoryRecord> leapfrog(const SystemSpec& s, const Eigen::VectorXd& state0, double T,
                                       double h, double sample_dt);

struct EnsembleSpec {
    int vertex = 1;                          // 1, 2, 3: mode at the centre
    std::optional<Eigen::VectorXd> center;  // overrides vertex
    int count = 98;
    double spread = -1.0;  // < 0: 0.05 sqrt(2 H2)
    std::uint64_t seed = 0;
    double H2 = 4.5;  // ignored when center is given
};

struct SimplexSnapshot {
    double t = 0.0;
    std::vector<std::array<double, 3>> points;
};

// Initial states: Sobol points in the unit 4-ball (Cranley-Patterson shift
// from seed) scaled by spread, added to the energy-normalised transverse
// coordinates, then the state is rescaled onto the H2 shell.
std::vector<Eigen::VectorXd> ensemble_states(const SystemSpec& s, const EnsembleSpec& e);

std::vector<SimplexSnapshot> ensemble_simplex(const SystemSpec& s, const EnsembleSpec& e,
                                              const std::vector<double>& times, const OdeOptions& opt = {});

struct Preset {
    std::string name;
    std::string description;
    SystemSpec spec;
    Eigen::VectorXd state0;
    double T = 1000.0;
    double sample_dt = 0.5;
};

Preset preset(const std::string& name);
std::vector<std::string> preset_names();

// Printed-precision data of the three mass distributions.
Eigen::Vector4d case_masses(int which);
IntermediateNF case_nf(int which);
Modal case_modal(int which);

}  // namespace fpu
