#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fpu/errors.hpp"

namespace fpu {

using OdeRhs = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h0 = 0.0;  // 0: pick automatically
    long max_steps = 100000000;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    long evaluations = 0;
};

struct OdeResult {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> y;
    OdeStats stats;
};

// Step-size underflow, step budget exhausted or a non-finite state. Holds
// the samples produced before the failure.
class IntegrationFailure : public Error {
public:
    IntegrationFailure(const std::string& what, OdeResult partial, double t_fail)
        : Error(what), partial_(std::move(partial)), t_fail_(t_fail) {}
    const char* kind() const noexcept override { return "integration-failure"; }
    const OdeResult& partial() const { return partial_; }
    double failed_at() const { return t_fail_; }

private:
    OdeResult partial_;
    double t_fail_;
};

// Dormand-Prince 5(4), PI step control, max-norm error estimate, 4th-order
// dense output at the requested sample times. The samples must be monotone
// in the direction t0 -> t1 and lie in between; t1 < t0 integrates backwards.
OdeResult dopri5(const OdeRhs& f, const Eigen::VectorXd& y0, double t0, double t1,
                 const std::vector<double>& samples, const OdeOptions& opt = {});

// Sample grid t0, t0 + dt, ..., ending exactly at t1.
std::vector<double> sample_grid(double t0, double t1, double dt);

}  // namespace fpu
