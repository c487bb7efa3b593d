#pragma once

#include <Eigen/Dense>

namespace cggm {

struct LpResult {
    Eigen::VectorXd x;
    double objective = 0.0;
    int iterations = 0;
};

// Minimizes c'x subject to A x <= b, x >= 0 with a dense two-phase tableau
// simplex (entering variable by most-negative reduced cost with index
// tie-breaking, leaving by ratio test). Problems here are small (a few
// hundred rows), where the dense tableau is both fast and robust.
// Throws InfeasibleError when phase one proves emptiness, Error on an
// unbounded objective, ConvergenceError at the iteration cap.
LpResult lp_minimize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& c, int max_iterations = 50000);

struct L1Solution {
    Eigen::VectorXd z;
    double l1_norm = 0.0;
    double residual_inf = 0.0;  // ||A z - b||_inf at the solution
};

// Minimizes ||z||_1 subject to ||A z - b||_inf <= eps, via the split
// z = p - q, p,q >= 0, which is the linear program
//   min 1'(p+q)  s.t.  [A -A; -A A] [p;q] <= [eps+b; eps-b].
L1Solution l1_min_linf(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       double eps);

}  // namespace cggm
