#include "cggm/lp.hpp"

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "cggm/errors.hpp"

namespace cggm {
namespace {

constexpr double kEps = 1e-9;

// Tableau layout: rows 0..m-1 are constraints, row m the objective, row m+1
// the auxiliary objective used while restoring feasibility. Columns 0..n-1
// are the nonbasic slots, column n the auxiliary variable, column n+1 the
// right-hand side. basic_/nonbasic_ hold variable ids; id -1 marks the
// auxiliary variable.
class SimplexTableau {
 public:
    SimplexTableau(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                   const Eigen::VectorXd& c, int max_iterations)
        : m_(static_cast<int>(a.rows())),
          n_(static_cast<int>(a.cols())),
          max_iterations_(max_iterations),
          d_(Eigen::MatrixXd::Zero(m_ + 2, n_ + 2)),
          basic_(m_),
          nonbasic_(n_ + 1) {
        d_.topLeftCorner(m_, n_) = a;
        for (int i = 0; i < m_; ++i) {
            basic_[i] = n_ + i;
            d_(i, n_) = -1.0;
            d_(i, n_ + 1) = b(i);
        }
        for (int j = 0; j < n_; ++j) {
            nonbasic_[j] = j;
            d_(m_, j) = -c(j);
        }
        nonbasic_[n_] = -1;
        d_(m_ + 1, n_) = 1.0;
    }

    // Returns max c'x, filling x. Throws on infeasible/unbounded/stalled.
    double maximize(Eigen::VectorXd& x) {
        int worst = 0;
        for (int i = 1; i < m_; ++i) {
            if (d_(i, n_ + 1) < d_(worst, n_ + 1)) worst = i;
        }
        if (d_(worst, n_ + 1) < -kEps) {
            pivot(worst, n_);
            if (!run_phase(2) || d_(m_ + 1, n_ + 1) < -kEps) {
                throw InfeasibleError("linear program is infeasible");
            }
            for (int i = 0; i < m_; ++i) {
                if (basic_[i] != -1) continue;
                int s = 0;
                for (int j = 1; j <= n_; ++j) {
                    if (prefer_column(i, j, s)) s = j;
                }
                pivot(i, s);
            }
        }
        if (!run_phase(1)) {
            throw Error("linear program objective is unbounded");
        }
        x = Eigen::VectorXd::Zero(n_);
        for (int i = 0; i < m_; ++i) {
            if (basic_[i] >= 0 && basic_[i] < n_) {
                x(basic_[i]) = d_(i, n_ + 1);
            }
        }
        return d_(m_, n_ + 1);
    }

    int iterations() const { return iterations_; }

 private:
    bool prefer_column(int row, int j, int s) const {
        return std::make_pair(d_(row, j), nonbasic_[j]) <
               std::make_pair(d_(row, s), nonbasic_[s]);
    }

    void pivot(int r, int s) {
        const double inv = 1.0 / d_(r, s);
        const Eigen::VectorXd col = d_.col(s);
        const Eigen::RowVectorXd row = d_.row(r);
        d_.noalias() -= (col * inv) * row;
        d_.row(r) = row * inv;
        d_.col(s) = -col * inv;
        d_(r, s) = inv;
        std::swap(basic_[r], nonbasic_[s]);
        ++iterations_;
    }

    // phase 1 optimizes the real objective (row m), phase 2 the auxiliary
    // one (row m+1). Returns false when the phase objective is unbounded.
    bool run_phase(int phase) {
        const int obj = m_ + phase - 1;
        for (;;) {
            if (iterations_ > max_iterations_) {
                throw ConvergenceError("simplex iteration cap exceeded");
            }
            int s = -1;
            for (int j = 0; j <= n_; ++j) {
                if (nonbasic_[j] == -phase) continue;
                if (s == -1 || prefer_column(obj, j, s)) s = j;
            }
            if (d_(obj, s) >= -kEps) return true;
            int r = -1;
            for (int i = 0; i < m_; ++i) {
                if (d_(i, s) <= kEps) continue;
                if (r == -1 ||
                    std::make_pair(d_(i, n_ + 1) / d_(i, s), basic_[i]) <
                        std::make_pair(d_(r, n_ + 1) / d_(r, s), basic_[r])) {
                    r = i;
                }
            }
            if (r == -1) return false;
            pivot(r, s);
        }
    }

    int m_;
    int n_;
    int max_iterations_;
    int iterations_ = 0;
    Eigen::MatrixXd d_;
    std::vector<int> basic_;
    std::vector<int> nonbasic_;
};

}  // namespace

LpResult lp_minimize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     const Eigen::VectorXd& c, int max_iterations) {
    if (a.rows() != b.size() || a.cols() != c.size()) {
        throw DimensionError("lp_minimize: inconsistent dimensions");
    }
    if (a.cols() == 0) {
        throw DimensionError("lp_minimize: no variables");
    }
    SimplexTableau tableau(a, b, Eigen::VectorXd(-c), max_iterations);
    LpResult result;
    result.objective = -tableau.maximize(result.x);
    result.iterations = tableau.iterations();
    return result;
}

L1Solution l1_min_linf(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                       double eps) {
    if (a.rows() != b.size()) {
        throw DimensionError("l1_min_linf: inconsistent dimensions");
    }
    if (!(eps >= 0.0)) {
        throw DomainError("l1_min_linf: eps must be nonnegative");
    }
    const int p = static_cast<int>(a.rows());
    const int q = static_cast<int>(a.cols());
    Eigen::MatrixXd big(2 * p, 2 * q);
    big.topLeftCorner(p, q) = a;
    big.topRightCorner(p, q) = -a;
    big.bottomLeftCorner(p, q) = -a;
    big.bottomRightCorner(p, q) = a;
    Eigen::VectorXd rhs(2 * p);
    rhs.head(p) = Eigen::VectorXd::Constant(p, eps) + b;
    rhs.tail(p) = Eigen::VectorXd::Constant(p, eps) - b;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2 * q);
    LpResult lp = lp_minimize(big, rhs, ones);
    L1Solution sol;
    sol.z = lp.x.head(q) - lp.x.tail(q);
    sol.l1_norm = sol.z.lpNorm<1>();
    sol.residual_inf = (a * sol.z - b).lpNorm<Eigen::Infinity>();
    return sol;
}

}  // namespace cggm
