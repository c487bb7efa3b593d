#pragma once

#include <optional>
#include <vector>

#include "cggm/graphs.hpp"
#include "cggm/precision.hpp"

namespace cggm {

enum class Method { BY, BH };

const char* method_name(Method method);

// Outcome of a step-up selection over the edge statistics. `selected` holds
// full copies of the selected records, each with |stat| >= cutoff. The
// empirical fields stay empty until score() results are attached by a caller
// that has ground truth.
struct FdrReport {
    double alpha = 0.0;
    Method method = Method::BY;
    double cutoff = 0.0;
    int n_hypotheses = 0;
    int n_rejections = 0;
    std::vector<EdgeInference> selected;
    std::optional<double> empirical_fdr;
    std::optional<double> empirical_power;
};

struct Scores {
    double fdr = 0.0;
    double power = 0.0;
};

// Step-up rule under arbitrary dependence: sort |stat| descending as w_1 >=
// w_2 >= ..., find the largest r with w_r >= quantile(1 - alpha*r/(2*N*H))
// where H is the hypothesis count and N the harmonic sum 1 + 1/2 + ... + 1/H,
// reject the top r. NaN statistics count in H but are never rejected.
FdrReport by_cutoff(const std::vector<EdgeInference>& stats, double alpha);

// Same scan with N = 1 (valid under independence, anti-conservative compared
// to by_cutoff: it always rejects a superset).
FdrReport bh_cutoff(const std::vector<EdgeInference>& stats, double alpha);

// fdr = false rejections / max(rejections, 1); power = fraction of true
// edges selected (0 when the truth has no edges).
Scores score(const FdrReport& report, const GroundTruthEdges& truth,
             GraphKind kind);

// Standard normal CDF.
double phi(double x);

// Standard normal quantile, |phi(phi_inv(p)) - p| <= 1e-10 on (0,1).
double phi_inv(double p);

// 1 + 1/2 + ... + 1/m.
double harmonic_number(int m);

}  // namespace cggm
