#include "cggm/fdr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "cggm/errors.hpp"

namespace cggm {

const char* method_name(Method method) {
    return method == Method::BY ? "by" : "bh";
}

double phi(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double harmonic_number(int m) {
    if (m < 1) {
        throw DomainError("harmonic_number: need m >= 1");
    }
    double h = 0.0;
    for (int i = 1; i <= m; ++i) h += 1.0 / double(i);
    return h;
}

double phi_inv(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("phi_inv: p must be in (0,1)");
    }
    // Rational starting point (Acklam's approximation, ~1e-9 absolute), then
    // Newton on phi to land well inside 1e-10.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
            q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    constexpr double kSqrt2Pi = 2.5066282746310002;
    for (int it = 0; it < 2; ++it) {
        const double density = std::exp(-x * x / 2.0) / kSqrt2Pi;
        if (density <= 0.0) break;
        x -= (phi(x) - p) / density;
    }
    return x;
}

namespace {

// Shared step-up scan; `inflation` is the harmonic sum or 1.
FdrReport step_up(const std::vector<EdgeInference>& stats, double alpha,
                  Method method, double inflation) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("step_up: alpha must be in (0,1)");
    }
    FdrReport report;
    report.alpha = alpha;
    report.method = method;
    report.n_hypotheses = int(stats.size());
    if (stats.empty()) {
        report.cutoff = std::numeric_limits<double>::infinity();
        return report;
    }

    const double h = double(stats.size());
    std::vector<double> magnitudes;
    magnitudes.reserve(stats.size());
    for (const EdgeInference& e : stats) {
        if (std::isfinite(e.stat)) magnitudes.push_back(std::abs(e.stat));
    }
    std::sort(magnitudes.begin(), magnitudes.end(), std::greater<double>());

    const auto quantile_at = [&](int r) {
        const double tail = alpha * double(r) / (2.0 * inflation * h);
        // alpha < 1 and r <= H keep the argument inside (0.5, 1).
        return phi_inv(1.0 - tail);
    };

    int best_r = 0;
    for (int r = int(magnitudes.size()); r >= 1; --r) {
        if (magnitudes[size_t(r) - 1] >= quantile_at(r)) {
            best_r = r;
            break;
        }
    }
    report.cutoff = quantile_at(std::max(best_r, 1));
    if (best_r > 0) {
        for (const EdgeInference& e : stats) {
            if (std::isfinite(e.stat) && std::abs(e.stat) >= report.cutoff) {
                report.selected.push_back(e);
            }
        }
    }
    report.n_rejections = int(report.selected.size());
    return report;
}

}  // namespace

FdrReport by_cutoff(const std::vector<EdgeInference>& stats, double alpha) {
    const double inflation =
        stats.empty() ? 1.0 : harmonic_number(int(stats.size()));
    return step_up(stats, alpha, Method::BY, inflation);
}

FdrReport bh_cutoff(const std::vector<EdgeInference>& stats, double alpha) {
    return step_up(stats, alpha, Method::BH, 1.0);
}

Scores score(const FdrReport& report, const GroundTruthEdges& truth,
             GraphKind kind) {
    const std::set<std::pair<int, int>>& h1 =
        kind == GraphKind::Latent ? truth.latent : truth.average;
    int true_hits = 0;
    int false_hits = 0;
    for (const EdgeInference& e : report.selected) {
        const std::pair<int, int> edge{std::min(e.t, e.k), std::max(e.t, e.k)};
        if (h1.count(edge)) {
            ++true_hits;
        } else {
            ++false_hits;
        }
    }
    Scores s;
    s.fdr = double(false_hits) / double(std::max(report.n_rejections, 1));
    s.power = h1.empty() ? 0.0 : double(true_hits) / double(h1.size());
    return s;
}

}  // namespace cggm
