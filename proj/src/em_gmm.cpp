#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "stratopt/clustering.hpp"
#include "stratopt/errors.hpp"

namespace stratopt {
namespace {

// Lower Cholesky factor of a row-major symmetric matrix; false if not SPD.
bool cholesky(const std::vector<double>& a, int g, std::vector<double>& lower) {
    lower.assign(static_cast<std::size_t>(g) * g, 0.0);
    for (int i = 0; i < g; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = a[static_cast<std::size_t>(i) * g + j];
            for (int t = 0; t < j; ++t) {
                s -= lower[static_cast<std::size_t>(i) * g + t] * lower[static_cast<std::size_t>(j) * g + t];
            }
            if (i == j) {
                if (s <= 0.0 || !std::isfinite(s)) return false;
                lower[static_cast<std::size_t>(i) * g + i] = std::sqrt(s);
            } else {
                lower[static_cast<std::size_t>(i) * g + j] = s / lower[static_cast<std::size_t>(j) * g + j];
            }
        }
    }
    return true;
}

struct Component {
    double weight = 0.0;
    std::vector<double> mean;
    std::vector<double> cov;    // g x g
    std::vector<double> chol;   // lower factor
    double log_det = 0.0;
};

double log_density(const Component& c, std::span<const double> x, std::vector<double>& scratch, int g) {
    // Solve L y = (x - mean); quad = |y|^2.
    scratch.resize(g);
    double quad = 0.0;
    for (int i = 0; i < g; ++i) {
        double s = x[i] - c.mean[i];
        for (int j = 0; j < i; ++j) s -= c.chol[static_cast<std::size_t>(i) * g + j] * scratch[j];
        scratch[i] = s / c.chol[static_cast<std::size_t>(i) * g + i];
        quad += scratch[i] * scratch[i];
    }
    return -0.5 * (g * std::log(2.0 * std::numbers::pi) + c.log_det + quad);
}

}  // namespace

EmResult em_gmm(const FeatureMatrix& features, int k, const ClusterAssignment& init, int max_iter,
                double tol) {
    const int n = features.rows;
    const int g = features.cols;
    if (k < 1) throw ConfigError("em_gmm: k must be >= 1");
    if (init.k != k || static_cast<int>(init.labels.size()) != n) {
        throw ConfigError("em_gmm: initial assignment must have k clusters covering all rows");
    }

    // Per-dimension data variance, used for the collapse ridge and floor.
    std::vector<double> data_var(g, 0.0), data_mean(g, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto row = features.row(i);
        for (int j = 0; j < g; ++j) data_mean[j] += row[j];
    }
    for (int j = 0; j < g; ++j) data_mean[j] /= n;
    for (int i = 0; i < n; ++i) {
        const auto row = features.row(i);
        for (int j = 0; j < g; ++j) {
            const double d = row[j] - data_mean[j];
            data_var[j] += d * d;
        }
    }
    for (int j = 0; j < g; ++j) data_var[j] = std::max(data_var[j] / n, 1e-12);

    std::vector<Component> comps(k);
    std::vector<double> resp(static_cast<std::size_t>(n) * k, 0.0);
    for (int i = 0; i < n; ++i) resp[static_cast<std::size_t>(i) * k + (init.labels[i] - 1)] = 1.0;

    // Re-estimates one component from its responsibilities; returns false when
    // the component is dead or its covariance cannot be repaired.
    auto m_step_component = [&](int c) {
        Component& comp = comps[c];
        double nk = 0.0;
        for (int i = 0; i < n; ++i) nk += resp[static_cast<std::size_t>(i) * k + c];
        if (nk < 1e-10) return false;
        comp.weight = nk / n;
        comp.mean.assign(g, 0.0);
        for (int i = 0; i < n; ++i) {
            const double r = resp[static_cast<std::size_t>(i) * k + c];
            if (r == 0.0) continue;
            const auto row = features.row(i);
            for (int j = 0; j < g; ++j) comp.mean[j] += r * row[j];
        }
        for (int j = 0; j < g; ++j) comp.mean[j] /= nk;
        comp.cov.assign(static_cast<std::size_t>(g) * g, 0.0);
        for (int i = 0; i < n; ++i) {
            const double r = resp[static_cast<std::size_t>(i) * k + c];
            if (r == 0.0) continue;
            const auto row = features.row(i);
            for (int a = 0; a < g; ++a) {
                const double da = row[a] - comp.mean[a];
                for (int b = 0; b <= a; ++b) {
                    comp.cov[static_cast<std::size_t>(a) * g + b] += r * da * (row[b] - comp.mean[b]);
                }
            }
        }
        for (int a = 0; a < g; ++a) {
            for (int b = 0; b <= a; ++b) {
                comp.cov[static_cast<std::size_t>(a) * g + b] /= nk;
                comp.cov[static_cast<std::size_t>(b) * g + a] = comp.cov[static_cast<std::size_t>(a) * g + b];
            }
        }
        bool floored = false;
        for (int j = 0; j < g; ++j) {
            if (comp.cov[static_cast<std::size_t>(j) * g + j] < 1e-10 * data_var[j]) floored = true;
        }
        if (floored || !cholesky(comp.cov, g, comp.chol)) {
            // Collapsed: add the ridge and retry once.
            for (int j = 0; j < g; ++j) comp.cov[static_cast<std::size_t>(j) * g + j] += 1e-6 * data_var[j];
            if (!cholesky(comp.cov, g, comp.chol)) return false;
        }
        comp.log_det = 0.0;
        for (int j = 0; j < g; ++j) {
            comp.log_det += 2.0 * std::log(comp.chol[static_cast<std::size_t>(j) * g + j]);
        }
        return true;
    };

    auto drop_component = [&](int c) {
        comps.erase(comps.begin() + c);
        for (int i = 0; i < n; ++i) {
            double* row = resp.data() + static_cast<std::size_t>(i) * k;
            for (int j = c; j + 1 < k; ++j) row[j] = row[j + 1];
        }
        --k;
        // Rebuild the tightly packed responsibility matrix.
        std::vector<double> packed(static_cast<std::size_t>(n) * k);
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j = 0; j < k; ++j) sum += resp[static_cast<std::size_t>(i) * (k + 1) + j];
            for (int j = 0; j < k; ++j) {
                packed[static_cast<std::size_t>(i) * k + j] =
                    sum > 0.0 ? resp[static_cast<std::size_t>(i) * (k + 1) + j] / sum : 1.0 / k;
            }
        }
        resp = std::move(packed);
        double wsum = 0.0;
        for (const auto& comp : comps) wsum += comp.weight;
        for (auto& comp : comps) comp.weight /= wsum;
    };

    for (int c = 0; c < k;) {
        if (!m_step_component(c)) {
            if (k == 1) throw ConfigError("em_gmm: the single component is degenerate");
            drop_component(c);
        } else {
            ++c;
        }
    }

    EmResult result;
    std::vector<double> scratch, logp(k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        // E-step with per-row log-sum-exp.
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            double row_max = -std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                logp[c] = std::log(comps[c].weight) + log_density(comps[c], features.row(i), scratch, g);
                row_max = std::max(row_max, logp[c]);
            }
            double sum = 0.0;
            for (int c = 0; c < k; ++c) sum += std::exp(logp[c] - row_max);
            const double lse = row_max + std::log(sum);
            ll += lse;
            for (int c = 0; c < k; ++c) {
                resp[static_cast<std::size_t>(i) * k + c] = std::exp(logp[c] - lse);
            }
        }
        result.log_likelihood.push_back(ll);
        if (ll - prev_ll < tol && it > 0) {
            result.converged = true;
            break;
        }
        prev_ll = ll;

        for (int c = 0; c < k;) {
            if (!m_step_component(c)) {
                if (k == 1) throw ConfigError("em_gmm: the single component is degenerate");
                drop_component(c);
                logp.resize(k);
            } else {
                ++c;
            }
        }
    }

    result.membership.rows = n;
    result.membership.k = k;
    result.membership.u = resp;
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_r = resp[static_cast<std::size_t>(i) * k];
        for (int c = 1; c < k; ++c) {
            const double r = resp[static_cast<std::size_t>(i) * k + c];
            if (r > best_r) {  // ties stay with the lower index
                best_r = r;
                best = c;
            }
        }
        labels[i] = best + 1;
    }
    result.assignment = compact_labels(labels);
    return result;
}

}  // namespace stratopt
