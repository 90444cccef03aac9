#include <algorithm>
#include <cmath>
#include <limits>

#include "stratopt/clustering.hpp"
#include "stratopt/errors.hpp"
#include "stratopt/rng.hpp"

namespace stratopt {

std::vector<double> fcm_memberships(const std::vector<double>& distances, double m) {
    const int k = static_cast<int>(distances.size());
    std::vector<double> u(k, 0.0);
    // A point coincident with a centroid belongs there outright.
    for (int c = 0; c < k; ++c) {
        if (distances[c] == 0.0) {
            u[c] = 1.0;
            return u;
        }
    }
    // u_c = d_c^{-e} / sum_q d_q^{-e}, rescaled by the nearest distance so the
    // powers stay in (0, 1] even for small m.
    const double e = 2.0 / (m - 1.0);
    const double d_min = *std::min_element(distances.begin(), distances.end());
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
        u[c] = std::pow(d_min / distances[c], e);
        sum += u[c];
    }
    for (int c = 0; c < k; ++c) u[c] /= sum;
    return u;
}

FcmResult fuzzy_cmeans(const FeatureMatrix& features, int k, double m, int max_iter, double eps,
                       std::uint64_t seed) {
    const int n = features.rows;
    const int g = features.cols;
    if (k < 2) throw ConfigError("fuzzy_cmeans: k must be >= 2");
    if (!(m > 1.0)) throw ConfigError("fuzzy_cmeans: weighting exponent m must be > 1");
    if (k > n) throw ConfigError("fuzzy_cmeans: k must not exceed the number of rows");

    Rng rng(seed);
    MembershipMatrix u;
    u.rows = n;
    u.k = k;
    u.u.resize(static_cast<std::size_t>(n) * k);
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int c = 0; c < k; ++c) {
            const double v = rng.uniform() + 1e-9;
            u.u[static_cast<std::size_t>(i) * k + c] = v;
            sum += v;
        }
        for (int c = 0; c < k; ++c) u.u[static_cast<std::size_t>(i) * k + c] /= sum;
    }

    FcmResult result;
    result.centroids.assign(static_cast<std::size_t>(k) * g, 0.0);
    std::vector<double> dist(k);

    for (int it = 0; it < max_iter; ++it) {
        // Centroid update from the current memberships.
        std::vector<double> num(static_cast<std::size_t>(k) * g, 0.0), den(k, 0.0);
        for (int i = 0; i < n; ++i) {
            const auto row = features.row(i);
            for (int c = 0; c < k; ++c) {
                const double w = std::pow(u.u[static_cast<std::size_t>(i) * k + c], m);
                den[c] += w;
                for (int j = 0; j < g; ++j) num[static_cast<std::size_t>(c) * g + j] += w * row[j];
            }
        }
        for (int c = 0; c < k; ++c) {
            for (int j = 0; j < g; ++j) {
                result.centroids[static_cast<std::size_t>(c) * g + j] =
                    den[c] > 0.0 ? num[static_cast<std::size_t>(c) * g + j] / den[c]
                                 : result.centroids[static_cast<std::size_t>(c) * g + j];
            }
        }

        // Membership update; track the largest change for the stop rule.
        double max_change = 0.0;
        double objective = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto row = features.row(i);
            for (int c = 0; c < k; ++c) {
                double s = 0.0;
                for (int j = 0; j < g; ++j) {
                    const double d = row[j] - result.centroids[static_cast<std::size_t>(c) * g + j];
                    s += d * d;
                }
                dist[c] = std::sqrt(s);
            }
            const auto updated = fcm_memberships(dist, m);
            for (int c = 0; c < k; ++c) {
                double& cell = u.u[static_cast<std::size_t>(i) * k + c];
                max_change = std::max(max_change, std::abs(updated[c] - cell));
                cell = updated[c];
                objective += std::pow(cell, m) * dist[c] * dist[c];
            }
        }
        result.objective.push_back(objective);
        result.iterations = it + 1;
        if (max_change < eps) break;
    }

    result.membership = u;
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_u = u.u[static_cast<std::size_t>(i) * k];
        for (int c = 1; c < k; ++c) {
            const double v = u.u[static_cast<std::size_t>(i) * k + c];
            if (v > best_u) {
                best_u = v;
                best = c;
            }
        }
        labels[i] = best + 1;
    }
    result.assignment = compact_labels(labels);
    return result;
}

}  // namespace stratopt
