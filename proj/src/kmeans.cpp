#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stratopt/clustering.hpp"
#include "stratopt/errors.hpp"
#include "stratopt/rng.hpp"

namespace stratopt {

ClusterAssignment compact_labels(const std::vector<int>& raw_labels) {
    int max_label = 0;
    for (int lab : raw_labels) max_label = std::max(max_label, lab);
    std::vector<int> remap(max_label + 1, 0);
    for (int lab : raw_labels) remap[lab] = 1;
    int next = 0;
    for (int lab = 1; lab <= max_label; ++lab) {
        if (remap[lab]) remap[lab] = ++next;
    }
    ClusterAssignment out;
    out.k = next;
    out.labels.resize(raw_labels.size());
    for (std::size_t i = 0; i < raw_labels.size(); ++i) out.labels[i] = remap[raw_labels[i]];
    return out;
}

namespace {

double sq_dist(std::span<const double> a, const double* b, int cols) {
    double s = 0.0;
    for (int j = 0; j < cols; ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

}  // namespace

KmeansResult kmeans_hw(const FeatureMatrix& features, int k, std::uint64_t seed, int max_iter) {
    const int n = features.rows;
    const int g = features.cols;
    if (k < 1 || k > n) {
        throw ConfigError("kmeans: k must be in [1, rows], got k=" + std::to_string(k) +
                          " rows=" + std::to_string(n));
    }

    Rng rng(seed);
    const auto init = rng.sample_indices(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
    std::vector<double> centroids(static_cast<std::size_t>(k) * g);
    for (int c = 0; c < k; ++c) {
        const auto row = features.row(init[c]);
        std::copy(row.begin(), row.end(), centroids.begin() + static_cast<std::size_t>(c) * g);
    }

    std::vector<int> assign(n, -1);
    std::vector<int> counts(k);
    std::vector<double> means(static_cast<std::size_t>(k) * g);
    double prev_sse = std::numeric_limits<double>::infinity();

    KmeansResult result;
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        double sse = 0.0;
        std::vector<int> next(n);
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(features.row(i), centroids.data(), g);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(features.row(i), centroids.data() + static_cast<std::size_t>(c) * g, g);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            next[i] = best;
            sse += best_d;
            if (best != assign[i]) changed = true;
        }
        if (sse > prev_sse) break;  // would worsen; keep the previous state
        assign = next;
        prev_sse = sse;
        result.sse = sse;
        result.iterations = it + 1;
        result.sse_trace.push_back(sse);
        if (!changed && it > 0) break;

        std::fill(counts.begin(), counts.end(), 0);
        std::fill(means.begin(), means.end(), 0.0);
        for (int i = 0; i < n; ++i) {
            counts[assign[i]]++;
            const auto row = features.row(i);
            double* m = means.data() + static_cast<std::size_t>(assign[i]) * g;
            for (int j = 0; j < g; ++j) m[j] += row[j];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;  // empty cluster keeps its centroid
            double* m = means.data() + static_cast<std::size_t>(c) * g;
            double* ctr = centroids.data() + static_cast<std::size_t>(c) * g;
            for (int j = 0; j < g; ++j) ctr[j] = m[j] / counts[c];
        }
    }

    std::vector<int> one_based(n);
    for (int i = 0; i < n; ++i) one_based[i] = assign[i] + 1;
    result.assignment = compact_labels(one_based);

    // Centroids of the compacted clusters, recomputed from the assignment.
    result.centroids.assign(static_cast<std::size_t>(result.assignment.k) * g, 0.0);
    std::vector<int> sz(result.assignment.k, 0);
    for (int i = 0; i < n; ++i) {
        const int c = result.assignment.labels[i] - 1;
        sz[c]++;
        const auto row = features.row(i);
        for (int j = 0; j < g; ++j) result.centroids[static_cast<std::size_t>(c) * g + j] += row[j];
    }
    for (int c = 0; c < result.assignment.k; ++c) {
        for (int j = 0; j < g; ++j) result.centroids[static_cast<std::size_t>(c) * g + j] /= sz[c];
    }
    return result;
}

KmeansScanResult kmeans_scan(const StrataSet& strata, int domain, int k_max, std::uint64_t seed,
                             const PrecisionSpec& spec, int max_iter) {
    const int n = strata.domain_size(domain);
    if (k_max < 2) throw ConfigError("kmeans_scan: k_max must be >= 2");
    KmeansScanResult best;

    if (n == 1) {  // degenerate domain: the lone stratum forms its own cluster
        best.labels = {1};
        best.h = 1;
        Stratification s;
        s.labels = {best.labels};
        s.h = {1};
        StrataSet one;
        one.items.assign(strata.domain_items(domain).begin(), strata.domain_items(domain).end());
        one.domain_begin = {0, 1};
        one.targets = strata.targets;
        best.cost = bethel_allocate(summarize(one, s, 0), spec).total;
        best.cost_by_k = {best.cost};
        return best;
    }

    const FeatureMatrix features = standardize_features(strata, domain);
    const int upper = std::min(k_max, n);

    // Scoring uses a single-domain stratification view over the full set.
    auto domain_cost = [&](const std::vector<int>& labels, int h) {
        std::vector<StratumAccum> accums(h, StratumAccum(strata.targets));
        const auto items = strata.domain_items(domain);
        for (std::size_t i = 0; i < items.size(); ++i) accums[labels[i] - 1].add(items[i]);
        std::vector<StratumSummary> summaries;
        summaries.reserve(h);
        for (const auto& acc : accums) summaries.push_back(acc.to_summary(1e-9));
        return bethel_allocate(summaries, spec).total;
    };

    best.cost = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= upper; ++k) {
        std::vector<int> labels;
        int h = 0;
        if (k == 1) {
            labels.assign(n, 1);
            h = 1;
        } else {
            const auto km = kmeans_hw(features, k, Rng::derive(seed, static_cast<std::uint64_t>(k)),
                                      max_iter);
            labels = km.assignment.labels;
            h = km.assignment.k;
        }
        const double cost = domain_cost(labels, h);
        best.cost_by_k.push_back(cost);
        if (cost < best.cost) {  // strict: ties stay with the smaller K
            best.cost = cost;
            best.labels = std::move(labels);
            best.h = h;
        }
    }
    return best;
}

}  // namespace stratopt
