#include <algorithm>
#include <cmath>
#include <limits>

#include "stratopt/clustering.hpp"
#include "stratopt/errors.hpp"
#include "stratopt/rng.hpp"

namespace stratopt {
namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

}  // namespace

std::pair<int, int> default_som_grid(int n) {
    int nodes = static_cast<int>(std::lround(5.0 * std::sqrt(static_cast<double>(n))));
    nodes = std::clamp(nodes, 2, std::max(2, n));
    int rows = std::max(1, static_cast<int>(std::lround(std::sqrt(static_cast<double>(nodes)))));
    int cols = std::max(1, (nodes + rows - 1) / rows);
    while (rows * cols > std::max(2, n) && cols > 1) --cols;
    if (rows * cols < 2) cols = 2;
    return {rows, cols};
}

SomResult som_train(const FeatureMatrix& features, int rows, int cols, int iterations,
                    double alpha_hi, double alpha_lo, double radius, std::uint64_t seed) {
    const int n = features.rows;
    const int g = features.cols;
    const int nodes = rows * cols;
    if (nodes < 2) throw ConfigError("som: grid must have at least 2 nodes");
    if (!(alpha_hi >= alpha_lo) || !(alpha_lo > 0.0)) {
        throw ConfigError("som: require alpha_hi >= alpha_lo > 0");
    }
    if (iterations < 1) throw ConfigError("som: iterations must be >= 1");
    for (double v : features.data) {
        if (!std::isfinite(v)) throw ConfigError("som: non-finite feature value");
    }

    Rng rng(seed);
    SomResult result;
    Codebook& book = result.codebook;
    book.nodes = nodes;
    book.cols = g;
    book.grid_rows = rows;
    book.grid_cols = cols;
    book.weights.resize(static_cast<std::size_t>(nodes) * g);

    // Initial weights are sampled data rows (distinct while they last).
    if (nodes <= n) {
        const auto idx = rng.sample_indices(static_cast<std::size_t>(n), static_cast<std::size_t>(nodes));
        for (int v = 0; v < nodes; ++v) {
            const auto row = features.row(idx[v]);
            std::copy(row.begin(), row.end(), book.weights.begin() + static_cast<std::size_t>(v) * g);
        }
    } else {
        for (int v = 0; v < nodes; ++v) {
            const auto row = features.row(rng.index(static_cast<std::size_t>(n)));
            std::copy(row.begin(), row.end(), book.weights.begin() + static_cast<std::size_t>(v) * g);
        }
    }

    auto grid_dist = [cols](int u, int v) {
        const double dr = static_cast<double>(u / cols - v / cols);
        const double dc = static_cast<double>(u % cols - v % cols);
        return std::sqrt(dr * dr + dc * dc);
    };
    auto best_matching = [&](std::span<const double> x) {
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int v = 0; v < nodes; ++v) {
            const double d = sq_dist(x, book.node(v));
            if (d < best_d) {
                best_d = d;
                best = v;
            }
        }
        return best;
    };

    for (int s = 0; s < iterations; ++s) {
        const double frac = static_cast<double>(s) / iterations;
        const double alpha = alpha_hi + (alpha_lo - alpha_hi) * frac;
        const double r = radius + (1.0 - radius) * frac;  // moves toward 1 either way
        const auto x = features.row(rng.index(static_cast<std::size_t>(n)));
        const int winner = best_matching(x);
        for (int v = 0; v < nodes; ++v) {
            if (grid_dist(winner, v) > r) continue;  // bubble neighbourhood
            double* w = book.weights.data() + static_cast<std::size_t>(v) * g;
            for (int j = 0; j < g; ++j) w[j] += alpha * (x[j] - w[j]);
        }
    }

    result.bmu.resize(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        result.bmu[i] = best_matching(features.row(i));
        labels[i] = result.bmu[i] + 1;
    }
    result.assignment = compact_labels(labels);
    return result;
}

}  // namespace stratopt
