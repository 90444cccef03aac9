#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stratopt/clustering.hpp"
#include "stratopt/errors.hpp"
#include "stratopt/rng.hpp"

namespace stratopt {

NgResult neural_gas(const FeatureMatrix& features, int k, double lambda_hi, double lambda_lo,
                    double eps_hi, double eps_lo, int iterations, int age_limit,
                    std::uint64_t seed) {
    const int n = features.rows;
    const int g = features.cols;
    if (k < 2) throw ConfigError("neural_gas: k must be >= 2");
    if (k > n) throw ConfigError("neural_gas: k must not exceed the number of rows");
    if (!(lambda_hi >= lambda_lo) || !(lambda_lo > 0.0)) {
        throw ConfigError("neural_gas: require lambda_hi >= lambda_lo > 0");
    }
    if (!(1.0 >= eps_hi) || !(eps_hi >= eps_lo) || !(eps_lo > 0.0)) {
        throw ConfigError("neural_gas: require 1 >= eps_hi >= eps_lo > 0");
    }
    if (iterations < 1) throw ConfigError("neural_gas: iterations must be >= 1");
    if (age_limit < 1) throw ConfigError("neural_gas: age limit must be >= 1");

    Rng rng(seed);
    NgResult result;
    NeuralGasState& st = result.state;
    st.k = k;
    st.cols = g;
    st.age_limit = age_limit;
    st.weights.resize(static_cast<std::size_t>(k) * g);
    st.connected.assign(static_cast<std::size_t>(k) * k, 0);
    st.age.assign(static_cast<std::size_t>(k) * k, 0);

    const auto init = rng.sample_indices(static_cast<std::size_t>(n), static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        const auto row = features.row(init[c]);
        std::copy(row.begin(), row.end(), st.weights.begin() + static_cast<std::size_t>(c) * g);
    }

    std::vector<double> dist(k);
    std::vector<int> order(k);
    std::vector<int> rank(k);
    auto edge_index = [k](int i, int j) { return static_cast<std::size_t>(i) * k + j; };

    for (int s = 0; s < iterations; ++s) {
        const double frac = static_cast<double>(s) / iterations;
        const double lambda = lambda_hi * std::pow(lambda_lo / lambda_hi, frac);
        const double eps = eps_hi * std::pow(eps_lo / eps_hi, frac);

        const auto x = features.row(rng.index(static_cast<std::size_t>(n)));
        for (int c = 0; c < k; ++c) {
            double d2 = 0.0;
            for (int j = 0; j < g; ++j) {
                const double d = x[j] - st.weights[static_cast<std::size_t>(c) * g + j];
                d2 += d * d;
            }
            dist[c] = d2;
        }
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (dist[a] != dist[b]) return dist[a] < dist[b];
            return a < b;
        });
        for (int r = 0; r < k; ++r) rank[order[r]] = r;

        for (int c = 0; c < k; ++c) {
            const double scale = eps * std::exp(-static_cast<double>(rank[c]) / lambda);
            double* w = st.weights.data() + static_cast<std::size_t>(c) * g;
            for (int j = 0; j < g; ++j) w[j] += scale * (x[j] - w[j]);
        }

        // Competitive Hebbian edge between the two nearest prototypes; ages
        // on the winner's other edges grow and stale edges are removed.
        const int i0 = order[0];
        const int i1 = order[1];
        st.connected[edge_index(i0, i1)] = st.connected[edge_index(i1, i0)] = 1;
        st.age[edge_index(i0, i1)] = st.age[edge_index(i1, i0)] = 0;
        for (int j = 0; j < k; ++j) {
            if (j == i1 || !st.connected[edge_index(i0, j)]) continue;
            const int aged = st.age[edge_index(i0, j)] + 1;
            if (aged > st.age_limit) {
                st.connected[edge_index(i0, j)] = st.connected[edge_index(j, i0)] = 0;
                st.age[edge_index(i0, j)] = st.age[edge_index(j, i0)] = 0;
            } else {
                st.age[edge_index(i0, j)] = st.age[edge_index(j, i0)] = aged;
            }
        }
    }

    result.nearest.resize(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        const auto x = features.row(i);
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int c = 0; c < k; ++c) {
            double d2 = 0.0;
            for (int j = 0; j < g; ++j) {
                const double d = x[j] - st.weights[static_cast<std::size_t>(c) * g + j];
                d2 += d * d;
            }
            if (d2 < best_d) {
                best_d = d2;
                best = c;
            }
        }
        result.nearest[i] = best;
        labels[i] = best + 1;
    }
    result.assignment = compact_labels(labels);
    return result;
}

}  // namespace stratopt
