#include <algorithm>
#include <cmath>
#include <string>

#include "stratopt/clustering.hpp"
#include "stratopt/errors.hpp"
#include "stratopt/rng.hpp"

namespace stratopt {

ClusterAssignment map_through(const std::vector<int>& proto_of_row,
                              const std::vector<int>& label_of_proto) {
    std::vector<int> labels(proto_of_row.size());
    for (std::size_t i = 0; i < proto_of_row.size(); ++i) {
        labels[i] = label_of_proto[proto_of_row[i]];
    }
    return compact_labels(labels);
}

ClusterAssignment cluster_vectors(const FeatureMatrix& vectors, const Stage2Params& params,
                                  std::uint64_t seed) {
    switch (params.kind) {
        case Stage2Kind::Kmeans:
            return kmeans_hw(vectors, params.k, seed, params.max_iter).assignment;
        case Stage2Kind::Em: {
            const auto init = kmeans_hw(vectors, params.k, Rng::derive(seed, 0x11), params.max_iter);
            return em_gmm(vectors, init.assignment.k, init.assignment, params.max_iter, params.tol)
                .assignment;
        }
        case Stage2Kind::Fcm:
            return fuzzy_cmeans(vectors, params.k, params.m, params.max_iter, params.eps, seed)
                .assignment;
    }
    throw ConfigError("unknown stage-2 clusterer");
}

ClusterAssignment two_stage(const FeatureMatrix& features, const Stage1Params& stage1,
                            const Stage2Params& stage2, std::uint64_t seed) {
    const int n = features.rows;
    FeatureMatrix prototypes;
    std::vector<int> proto_of_row(n);

    if (stage1.kind == Stage1Kind::Som) {
        int rows = stage1.rows, cols = stage1.cols;
        if (rows <= 0 || cols <= 0) std::tie(rows, cols) = default_som_grid(n);
        int iterations = stage1.iterations > 0 ? stage1.iterations : std::max(500, 10 * n);
        double radius = stage1.radius;
        if (radius <= 0.0) {
            const double dr = rows - 1, dc = cols - 1;
            radius = std::max(1.0, (2.0 / 3.0) * std::sqrt(dr * dr + dc * dc));
        }
        const auto som = som_train(features, rows, cols, iterations, stage1.alpha_hi,
                                   stage1.alpha_lo, radius, Rng::derive(seed, 0x501));
        prototypes.rows = som.codebook.nodes;
        prototypes.cols = som.codebook.cols;
        prototypes.data = som.codebook.weights;
        proto_of_row = som.bmu;
    } else {
        int k = stage1.prototypes;
        if (k <= 0) {
            k = std::clamp(static_cast<int>(std::lround(5.0 * std::sqrt(static_cast<double>(n)))), 2, n);
        }
        int iterations = stage1.iterations > 0 ? stage1.iterations : std::min(10000, 100 * k);
        const int age_limit = stage1.age_limit > 0 ? stage1.age_limit : 2 * n;
        const auto ng = neural_gas(features, k, stage1.lambda_hi, stage1.lambda_lo, stage1.eps_hi,
                                   stage1.eps_lo, iterations, age_limit, Rng::derive(seed, 0x502));
        prototypes.rows = ng.state.k;
        prototypes.cols = ng.state.cols;
        prototypes.data = ng.state.weights;
        proto_of_row = ng.nearest;
    }

    if (prototypes.rows < stage2.k) {
        throw ConfigError("two_stage: stage-1 produced " + std::to_string(prototypes.rows) +
                          " prototypes, fewer than the " + std::to_string(stage2.k) +
                          " clusters requested for stage 2");
    }
    const auto proto_labels = cluster_vectors(prototypes, stage2, Rng::derive(seed, 0x503));
    return map_through(proto_of_row, proto_labels.labels);
}

}  // namespace stratopt
