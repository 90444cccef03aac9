#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stratopt/allocation.hpp"
#include "stratopt/strata.hpp"

namespace stratopt {

// Hard partition of feature rows. Labels are 1..k and every label occurs at
// least once (empty clusters are removed and labels renumbered).
struct ClusterAssignment {
    std::vector<int> labels;
    int k = 0;
};

// Drops unused labels and renumbers the rest, preserving label order.
ClusterAssignment compact_labels(const std::vector<int>& raw_labels);

// ---------------------------------------------------------------------------
// K-means (batch updates; converges when no row moves or the SSE would rise)
// ---------------------------------------------------------------------------

struct KmeansResult {
    ClusterAssignment assignment;
    std::vector<double> centroids;  // k x cols, row-major (after compaction)
    double sse = 0.0;
    int iterations = 0;
    std::vector<double> sse_trace;  // SSE after each accepted iteration
};

KmeansResult kmeans_hw(const FeatureMatrix& features, int k, std::uint64_t seed, int max_iter = 100);

// Runs kmeans_hw for every K in 1..min(k_max, rows), scores each candidate
// with the allocation cost of this domain, returns the cheapest (ties toward
// the smaller K). Outputs labels for the domain plus the scan curve.
struct KmeansScanResult {
    std::vector<int> labels;  // 1..h for the domain's basic strata
    int h = 0;
    double cost = 0.0;
    std::vector<double> cost_by_k;  // index 0 -> K=1
};

KmeansScanResult kmeans_scan(const StrataSet& strata, int domain, int k_max, std::uint64_t seed,
                             const PrecisionSpec& spec, int max_iter = 100);

// ---------------------------------------------------------------------------
// Gaussian mixture EM (full covariance; ridge only when a component collapses)
// ---------------------------------------------------------------------------

// Soft partition; each row sums to 1.
struct MembershipMatrix {
    int rows = 0;
    int k = 0;
    std::vector<double> u;  // rows x k, row-major

    double at(int i, int j) const { return u[static_cast<std::size_t>(i) * k + j]; }
};

struct EmResult {
    MembershipMatrix membership;
    ClusterAssignment assignment;
    std::vector<double> log_likelihood;  // one entry per iteration
    bool converged = false;
};

EmResult em_gmm(const FeatureMatrix& features, int k, const ClusterAssignment& init,
                int max_iter = 100, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Self-organising map (rectangular grid, bubble neighbourhood, linear decay)
// ---------------------------------------------------------------------------

struct Codebook {
    std::vector<double> weights;  // nodes x cols, row-major
    int nodes = 0;
    int cols = 0;
    int grid_rows = 0;
    int grid_cols = 0;

    std::span<const double> node(int i) const {
        return {weights.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
    }
};

struct SomResult {
    Codebook codebook;
    ClusterAssignment assignment;  // best-matching node per row, compacted
    std::vector<int> bmu;          // raw best-matching node index per row
};

SomResult som_train(const FeatureMatrix& features, int rows, int cols, int iterations,
                    double alpha_hi, double alpha_lo, double radius, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Fuzzy c-means
// ---------------------------------------------------------------------------

struct FcmResult {
    MembershipMatrix membership;
    ClusterAssignment assignment;
    std::vector<double> centroids;  // k x cols
    std::vector<double> objective;  // sum u^m d^2 after each iteration
    int iterations = 0;
};

FcmResult fuzzy_cmeans(const FeatureMatrix& features, int k, double m, int max_iter, double eps,
                       std::uint64_t seed);

// Membership row for one point given its distances to the centroids
// (exposed for direct testing of the update rule, d == 0 handling included).
std::vector<double> fcm_memberships(const std::vector<double>& distances, double m);

// ---------------------------------------------------------------------------
// Neural gas with competitive Hebbian edge aging
// ---------------------------------------------------------------------------

struct NeuralGasState {
    std::vector<double> weights;  // k x cols, row-major
    int k = 0;
    int cols = 0;
    std::vector<std::uint8_t> connected;  // k x k, symmetric
    std::vector<int> age;                 // k x k, tracked where connected
    int age_limit = 0;

    std::span<const double> prototype(int i) const {
        return {weights.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
    }
    bool edge(int i, int j) const { return connected[static_cast<std::size_t>(i) * k + j] != 0; }
};

struct NgResult {
    NeuralGasState state;
    ClusterAssignment assignment;  // nearest prototype per row, compacted
    std::vector<int> nearest;      // raw prototype index per row
};

NgResult neural_gas(const FeatureMatrix& features, int k, double lambda_hi, double lambda_lo,
                    double eps_hi, double eps_lo, int iterations, int age_limit,
                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Two-stage prototype clustering
// ---------------------------------------------------------------------------

enum class Stage1Kind { Som, NeuralGas };
enum class Stage2Kind { Kmeans, Em, Fcm };

struct Stage1Params {
    Stage1Kind kind = Stage1Kind::Som;
    // SOM
    int rows = 0;
    int cols = 0;
    int iterations = 0;
    double alpha_hi = 0.9;
    double alpha_lo = 0.01;
    double radius = 0.0;  // <= 0: 2/3 of the grid diameter
    // Neural gas
    int prototypes = 0;  // <= 0: about 5*sqrt(N), capped at N
    double lambda_hi = 10.0;
    double lambda_lo = 0.5;
    double eps_hi = 0.5;
    double eps_lo = 0.05;
    int age_limit = 0;  // <= 0: 2*N
};

struct Stage2Params {
    Stage2Kind kind = Stage2Kind::Kmeans;
    int k = 2;
    double m = 2.0;  // fuzzy exponent
    int max_iter = 100;
    double tol = 1e-8;
    double eps = 1e-6;
};

// Abstract the rows to stage-1 prototypes, cluster the prototype vectors with
// stage 2, then give every row the label of its prototype. Rows sharing a
// prototype always share a final label.
ClusterAssignment two_stage(const FeatureMatrix& features, const Stage1Params& stage1,
                            const Stage2Params& stage2, std::uint64_t seed);

// Final labels from a row->prototype map and a prototype->cluster map.
ClusterAssignment map_through(const std::vector<int>& proto_of_row,
                              const std::vector<int>& label_of_proto);

// Cluster a plain matrix of vectors with a stage-2 method (used on prototype
// codebooks; also callable on raw features, which makes the two paths
// directly comparable in tests).
ClusterAssignment cluster_vectors(const FeatureMatrix& vectors, const Stage2Params& params,
                                  std::uint64_t seed);

// Default SOM grid for n rows: about 5*sqrt(n) nodes, aspect ratio near 1,
// never more nodes than rows, at least 2.
std::pair<int, int> default_som_grid(int n);

}  // namespace stratopt
