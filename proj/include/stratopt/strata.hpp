#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stratopt/frame.hpp"

namespace stratopt {

// Indivisible unit of stratification: an atomic stratum (one cell of the
// auxiliary cross product) or a single record in continuous mode. sd is the
// population standard deviation (divisor N), which keeps pooled merges exact.
struct BasicStratum {
    int id = 0;       // unique within its domain, ascending in build order
    int domain = 0;
    std::int64_t n = 0;
    std::vector<double> mean;  // per target
    std::vector<double> sd;    // per target
};

// Basic strata grouped by domain with contiguous ranges.
struct StrataSet {
    std::vector<BasicStratum> items;
    std::vector<int> domain_begin;  // size domains()+1
    int targets = 0;

    int domains() const { return static_cast<int>(domain_begin.size()) - 1; }
    int domain_size(int d) const { return domain_begin[d + 1] - domain_begin[d]; }
    std::span<const BasicStratum> domain_items(int d) const {
        return {items.data() + domain_begin[d], static_cast<std::size_t>(domain_size(d))};
    }
    const BasicStratum& at(int d, int local) const { return items[domain_begin[d] + local]; }
};

// Builder output; members[k] lists the frame record indices pooled into
// items[k] (used by exports, oracles and round-trip checks).
struct StrataBuild {
    StrataSet set;
    std::vector<std::vector<int>> members;
};

// Per-domain partition of basic strata. labels[d][i] is in 1..h[d] and every
// label is used by at least one basic stratum.
struct Stratification {
    std::vector<std::vector<int>> labels;
    std::vector<int> h;

    int domains() const { return static_cast<int>(labels.size()); }
    // Throws InternalError when the partition is not exhaustive/dense.
    void validate(const StrataSet& strata) const;
    std::uint64_t content_hash() const;

    static Stratification single_stratum(const StrataSet& strata);
    static Stratification identity(const StrataSet& strata);
};

// Pooled per-stratum statistics (same moment conventions as BasicStratum).
struct StratumSummary {
    std::int64_t n = 0;
    std::vector<double> mean;
    std::vector<double> sd;
};

// Additive moment accumulator: w_sum = sum N_i*mean_i, w_sq = sum
// N_i*(sd_i^2 + mean_i^2). Moves in the local search add/remove one basic
// stratum at a time; both operations are exact inverses up to rounding.
struct StratumAccum {
    std::int64_t n = 0;
    std::vector<double> w_sum;
    std::vector<double> w_sq;

    explicit StratumAccum(int targets = 0) : w_sum(targets, 0.0), w_sq(targets, 0.0) {}
    void add(const BasicStratum& b);
    void remove(const BasicStratum& b);
    // neg_tol: negative pooled variances beyond -neg_tol*scale raise
    // InternalError; smaller ones clamp to zero as rounding artifacts.
    StratumSummary to_summary(double neg_tol = 1e-9) const;
};

// One cell per (domain, distinct auxiliary tuple); requires C >= 1.
StrataBuild build_atomic_strata(const Frame& frame);

// One basic stratum per record: N=1, mean = record targets, sd = 0.
StrataBuild build_continuous_strata(const Frame& frame);

// Pooled summaries for one domain, one entry per stratum label 1..H.
std::vector<StratumSummary> summarize(const StrataSet& strata, const Stratification& s, int domain);

// Dense row-major matrix of clustering features.
struct FeatureMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    std::span<const double> row(int i) const {
        return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
    }
    std::span<double> row(int i) {
        return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
    }
};

// Z-scores of the domain's basic-stratum target means (divisor N-1, unweighted;
// a zero-variance column becomes zeros). Requires >= 2 basic strata in the
// domain; a lone stratum is a degenerate domain that skips clustering.
FeatureMatrix standardize_features(const StrataSet& strata, int domain);

}  // namespace stratopt
