#pragma once

#include <cstdint>
#include <vector>

#include "stratopt/allocation.hpp"
#include "stratopt/rng.hpp"
#include "stratopt/strata.hpp"

namespace stratopt {

// A single-unit move: basic stratum basic_index (domain-local) leaves stratum
// from_label for to_label; to_label == H_d + 1 opens a new stratum.
struct MoveProposal {
    int domain = 0;
    int basic_index = 0;
    int from_label = 0;
    int to_label = 0;
};

// Current solution plus the per-domain caches that make delta evaluation
// O(one domain) instead of O(whole problem).
class SearchState {
public:
    SearchState(const StrataSet& strata, Stratification initial, const PrecisionSpec& spec,
                const BethelOptions& options = {});

    const Stratification& stratification() const { return strat_; }
    double total_cost() const { return total_cost_; }
    double domain_cost(int d) const { return domain_cost_[d]; }
    const AllocationResult& domain_allocation(int d) const { return domain_alloc_[d]; }
    std::vector<AllocationResult> allocations() const { return domain_alloc_; }
    const StrataSet& strata() const { return *strata_; }
    const PrecisionSpec& precision() const { return spec_; }

    // Count of basic strata living in movable (>= 2 basic strata) domains.
    int movable_count() const { return movable_total_; }

    struct Delta {
        MoveProposal move;
        double new_total = 0.0;
        double new_domain_cost = 0.0;
        AllocationResult new_alloc;
        StratumAccum source;       // after removal (n == 0 when emptied)
        StratumAccum destination;  // after insertion
        bool source_emptied = false;
    };

    // Cost of the move without mutating the state. Throws InternalError if the
    // incremental removal exposes cache corruption.
    Delta evaluate(const MoveProposal& move) const;

    // Commit a previously evaluated move (labels compacted when the source
    // stratum empties).
    void apply(const Delta& delta);

private:
    const StrataSet* strata_;
    PrecisionSpec spec_;
    BethelOptions options_;
    Stratification strat_;
    std::vector<std::vector<StratumAccum>> accums_;  // per domain, per label
    // Per stratum, the member basic strata in ascending local index. Candidate
    // accumulators are rebuilt from these in the same order summarize() uses,
    // so a delta evaluation feeds the allocator bit-identical inputs to a
    // from-scratch recomputation.
    std::vector<std::vector<std::vector<int>>> members_;
    std::vector<double> domain_cost_;
    std::vector<AllocationResult> domain_alloc_;
    double total_cost_ = 0.0;
    std::vector<int> movable_domains_;
    std::vector<int> movable_prefix_;  // cumulative basic-strata counts
    int movable_total_ = 0;

    friend MoveProposal propose_move(const SearchState& state, Rng& rng);
};

// Uniform over the basic strata of movable domains (so domains are hit in
// proportion to their size), destination uniform over the other existing
// strata plus one "new stratum" slot. Never returns from == to.
MoveProposal propose_move(const SearchState& state, Rng& rng);

struct TraceEntry {
    std::int64_t iteration = 0;
    double total_cost = 0.0;
    bool accepted = false;
};

struct HillClimbOptions {
    int stall_limit = 1000;
    std::int64_t max_iterations = 0;  // 0 = no cap
    BethelOptions bethel;
};

struct HillClimbResult {
    Stratification stratification;
    std::vector<AllocationResult> allocations;
    double total_cost = 0.0;
    std::vector<TraceEntry> trace;
    std::int64_t iterations = 0;
    std::int64_t accepted = 0;
};

// Strict-improvement hill climbing over single-unit moves. Stops once
// stall_limit consecutive proposals fail to improve and the cost rounded to
// 2 decimals matches the checkpoint from stall_limit iterations earlier.
HillClimbResult hill_climb(const StrataSet& strata, Stratification initial,
                           const PrecisionSpec& spec, std::uint64_t seed,
                           const HillClimbOptions& options = {});

}  // namespace stratopt
