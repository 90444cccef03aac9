#pragma once

#include <span>
#include <vector>

#include "stratopt/exec.hpp"
#include "stratopt/strata.hpp"

namespace stratopt {

// Target coefficient-of-variation upper limits, one per target variable,
// applied independently in every domain.
struct PrecisionSpec {
    std::vector<double> epsilon;

    void validate(int targets) const;
};

struct BethelOptions {
    double tolerance = 1e-10;  // stop when the largest multiplier change is below this
    int max_iter = 200;
};

struct AllocationResult {
    std::vector<double> n;            // per stratum, clamped into [min(2,N_h), N_h]
    double total = 0.0;               // sum of n
    std::vector<double> achieved_cv;  // per target, at the clamped allocation
    bool converged = false;
    int iterations = 0;
};

// Flat per-domain allocation input; var is the population variance S^2.
struct AllocInput {
    int strata = 0;
    int targets = 0;
    std::vector<double> count;  // N_h
    std::vector<double> mean;   // strata x targets, row-major
    std::vector<double> var;    // strata x targets, row-major

    static AllocInput from_summaries(std::span<const StratumSummary> summaries);
};

// Minimum real-valued sample sizes satisfying every CV constraint, via the
// Chromy fixed point on normalized multipliers, then post-clamped into the
// box bounds. Throws InfeasibleError when a target total is zero while some
// stratum still has variance (CV undefined); ConfigError on bad parameters.
AllocationResult bethel_allocate(const AllocInput& input, const PrecisionSpec& spec,
                                 const BethelOptions& options = {});
AllocationResult bethel_allocate(std::span<const StratumSummary> summaries,
                                 const PrecisionSpec& spec, const BethelOptions& options = {});

struct CostResult {
    double total = 0.0;
    std::vector<AllocationResult> per_domain;
};

// Cost of one domain of a stratification (summarize + allocate).
AllocationResult allocate_domain(const StrataSet& strata, const Stratification& s, int domain,
                                 const PrecisionSpec& spec, const BethelOptions& options = {});

// The cost oracle: summarize + allocate every domain, total = sum of totals.
CostResult evaluate_cost(const StrataSet& strata, const Stratification& s,
                         const PrecisionSpec& spec, const ExecPolicy& exec = {},
                         const BethelOptions& options = {});

}  // namespace stratopt
