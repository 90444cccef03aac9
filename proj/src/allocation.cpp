#include "stratopt/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stratopt/errors.hpp"

namespace stratopt {

void PrecisionSpec::validate(int targets) const {
    if (static_cast<int>(epsilon.size()) != targets) {
        throw ConfigError("precision: expected " + std::to_string(targets) + " epsilon values, got " +
                          std::to_string(epsilon.size()));
    }
    for (double e : epsilon) {
        if (!(e > 0.0) || !(e < 1.0)) throw ConfigError("precision: epsilon must be in (0,1)");
    }
}

AllocInput AllocInput::from_summaries(std::span<const StratumSummary> summaries) {
    AllocInput in;
    in.strata = static_cast<int>(summaries.size());
    in.targets = in.strata > 0 ? static_cast<int>(summaries[0].mean.size()) : 0;
    in.count.resize(in.strata);
    in.mean.resize(static_cast<std::size_t>(in.strata) * in.targets);
    in.var.resize(static_cast<std::size_t>(in.strata) * in.targets);
    for (int h = 0; h < in.strata; ++h) {
        in.count[h] = static_cast<double>(summaries[h].n);
        for (int g = 0; g < in.targets; ++g) {
            in.mean[static_cast<std::size_t>(h) * in.targets + g] = summaries[h].mean[g];
            const double s = summaries[h].sd[g];
            in.var[static_cast<std::size_t>(h) * in.targets + g] = s * s;
        }
    }
    return in;
}

AllocationResult bethel_allocate(const AllocInput& input, const PrecisionSpec& spec,
                                 const BethelOptions& options) {
    const int H = input.strata;
    const int G = input.targets;
    if (H < 1) throw ConfigError("allocation requires at least one stratum");
    spec.validate(G);
    if (!(options.tolerance > 0.0)) throw ConfigError("allocation tolerance must be positive");
    if (options.max_iter < 1) throw ConfigError("allocation max_iter must be >= 1");

    auto at = [G](int h, int g) { return static_cast<std::size_t>(h) * G + g; };

    // Constraint coefficients: sum_h a[g][h] / n_h <= 1.
    std::vector<double> total(G, 0.0);       // T_g
    std::vector<double> var_census(G, 0.0);  // sum_h N_h S^2_gh
    for (int g = 0; g < G; ++g) {
        for (int h = 0; h < H; ++h) {
            total[g] += input.count[h] * input.mean[at(h, g)];
            var_census[g] += input.count[h] * input.var[at(h, g)];
        }
    }
    std::vector<double> a(static_cast<std::size_t>(G) * H, 0.0);
    for (int g = 0; g < G; ++g) {
        if (total[g] == 0.0) {
            if (var_census[g] > 0.0) {
                throw InfeasibleError("target " + std::to_string(g + 1) +
                                      ": estimated total is zero, CV constraint undefined");
            }
            continue;  // vacuous constraint, coefficients stay zero
        }
        const double et = spec.epsilon[g] * total[g];
        const double denom = et * et + var_census[g];
        for (int h = 0; h < H; ++h) {
            a[static_cast<std::size_t>(g) * H + h] =
                input.count[h] * input.count[h] * input.var[at(h, g)] / denom;
        }
    }

    AllocationResult result;
    result.n.assign(H, 0.0);

    bool any_constraint = false;
    for (double v : a) {
        if (v > 0.0) {
            any_constraint = true;
            break;
        }
    }

    std::vector<double> alpha(G, 1.0 / G);
    auto compute_n = [&](const std::vector<double>& al, std::vector<double>& n) {
        double root_sum = 0.0;
        for (int h = 0; h < H; ++h) {
            double ah = 0.0;
            for (int g = 0; g < G; ++g) ah += al[g] * a[static_cast<std::size_t>(g) * H + h];
            n[h] = std::sqrt(std::max(ah, 0.0));
            root_sum += n[h];
        }
        for (int h = 0; h < H; ++h) n[h] *= root_sum;
    };

    if (any_constraint) {
        std::vector<double> next_alpha(G), u(G);
        for (int it = 1; it <= options.max_iter; ++it) {
            result.iterations = it;
            compute_n(alpha, result.n);
            double denom = 0.0;
            for (int g = 0; g < G; ++g) {
                double sum = 0.0;
                for (int h = 0; h < H; ++h) {
                    const double agh = a[static_cast<std::size_t>(g) * H + h];
                    if (agh > 0.0) sum += agh / std::max(result.n[h], 1e-300);
                }
                u[g] = alpha[g] * sum * sum;
                denom += u[g];
            }
            if (denom <= 0.0) break;  // all constraints vacuous
            double max_change = 0.0;
            for (int g = 0; g < G; ++g) {
                next_alpha[g] = u[g] / denom;
                max_change = std::max(max_change, std::abs(next_alpha[g] - alpha[g]));
            }
            alpha = next_alpha;
            if (max_change < options.tolerance) {
                result.converged = true;
                break;
            }
        }
        compute_n(alpha, result.n);
    } else {
        result.converged = true;  // zero-variance problem, bounds decide
    }

    // Post-clamp into the box; no re-solve (deliberate approximation).
    for (int h = 0; h < H; ++h) {
        const double lo = std::min(2.0, input.count[h]);
        result.n[h] = std::clamp(result.n[h], lo, input.count[h]);
        result.total += result.n[h];
    }

    result.achieved_cv.assign(G, 0.0);
    for (int g = 0; g < G; ++g) {
        double variance = 0.0;
        for (int h = 0; h < H; ++h) {
            const double nh = result.n[h];
            const double Nh = input.count[h];
            if (nh <= 0.0) continue;
            variance += Nh * Nh * (1.0 - nh / Nh) * input.var[at(h, g)] / nh;
        }
        if (total[g] != 0.0) {
            result.achieved_cv[g] = std::sqrt(std::max(variance, 0.0)) / std::abs(total[g]);
        }
    }
    return result;
}

AllocationResult bethel_allocate(std::span<const StratumSummary> summaries,
                                 const PrecisionSpec& spec, const BethelOptions& options) {
    return bethel_allocate(AllocInput::from_summaries(summaries), spec, options);
}

AllocationResult allocate_domain(const StrataSet& strata, const Stratification& s, int domain,
                                 const PrecisionSpec& spec, const BethelOptions& options) {
    const auto summaries = summarize(strata, s, domain);
    return bethel_allocate(summaries, spec, options);
}

CostResult evaluate_cost(const StrataSet& strata, const Stratification& s,
                         const PrecisionSpec& spec, const ExecPolicy& exec,
                         const BethelOptions& options) {
    const int d = strata.domains();
    CostResult out;
    out.per_domain.resize(d);
    std::exception_ptr failure;
    parallel_for(d, exec, [&](int i) {
        try {
            out.per_domain[i] = allocate_domain(strata, s, i, spec, options);
        } catch (...) {
#pragma omp critical
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);
    for (const auto& r : out.per_domain) out.total += r.total;
    return out;
}

}  // namespace stratopt
