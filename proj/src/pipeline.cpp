#include "stratopt/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "stratopt/errors.hpp"
#include "stratopt/rng.hpp"

namespace stratopt {

std::string stage_kind_name(StageKind kind) {
    switch (kind) {
        case StageKind::Km: return "KM";
        case StageKind::KmScan: return "KM_SCAN";
        case StageKind::Em: return "EM";
        case StageKind::Fc: return "FC";
        case StageKind::Som: return "SOM";
        case StageKind::Ng: return "NG";
        case StageKind::SomKm: return "SOM+KM";
        case StageKind::SomEm: return "SOM+EM";
        case StageKind::SomFc: return "SOM+FC";
        case StageKind::NgKm: return "NG+KM";
        case StageKind::NgEm: return "NG+EM";
        case StageKind::NgFc: return "NG+FC";
        case StageKind::HillClimb: return "HILL_CLIMB";
    }
    return "?";
}

StageKind parse_stage_kind(const std::string& name) {
    static const std::map<std::string, StageKind> table = {
        {"KM", StageKind::Km},         {"KM_SCAN", StageKind::KmScan},
        {"EM", StageKind::Em},         {"FC", StageKind::Fc},
        {"SOM", StageKind::Som},       {"NG", StageKind::Ng},
        {"SOM+KM", StageKind::SomKm},  {"SOM+EM", StageKind::SomEm},
        {"SOM+FC", StageKind::SomFc},  {"NG+KM", StageKind::NgKm},
        {"NG+EM", StageKind::NgEm},    {"NG+FC", StageKind::NgFc},
        {"HILL_CLIMB", StageKind::HillClimb},
    };
    const auto it = table.find(name);
    if (it == table.end()) throw ConfigError("unknown stage kind '" + name + "'");
    return it->second;
}

void PipelineSpec::validate() const {
    if (stages.empty()) throw ConfigError("pipeline: at least one stage required");
    int climbs = 0;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (stages[i].kind == StageKind::HillClimb) {
            ++climbs;
            if (i + 1 != stages.size()) throw ConfigError("pipeline: HILL_CLIMB must be the last stage");
        }
    }
    if (climbs > 1) throw ConfigError("pipeline: at most one HILL_CLIMB stage");
    if (static_cast<int>(stages.size()) == climbs) {
        throw ConfigError("pipeline: at least one clustering stage required");
    }
}

namespace {

Stage1Params som_stage1_from(const StageSpec& stage, int n) {
    Stage1Params p;
    p.kind = Stage1Kind::Som;
    p.rows = stage.get_int("som.rows", 0);
    p.cols = stage.get_int("som.cols", 0);
    p.iterations = stage.get_int("som.iterations", 0);
    p.alpha_hi = stage.get("som.alpha_hi", 0.9);
    p.alpha_lo = stage.get("som.alpha_lo", 0.01);
    p.radius = stage.get("som.radius", 0.0);
    (void)n;
    return p;
}

Stage1Params ng_stage1_from(const StageSpec& stage, int n) {
    Stage1Params p;
    p.kind = Stage1Kind::NeuralGas;
    p.prototypes = stage.get_int("ng.prototypes", 0);
    p.iterations = stage.get_int("ng.iterations", 0);
    p.lambda_hi = stage.get("ng.lambda_hi", 10.0);
    p.lambda_lo = stage.get("ng.lambda_lo", 0.5);
    p.eps_hi = stage.get("ng.eps_hi", 0.5);
    p.eps_lo = stage.get("ng.eps_lo", 0.05);
    p.age_limit = stage.get_int("ng.age_limit", 2 * n);
    return p;
}

// Cluster count for a domain. Chained stages inherit the incoming stratum
// count; direct stages fall back to the kmeans_scan choice.
int resolve_k(const StageSpec& stage, const StrataSet& set, int domain,
              const std::optional<Stratification>& incoming, const PrecisionSpec& precision,
              std::uint64_t domain_seed, int minimum) {
    int k = stage.get_int("k", 0);
    if (k <= 0) {
        if (incoming) {
            k = incoming->h[domain];
        } else {
            const int kmax = std::max(2, stage.get_int("kmax", 30));
            k = kmeans_scan(set, domain, kmax, Rng::derive(domain_seed, 0x5ca7), precision).h;
        }
    }
    const int n = set.domain_size(domain);
    return std::clamp(k, std::min(minimum, n), n);
}

struct DomainLabels {
    std::vector<int> labels;
    int h = 0;
};

DomainLabels run_cluster_stage_domain(const StageSpec& stage, const StrataSet& set, int domain,
                                      const FeatureMatrix& features,
                                      const std::optional<Stratification>& incoming,
                                      const PrecisionSpec& precision, std::uint64_t domain_seed) {
    const int n = set.domain_size(domain);
    DomainLabels out;
    auto adopt = [&out](const ClusterAssignment& a) {
        out.labels = a.labels;
        out.h = a.k;
    };

    switch (stage.kind) {
        case StageKind::Km: {
            const int k = resolve_k(stage, set, domain, incoming, precision, domain_seed, 1);
            adopt(kmeans_hw(features, k, domain_seed, stage.get_int("max_iter", 100)).assignment);
            break;
        }
        case StageKind::KmScan: {
            const auto scan = kmeans_scan(set, domain, std::max(2, stage.get_int("kmax", 30)),
                                          domain_seed, precision, stage.get_int("max_iter", 100));
            out.labels = scan.labels;
            out.h = scan.h;
            break;
        }
        case StageKind::Em: {
            const int k = resolve_k(stage, set, domain, incoming, precision, domain_seed, 1);
            ClusterAssignment init;
            if (incoming && incoming->h[domain] == k) {
                init.labels = incoming->labels[domain];
                init.k = k;
            } else {
                init = kmeans_hw(features, k, Rng::derive(domain_seed, 0xe0), 100).assignment;
            }
            adopt(em_gmm(features, init.k, init, stage.get_int("max_iter", 100),
                         stage.get("tol", 1e-8))
                      .assignment);
            break;
        }
        case StageKind::Fc: {
            const int k = resolve_k(stage, set, domain, incoming, precision, domain_seed, 2);
            adopt(fuzzy_cmeans(features, k, stage.get("m", 2.0), stage.get_int("max_iter", 300),
                               stage.get("eps", 1e-6), domain_seed)
                      .assignment);
            break;
        }
        case StageKind::Som: {
            const auto p = som_stage1_from(stage, n);
            int rows = p.rows, cols = p.cols;
            if (rows <= 0 || cols <= 0) std::tie(rows, cols) = default_som_grid(n);
            const int iterations = p.iterations > 0 ? p.iterations : std::max(500, 10 * n);
            double radius = p.radius;
            if (radius <= 0.0) {
                const double dr = rows - 1, dc = cols - 1;
                radius = std::max(1.0, (2.0 / 3.0) * std::sqrt(dr * dr + dc * dc));
            }
            adopt(som_train(features, rows, cols, iterations, p.alpha_hi, p.alpha_lo, radius,
                            domain_seed)
                      .assignment);
            break;
        }
        case StageKind::Ng: {
            const int k = resolve_k(stage, set, domain, incoming, precision, domain_seed, 2);
            const auto p = ng_stage1_from(stage, n);
            const int iterations = p.iterations > 0 ? p.iterations : std::min(10000, 100 * k);
            adopt(neural_gas(features, k, p.lambda_hi, p.lambda_lo, p.eps_hi, p.eps_lo, iterations,
                             p.age_limit, domain_seed)
                      .assignment);
            break;
        }
        case StageKind::SomKm:
        case StageKind::SomEm:
        case StageKind::SomFc:
        case StageKind::NgKm:
        case StageKind::NgEm:
        case StageKind::NgFc: {
            const bool som = stage.kind == StageKind::SomKm || stage.kind == StageKind::SomEm ||
                             stage.kind == StageKind::SomFc;
            Stage1Params s1 = som ? som_stage1_from(stage, n) : ng_stage1_from(stage, n);
            Stage2Params s2;
            if (stage.kind == StageKind::SomKm || stage.kind == StageKind::NgKm) {
                s2.kind = Stage2Kind::Kmeans;
            } else if (stage.kind == StageKind::SomEm || stage.kind == StageKind::NgEm) {
                s2.kind = Stage2Kind::Em;
            } else {
                s2.kind = Stage2Kind::Fcm;
            }
            const int minimum = s2.kind == Stage2Kind::Kmeans || s2.kind == Stage2Kind::Em ? 1 : 2;
            s2.k = resolve_k(stage, set, domain, incoming, precision, domain_seed, minimum);
            s2.m = stage.get("m", 2.0);
            s2.max_iter = stage.get_int("max_iter", 100);
            s2.tol = stage.get("tol", 1e-8);
            s2.eps = stage.get("eps", 1e-6);
            // Stage 1 abstracts to prototypes; stage 2 needs at least s2.k of
            // them. Cap the request rather than failing on small domains.
            if (s1.kind == Stage1Kind::NeuralGas) {
                int protos = s1.prototypes > 0
                                 ? s1.prototypes
                                 : std::clamp(static_cast<int>(std::lround(5.0 * std::sqrt(double(n)))),
                                              2, n);
                s1.prototypes = std::clamp(protos, std::min(s2.k, n), n);
            }
            adopt(two_stage(features, s1, s2, domain_seed));
            break;
        }
        case StageKind::HillClimb:
            throw InternalError("hill climb handled outside the per-domain path");
    }
    return out;
}

}  // namespace

RunResult run_pipeline(const Frame& frame, const PipelineSpec& spec, const ExecPolicy& exec) {
    spec.validate();
    spec.precision.validate(frame.target_count());

    RunResult result;
    result.strata = spec.mode == Mode::Atomic ? build_atomic_strata(frame)
                                              : build_continuous_strata(frame);
    const StrataSet& set = result.strata.set;
    const int domains = set.domains();

    // Features are shared across stages; degenerate domains have none.
    std::vector<std::optional<FeatureMatrix>> features(domains);
    for (int d = 0; d < domains; ++d) {
        if (set.domain_size(d) >= 2) features[d] = standardize_features(set, d);
    }

    std::optional<Stratification> current;
    double cumulative = 0.0;
    for (std::size_t si = 0; si < spec.stages.size(); ++si) {
        const StageSpec& stage = spec.stages[si];
        const std::uint64_t stage_seed = Rng::derive(spec.seed, si + 1);
        const auto start = std::chrono::steady_clock::now();

        if (stage.kind == StageKind::HillClimb) {
            if (!current) throw ConfigError("pipeline: HILL_CLIMB needs an initial stratification");
            HillClimbOptions options;
            options.stall_limit = stage.get_int("stall_limit", 1000);
            options.max_iterations = static_cast<std::int64_t>(stage.get("max_iterations", 0));
            auto climbed = hill_climb(set, *current, spec.precision, stage_seed, options);
            result.trace = std::move(climbed.trace);
            current = std::move(climbed.stratification);
        } else {
            Stratification next;
            next.labels.resize(domains);
            next.h.assign(domains, 0);
            std::exception_ptr failure;
            parallel_for(domains, exec, [&](int d) {
                try {
                    if (!features[d]) {  // degenerate domain: lone basic stratum
                        next.labels[d] = {1};
                        next.h[d] = 1;
                        return;
                    }
                    auto out = run_cluster_stage_domain(stage, set, d, *features[d], current,
                                                        spec.precision, Rng::derive(stage_seed, d + 1));
                    next.labels[d] = std::move(out.labels);
                    next.h[d] = out.h;
                } catch (...) {
#pragma omp critical
                    if (!failure) failure = std::current_exception();
                }
            });
            if (failure) {
                const std::string where =
                    "stage " + std::to_string(si + 1) + " (" + stage_kind_name(stage.kind) + "): ";
                try {
                    std::rethrow_exception(failure);
                } catch (const InfeasibleError& e) {
                    throw InfeasibleError(where + e.what());
                } catch (const InternalError& e) {
                    throw InternalError(where + e.what());
                } catch (const std::exception& e) {
                    throw ConfigError(where + e.what());
                }
            }
            current = std::move(next);
        }

        const auto cost = evaluate_cost(set, *current, spec.precision, exec);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        cumulative += seconds;
        result.report.push_back({static_cast<int>(si + 1), stage_kind_name(stage.kind), cost.total,
                                 seconds, cumulative});
        result.stage_stratifications.push_back(*current);
        if (si + 1 == spec.stages.size()) {
            result.solution.stratification = *current;
            result.solution.cost = cost;
        }
    }
    return result;
}

}  // namespace stratopt
