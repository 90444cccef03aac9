#include "stratopt/strata.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stratopt/errors.hpp"

namespace stratopt {

void StratumAccum::add(const BasicStratum& b) {
    n += b.n;
    const double w = static_cast<double>(b.n);
    for (std::size_t g = 0; g < w_sum.size(); ++g) {
        w_sum[g] += w * b.mean[g];
        w_sq[g] += w * (b.sd[g] * b.sd[g] + b.mean[g] * b.mean[g]);
    }
}

void StratumAccum::remove(const BasicStratum& b) {
    n -= b.n;
    const double w = static_cast<double>(b.n);
    for (std::size_t g = 0; g < w_sum.size(); ++g) {
        w_sum[g] -= w * b.mean[g];
        w_sq[g] -= w * (b.sd[g] * b.sd[g] + b.mean[g] * b.mean[g]);
    }
}

StratumSummary StratumAccum::to_summary(double neg_tol) const {
    if (n <= 0) throw InternalError("stratum accumulator holds no units");
    StratumSummary out;
    out.n = n;
    const double inv_n = 1.0 / static_cast<double>(n);
    out.mean.resize(w_sum.size());
    out.sd.resize(w_sum.size());
    for (std::size_t g = 0; g < w_sum.size(); ++g) {
        const double m = w_sum[g] * inv_n;
        double var = w_sq[g] * inv_n - m * m;
        if (var < 0.0) {
            const double scale = std::max(1.0, std::abs(w_sq[g]) * inv_n);
            if (var < -neg_tol * scale) {
                throw InternalError("negative pooled variance beyond rounding tolerance");
            }
            var = 0.0;
        }
        out.mean[g] = m;
        out.sd[g] = std::sqrt(var);
    }
    return out;
}

void Stratification::validate(const StrataSet& strata) const {
    if (domains() != strata.domains()) throw InternalError("stratification domain count mismatch");
    for (int d = 0; d < domains(); ++d) {
        if (static_cast<int>(labels[d].size()) != strata.domain_size(d)) {
            throw InternalError("stratification does not cover domain " + std::to_string(d));
        }
        std::vector<char> used(static_cast<std::size_t>(h[d]), 0);
        for (int lab : labels[d]) {
            if (lab < 1 || lab > h[d]) throw InternalError("stratum label out of range");
            used[lab - 1] = 1;
        }
        for (char u : used) {
            if (!u) throw InternalError("empty stratum label in domain " + std::to_string(d));
        }
    }
}

std::uint64_t Stratification::content_hash() const {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    auto mix = [&hash](std::uint64_t v) {
        hash ^= v;
        hash *= 0x100000001b3ULL;
    };
    for (int d = 0; d < domains(); ++d) {
        mix(static_cast<std::uint64_t>(h[d]));
        for (int lab : labels[d]) mix(static_cast<std::uint64_t>(lab));
    }
    return hash;
}

Stratification Stratification::single_stratum(const StrataSet& strata) {
    Stratification s;
    s.labels.resize(strata.domains());
    s.h.resize(strata.domains());
    for (int d = 0; d < strata.domains(); ++d) {
        s.labels[d].assign(strata.domain_size(d), 1);
        s.h[d] = strata.domain_size(d) > 0 ? 1 : 0;
    }
    return s;
}

Stratification Stratification::identity(const StrataSet& strata) {
    Stratification s;
    s.labels.resize(strata.domains());
    s.h.resize(strata.domains());
    for (int d = 0; d < strata.domains(); ++d) {
        const int n = strata.domain_size(d);
        s.labels[d].resize(n);
        for (int i = 0; i < n; ++i) s.labels[d][i] = i + 1;
        s.h[d] = n;
    }
    return s;
}

namespace {

BasicStratum pool_records(const Frame& frame, const std::vector<int>& record_idx, int id, int domain) {
    const int g = frame.target_count();
    BasicStratum b;
    b.id = id;
    b.domain = domain;
    b.n = static_cast<std::int64_t>(record_idx.size());
    b.mean.assign(g, 0.0);
    b.sd.assign(g, 0.0);
    for (int r : record_idx) {
        for (int j = 0; j < g; ++j) b.mean[j] += frame.records[r].targets[j];
    }
    for (int j = 0; j < g; ++j) b.mean[j] /= static_cast<double>(b.n);
    if (b.n > 1) {
        for (int r : record_idx) {
            for (int j = 0; j < g; ++j) {
                const double d = frame.records[r].targets[j] - b.mean[j];
                b.sd[j] += d * d;
            }
        }
        for (int j = 0; j < g; ++j) b.sd[j] = std::sqrt(b.sd[j] / static_cast<double>(b.n));
    }
    return b;
}

void finalize_domains(StrataBuild& build, int domain_count, int targets) {
    build.set.targets = targets;
    build.set.domain_begin.assign(domain_count + 1, 0);
    for (const auto& item : build.set.items) build.set.domain_begin[item.domain + 1]++;
    for (int d = 0; d < domain_count; ++d) build.set.domain_begin[d + 1] += build.set.domain_begin[d];
}

}  // namespace

StrataBuild build_atomic_strata(const Frame& frame) {
    if (frame.aux_count() == 0) {
        throw ConfigError("atomic mode requires auxiliary columns; use continuous mode instead");
    }
    // Aux level codes are lexicographic by token, so sorting code tuples
    // orders cells by (domain, auxiliary tuple lexicographic).
    std::map<std::pair<int, std::vector<int>>, std::vector<int>> cells;
    for (std::size_t r = 0; r < frame.records.size(); ++r) {
        const Record& rec = frame.records[r];
        cells[{rec.domain, rec.auxiliaries}].push_back(static_cast<int>(r));
    }
    StrataBuild build;
    int prev_domain = -1;
    int next_id = 0;
    for (const auto& [key, record_idx] : cells) {
        if (key.first != prev_domain) {
            prev_domain = key.first;
            next_id = 0;
        }
        build.set.items.push_back(pool_records(frame, record_idx, next_id++, key.first));
        build.members.push_back(record_idx);
    }
    finalize_domains(build, frame.domain_count(), frame.target_count());
    return build;
}

StrataBuild build_continuous_strata(const Frame& frame) {
    const int g = frame.target_count();
    // One basic stratum per record, grouped by domain, file order within.
    std::vector<std::vector<int>> by_domain(frame.domain_count());
    for (std::size_t r = 0; r < frame.records.size(); ++r) {
        by_domain[frame.records[r].domain].push_back(static_cast<int>(r));
    }
    StrataBuild build;
    for (int d = 0; d < frame.domain_count(); ++d) {
        int next_id = 0;
        for (int r : by_domain[d]) {
            BasicStratum b;
            b.id = next_id++;
            b.domain = d;
            b.n = 1;
            b.mean = frame.records[r].targets;
            b.sd.assign(g, 0.0);
            build.set.items.push_back(std::move(b));
            build.members.push_back({r});
        }
    }
    finalize_domains(build, frame.domain_count(), g);
    return build;
}

std::vector<StratumSummary> summarize(const StrataSet& strata, const Stratification& s, int domain) {
    const auto items = strata.domain_items(domain);
    const auto& labels = s.labels[domain];
    if (labels.size() != items.size()) throw InternalError("assignment does not cover the domain");
    const int h = s.h[domain];
    std::vector<StratumAccum> accums(h, StratumAccum(strata.targets));
    for (std::size_t i = 0; i < items.size(); ++i) {
        const int lab = labels[i];
        if (lab < 1 || lab > h) throw InternalError("stratum label out of range");
        accums[lab - 1].add(items[i]);
    }
    std::vector<StratumSummary> out;
    out.reserve(h);
    for (const auto& acc : accums) {
        if (acc.n == 0) throw InternalError("empty stratum label in domain " + std::to_string(domain));
        out.push_back(acc.to_summary(1e-9));
    }
    return out;
}

FeatureMatrix standardize_features(const StrataSet& strata, int domain) {
    const auto items = strata.domain_items(domain);
    const int n = static_cast<int>(items.size());
    if (n < 2) throw ConfigError("domain has fewer than 2 basic strata; nothing to cluster");
    const int g = strata.targets;
    FeatureMatrix m;
    m.rows = n;
    m.cols = g;
    m.data.resize(static_cast<std::size_t>(n) * g);
    for (int j = 0; j < g; ++j) {
        double mu = 0.0;
        for (int i = 0; i < n; ++i) mu += items[i].mean[j];
        mu /= n;
        double ss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = items[i].mean[j] - mu;
            ss += d * d;
        }
        const double sigma = std::sqrt(ss / (n - 1));
        for (int i = 0; i < n; ++i) {
            m.data[static_cast<std::size_t>(i) * g + j] =
                sigma > 0.0 ? (items[i].mean[j] - mu) / sigma : 0.0;
        }
    }
    return m;
}

}  // namespace stratopt
