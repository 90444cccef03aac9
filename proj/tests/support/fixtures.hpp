#pragma once

// Test-only fixtures and independent oracles. Everything here recomputes from
// first principles and stays clear of the library's solution paths.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "stratopt/allocation.hpp"
#include "stratopt/frame.hpp"
#include "stratopt/rng.hpp"
#include "stratopt/strata.hpp"

namespace testsupport {

using namespace stratopt;

// Builds a StrataSet directly from per-domain lists of (N, mean[], sd[]).
struct RawStratum {
    std::int64_t n;
    std::vector<double> mean;
    std::vector<double> sd;
};

inline StrataSet make_strata(const std::vector<std::vector<RawStratum>>& domains, int targets) {
    StrataSet set;
    set.targets = targets;
    set.domain_begin.push_back(0);
    for (std::size_t d = 0; d < domains.size(); ++d) {
        int id = 0;
        for (const auto& raw : domains[d]) {
            BasicStratum b;
            b.id = id++;
            b.domain = static_cast<int>(d);
            b.n = raw.n;
            b.mean = raw.mean;
            b.sd = raw.sd;
            set.items.push_back(std::move(b));
        }
        set.domain_begin.push_back(static_cast<int>(set.items.size()));
    }
    return set;
}

// Random strata set with unit-count basic strata aggregated from implied
// records; means/sds chosen so merges stay well conditioned.
inline StrataSet random_strata(Rng& rng, int domains, int per_domain, int targets,
                               int max_unit = 20) {
    std::vector<std::vector<RawStratum>> raw(domains);
    for (int d = 0; d < domains; ++d) {
        for (int i = 0; i < per_domain; ++i) {
            RawStratum s;
            s.n = 1 + rng.index(max_unit);
            for (int g = 0; g < targets; ++g) {
                s.mean.push_back(rng.uniform(5.0, 100.0));
                s.sd.push_back(s.n > 1 ? rng.uniform(0.0, 25.0) : 0.0);
            }
            raw[d].push_back(std::move(s));
        }
    }
    return make_strata(raw, targets);
}

// Random valid stratification with h strata per domain (h <= per-domain size).
inline Stratification random_stratification(Rng& rng, const StrataSet& set, int max_h) {
    Stratification s;
    s.labels.resize(set.domains());
    s.h.resize(set.domains());
    for (int d = 0; d < set.domains(); ++d) {
        const int n = set.domain_size(d);
        const int h = std::min(n, 1 + rng.index(max_h));
        auto& labels = s.labels[d];
        labels.resize(n);
        // First h strata get one member each (guarantees no empty label).
        const auto owners = rng.sample_indices(n, h);
        for (int lab = 1; lab <= h; ++lab) labels[owners[lab - 1]] = lab;
        for (int i = 0; i < n; ++i) {
            if (std::find(owners.begin(), owners.end(), i) == owners.end()) {
                labels[i] = 1 + rng.index(h);
            }
        }
        s.h[d] = h;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Allocation oracles
// ---------------------------------------------------------------------------

// Raw constraint data: minimize sum n_h subject to, per target g,
// sum_h coeff[g][h] / n_h <= bound[g], with box lo_h <= n_h <= N_h.
struct AllocOracleInstance {
    std::vector<double> count;                // N_h
    std::vector<std::vector<double>> coeff;   // per target: N_h^2 S_gh^2
    std::vector<double> bound;                // (eps_g T_g)^2 + sum_h N_h S_gh^2
};

inline AllocOracleInstance oracle_instance(const AllocInput& in, const PrecisionSpec& spec) {
    AllocOracleInstance inst;
    inst.count = in.count;
    inst.coeff.resize(in.targets);
    inst.bound.resize(in.targets);
    for (int g = 0; g < in.targets; ++g) {
        double total = 0.0, census = 0.0;
        for (int h = 0; h < in.strata; ++h) {
            total += in.count[h] * in.mean[static_cast<std::size_t>(h) * in.targets + g];
            census += in.count[h] * in.var[static_cast<std::size_t>(h) * in.targets + g];
        }
        const double et = spec.epsilon[g] * total;
        inst.bound[g] = et * et + census;
        inst.coeff[g].resize(in.strata);
        for (int h = 0; h < in.strata; ++h) {
            inst.coeff[g][h] =
                in.count[h] * in.count[h] * in.var[static_cast<std::size_t>(h) * in.targets + g];
        }
    }
    return inst;
}

// Smallest lattice-aligned n_H that satisfies every constraint given the
// earlier coordinates, or +inf when none exists within the box.
inline double oracle_last_coordinate(const AllocOracleInstance& inst,
                                     const std::vector<double>& prefix, double lo, double hi,
                                     double step) {
    double needed = lo;
    const int last = static_cast<int>(inst.count.size()) - 1;
    for (std::size_t g = 0; g < inst.coeff.size(); ++g) {
        double used = 0.0;
        for (int h = 0; h < last; ++h) used += inst.coeff[g][h] / prefix[h];
        const double slack = inst.bound[g] - used;
        const double c = inst.coeff[g][last];
        if (c <= 0.0) continue;
        if (slack <= 0.0) return std::numeric_limits<double>::infinity();
        needed = std::max(needed, c / slack);
    }
    // Snap up to the lattice anchored at lo.
    const double snapped = lo + std::ceil((needed - lo) / step - 1e-9) * step;
    const double result = std::max(lo, snapped);
    if (result > hi + 1e-9) return std::numeric_limits<double>::infinity();
    return std::min(result, hi);
}

// Lattice search over the first H-1 coordinates with the last coordinate in
// closed form. One prefix dimension is scanned exhaustively at the fine step;
// more dimensions use a coarse-to-fine sweep (per-dimension steps, all
// multiples of the fine step) followed by coordinate and pairwise line
// polishing on the fine lattice. The reduced objective is convex (sum of the
// prefix plus a max of convex terms), so polishing around the sweep incumbent
// closes in on the lattice optimum.
inline double lattice_alloc_oracle(const AllocInput& in, const PrecisionSpec& spec,
                                   double fine_step = 0.01,
                                   std::vector<double>* best_point_out = nullptr) {
    const AllocOracleInstance inst = oracle_instance(in, spec);
    const int H = static_cast<int>(inst.count.size());
    std::vector<double> lo(H), hi(H);
    for (int h = 0; h < H; ++h) {
        lo[h] = std::min(2.0, inst.count[h]);
        hi[h] = inst.count[h];
    }
    if (H == 1) {
        const double n = oracle_last_coordinate(inst, {}, lo[0], hi[0], fine_step);
        if (best_point_out) *best_point_out = {n};
        return n;
    }
    const int P = H - 1;  // enumerated prefix dimensions

    std::vector<double> best_prefix(P);
    double best = std::numeric_limits<double>::infinity();
    double best_last = 0.0;
    std::vector<double> prefix(P);

    auto probe = [&](const std::vector<double>& candidate) {
        const double last = oracle_last_coordinate(inst, candidate, lo[P], hi[P], fine_step);
        if (!std::isfinite(last)) return;
        double total = last;
        for (double v : candidate) total += v;
        if (total < best) {
            best = total;
            best_prefix = candidate;
            best_last = last;
        }
    };
    auto snap = [&](int h, double v) {
        const double clamped = std::clamp(v, lo[h], hi[h]);
        return lo[h] + std::round((clamped - lo[h]) / fine_step) * fine_step;
    };

    auto finish = [&]() {
        if (best_point_out) {
            *best_point_out = best_prefix;
            best_point_out->push_back(best_last);
        }
        return best;
    };

    if (P == 1) {  // exhaustive at the fine step
        const long points = std::lround((hi[0] - lo[0]) / fine_step) + 1;
        for (long i = 0; i < points; ++i) {
            prefix[0] = std::min(lo[0] + i * fine_step, hi[0]);
            probe(prefix);
        }
        return finish();
    }

    // Coarse-to-fine sweeps: start near 60 points per dimension.
    std::vector<double> step(P), box_lo(P), box_hi(P);
    for (int h = 0; h < P; ++h) {
        step[h] = fine_step;
        while ((hi[h] - lo[h]) / step[h] > 60.0) step[h] *= 10.0;
        box_lo[h] = lo[h];
        box_hi[h] = hi[h];
    }
    for (;;) {
        std::vector<int> counts(P);
        for (int h = 0; h < P; ++h) {
            counts[h] = static_cast<int>(std::floor((box_hi[h] - box_lo[h]) / step[h] + 1e-9)) + 1;
        }
        std::vector<int> idx(P, 0);
        for (;;) {
            for (int h = 0; h < P; ++h) prefix[h] = std::min(box_lo[h] + idx[h] * step[h], hi[h]);
            probe(prefix);
            int h = 0;
            while (h < P && ++idx[h] >= counts[h]) idx[h++] = 0;
            if (h == P) break;
        }
        bool all_fine = true;
        for (int h = 0; h < P; ++h) all_fine &= step[h] <= fine_step + 1e-12;
        if (all_fine) break;
        for (int h = 0; h < P; ++h) {
            const double center = std::isfinite(best) ? best_prefix[h] : (lo[h] + hi[h]) / 2;
            const double reach = 2.0 * step[h];
            step[h] = std::max(fine_step, step[h] / 5.0);
            box_lo[h] = snap(h, center - reach);
            box_hi[h] = std::min(hi[h], center + reach);
        }
    }

    // Polish on the fine lattice. Coordinate scans cover each prefix
    // dimension's full range; the max() kinks of the reduced objective form
    // ridges a single coordinate cannot descend, so pairs of coordinates are
    // scanned jointly with a window that widens while improvements keep
    // landing on its edge (ridge following), plus a small triple scan when
    // three prefix dimensions exist.
    for (int round = 0; round < 80; ++round) {
        const double before = best;
        for (int h = 0; h < P; ++h) {
            prefix = best_prefix;
            const long points = std::lround((hi[h] - lo[h]) / fine_step) + 1;
            for (long i = 0; i < points; ++i) {
                prefix[h] = std::min(lo[h] + i * fine_step, hi[h]);
                probe(prefix);
            }
        }
        for (int h1 = 0; h1 < P; ++h1) {
            for (int h2 = h1 + 1; h2 < P; ++h2) {
                int window = 25;
                for (;;) {
                    const auto center = best_prefix;
                    int edge_hit = 0;
                    for (int d1 = -window; d1 <= window; ++d1) {
                        for (int d2 = -window; d2 <= window; ++d2) {
                            prefix = center;
                            prefix[h1] = snap(h1, center[h1] + d1 * fine_step);
                            prefix[h2] = snap(h2, center[h2] + d2 * fine_step);
                            const double prev = best;
                            probe(prefix);
                            if (best < prev &&
                                (std::abs(d1) >= window - 1 || std::abs(d2) >= window - 1)) {
                                edge_hit = 1;
                            }
                        }
                    }
                    if (!edge_hit || window >= 800) break;
                    window *= 4;
                }
            }
        }
        if (P >= 3) {
            const auto center = best_prefix;
            for (int d1 = -6; d1 <= 6; ++d1) {
                for (int d2 = -6; d2 <= 6; ++d2) {
                    for (int d3 = -6; d3 <= 6; ++d3) {
                        prefix = center;
                        prefix[0] = snap(0, center[0] + d1 * fine_step);
                        prefix[1] = snap(1, center[1] + d2 * fine_step);
                        prefix[2] = snap(2, center[2] + d3 * fine_step);
                        probe(prefix);
                    }
                }
            }
        }
        if (best >= before - 1e-12) break;
    }
    return finish();
}

// ---------------------------------------------------------------------------
// Misc helpers
// ---------------------------------------------------------------------------

inline double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    double agree = 0.0, pairs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_a = a[i] == a[j];
            const bool same_b = b[i] == b[j];
            agree += same_a == same_b ? 1.0 : 0.0;
            pairs += 1.0;
        }
    }
    return pairs == 0.0 ? 1.0 : agree / pairs;
}

inline FeatureMatrix matrix_from(const std::vector<std::vector<double>>& rows) {
    FeatureMatrix m;
    m.rows = static_cast<int>(rows.size());
    m.cols = rows.empty() ? 0 : static_cast<int>(rows[0].size());
    for (const auto& r : rows) m.data.insert(m.data.end(), r.begin(), r.end());
    return m;
}

// Gaussian blobs with known labels.
inline FeatureMatrix make_blobs(Rng& rng, const std::vector<std::vector<double>>& centers,
                                int per_blob, double spread, std::vector<int>& labels) {
    FeatureMatrix m;
    m.cols = static_cast<int>(centers[0].size());
    labels.clear();
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (int i = 0; i < per_blob; ++i) {
            for (int j = 0; j < m.cols; ++j) m.data.push_back(centers[c][j] + spread * rng.normal());
            labels.push_back(static_cast<int>(c) + 1);
        }
    }
    m.rows = static_cast<int>(labels.size());
    return m;
}

inline Frame frame_from_csv(const std::string& csv, const Schema& schema, char delim = ',') {
    std::istringstream in(csv);
    return load_frame(in, schema, delim);
}

}  // namespace testsupport
