#include "stratopt/local_search.hpp"

#include <algorithm>
#include <cmath>

#include "stratopt/errors.hpp"

namespace stratopt {

SearchState::SearchState(const StrataSet& strata, Stratification initial, const PrecisionSpec& spec,
                         const BethelOptions& options)
    : strata_(&strata), spec_(spec), options_(options), strat_(std::move(initial)) {
    strat_.validate(strata);
    const int domains = strata.domains();
    accums_.resize(domains);
    members_.resize(domains);
    domain_cost_.resize(domains);
    domain_alloc_.resize(domains);
    for (int d = 0; d < domains; ++d) {
        const auto items = strata.domain_items(d);
        accums_[d].assign(strat_.h[d], StratumAccum(strata.targets));
        members_[d].assign(strat_.h[d], {});
        for (std::size_t i = 0; i < items.size(); ++i) {
            accums_[d][strat_.labels[d][i] - 1].add(items[i]);
            members_[d][strat_.labels[d][i] - 1].push_back(static_cast<int>(i));
        }
        std::vector<StratumSummary> summaries;
        summaries.reserve(accums_[d].size());
        for (const auto& acc : accums_[d]) summaries.push_back(acc.to_summary());
        domain_alloc_[d] = bethel_allocate(summaries, spec_, options_);
        domain_cost_[d] = domain_alloc_[d].total;
        total_cost_ += domain_cost_[d];
        if (items.size() >= 2) {
            movable_domains_.push_back(d);
            movable_total_ += static_cast<int>(items.size());
            movable_prefix_.push_back(movable_total_);
        }
    }
}

SearchState::Delta SearchState::evaluate(const MoveProposal& move) const {
    const int d = move.domain;
    const int h = strat_.h[d];
    if (move.from_label == move.to_label) throw InternalError("move with from == to");
    if (move.to_label < 1 || move.to_label > h + 1) throw InternalError("move destination out of range");
    const BasicStratum& unit = strata_->at(d, move.basic_index);
    if (strat_.labels[d][move.basic_index] != move.from_label) {
        throw InternalError("move source label does not match the current assignment");
    }

    Delta delta;
    delta.move = move;
    const bool opens_new = move.to_label == h + 1;

    // Incremental removal first: a negative pooled variance beyond rounding
    // means the caches no longer describe the assignment. Rounding here is
    // proportional to the pre-removal magnitudes, so the guard scales with
    // those rather than with the (possibly tiny) remainder.
    {
        const StratumAccum& before = accums_[d][move.from_label - 1];
        StratumAccum removed = before;
        removed.remove(unit);
        if (removed.n > 0) {
            const double inv_n = 1.0 / static_cast<double>(removed.n);
            for (std::size_t g = 0; g < removed.w_sum.size(); ++g) {
                const double m = removed.w_sum[g] * inv_n;
                const double var = removed.w_sq[g] * inv_n - m * m;
                const double scale = std::max(1.0, std::abs(before.w_sq[g]) * inv_n);
                if (var < -1e-9 * scale) {
                    throw InternalError("negative pooled variance after removal: cache corruption");
                }
            }
        }
    }

    // Candidate accumulators are then rebuilt from the member lists in index
    // order (exactly the summarize() order, for bit-equality with a full
    // recomputation).
    const auto items = strata_->domain_items(d);
    delta.source = StratumAccum(strata_->targets);
    for (int idx : members_[d][move.from_label - 1]) {
        if (idx != move.basic_index) delta.source.add(items[idx]);
    }
    delta.source_emptied = delta.source.n == 0;
    delta.destination = StratumAccum(strata_->targets);
    if (!opens_new) {
        bool inserted = false;
        for (int idx : members_[d][move.to_label - 1]) {
            if (!inserted && move.basic_index < idx) {
                delta.destination.add(unit);
                inserted = true;
            }
            delta.destination.add(items[idx]);
        }
        if (!inserted) delta.destination.add(unit);
    } else {
        delta.destination.add(unit);
    }

    std::vector<StratumSummary> summaries;
    summaries.reserve(h + 1);
    for (int lab = 1; lab <= h; ++lab) {
        if (lab == move.from_label) {
            if (!delta.source_emptied) summaries.push_back(delta.source.to_summary());
        } else if (lab == move.to_label) {
            summaries.push_back(delta.destination.to_summary());
        } else {
            summaries.push_back(accums_[d][lab - 1].to_summary());
        }
    }
    if (opens_new) summaries.push_back(delta.destination.to_summary());

    delta.new_alloc = bethel_allocate(summaries, spec_, options_);
    delta.new_domain_cost = delta.new_alloc.total;
    delta.new_total = total_cost_ - domain_cost_[d] + delta.new_domain_cost;
    return delta;
}

void SearchState::apply(const Delta& delta) {
    const MoveProposal& move = delta.move;
    const int d = move.domain;
    auto& labels = strat_.labels[d];
    auto& accums = accums_[d];
    auto& members = members_[d];
    const bool opens_new = move.to_label == strat_.h[d] + 1;

    auto& from_members = members[move.from_label - 1];
    from_members.erase(std::find(from_members.begin(), from_members.end(), move.basic_index));
    if (opens_new) {
        accums.push_back(delta.destination);
        members.push_back({move.basic_index});
        strat_.h[d] += 1;
    } else {
        accums[move.to_label - 1] = delta.destination;
        auto& to_members = members[move.to_label - 1];
        to_members.insert(std::upper_bound(to_members.begin(), to_members.end(), move.basic_index),
                          move.basic_index);
    }
    labels[move.basic_index] = move.to_label;
    accums[move.from_label - 1] = delta.source;

    if (delta.source_emptied) {
        accums.erase(accums.begin() + (move.from_label - 1));
        members.erase(members.begin() + (move.from_label - 1));
        for (auto& lab : labels) {
            if (lab > move.from_label) --lab;
        }
        strat_.h[d] -= 1;
    }

    total_cost_ = total_cost_ - domain_cost_[d] + delta.new_domain_cost;
    domain_cost_[d] = delta.new_domain_cost;
    domain_alloc_[d] = delta.new_alloc;
}

MoveProposal propose_move(const SearchState& state, Rng& rng) {
    const auto& st = state;
    if (st.movable_total_ == 0) throw ConfigError("no domain has 2 or more basic strata");
    // Flat index over movable domains' basic strata: domains are selected in
    // proportion to their basic-strata count.
    const int flat = rng.index(static_cast<std::size_t>(st.movable_total_));
    const auto it = std::upper_bound(st.movable_prefix_.begin(), st.movable_prefix_.end(), flat);
    const int slot = static_cast<int>(it - st.movable_prefix_.begin());
    const int d = st.movable_domains_[slot];
    const int base = slot > 0 ? st.movable_prefix_[slot - 1] : 0;
    const int basic_index = flat - base;

    MoveProposal move;
    move.domain = d;
    move.basic_index = basic_index;
    move.from_label = st.strat_.labels[d][basic_index];
    const int h = st.strat_.h[d];
    // Uniform over {1..h+1} \ {from}.
    int pick = 1 + rng.index(static_cast<std::size_t>(h));
    if (pick >= move.from_label) ++pick;
    move.to_label = pick;
    return move;
}

HillClimbResult hill_climb(const StrataSet& strata, Stratification initial,
                           const PrecisionSpec& spec, std::uint64_t seed,
                           const HillClimbOptions& options) {
    if (options.stall_limit < 1) throw ConfigError("hill_climb: stall_limit must be >= 1");
    SearchState state(strata, std::move(initial), spec, options.bethel);
    Rng rng(seed);

    HillClimbResult result;
    if (state.movable_count() == 0) {  // every domain degenerate: nothing to move
        result.stratification = state.stratification();
        result.allocations = state.allocations();
        result.total_cost = state.total_cost();
        return result;
    }

    auto round2 = [](double v) { return std::round(v * 100.0) / 100.0; };
    const int window = options.stall_limit;
    std::vector<double> ring(static_cast<std::size_t>(window) + 1,
                             state.total_cost());  // cost at iteration i lives at i % (window+1)
    int stall = 0;
    std::int64_t iteration = 0;

    for (;;) {
        if (options.max_iterations > 0 && iteration >= options.max_iterations) break;
        ++iteration;
        const auto move = propose_move(state, rng);
        const auto delta = state.evaluate(move);
        const bool accepted = delta.new_total < state.total_cost();
        if (accepted) {
            state.apply(delta);
            stall = 0;
            ++result.accepted;
        } else {
            ++stall;
        }
        result.trace.push_back({iteration, state.total_cost(), accepted});
        ring[iteration % (window + 1)] = state.total_cost();
        if (stall >= window) {
            const double checkpoint = ring[(iteration - window) % (window + 1)];
            if (round2(state.total_cost()) == round2(checkpoint)) break;
            stall = 0;  // cost drifted inside the window; keep searching
        }
    }

    result.stratification = state.stratification();
    result.allocations = state.allocations();
    result.total_cost = state.total_cost();
    result.iterations = iteration;
    return result;
}

}  // namespace stratopt
