#pragma once

#include <cstdint>

#include "stratopt/frame.hpp"

namespace stratopt {

// Deterministic synthetic population: heavy-tailed targets driven by a latent
// size variable, categorical auxiliaries that bin noisy copies of that size.
// Used by the benchmark suite and the scale tests.
struct SyntheticSpec {
    int records = 20000;
    int domains = 30;
    int targets = 2;
    int aux_vars = 2;
    int aux_levels = 8;     // levels per auxiliary variable
    double sigma = 1.0;     // dispersion of the latent log-size
    double noise = 0.35;    // log-scale target noise
    std::uint64_t seed = 1;
};

Frame make_synthetic_frame(const SyntheticSpec& spec);

}  // namespace stratopt
