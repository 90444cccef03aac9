#include "stratopt/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stratopt/errors.hpp"
#include "stratopt/rng.hpp"

namespace stratopt {

Frame make_synthetic_frame(const SyntheticSpec& spec) {
    if (spec.records < spec.domains || spec.domains < 1 || spec.targets < 1) {
        throw ConfigError("synthetic frame: need records >= domains >= 1 and targets >= 1");
    }
    Rng rng(spec.seed);

    Frame frame;
    frame.schema.domain = "domain";
    for (int g = 0; g < spec.targets; ++g) frame.schema.targets.push_back("Y" + std::to_string(g + 1));
    for (int c = 0; c < spec.aux_vars; ++c) frame.schema.auxiliaries.push_back("X" + std::to_string(c + 1));

    char buf[32];
    for (int d = 0; d < spec.domains; ++d) {
        std::snprintf(buf, sizeof(buf), "D%03d", d + 1);
        frame.domain_levels.push_back(buf);
    }
    frame.aux_levels.resize(spec.aux_vars);
    for (int c = 0; c < spec.aux_vars; ++c) {
        for (int l = 0; l < spec.aux_levels; ++l) {
            std::snprintf(buf, sizeof(buf), "L%02d", l + 1);
            frame.aux_levels[c].push_back(buf);
        }
    }

    // Domain sizes: equal shares plus a deterministic remainder spread.
    std::vector<int> size(spec.domains, spec.records / spec.domains);
    for (int r = 0; r < spec.records % spec.domains; ++r) size[r]++;

    auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };

    for (int d = 0; d < spec.domains; ++d) {
        const double mu = rng.uniform(3.0, 5.0);         // domain log-size offset
        const double slope_a = rng.uniform(0.7, 1.0);    // elasticity of target 1 family
        for (int i = 0; i < size[d]; ++i) {
            Record rec;
            rec.domain = d;
            const double log_size = mu + spec.sigma * rng.normal();
            rec.targets.resize(spec.targets);
            for (int g = 0; g < spec.targets; ++g) {
                const double slope = g % 2 == 0 ? slope_a : 0.5 * slope_a + 0.3;
                const double log_t = slope * log_size + spec.noise * rng.normal() + 0.3 * g;
                rec.targets[g] = std::exp(log_t);
            }
            rec.auxiliaries.resize(spec.aux_vars);
            for (int c = 0; c < spec.aux_vars; ++c) {
                const double noisy = log_size + 0.25 * rng.normal();
                const int level = std::clamp(
                    static_cast<int>(phi((noisy - mu) / spec.sigma) * spec.aux_levels), 0,
                    spec.aux_levels - 1);
                rec.auxiliaries[c] = level;
            }
            frame.records.push_back(std::move(rec));
        }
    }
    return frame;
}

}  // namespace stratopt
