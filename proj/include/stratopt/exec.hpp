#pragma once

#include <omp.h>

namespace stratopt {

// workers == 1 is the serial reference path; workers == 0 resolves to the
// hardware thread count. Parallel loops write to index-addressed slots only,
// so results are identical regardless of worker count.
struct ExecPolicy {
    int workers = 1;

    int resolved() const {
        if (workers <= 0) return omp_get_max_threads();
        return workers;
    }
};

template <typename F>
void parallel_for(int n, const ExecPolicy& exec, F&& body) {
    const int w = exec.resolved();
    if (w > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(w)
        for (int i = 0; i < n; ++i) body(i);
    } else {
        for (int i = 0; i < n; ++i) body(i);
    }
}

}  // namespace stratopt
