#pragma once

#include <exception>
#include <vector>

namespace conequant {

/// kSerial is the reference path kept for testing; kParallel runs the same
/// per-item work under OpenMP. Results are assembled by index, so both
/// produce bitwise identical output.
enum class Execution { kSerial, kParallel };

/// out[i] = f(i) for i in [0, n). The first exception thrown by any item is
/// rethrown after the loop.
template <typename R, typename F>
std::vector<R> map_indices(int n, Execution execution, F&& f)
{
    std::vector<R> out(static_cast<std::size_t>(n));
    if (execution == Execution::kSerial) {
        for (int i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = f(i);
        }
        return out;
    }
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(i);
        } catch (...) {
#pragma omp critical(conequant_map_error)
            if (!error) {
                error = std::current_exception();
            }
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

}  // namespace conequant
