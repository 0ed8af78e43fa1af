#ifndef QDPAIR_SWEEP_HPP
#define QDPAIR_SWEEP_HPP

#include "dynamics.hpp"
#include "observables.hpp"
#include "types.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace qdpair
{

/// Inclusive, evenly spaced axis. A single-point axis sits at min.
struct Range
{
    double min = 0.0;
    double max = 0.0;
    std::size_t count = 1;

    double value(std::size_t i) const
    {
        if (count <= 1)
            return min;
        if (i + 1 == count)
            return max;
        return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
    }

    void validate(const char* name) const
    {
        if (count < 1)
            throw ParameterError(std::string(name) + " count must be >= 1");
        if (!std::isfinite(min) || !std::isfinite(max) || min > max)
            throw ParameterError(std::string(name) + " range must satisfy min <= max");
    }

    friend bool operator==(const Range&, const Range&) = default;
};

struct GridSpec
{
    Range detuning{-40.0, 40.0, 161};
    Range rabi{0.25, 10.0, 41};
    SystemParams base;

    void validate() const
    {
        detuning.validate("detuning");
        rabi.validate("rabi");
        if (rabi.min < 0.0)
            throw ParameterError("rabi range must lie in [0, inf)");
        base.validate();
    }

    std::size_t size() const { return detuning.count * rabi.count; }

    SystemParams params_at(std::size_t row, std::size_t col) const
    {
        SystemParams p = base;
        p.rabi = rabi.value(row);
        p.detuning = detuning.value(col);
        return p;
    }
};

struct CellFailure
{
    std::size_t row = 0; ///< rabi index
    std::size_t col = 0; ///< detuning index
    std::string message;
};

struct SweepResult
{
    GridSpec grid;
    /// Row-major: index = row * detuning.count + col. Empty for failed cells.
    std::vector<std::optional<ObservableSet>> cells;
    std::vector<CellFailure> failures;

    const std::optional<ObservableSet>& cell(std::size_t row, std::size_t col) const
    {
        return cells.at(row * grid.detuning.count + col);
    }
};

/// Worker count from QDPAIR_WORKERS, falling back to the hardware thread count.
inline unsigned default_worker_count()
{
    if (const char* env = std::getenv("QDPAIR_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Steady-state observables on every (rabi, detuning) cell. Each cell is an
/// independent task written to its own slot, so the result does not depend on
/// the number of workers or their scheduling.
inline SweepResult sweep_steady(const GridSpec& grid, unsigned workers = 0)
{
    grid.validate();
    const std::size_t n = grid.size();
    SweepResult result;
    result.grid = grid;
    result.cells.assign(n, std::nullopt);
    std::vector<std::string> errors(n);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1, std::memory_order_relaxed); i < n;
             i = next.fetch_add(1, std::memory_order_relaxed)) {
            const std::size_t row = i / grid.detuning.count;
            const std::size_t col = i % grid.detuning.count;
            try {
                const SystemParams p = grid.params_at(row, col);
                const SteadyState ss = steady_state(p);
                if (!ss.unique)
                    throw SolverError(ss.diagnostic);
                result.cells[i] = observe(ss.rho, p);
            }
            catch (const std::exception& ex) {
                errors[i] = ex.what();
            }
        }
    };

    if (workers == 0)
        workers = default_worker_count();
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        work();
    }
    else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work);
    }

    for (std::size_t i = 0; i < n; ++i)
        if (!result.cells[i])
            result.failures.push_back({i / grid.detuning.count, i % grid.detuning.count, errors[i]});
    return result;
}

/// Observables of one trajectory sampled at the requested times.
inline std::vector<ObservableSet> sweep_transient(const SystemParams& p, const DensityMatrix4& rho0,
                                                  std::span<const double> times, double tol = 1e-9)
{
    const Trajectory traj = propagate(rho0, p, times, tol);
    std::vector<ObservableSet> out;
    out.reserve(traj.states.size());
    for (const auto& rho : traj.states)
        out.push_back(observe(rho, p));
    return out;
}

} // namespace qdpair

#endif // QDPAIR_SWEEP_HPP
