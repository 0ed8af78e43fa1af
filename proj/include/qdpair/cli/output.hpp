#ifndef QDPAIR_CLI_OUTPUT_HPP
#define QDPAIR_CLI_OUTPUT_HPP

// Tabular output. CSV numbers use "%.17g" (round-trip exact, '.' decimal
// separator) and rows end in '\n'. JSON tables carry the same columns.

#include "../observables.hpp"
#include "../sweep.hpp"

#include "json.hpp"

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace qdpair::cli
{

inline std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void write_csv(std::ostream& os) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            os << (i ? "," : "") << columns[i];
        os << '\n';
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                os << (i ? "," : "") << format_number(row[i]);
            os << '\n';
        }
    }

    nlohmann::json to_json() const
    {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json r = nlohmann::json::array();
            for (double v : row) {
                if (std::isfinite(v))
                    r.push_back(v);
                else
                    r.push_back(nullptr);
            }
            rows_json.push_back(r);
        }
        return {{"columns", columns}, {"rows", rows_json}};
    }
};

inline const std::vector<std::string>& sweep_columns()
{
    static const std::vector<std::string> c{"delta", "rabi", "C", "R_ee", "R_ss", "R_aa", "R_gg", "I_s"};
    return c;
}

inline const std::vector<std::string>& evolve_columns()
{
    static const std::vector<std::string> c{"t", "R_ee", "R_ss", "R_aa", "R_gg", "C", "I_s", "purity"};
    return c;
}

inline const std::vector<std::string>& limits_columns()
{
    static const std::vector<std::string> c{"n_bar", "R_aa", "R_ss", "C"};
    return c;
}

inline std::vector<std::string> steady_columns()
{
    std::vector<std::string> c{"C", "R_ee", "R_ss", "R_aa", "R_gg", "I_s", "purity", "residual", "unique"};
    for (const char* part : {"re", "im"})
        for (const char* r : kDickeLabels)
            for (const char* col : kDickeLabels)
                c.push_back(std::string(part) + "_" + r + col);
    return c;
}

/// Long format, rabi-major: one row per cell, failed cells as nan.
inline Table sweep_table(const SweepResult& result)
{
    Table t{sweep_columns(), {}};
    const GridSpec& g = result.grid;
    t.rows.reserve(g.size());
    for (std::size_t row = 0; row < g.rabi.count; ++row) {
        for (std::size_t col = 0; col < g.detuning.count; ++col) {
            const auto& cell = result.cell(row, col);
            const double nan = std::numeric_limits<double>::quiet_NaN();
            if (cell) {
                const auto& o = *cell;
                t.rows.push_back({g.detuning.value(col), g.rabi.value(row), o.concurrence, o.populations[0],
                                  o.populations[1], o.populations[2], o.populations[3], o.intensity});
            }
            else {
                t.rows.push_back({g.detuning.value(col), g.rabi.value(row), nan, nan, nan, nan, nan, nan});
            }
        }
    }
    return t;
}

inline Table evolve_table(std::span<const double> times, const std::vector<ObservableSet>& obs)
{
    Table t{evolve_columns(), {}};
    for (std::size_t i = 0; i < obs.size(); ++i) {
        const auto& o = obs[i];
        t.rows.push_back({times[i], o.populations[0], o.populations[1], o.populations[2], o.populations[3],
                          o.concurrence, o.intensity, o.purity});
    }
    return t;
}

inline Table steady_table(const SteadyState& ss, const ObservableSet& o)
{
    Table t{steady_columns(), {}};
    std::vector<double> row{o.concurrence, o.populations[0], o.populations[1], o.populations[2], o.populations[3],
                            o.intensity,   o.purity,         ss.residual,      ss.unique ? 1.0 : 0.0};
    const Matrix4c& m = ss.rho.matrix();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            row.push_back(m(i, j).real());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            row.push_back(m(i, j).imag());
    t.rows.push_back(std::move(row));
    return t;
}

} // namespace qdpair::cli

#endif // QDPAIR_CLI_OUTPUT_HPP
