#pragma once

// Parameter sweeps of the frontier and the feedback controls.
//
// Each row samples theta, the consumption ratio and pi* at fixed fractions of
// that row's own z*, and again at absolute z values that lie inside every
// row's no-dividend region.

#include "divopt/frontier.hpp"
#include "divopt/market_model.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace divopt {

struct SweepRow {
    double value = 0.0;           ///< swept parameter
    bool converged = false;       ///< false marks a gap row
    std::string error;            ///< failure message of a gap row
    double qstar = 0.0;
    double zstar = 0.0;
    std::vector<double> theta;    ///< at quantile * z*
    std::vector<double> cbar;     ///< consumption per unit wealth at quantile * z*
    std::vector<double> pi;       ///< at quantile * z*
    std::vector<double> theta_abs;  ///< at the table's absolute z values
    std::vector<double> cbar_abs;
    std::vector<double> pi_abs;
};

struct SweepTable {
    std::string param_name;
    std::vector<double> quantiles;  ///< fractions of each row's z*
    std::vector<double> abs_fractions;  ///< fractions of the smallest converged z*
    std::vector<double> abs_z;          ///< the same, made absolute
    std::vector<SweepRow> rows;     ///< sorted by value

    /// Column names in CSV order after "value" and "converged". Absolute-z
    /// columns are labelled by fraction, e.g. pi_zmin0.5 sits at 0.5 min z*.
    [[nodiscard]] std::vector<std::string> column_names() const;
    /// Values of a named column, NaN on gap rows. Throws ConfigError for unknown names.
    [[nodiscard]] std::vector<double> column(const std::string& name) const;
};

struct SweepOptions {
    std::vector<double> quantiles{0.25, 0.5, 0.75, 1.0};
    std::vector<double> abs_fractions{0.25, 0.5, 0.75};
    SolverOptions solver;
};

/// Solves every grid point. Throws ConfigError for an unknown parameter name,
/// an invalid or degenerate parameter set, or an empty grid; solver failures
/// become gap rows.
[[nodiscard]] SweepTable sweep(const ModelParams& base, const std::string& param_name,
                               const std::vector<double>& grid, const SweepOptions& options = {},
                               unsigned threads = 1);

enum class Direction { Increasing, Decreasing };

[[nodiscard]] std::string_view to_string(Direction direction);
/// Throws ConfigError unless `text` is "increasing" or "decreasing".
[[nodiscard]] Direction parse_direction(const std::string& text);

struct MonotonicityResult {
    std::string column;
    Direction direction = Direction::Increasing;
    bool pass = false;
    std::optional<std::size_t> first_violation;  ///< row index of the later element of the failing pair
    std::string message;
};

/// Adjacent converged rows must differ by more than `slack` in the expected
/// direction. Gap rows are skipped; fewer than three usable rows fail.
[[nodiscard]] MonotonicityResult monotonicity_check(const SweepTable& table, const std::string& column,
                                                    Direction direction, double slack = 1e-8);

/// Header value,converged,<column_names()>; gap rows carry empty fields.
void write_sweep_csv(const SweepTable& table, std::ostream& out);

}  // namespace divopt
