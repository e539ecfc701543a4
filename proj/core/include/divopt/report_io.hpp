#pragma once

// Machine-readable reports. JSON numbers carry 17 significant digits; NaN
// and infinities are written as null.

#include "divopt/hjb_verifier.hpp"
#include "divopt/market_model.hpp"
#include "divopt/simulator.hpp"
#include "divopt/statics.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace divopt {

struct FrontierSummary {
    ParamSet params;
    Regime regime = Regime::General;
    std::string precision;               ///< "double" or "extended"
    double qstar = 0.0;
    double zstar = 0.0;
    std::optional<double> alpha;         ///< slope bound of n - ell; absent without a frontier
    std::optional<double> qstar_b;       ///< crossing from the dual ODE, when requested
    double qstar_lower_bound = 0.0;
    std::size_t steps = 0;
};

[[nodiscard]] std::string to_json(const FrontierSummary& summary);
[[nodiscard]] std::string to_json(const ResidualReport& report, bool include_nodes = false);
/// Path values are omitted.
[[nodiscard]] std::string to_json(const SimReport& report);
/// Reports in the order given plus paired differences against the first one.
[[nodiscard]] std::string tournament_json(const std::vector<SimReport>& reports);
[[nodiscard]] std::string sweep_verdicts_json(const SweepTable& table,
                                              const std::vector<MonotonicityResult>& verdicts);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace divopt
