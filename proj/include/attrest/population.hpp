#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attrest/errors.hpp"

namespace attrest {

/// One population unit: real study variable plus two binary attributes.
/// phi fields are ints so invalid files can be loaded and then diagnosed
/// by validate_population; every computation assumes 0/1.
struct Unit {
    double y = 0.0;
    int phi1 = 0;
    int phi2 = 0;
};

struct FinitePopulation {
    std::vector<Unit> units;

    std::int64_t size() const { return static_cast<std::int64_t>(units.size()); }
};

/// Population-level parameters. Variances and covariances use the N-1
/// divisor; the proportions P_j use divisor N.
struct PopulationSummary {
    std::int64_t n_units = 0;  // N
    double mean_y = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double var_y = 0.0;     // S_y^2
    double var_phi1 = 0.0;  // S_phi1^2
    double var_phi2 = 0.0;  // S_phi2^2
    double rho_pb1 = 0.0;   // point bi-serial correlation (y, phi1)
    double rho_pb2 = 0.0;   // point bi-serial correlation (y, phi2)
    double rho_phi = 0.0;   // phi correlation (phi1, phi2)

    // Summary-only datasets (entered from published tables) have no raw
    // units; enumeration and simulation are unavailable for them.
    bool from_raw = false;
    std::int64_t count_phi1 = -1;  // exact attribute counts when from_raw
    std::int64_t count_phi2 = -1;

    std::string tag;  // optional dataset tag, used by the corrections ledger
};

struct SamplingDesign {
    std::int64_t population_size = 0;            // N
    std::int64_t sample_size = 0;                // n (second phase for two-phase)
    std::optional<std::int64_t> first_phase_size;  // n' (two-phase only)

    bool two_phase() const { return first_phase_size.has_value(); }

    /// Throws Error(invalid_design) unless 2 <= n <= N and, when present,
    /// n < n' <= N.
    void validate() const;
};

/// Derived quantities the estimator theory consumes.
struct Coefficients {
    double c_y = 0.0;   // S_y / mean_y
    double c_p1 = 0.0;  // S_phi1 / P1
    double c_p2 = 0.0;  // S_phi2 / P2
    double k_pb1 = 0.0;  // rho_pb1 * c_y / c_p1
    double k_pb2 = 0.0;  // rho_pb2 * c_y / c_p2
    double k_phi = 0.0;  // rho_phi * c_p1 / c_p2
    double f1 = 0.0;     // 1/n - 1/N
    std::optional<double> f2;  // 1/n' - 1/N
    std::optional<double> f3;  // 1/n - 1/n'

    bool two_phase() const { return f2.has_value(); }
};

/// Computes every summary statistic from raw units (N-1 divisors).
/// Throws Error(degenerate_population) when S_y = 0 or either proportion
/// is 0 or 1, since the correlations are then undefined.
PopulationSummary summarize_population(const FinitePopulation& pop);

/// Coefficients of variation, regression-type K ratios and the finite
/// population factors for the given design.
/// Throws Error(zero_mean) when mean_y = 0 and Error(invalid_design) on a
/// bad design; requires proportions strictly inside (0,1).
Coefficients derived_coefficients(const PopulationSummary& summary,
                                  const SamplingDesign& design);

/// Non-throwing diagnostics: one human-readable violation per problem
/// (non-binary attribute, N too small, constant y, degenerate proportion).
std::vector<std::string> validate_population(const FinitePopulation& pop);

}  // namespace attrest
