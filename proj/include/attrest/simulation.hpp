#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "attrest/estimators.hpp"
#include "attrest/population.hpp"
#include "attrest/theory.hpp"

namespace attrest {

enum class NoiseShape { normal, uniform };

/// Synthetic population model: attribute cells apportioned deterministically
/// to the target joint distribution (largest remainder), study variable
///   y = intercept + b1*phi1 + b2*phi2 + sigma*noise.
/// Only y carries randomness, so P1, P2 and rho_phi are reproducible by
/// construction; the realised summary (never the targets) is ground truth.
struct GeneratorSpec {
    std::int64_t population_size = 0;
    double p00 = 0.0, p01 = 0.0, p10 = 0.0, p11 = 0.0;  // joint (phi1, phi2) cells
    double intercept = 0.0;
    double b1 = 0.0, b2 = 0.0;
    double sigma = 0.0;
    NoiseShape noise = NoiseShape::normal;
    std::uint64_t seed = 0;

    void validate() const;  // throws Error(invalid_generator_spec)
};

FinitePopulation generate_population(const GeneratorSpec& g);

/// Indices are ascending; for two-phase draws the second phase is a subset
/// of the first.
struct SampleDraw {
    std::vector<std::int32_t> second_phase;
    std::vector<std::int32_t> first_phase;  // empty for single-phase draws
};

SampleDraw draw_srswor(std::int64_t population_size, std::int64_t n, std::uint64_t seed);
SampleDraw draw_two_phase(std::int64_t population_size, std::int64_t n_prime,
                          std::int64_t n, std::uint64_t seed);

struct ReplicationPlan {
    std::int64_t replicates = 0;
    SamplingDesign design;
    std::vector<EstimatorSpec> specs;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = hardware concurrency; result is thread-count invariant
};

struct SimRow {
    EstimatorSpec spec;  // resolved
    std::string estimator;
    std::string params;  // full precision
    std::int64_t replicates = 0;  // total attempted
    std::int64_t failures = 0;    // replicates where the estimator was undefined
    double emp_mean = 0.0;
    double emp_bias = 0.0;
    double emp_mse = 0.0;  // mean squared deviation from the realised mean
    double theory_bias = 0.0;
    double theory_mse = 0.0;
    double rel_gap = 0.0;  // (emp_mse - theory_mse) / theory_mse
};

struct SimulationReport {
    std::int64_t replicates = 0;
    bool exact = false;  // true when produced by exhaustive enumeration
    std::vector<SimRow> rows;
};

/// Monte Carlo study. Replicate r is driven by mix_seed(plan.seed, r) and
/// the reduction runs in replicate-index order, so the report is
/// bit-identical for any thread count. Undefined-estimator replicates are
/// excluded and counted; Error(all_replicates_failed) if an estimator never
/// produced a value.
SimulationReport run_monte_carlo(const FinitePopulation& pop, const ReplicationPlan& plan);

/// Exact design expectations by iterating every equally likely sample
/// (nested pairs for two-phase designs). Throws Error(enumeration_too_large)
/// when the number of sample combinations exceeds the cap.
SimulationReport enumerate_exact(const FinitePopulation& pop, const SamplingDesign& design,
                                 const std::vector<EstimatorSpec>& specs,
                                 std::int64_t cap = 2'000'000);

struct ComparisonRow {
    EstimatorSpec spec;
    std::string estimator;
    std::string params;
    double mse_gap = 0.0;   // relative: (emp - theory) / theory
    double bias_gap = 0.0;  // absolute: |emp_bias - theory_bias|
    bool pass = false;      // |mse_gap| <= tolerance
};

/// Pairs report rows with theory rows (same estimator list required;
/// Error(mismatched_specs) otherwise) and checks the MSE gap against the
/// tolerance.
std::vector<ComparisonRow> compare_theory_empirical(const SimulationReport& sim,
                                                    const TheoryReport& theory,
                                                    double tolerance);

/// Visits every n-subset of {0,...,population_size-1} in lexicographic
/// order. Exposed for the enumeration oracles in the test suites.
void for_each_combination(std::int64_t population_size, std::int64_t n,
                          const std::function<void(const std::vector<std::int32_t>&)>& visit);

/// C(n, k) capped at `cap` (returns cap+1 when the true value exceeds it).
std::int64_t binomial_capped(std::int64_t n, std::int64_t k, std::int64_t cap);

}  // namespace attrest
