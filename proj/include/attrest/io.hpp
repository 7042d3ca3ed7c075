#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "attrest/population.hpp"
#include "attrest/simulation.hpp"
#include "attrest/theory.hpp"

namespace attrest {

/// Formats a double with 6 significant digits (text tables).
std::string fmt_g6(double v);

/// Shortest representation that round-trips exactly (CSV output).
std::string fmt_full(double v);

/// Population CSV: header "y,phi1,phi2", one row per unit. Unparseable
/// fields raise Error(parse_error) naming the line; attribute values other
/// than 0/1 are loaded as-is and left to validate_population.
FinitePopulation read_population_csv(const std::string& path);
FinitePopulation parse_population_csv(std::istream& in, const std::string& name);
void write_population_csv(std::ostream& out, const FinitePopulation& pop);

/// Flat key-value summary file ("key = value", '#' comments). Required keys:
/// N, mean_y, P1, P2, var_y, var_phi1, var_phi2, rho_pb1, rho_pb2, rho_phi.
/// Optional extensions: tag, n, n_prime (default design sizes).
struct SummaryFile {
    PopulationSummary summary;
    std::optional<std::int64_t> default_n;
    std::optional<std::int64_t> default_n_prime;
};

SummaryFile read_summary_file(const std::string& path);
SummaryFile parse_summary_file(std::istream& in, const std::string& name);
std::string summary_to_text(const PopulationSummary& s);
std::string coefficients_to_text(const Coefficients& c, const SamplingDesign& design);

std::string theory_to_csv(const TheoryReport& report);
std::string theory_to_text(const TheoryReport& report);
std::string simulation_to_csv(const SimulationReport& report);
std::string simulation_to_text(const SimulationReport& report);
std::string comparison_to_text(const std::vector<ComparisonRow>& rows, double tolerance);

}  // namespace attrest
