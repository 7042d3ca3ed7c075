#include "attrest/population.hpp"

#include <cmath>

namespace attrest {

const char* errc_name(errc code) noexcept {
    switch (code) {
        case errc::degenerate_population: return "degenerate_population";
        case errc::zero_mean: return "zero_mean";
        case errc::invalid_design: return "invalid_design";
        case errc::division_by_zero: return "division_by_zero";
        case errc::wrong_phase: return "wrong_phase";
        case errc::missing_two_phase_factors: return "missing_two_phase_factors";
        case errc::singular_system: return "singular_system";
        case errc::nonpositive_mse: return "nonpositive_mse";
        case errc::enumeration_too_large: return "enumeration_too_large";
        case errc::all_replicates_failed: return "all_replicates_failed";
        case errc::invalid_generator_spec: return "invalid_generator_spec";
        case errc::mismatched_specs: return "mismatched_specs";
        case errc::parse_error: return "parse_error";
        case errc::io_error: return "io_error";
    }
    return "unknown";
}

void SamplingDesign::validate() const {
    if (population_size < 2)
        raise(errc::invalid_design, "population size must be at least 2, got " +
                                        std::to_string(population_size));
    if (sample_size < 2 || sample_size > population_size)
        raise(errc::invalid_design,
              "sample size n must satisfy 2 <= n <= N, got n=" + std::to_string(sample_size) +
                  " with N=" + std::to_string(population_size));
    if (first_phase_size) {
        const auto np = *first_phase_size;
        if (sample_size >= np || np > population_size)
            raise(errc::invalid_design,
                  "two-phase sizes must satisfy n < n' <= N, got n=" +
                      std::to_string(sample_size) + ", n'=" + std::to_string(np) +
                      ", N=" + std::to_string(population_size));
    }
}

PopulationSummary summarize_population(const FinitePopulation& pop) {
    const auto n = pop.size();
    if (n < 2)
        raise(errc::degenerate_population,
              "population needs at least 2 units, got " + std::to_string(n));

    double sum_y = 0.0;
    std::int64_t ones1 = 0, ones2 = 0;
    for (const Unit& u : pop.units) {
        sum_y += u.y;
        ones1 += u.phi1;
        ones2 += u.phi2;
    }
    const double dn = static_cast<double>(n);
    const double mean_y = sum_y / dn;
    const double p1 = static_cast<double>(ones1) / dn;
    const double p2 = static_cast<double>(ones2) / dn;

    double syy = 0.0, s11 = 0.0, s22 = 0.0;
    double sy1 = 0.0, sy2 = 0.0, s12 = 0.0;
    for (const Unit& u : pop.units) {
        const double dy = u.y - mean_y;
        const double d1 = static_cast<double>(u.phi1) - p1;
        const double d2 = static_cast<double>(u.phi2) - p2;
        syy += dy * dy;
        s11 += d1 * d1;
        s22 += d2 * d2;
        sy1 += dy * d1;
        sy2 += dy * d2;
        s12 += d1 * d2;
    }
    const double div = dn - 1.0;
    const double var_y = syy / div;
    const double var_phi1 = s11 / div;
    const double var_phi2 = s22 / div;

    if (var_y <= 0.0)
        raise(errc::degenerate_population, "study variable is constant (S_y = 0)");
    if (ones1 == 0 || ones1 == n || ones2 == 0 || ones2 == n)
        raise(errc::degenerate_population,
              "attribute proportion is 0 or 1; correlations are undefined");

    const double sd_y = std::sqrt(var_y);
    const double sd_1 = std::sqrt(var_phi1);
    const double sd_2 = std::sqrt(var_phi2);

    PopulationSummary out;
    out.n_units = n;
    out.mean_y = mean_y;
    out.p1 = p1;
    out.p2 = p2;
    out.var_y = var_y;
    out.var_phi1 = var_phi1;
    out.var_phi2 = var_phi2;
    out.rho_pb1 = (sy1 / div) / (sd_y * sd_1);
    out.rho_pb2 = (sy2 / div) / (sd_y * sd_2);
    out.rho_phi = (s12 / div) / (sd_1 * sd_2);
    out.from_raw = true;
    out.count_phi1 = ones1;
    out.count_phi2 = ones2;
    return out;
}

Coefficients derived_coefficients(const PopulationSummary& summary,
                                  const SamplingDesign& design) {
    if (summary.mean_y == 0.0)
        raise(errc::zero_mean, "mean_y is zero; coefficients of variation undefined");
    if (!(summary.p1 > 0.0 && summary.p1 < 1.0 && summary.p2 > 0.0 && summary.p2 < 1.0))
        raise(errc::degenerate_population,
              "proportions must lie strictly inside (0,1)");
    if (design.population_size != summary.n_units)
        raise(errc::invalid_design,
              "design N=" + std::to_string(design.population_size) +
                  " does not match summary N=" + std::to_string(summary.n_units));
    design.validate();

    Coefficients c;
    c.c_y = std::sqrt(summary.var_y) / summary.mean_y;
    c.c_p1 = std::sqrt(summary.var_phi1) / summary.p1;
    c.c_p2 = std::sqrt(summary.var_phi2) / summary.p2;
    c.k_pb1 = summary.rho_pb1 * c.c_y / c.c_p1;
    c.k_pb2 = summary.rho_pb2 * c.c_y / c.c_p2;
    c.k_phi = summary.rho_phi * c.c_p1 / c.c_p2;

    const double inv_n = 1.0 / static_cast<double>(design.sample_size);
    const double inv_bign = 1.0 / static_cast<double>(design.population_size);
    c.f1 = inv_n - inv_bign;
    if (design.first_phase_size) {
        const double inv_np = 1.0 / static_cast<double>(*design.first_phase_size);
        c.f2 = inv_np - inv_bign;
        c.f3 = inv_n - inv_np;
    }
    return c;
}

std::vector<std::string> validate_population(const FinitePopulation& pop) {
    std::vector<std::string> out;
    if (pop.size() < 2)
        out.push_back("N too small: need at least 2 units, got " + std::to_string(pop.size()));

    std::int64_t ones1 = 0, ones2 = 0;
    bool constant_y = true;
    for (std::size_t i = 0; i < pop.units.size(); ++i) {
        const Unit& u = pop.units[i];
        if (u.phi1 != 0 && u.phi1 != 1)
            out.push_back("non-binary attribute: phi1=" + std::to_string(u.phi1) +
                          " at row " + std::to_string(i + 1));
        if (u.phi2 != 0 && u.phi2 != 1)
            out.push_back("non-binary attribute: phi2=" + std::to_string(u.phi2) +
                          " at row " + std::to_string(i + 1));
        if (u.y != pop.units.front().y) constant_y = false;
        ones1 += (u.phi1 == 1);
        ones2 += (u.phi2 == 1);
    }
    if (!pop.units.empty() && constant_y)
        out.push_back("constant y: study variable has zero variance");
    if (pop.size() >= 2) {
        if (ones1 == 0 || ones1 == pop.size())
            out.push_back("degenerate proportion: P1 is " + std::string(ones1 ? "1" : "0"));
        if (ones2 == 0 || ones2 == pop.size())
            out.push_back("degenerate proportion: P2 is " + std::string(ones2 ? "1" : "0"));
    }
    return out;
}

}  // namespace attrest
