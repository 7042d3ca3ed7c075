#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "attrest/errors.hpp"

namespace attrest {

enum class Family {
    sample_mean,
    ratio1,        // ybar * (P1/p1)
    product2,      // ybar * (p2/P2)
    exp_ratio1,    // ybar * exp((P1-p1)/(P1+p1))
    exp_product2,  // ybar * exp((p2-P2)/(p2+P2))
    power,         // ybar * (P1/p1)^a1 * (P2/p2)^a2
    exp_family,    // ybar * exp((P1-p1)/(P1+p1))^b1 * exp((p2-P2)/(p2+P2))^b2
    composite,     // w0*ybar + w1*power + w2*exp_family, w0 = 1-w1-w2
    d_ratio1,        // ybar * (p1'/p1)
    d_product2,      // ybar * (P2/p2')
    d_exp_ratio1,    // ybar * exp((p1'-p1)/(p1'+p1))
    d_exp_product2,  // ybar * exp((p2'-P2)/(p2'+P2))
    d_power,         // ybar * (p1'/p1)^m1 * (P2/p2')^m2
    d_exp_family,    // ybar * exp((p1'-p1)/(p1'+p1))^n1 * exp((p2'-P2)/(p2'+P2))^n2
    d_composite,     // h0*ybar + h1*d_power + h2*d_exp_family, h0 = 1-h1-h2
};

bool family_is_two_phase(Family f);

/// An estimator family together with its real parameters. Power exponents
/// are stored in a1/a2 (m1/m2 for the two-phase set), exponential exponents
/// in b1/b2 (n1/n2), composite weights in w1/w2 (h1/h2) with the leading
/// weight always derived as 1 - w1 - w2.
struct EstimatorSpec {
    Family family = Family::sample_mean;
    double a1 = 0.0, a2 = 0.0;
    double b1 = 0.0, b2 = 0.0;
    double w1 = 0.0, w2 = 0.0;
    bool auto_weights = false;  // composite only: solve for optimal weights

    bool two_phase() const { return family_is_two_phase(family); }
    double w0() const { return 1.0 - w1 - w2; }

    static EstimatorSpec mean() { return {}; }
    static EstimatorSpec named(Family f);
    static EstimatorSpec power_family(double a1, double a2);
    static EstimatorSpec exp_family(double b1, double b2);
    static EstimatorSpec composite(double w1, double w2,
                                   double a1, double a2, double b1, double b2);
    static EstimatorSpec composite_auto(double a1, double a2, double b1, double b2);
    static EstimatorSpec d_power_family(double m1, double m2);
    static EstimatorSpec d_exp_family(double n1, double n2);
    static EstimatorSpec d_composite(double h1, double h2,
                                     double m1, double m2, double n1, double n2);
    static EstimatorSpec d_composite_auto(double m1, double m2, double n1, double n2);
};

struct SampleData {
    double mean_y = 0.0;
    double p1 = 0.0;  // sample proportion of phi1
    double p2 = 0.0;  // sample proportion of phi2
};

struct TwoPhaseSampleData {
    double mean_y = 0.0;   // second-phase mean
    double p1 = 0.0;       // second-phase proportion of phi1
    double p1_prime = 0.0; // first-phase proportion of phi1
    double p2_prime = 0.0; // first-phase proportion of phi2
};

struct KnownTruth {
    double p1 = 0.0;  // known P1 (single-phase estimators only)
    double p2 = 0.0;  // known P2
};

/// Evaluates a single-phase estimator. Throws Error(wrong_phase) for a
/// two-phase spec and Error(division_by_zero) when a needed denominator
/// (or power base) is zero.
double point_estimate(const EstimatorSpec& spec, const SampleData& s,
                      const KnownTruth& k);

/// Evaluates a two-phase estimator; the attribute-2 statistic is always the
/// first-phase proportion p2'.
double two_phase_estimate(const EstimatorSpec& spec, const TwoPhaseSampleData& s,
                          const KnownTruth& k);

// Textual grammar, e.g. "ratio1", "power(a1=1,a2=0)",
// "composite(auto;a1=1,a2=1,b1=1,b2=1)", "d-power(m1=1,m2=1)".
EstimatorSpec parse_spec(std::string_view text);
std::vector<EstimatorSpec> parse_spec_list(std::string_view text);
std::string spec_label(const EstimatorSpec& spec);   // family name only
std::string spec_params(const EstimatorSpec& spec,
                        bool full_precision = true);  // parameter list, may be empty
std::string format_spec(const EstimatorSpec& spec);  // round-trips through parse_spec

}  // namespace attrest
