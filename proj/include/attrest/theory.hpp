#pragma once

#include <optional>
#include <string>
#include <vector>

#include "attrest/estimators.hpp"
#include "attrest/population.hpp"

namespace attrest {

/// Second moments of the relative errors
///   e0 = (ybar-Y)/Y, e1 = (p1-P1)/P1, e2 = (p2-P2)/P2,
/// plus, for two-phase designs, the first-phase errors
///   e1' = (p1'-P1)/P1, e2' = (p2'-P2)/P2.
/// Every cross-phase covariance carries the factor f2: conditionally on the
/// first phase, the second-phase statistics are centred on the first-phase
/// ones, so cov(second, first) = var(first). In particular
/// E((e1-e1')e2') = 0, which is what keeps the two-phase quadratic forms
/// free of k_phi terms.
struct MomentSet {
    double e0e0 = 0.0;  // f1 c_y^2
    double e1e1 = 0.0;  // f1 c_p1^2
    double e2e2 = 0.0;  // f1 c_p2^2
    double e0e1 = 0.0;  // f1 k_pb1 c_p1^2
    double e0e2 = 0.0;  // f1 k_pb2 c_p2^2
    double e1e2 = 0.0;  // f1 k_phi c_p2^2

    bool has_two_phase = false;
    double e1p_e1p = 0.0;  // f2 c_p1^2
    double e1_e1p = 0.0;   // f2 c_p1^2
    double e0_e1p = 0.0;   // f2 k_pb1 c_p1^2
    double e2p_e2p = 0.0;  // f2 c_p2^2
    double e0_e2p = 0.0;   // f2 k_pb2 c_p2^2
    double e1_e2p = 0.0;   // f2 k_phi c_p2^2
    double e1p_e2p = 0.0;  // f2 k_phi c_p2^2
};

MomentSet moment_set(const Coefficients& c);

/// Quadratic-form coefficients of the single-phase composite MSE:
///   MSE = Y^2 f1 [c_y^2 + w1^2 A1 + w2^2 A2 - 2 w1 A3 - w2 A4 + w1 w2 A5].
struct ATerms {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0, a5 = 0.0;
};

/// Two-phase analogue; the B terms already carry their phase factors, so
///   MSE = Y^2 [f1 c_y^2 + h1^2 B1 + h2^2 B2 - 2 h1 B3 - h2 B4 + h1 h2 B5].
struct BTerms {
    double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0, b5 = 0.0;
};

ATerms a_terms(const Coefficients& c, double a1, double a2, double b1, double b2);
BTerms b_terms(const Coefficients& c, double m1, double m2, double n1, double n2);

struct Weights {
    double w1 = 0.0;
    double w2 = 0.0;
};

/// Minimiser of the composite quadratic form, from the normal equations:
///   w1 = (4 A2 A3 - A4 A5) / (4 A1 A2 - A5^2)
///   w2 = (2 A1 A4 - 2 A3 A5) / (4 A1 A2 - A5^2)
/// Throws Error(singular_system) when the discriminant is numerically zero.
Weights optimal_weights_single(const ATerms& a);
Weights optimal_weights_double(const BTerms& b);

/// The composite quadratic forms evaluated at arbitrary weights (divided by
/// Y^2: multiply by ybar^2 for the MSE). Exposed so optimality can be
/// checked against the closed-form weights by independent minimisation.
double composite_mse_form(const Coefficients& c, const ATerms& a, double w1, double w2);
double d_composite_mse_form(const Coefficients& c, const BTerms& b, double h1, double h2);

/// Returns a copy of the spec with auto composite weights resolved to the
/// optimal values for these coefficients; other specs pass through.
EstimatorSpec resolve_auto_weights(const EstimatorSpec& spec, const Coefficients& c);

struct TheoryOptions {
    bool as_tabulated = false;  // d-expproduct2 rows use the f3 variant
    std::string dataset_tag;    // annotate rows from the corrections ledger
};

/// First-order (canonical, corrections applied) bias and MSE.
/// Throws Error(missing_two_phase_factors) for a two-phase spec when the
/// coefficients carry no f2/f3.
double first_order_bias(const EstimatorSpec& spec, const Coefficients& c, double ybar);
double first_order_mse(const EstimatorSpec& spec, const Coefficients& c, double ybar,
                       const TheoryOptions& opt = {});

/// Percent relative efficiency 100 * mse_base / mse.
/// Throws Error(nonpositive_mse) when mse <= 0.
double pre_value(double mse_base, double mse);

struct TheoryRow {
    EstimatorSpec spec;  // resolved (auto weights substituted)
    std::string estimator;
    std::string params;  // full precision; text renderers reformat from spec
    double bias = 0.0;
    double mse = 0.0;
    double pre = 0.0;
    std::vector<std::string> flags;
};

struct TheoryReport {
    double mse_base = 0.0;  // MSE of the sample mean, the PRE reference
    std::vector<TheoryRow> rows;
};

/// One row per spec. Auto composite weights are resolved and reported in
/// the params column. d-expproduct2 rows always report both the canonical
/// (f2) and the tabulated (f3) value, one in the MSE column and the other
/// in the flags. With a dataset tag, rows with a known unreconciled
/// published value are annotated from the corrections ledger.
TheoryReport theory_table(const Coefficients& c, double ybar,
                          const std::vector<EstimatorSpec>& specs,
                          const TheoryOptions& opt = {});

}  // namespace attrest
