#include "attrest/theory.hpp"

#include <cmath>

#include "attrest/ledger.hpp"
#include "attrest/textfmt.hpp"

namespace attrest {

MomentSet moment_set(const Coefficients& c) {
    MomentSet m;
    const double cy2 = c.c_y * c.c_y;
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    m.e0e0 = c.f1 * cy2;
    m.e1e1 = c.f1 * cp1;
    m.e2e2 = c.f1 * cp2;
    m.e0e1 = c.f1 * c.k_pb1 * cp1;
    m.e0e2 = c.f1 * c.k_pb2 * cp2;
    m.e1e2 = c.f1 * c.k_phi * cp2;
    if (c.two_phase()) {
        const double f2 = *c.f2;
        m.has_two_phase = true;
        m.e1p_e1p = f2 * cp1;
        m.e1_e1p = f2 * cp1;
        m.e0_e1p = f2 * c.k_pb1 * cp1;
        m.e2p_e2p = f2 * cp2;
        m.e0_e2p = f2 * c.k_pb2 * cp2;
        m.e1_e2p = f2 * c.k_phi * cp2;
        m.e1p_e2p = f2 * c.k_phi * cp2;
    }
    return m;
}

ATerms a_terms(const Coefficients& c, double a1, double a2, double b1, double b2) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    ATerms t;
    t.a1 = a1 * a1 * cp1 + a2 * a2 * cp2 + 2.0 * a1 * a2 * c.k_phi * cp2;
    t.a2 = 0.25 * (b1 * b1 * cp1 + b2 * b2 * cp2 - 2.0 * b1 * b2 * c.k_phi * cp2);
    t.a3 = a1 * c.k_pb1 * cp1 + a2 * c.k_pb2 * cp2;
    t.a4 = b1 * c.k_pb1 * cp1 - b2 * c.k_pb2 * cp2;
    t.a5 = a1 * b1 * cp1 - a2 * b2 * cp2 + a2 * b1 * c.k_phi * cp2 - a1 * b2 * c.k_phi * cp2;
    return t;
}

namespace {

void require_two_phase(const Coefficients& c, const char* what) {
    if (!c.two_phase())
        raise(errc::missing_two_phase_factors,
              std::string(what) + " needs two-phase factors f2/f3, but the "
                                  "design has no first-phase size");
}

}  // namespace

BTerms b_terms(const Coefficients& c, double m1, double m2, double n1, double n2) {
    require_two_phase(c, "b_terms");
    const double f2 = *c.f2;
    const double f3 = *c.f3;
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    BTerms t;
    t.b1 = f2 * m2 * m2 * cp2 + f3 * m1 * m1 * cp1;
    t.b2 = 0.25 * (f2 * n2 * n2 * cp2 + f3 * n1 * n1 * cp1);
    t.b3 = f3 * m1 * c.k_pb1 * cp1 + f2 * m2 * c.k_pb2 * cp2;
    t.b4 = f3 * n1 * c.k_pb1 * cp1 - f2 * n2 * c.k_pb2 * cp2;
    t.b5 = f3 * n1 * m1 * cp1 - f2 * n2 * m2 * cp2;
    return t;
}

namespace {

// Shared normal-equation solve for both weight systems:
//   2 q1 w1 + q5 w2 = 2 q3
//   q5 w1 + 2 q2 w2 = q4
Weights solve_weights(double q1, double q2, double q3, double q4, double q5) {
    const double det = 4.0 * q1 * q2 - q5 * q5;
    const double scale = std::max(std::abs(4.0 * q1 * q2), q5 * q5);
    if (std::abs(det) <= 1e-12 * scale)
        raise(errc::singular_system,
              "weight system is singular: 4*Q1*Q2 - Q5^2 is numerically zero");
    Weights w;
    w.w1 = (4.0 * q2 * q3 - q4 * q5) / det;
    w.w2 = (2.0 * q1 * q4 - 2.0 * q3 * q5) / det;
    return w;
}

}  // namespace

Weights optimal_weights_single(const ATerms& a) {
    return solve_weights(a.a1, a.a2, a.a3, a.a4, a.a5);
}

Weights optimal_weights_double(const BTerms& b) {
    return solve_weights(b.b1, b.b2, b.b3, b.b4, b.b5);
}

double composite_mse_form(const Coefficients& c, const ATerms& a, double w1, double w2) {
    return c.f1 * (c.c_y * c.c_y + w1 * w1 * a.a1 + w2 * w2 * a.a2 - 2.0 * w1 * a.a3 -
                   w2 * a.a4 + w1 * w2 * a.a5);
}

double d_composite_mse_form(const Coefficients& c, const BTerms& b, double h1, double h2) {
    // f1 applies to the c_y^2 term only; the B terms carry their own phase
    // factors (confirmed by the reference two-phase composite row).
    return c.f1 * c.c_y * c.c_y + h1 * h1 * b.b1 + h2 * h2 * b.b2 - 2.0 * h1 * b.b3 -
           h2 * b.b4 + h1 * h2 * b.b5;
}

EstimatorSpec resolve_auto_weights(const EstimatorSpec& spec, const Coefficients& c) {
    if (!spec.auto_weights) return spec;
    EstimatorSpec resolved = spec;
    resolved.auto_weights = false;
    if (spec.family == Family::composite) {
        const Weights w = optimal_weights_single(a_terms(c, spec.a1, spec.a2, spec.b1, spec.b2));
        resolved.w1 = w.w1;
        resolved.w2 = w.w2;
    } else if (spec.family == Family::d_composite) {
        const Weights w = optimal_weights_double(b_terms(c, spec.a1, spec.a2, spec.b1, spec.b2));
        resolved.w1 = w.w1;
        resolved.w2 = w.w2;
    }
    return resolved;
}

namespace {

// Bias contribution of the power-family factor (P1/p1)^a1 (P2/p2)^a2,
// divided by ybar*f1:
//   cp1^2 (a1^2/2 + a1/2 - a1 k1) + cp2^2 (a2^2/2 + a2/2 - a2 k2 + a1 a2 kphi)
double power_bias_form(const Coefficients& c, double a1, double a2) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    return cp1 * (0.5 * a1 * a1 + 0.5 * a1 - a1 * c.k_pb1) +
           cp2 * (0.5 * a2 * a2 + 0.5 * a2 - a2 * c.k_pb2 + a1 * a2 * c.k_phi);
}

// Bias contribution of the exponential factor, divided by ybar*f1. The
// quadratic coefficients come from expanding exp(+-e/(2+e)) in full:
//   exp(-e1/(2+e1))^b1 -> 1 - b1 e1/2 + (b1/4 + b1^2/8) e1^2
//   exp(+e2/(2+e2))^b2 -> 1 + b2 e2/2 + (b2^2/8 - b2/4) e2^2
double exp_bias_form(const Coefficients& c, double b1, double b2) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    return cp1 * (b1 * b1 / 8.0 + b1 / 4.0 - 0.5 * b1 * c.k_pb1) +
           cp2 * (b2 * b2 / 8.0 - b2 / 4.0 + 0.5 * b2 * c.k_pb2 - 0.25 * b1 * b2 * c.k_phi);
}

// Two-phase analogues carry their phase factors (f3 with attribute 1, f2
// with attribute 2) and lose the k_phi cross terms because (e1 - e1') is
// uncorrelated with e2'.
double d_power_bias_form(const Coefficients& c, double m1, double m2) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    return *c.f3 * cp1 * (0.5 * m1 * m1 + 0.5 * m1 - m1 * c.k_pb1) +
           *c.f2 * cp2 * (0.5 * m2 * m2 + 0.5 * m2 - m2 * c.k_pb2);
}

double d_exp_bias_form(const Coefficients& c, double n1, double n2) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    return *c.f3 * cp1 * (n1 * n1 / 8.0 + n1 / 4.0 - 0.5 * n1 * c.k_pb1) +
           *c.f2 * cp2 * (n2 * n2 / 8.0 - n2 / 4.0 + 0.5 * n2 * c.k_pb2);
}

double power_mse(const Coefficients& c, double ybar, double a1, double a2) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    return ybar * ybar * c.f1 *
           (c.c_y * c.c_y + cp1 * (a1 * a1 - 2.0 * a1 * c.k_pb1) +
            cp2 * (a2 * a2 - 2.0 * a2 * c.k_pb2 + 2.0 * a1 * a2 * c.k_phi));
}

double exp_mse(const Coefficients& c, double ybar, double b1, double b2) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    return ybar * ybar * c.f1 *
           (c.c_y * c.c_y + cp1 * (0.25 * b1 * b1 - b1 * c.k_pb1) +
            cp2 * (0.25 * b2 * b2 + b2 * c.k_pb2 - 0.5 * b1 * b2 * c.k_phi));
}

double d_power_mse(const Coefficients& c, double ybar, double m1, double m2) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    return ybar * ybar *
           (c.f1 * c.c_y * c.c_y + *c.f3 * cp1 * (m1 * m1 - 2.0 * m1 * c.k_pb1) +
            *c.f2 * cp2 * (m2 * m2 - 2.0 * m2 * c.k_pb2));
}

double d_exp_mse(const Coefficients& c, double ybar, double n1, double n2,
                 bool tabulated_variant) {
    const double cp1 = c.c_p1 * c.c_p1;
    const double cp2 = c.c_p2 * c.c_p2;
    // The tabulated variant swaps f2 for f3 on the attribute-2 term; only
    // the plain two-phase exp-product estimator (n1=0) is ever published
    // that way, but the swap is applied uniformly for transparency.
    const double fa2 = tabulated_variant ? *c.f3 : *c.f2;
    return ybar * ybar *
           (c.f1 * c.c_y * c.c_y + *c.f3 * cp1 * (0.25 * n1 * n1 - n1 * c.k_pb1) +
            fa2 * cp2 * (0.25 * n2 * n2 + n2 * c.k_pb2));
}

}  // namespace

double first_order_bias(const EstimatorSpec& raw, const Coefficients& c, double ybar) {
    if (raw.two_phase()) require_two_phase(c, "first_order_bias");
    const EstimatorSpec spec = resolve_auto_weights(raw, c);
    switch (spec.family) {
        case Family::sample_mean:
            return 0.0;
        case Family::ratio1:
            return ybar * c.f1 * power_bias_form(c, 1.0, 0.0);
        case Family::product2:
            return ybar * c.f1 * power_bias_form(c, 0.0, -1.0);
        case Family::exp_ratio1:
            return ybar * c.f1 * exp_bias_form(c, 1.0, 0.0);
        case Family::exp_product2:
            return ybar * c.f1 * exp_bias_form(c, 0.0, 1.0);
        case Family::power:
            return ybar * c.f1 * power_bias_form(c, spec.a1, spec.a2);
        case Family::exp_family:
            return ybar * c.f1 * exp_bias_form(c, spec.b1, spec.b2);
        case Family::composite:
            return ybar * c.f1 *
                   (spec.w1 * power_bias_form(c, spec.a1, spec.a2) +
                    spec.w2 * exp_bias_form(c, spec.b1, spec.b2));
        case Family::d_ratio1:
            return ybar * d_power_bias_form(c, 1.0, 0.0);
        case Family::d_product2:
            return ybar * d_power_bias_form(c, 0.0, 1.0);
        case Family::d_exp_ratio1:
            return ybar * d_exp_bias_form(c, 1.0, 0.0);
        case Family::d_exp_product2:
            return ybar * d_exp_bias_form(c, 0.0, 1.0);
        case Family::d_power:
            return ybar * d_power_bias_form(c, spec.a1, spec.a2);
        case Family::d_exp_family:
            return ybar * d_exp_bias_form(c, spec.b1, spec.b2);
        case Family::d_composite:
            return ybar * (spec.w1 * d_power_bias_form(c, spec.a1, spec.a2) +
                           spec.w2 * d_exp_bias_form(c, spec.b1, spec.b2));
    }
    return 0.0;
}

double first_order_mse(const EstimatorSpec& raw, const Coefficients& c, double ybar,
                       const TheoryOptions& opt) {
    if (raw.two_phase()) require_two_phase(c, "first_order_mse");
    const EstimatorSpec spec = resolve_auto_weights(raw, c);
    switch (spec.family) {
        case Family::sample_mean:
            return ybar * ybar * c.f1 * c.c_y * c.c_y;
        case Family::ratio1:
            return power_mse(c, ybar, 1.0, 0.0);
        case Family::product2:
            return power_mse(c, ybar, 0.0, -1.0);
        case Family::exp_ratio1:
            return exp_mse(c, ybar, 1.0, 0.0);
        case Family::exp_product2:
            return exp_mse(c, ybar, 0.0, 1.0);
        case Family::power:
            return power_mse(c, ybar, spec.a1, spec.a2);
        case Family::exp_family:
            return exp_mse(c, ybar, spec.b1, spec.b2);
        case Family::composite:
            return ybar * ybar *
                   composite_mse_form(c, a_terms(c, spec.a1, spec.a2, spec.b1, spec.b2),
                                      spec.w1, spec.w2);
        case Family::d_ratio1:
            return d_power_mse(c, ybar, 1.0, 0.0);
        case Family::d_product2:
            return d_power_mse(c, ybar, 0.0, 1.0);
        case Family::d_exp_ratio1:
            return d_exp_mse(c, ybar, 1.0, 0.0, false);
        case Family::d_exp_product2:
            return d_exp_mse(c, ybar, 0.0, 1.0, opt.as_tabulated);
        case Family::d_power:
            return d_power_mse(c, ybar, spec.a1, spec.a2);
        case Family::d_exp_family:
            return d_exp_mse(c, ybar, spec.b1, spec.b2, false);
        case Family::d_composite:
            return ybar * ybar *
                   d_composite_mse_form(c, b_terms(c, spec.a1, spec.a2, spec.b1, spec.b2),
                                        spec.w1, spec.w2);
    }
    return 0.0;
}

double pre_value(double mse_base, double mse) {
    if (!(mse > 0.0))
        raise(errc::nonpositive_mse, "PRE undefined for MSE <= 0");
    return 100.0 * mse_base / mse;
}

TheoryReport theory_table(const Coefficients& c, double ybar,
                          const std::vector<EstimatorSpec>& specs,
                          const TheoryOptions& opt) {
    TheoryReport report;
    report.mse_base = ybar * ybar * c.f1 * c.c_y * c.c_y;

    for (const EstimatorSpec& raw : specs) {
        const EstimatorSpec spec = resolve_auto_weights(raw, c);
        TheoryRow row;
        row.spec = spec;
        row.estimator = spec_label(spec);
        row.params = spec_params(spec);
        row.bias = first_order_bias(spec, c, ybar);
        row.mse = first_order_mse(spec, c, ybar, opt);
        row.pre = pre_value(report.mse_base, row.mse);

        if (spec.family == Family::d_exp_product2) {
            TheoryOptions other = opt;
            other.as_tabulated = !opt.as_tabulated;
            const double alt = first_order_mse(spec, c, ybar, other);
            row.flags.push_back(std::string(opt.as_tabulated ? "canonical(f2)=" :
                                                               "as-tabulated(f3)=") +
                                fmt_g6(alt));
        }
        if (!opt.dataset_tag.empty()) {
            // Composite rows report resolved weights in front of the exponent
            // list, so ledger entries match on the exponent suffix.
            auto params_match = [&](const std::string& want) {
                if (want.empty()) return true;
                if (row.params == want) return true;
                const std::string suffix = ";" + want;
                return row.params.size() > suffix.size() &&
                       row.params.compare(row.params.size() - suffix.size(), suffix.size(),
                                          suffix) == 0;
            };
            for (const LedgerEntry& entry : corrections_ledger()) {
                if (entry.dataset_tag != opt.dataset_tag) continue;
                if (entry.estimator != row.estimator) continue;
                if (!params_match(entry.params)) continue;
                if (!entry.published_mse) continue;
                row.flags.push_back("published=" + fmt_g6(*entry.published_mse) +
                                    " " + entry.status + " [" + entry.id + "]");
            }
        }
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace attrest
