#include "attrest/estimators.hpp"

#include <cmath>

namespace attrest {

bool family_is_two_phase(Family f) {
    switch (f) {
        case Family::d_ratio1:
        case Family::d_product2:
        case Family::d_exp_ratio1:
        case Family::d_exp_product2:
        case Family::d_power:
        case Family::d_exp_family:
        case Family::d_composite:
            return true;
        default:
            return false;
    }
}

EstimatorSpec EstimatorSpec::named(Family f) {
    EstimatorSpec s;
    s.family = f;
    return s;
}

EstimatorSpec EstimatorSpec::power_family(double a1, double a2) {
    EstimatorSpec s;
    s.family = Family::power;
    s.a1 = a1;
    s.a2 = a2;
    return s;
}

EstimatorSpec EstimatorSpec::exp_family(double b1, double b2) {
    EstimatorSpec s;
    s.family = Family::exp_family;
    s.b1 = b1;
    s.b2 = b2;
    return s;
}

EstimatorSpec EstimatorSpec::composite(double w1, double w2, double a1, double a2,
                                       double b1, double b2) {
    EstimatorSpec s;
    s.family = Family::composite;
    s.w1 = w1;
    s.w2 = w2;
    s.a1 = a1;
    s.a2 = a2;
    s.b1 = b1;
    s.b2 = b2;
    return s;
}

EstimatorSpec EstimatorSpec::composite_auto(double a1, double a2, double b1, double b2) {
    EstimatorSpec s = composite(0.0, 0.0, a1, a2, b1, b2);
    s.auto_weights = true;
    return s;
}

EstimatorSpec EstimatorSpec::d_power_family(double m1, double m2) {
    EstimatorSpec s = power_family(m1, m2);
    s.family = Family::d_power;
    return s;
}

EstimatorSpec EstimatorSpec::d_exp_family(double n1, double n2) {
    EstimatorSpec s = exp_family(n1, n2);
    s.family = Family::d_exp_family;
    return s;
}

EstimatorSpec EstimatorSpec::d_composite(double h1, double h2, double m1, double m2,
                                         double n1, double n2) {
    EstimatorSpec s = composite(h1, h2, m1, m2, n1, n2);
    s.family = Family::d_composite;
    return s;
}

EstimatorSpec EstimatorSpec::d_composite_auto(double m1, double m2, double n1, double n2) {
    EstimatorSpec s = d_composite(0.0, 0.0, m1, m2, n1, n2);
    s.auto_weights = true;
    return s;
}

namespace {

// (ref/obs)^e, guarding the zero-denominator and zero-base cases the
// estimator formulas cannot tolerate.
double ratio_pow(double ref, double obs, double e, const char* what) {
    if (e == 0.0) return 1.0;
    if (obs == 0.0 && e > 0.0)
        raise(errc::division_by_zero, std::string("zero proportion in denominator of ") + what);
    if (ref == 0.0 && e < 0.0)
        raise(errc::division_by_zero, std::string("zero reference proportion in ") + what);
    if (e == 1.0) return ref / obs;
    if (e == -1.0) return obs / ref;
    const double base = ref / obs;
    if (base < 0.0)
        raise(errc::division_by_zero, std::string("negative ratio base in ") + what);
    return std::pow(base, e);
}

// exp(e * (lead - trail) / (lead + trail))
double exp_factor(double lead, double trail, double e, const char* what) {
    if (e == 0.0) return 1.0;
    const double denom = lead + trail;
    if (denom == 0.0)
        raise(errc::division_by_zero, std::string("zero denominator in ") + what);
    return std::exp(e * (lead - trail) / denom);
}

double power_value(double ybar, double p1, double p2, double bigp1, double bigp2,
                   double a1, double a2) {
    return ybar * ratio_pow(bigp1, p1, a1, "power attribute 1") *
           ratio_pow(bigp2, p2, a2, "power attribute 2");
}

double exp_value(double ybar, double p1, double p2, double bigp1, double bigp2,
                 double b1, double b2) {
    return ybar * exp_factor(bigp1, p1, b1, "exp attribute 1") *
           exp_factor(p2, bigp2, b2, "exp attribute 2");
}

double d_power_value(double ybar, double p1, double p1p, double p2p, double bigp2,
                     double m1, double m2) {
    return ybar * ratio_pow(p1p, p1, m1, "two-phase power attribute 1") *
           ratio_pow(bigp2, p2p, m2, "two-phase power attribute 2");
}

double d_exp_value(double ybar, double p1, double p1p, double p2p, double bigp2,
                   double n1, double n2) {
    return ybar * exp_factor(p1p, p1, n1, "two-phase exp attribute 1") *
           exp_factor(p2p, bigp2, n2, "two-phase exp attribute 2");
}

}  // namespace

double point_estimate(const EstimatorSpec& spec, const SampleData& s, const KnownTruth& k) {
    if (spec.two_phase())
        raise(errc::wrong_phase, "two-phase spec passed to point_estimate");
    switch (spec.family) {
        case Family::sample_mean:
            return s.mean_y;
        case Family::ratio1:
            return power_value(s.mean_y, s.p1, s.p2, k.p1, k.p2, 1.0, 0.0);
        case Family::product2:
            return power_value(s.mean_y, s.p1, s.p2, k.p1, k.p2, 0.0, -1.0);
        case Family::exp_ratio1:
            return exp_value(s.mean_y, s.p1, s.p2, k.p1, k.p2, 1.0, 0.0);
        case Family::exp_product2:
            return exp_value(s.mean_y, s.p1, s.p2, k.p1, k.p2, 0.0, 1.0);
        case Family::power:
            return power_value(s.mean_y, s.p1, s.p2, k.p1, k.p2, spec.a1, spec.a2);
        case Family::exp_family:
            return exp_value(s.mean_y, s.p1, s.p2, k.p1, k.p2, spec.b1, spec.b2);
        case Family::composite: {
            // Zero-weight components are not evaluated, so their undefined
            // cases (zero proportions) cannot poison the estimate.
            double v = spec.w0() * s.mean_y;
            if (spec.w1 != 0.0)
                v += spec.w1 * power_value(s.mean_y, s.p1, s.p2, k.p1, k.p2, spec.a1, spec.a2);
            if (spec.w2 != 0.0)
                v += spec.w2 * exp_value(s.mean_y, s.p1, s.p2, k.p1, k.p2, spec.b1, spec.b2);
            return v;
        }
        default:
            raise(errc::wrong_phase, "unhandled single-phase family");
    }
}

double two_phase_estimate(const EstimatorSpec& spec, const TwoPhaseSampleData& s,
                          const KnownTruth& k) {
    if (!spec.two_phase())
        raise(errc::wrong_phase, "single-phase spec passed to two_phase_estimate");
    switch (spec.family) {
        case Family::d_ratio1:
            return d_power_value(s.mean_y, s.p1, s.p1_prime, s.p2_prime, k.p2, 1.0, 0.0);
        case Family::d_product2:
            return d_power_value(s.mean_y, s.p1, s.p1_prime, s.p2_prime, k.p2, 0.0, 1.0);
        case Family::d_exp_ratio1:
            return d_exp_value(s.mean_y, s.p1, s.p1_prime, s.p2_prime, k.p2, 1.0, 0.0);
        case Family::d_exp_product2:
            return d_exp_value(s.mean_y, s.p1, s.p1_prime, s.p2_prime, k.p2, 0.0, 1.0);
        case Family::d_power:
            return d_power_value(s.mean_y, s.p1, s.p1_prime, s.p2_prime, k.p2, spec.a1, spec.a2);
        case Family::d_exp_family:
            return d_exp_value(s.mean_y, s.p1, s.p1_prime, s.p2_prime, k.p2, spec.b1, spec.b2);
        case Family::d_composite: {
            double v = spec.w0() * s.mean_y;
            if (spec.w1 != 0.0)
                v += spec.w1 * d_power_value(s.mean_y, s.p1, s.p1_prime, s.p2_prime, k.p2,
                                             spec.a1, spec.a2);
            if (spec.w2 != 0.0)
                v += spec.w2 * d_exp_value(s.mean_y, s.p1, s.p1_prime, s.p2_prime, k.p2,
                                           spec.b1, spec.b2);
            return v;
        }
        default:
            raise(errc::wrong_phase, "unhandled two-phase family");
    }
}

}  // namespace attrest
