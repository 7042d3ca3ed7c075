#include <charconv>
#include <cmath>

#include "attrest/estimators.hpp"
#include "attrest/textfmt.hpp"

namespace attrest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

double parse_number(std::string_view token) {
    const std::string_view t = trim(token);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        raise(errc::parse_error, "bad numeric value '" + std::string(t) + "'");
    return v;
}

struct ParamBag {
    double a1 = 0, a2 = 0, b1 = 0, b2 = 0, w1 = 0, w2 = 0;
    bool auto_weights = false;
    bool has_w = false;
};

// Parenthesised parameter list: tokens separated by ',' or ';', each either
// "auto" or key=value. Two-phase aliases m1/m2 -> a1/a2, n1/n2 -> b1/b2,
// h1/h2 -> w1/w2.
ParamBag parse_params(std::string_view body, std::string_view where) {
    ParamBag bag;
    std::size_t pos = 0;
    while (pos <= body.size()) {
        std::size_t end = body.find_first_of(",;", pos);
        if (end == std::string_view::npos) end = body.size();
        const std::string_view token = trim(body.substr(pos, end - pos));
        pos = end + 1;
        if (token.empty()) {
            if (end == body.size()) break;
            continue;
        }
        if (token == "auto") {
            bag.auto_weights = true;
            continue;
        }
        const std::size_t eq = token.find('=');
        if (eq == std::string_view::npos)
            raise(errc::parse_error, "bad token '" + std::string(token) + "' in " +
                                         std::string(where));
        const std::string_view key = trim(token.substr(0, eq));
        const double value = parse_number(token.substr(eq + 1));
        if (key == "a1" || key == "m1") bag.a1 = value;
        else if (key == "a2" || key == "m2") bag.a2 = value;
        else if (key == "b1" || key == "n1") bag.b1 = value;
        else if (key == "b2" || key == "n2") bag.b2 = value;
        else if (key == "w1" || key == "h1") { bag.w1 = value; bag.has_w = true; }
        else if (key == "w2" || key == "h2") { bag.w2 = value; bag.has_w = true; }
        else
            raise(errc::parse_error, "bad token '" + std::string(token) + "' in " +
                                         std::string(where) + ": unknown key '" +
                                         std::string(key) + "'");
        if (end == body.size()) break;
    }
    return bag;
}

}  // namespace

EstimatorSpec parse_spec(std::string_view text) {
    std::string_view s = trim(text);
    if (s.empty()) raise(errc::parse_error, "empty estimator spec");

    std::string_view name = s;
    std::string_view body;
    const std::size_t open = s.find('(');
    if (open != std::string_view::npos) {
        if (s.back() != ')')
            raise(errc::parse_error, "bad token '" + std::string(s) + "': missing ')'");
        name = trim(s.substr(0, open));
        body = s.substr(open + 1, s.size() - open - 2);
    }

    bool dual = false;
    if (name.rfind("d-", 0) == 0) {
        dual = true;
        name.remove_prefix(2);
    }

    const ParamBag bag = parse_params(body, s);
    auto no_params = [&](Family f) {
        if (!trim(body).empty())
            raise(errc::parse_error,
                  "bad token '" + std::string(s) + "': family takes no parameters");
        return EstimatorSpec::named(f);
    };

    if (name == "mean") {
        if (dual) raise(errc::parse_error, "bad token '" + std::string(s) +
                                               "': the sample mean has no two-phase form");
        return no_params(Family::sample_mean);
    }
    if (name == "ratio1") return no_params(dual ? Family::d_ratio1 : Family::ratio1);
    if (name == "product2") return no_params(dual ? Family::d_product2 : Family::product2);
    if (name == "expratio1")
        return no_params(dual ? Family::d_exp_ratio1 : Family::exp_ratio1);
    if (name == "expproduct2")
        return no_params(dual ? Family::d_exp_product2 : Family::exp_product2);
    if (name == "power")
        return dual ? EstimatorSpec::d_power_family(bag.a1, bag.a2)
                    : EstimatorSpec::power_family(bag.a1, bag.a2);
    if (name == "expfam")
        return dual ? EstimatorSpec::d_exp_family(bag.b1, bag.b2)
                    : EstimatorSpec::exp_family(bag.b1, bag.b2);
    if (name == "composite") {
        if (bag.auto_weights && bag.has_w)
            raise(errc::parse_error, "bad token '" + std::string(s) +
                                         "': 'auto' excludes explicit weights");
        if (!bag.auto_weights && !bag.has_w)
            raise(errc::parse_error, "bad token '" + std::string(s) +
                                         "': composite needs 'auto' or w1/w2");
        EstimatorSpec spec =
            dual ? EstimatorSpec::d_composite(bag.w1, bag.w2, bag.a1, bag.a2, bag.b1, bag.b2)
                 : EstimatorSpec::composite(bag.w1, bag.w2, bag.a1, bag.a2, bag.b1, bag.b2);
        spec.auto_weights = bag.auto_weights;
        return spec;
    }
    raise(errc::parse_error, "unknown estimator family '" + std::string(name) + "'");
}

std::vector<EstimatorSpec> parse_spec_list(std::string_view text) {
    std::vector<EstimatorSpec> out;
    std::string current;
    int depth = 0;
    auto flush = [&] {
        const std::string_view t = trim(current);
        if (!t.empty()) out.push_back(parse_spec(t));
        current.clear();
    };
    for (char ch : text) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (depth == 0 && (ch == ',' || ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r')) {
            flush();
        } else {
            current.push_back(ch);
        }
    }
    if (depth != 0) raise(errc::parse_error, "unbalanced parentheses in spec list");
    flush();
    return out;
}

std::string spec_label(const EstimatorSpec& spec) {
    switch (spec.family) {
        case Family::sample_mean: return "mean";
        case Family::ratio1: return "ratio1";
        case Family::product2: return "product2";
        case Family::exp_ratio1: return "expratio1";
        case Family::exp_product2: return "expproduct2";
        case Family::power: return "power";
        case Family::exp_family: return "expfam";
        case Family::composite: return "composite";
        case Family::d_ratio1: return "d-ratio1";
        case Family::d_product2: return "d-product2";
        case Family::d_exp_ratio1: return "d-expratio1";
        case Family::d_exp_product2: return "d-expproduct2";
        case Family::d_power: return "d-power";
        case Family::d_exp_family: return "d-expfam";
        case Family::d_composite: return "d-composite";
    }
    return "?";
}

std::string spec_params(const EstimatorSpec& spec, bool full_precision) {
    auto fmt_param = [&](double v) { return full_precision ? fmt_full(v) : fmt_g6(v); };
    const bool dual = spec.two_phase();
    const char* e1 = dual ? "m1=" : "a1=";
    const char* e2 = dual ? "m2=" : "a2=";
    const char* x1 = dual ? "n1=" : "b1=";
    const char* x2 = dual ? "n2=" : "b2=";
    const char* v1 = dual ? "h1=" : "w1=";
    const char* v2 = dual ? "h2=" : "w2=";
    switch (spec.family) {
        case Family::power:
        case Family::d_power:
            return std::string(e1) + fmt_param(spec.a1) + "," + e2 + fmt_param(spec.a2);
        case Family::exp_family:
        case Family::d_exp_family:
            return std::string(x1) + fmt_param(spec.b1) + "," + x2 + fmt_param(spec.b2);
        case Family::composite:
        case Family::d_composite: {
            std::string w = spec.auto_weights
                                ? std::string("auto")
                                : std::string(v1) + fmt_param(spec.w1) + "," + v2 +
                                      fmt_param(spec.w2);
            return w + ";" + e1 + fmt_param(spec.a1) + "," + e2 + fmt_param(spec.a2) + "," +
                   x1 + fmt_param(spec.b1) + "," + x2 + fmt_param(spec.b2);
        }
        default:
            return "";
    }
}

std::string format_spec(const EstimatorSpec& spec) {
    const std::string params = spec_params(spec);
    if (params.empty()) return spec_label(spec);
    return spec_label(spec) + "(" + params + ")";
}

}  // namespace attrest
