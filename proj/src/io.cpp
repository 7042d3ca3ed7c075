#include "attrest/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "attrest/textfmt.hpp"

namespace attrest {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double_field(std::string_view field, const std::string& where) {
    const std::string_view t = trim(field);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        raise(errc::parse_error, where + ": bad numeric value '" + std::string(t) + "'");
    return v;
}

std::int64_t parse_int_field(std::string_view field, const std::string& where) {
    const std::string_view t = trim(field);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        raise(errc::parse_error, where + ": bad integer value '" + std::string(t) + "'");
    return v;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else out += ch;
    }
    out += "\"";
    return out;
}

std::string flags_joined(const std::vector<std::string>& flags) {
    std::string out;
    for (const std::string& f : flags) {
        if (!out.empty()) out += "; ";
        out += f;
    }
    return out;
}

// Minimal aligned-table writer: pad every column to its widest cell.
std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& row : rows) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i)
            width[i] = std::max(width[i], row[i].size());
    }
    std::string out;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += "  ";
            out += row[i];
            if (i + 1 < row.size())
                out.append(width[i] - row[i].size(), ' ');
        }
        out += "\n";
    }
    return out;
}

}  // namespace

FinitePopulation parse_population_csv(std::istream& in, const std::string& name) {
    FinitePopulation pop;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (!saw_header) {
            if (t != "y,phi1,phi2")
                raise(errc::parse_error,
                      name + ":" + std::to_string(line_no) +
                          ": expected header 'y,phi1,phi2', got '" + std::string(t) + "'");
            saw_header = true;
            continue;
        }
        const std::string where = name + ":" + std::to_string(line_no);
        const std::size_t c1 = t.find(',');
        const std::size_t c2 = (c1 == std::string_view::npos) ? c1 : t.find(',', c1 + 1);
        if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
            t.find(',', c2 + 1) != std::string_view::npos)
            raise(errc::parse_error, where + ": expected 3 comma-separated fields");
        Unit u;
        u.y = parse_double_field(t.substr(0, c1), where);
        u.phi1 = static_cast<int>(parse_int_field(t.substr(c1 + 1, c2 - c1 - 1), where));
        u.phi2 = static_cast<int>(parse_int_field(t.substr(c2 + 1), where));
        pop.units.push_back(u);
    }
    if (!saw_header)
        raise(errc::parse_error, name + ": empty file, expected header 'y,phi1,phi2'");
    return pop;
}

FinitePopulation read_population_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open population CSV '" + path + "'");
    return parse_population_csv(in, path);
}

void write_population_csv(std::ostream& out, const FinitePopulation& pop) {
    out << "y,phi1,phi2\n";
    for (const Unit& u : pop.units)
        out << fmt_full(u.y) << "," << u.phi1 << "," << u.phi2 << "\n";
}

SummaryFile parse_summary_file(std::istream& in, const std::string& name) {
    std::map<std::string, std::string, std::less<>> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string_view::npos)
            raise(errc::parse_error, name + ":" + std::to_string(line_no) +
                                         ": expected 'key = value', got '" + std::string(t) +
                                         "'");
        const std::string key(trim(t.substr(0, eq)));
        const std::string value(trim(t.substr(eq + 1)));
        if (kv.count(key))
            raise(errc::parse_error,
                  name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    auto need = [&](const char* key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end())
            raise(errc::parse_error, name + ": missing required key '" + std::string(key) + "'");
        return it->second;
    };

    SummaryFile out;
    PopulationSummary& s = out.summary;
    s.n_units = parse_int_field(need("N"), name + " key N");
    s.mean_y = parse_double_field(need("mean_y"), name + " key mean_y");
    s.p1 = parse_double_field(need("P1"), name + " key P1");
    s.p2 = parse_double_field(need("P2"), name + " key P2");
    s.var_y = parse_double_field(need("var_y"), name + " key var_y");
    s.var_phi1 = parse_double_field(need("var_phi1"), name + " key var_phi1");
    s.var_phi2 = parse_double_field(need("var_phi2"), name + " key var_phi2");
    s.rho_pb1 = parse_double_field(need("rho_pb1"), name + " key rho_pb1");
    s.rho_pb2 = parse_double_field(need("rho_pb2"), name + " key rho_pb2");
    s.rho_phi = parse_double_field(need("rho_phi"), name + " key rho_phi");
    s.from_raw = false;
    if (auto it = kv.find("tag"); it != kv.end()) s.tag = it->second;
    if (auto it = kv.find("n"); it != kv.end())
        out.default_n = parse_int_field(it->second, name + " key n");
    if (auto it = kv.find("n_prime"); it != kv.end())
        out.default_n_prime = parse_int_field(it->second, name + " key n_prime");
    return out;
}

SummaryFile read_summary_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(errc::io_error, "cannot open summary file '" + path + "'");
    return parse_summary_file(in, path);
}

std::string summary_to_text(const PopulationSummary& s) {
    std::ostringstream out;
    if (!s.tag.empty()) out << "dataset:  " << s.tag << "\n";
    out << "N         " << s.n_units << "\n";
    out << "mean_y    " << fmt_g6(s.mean_y) << "\n";
    out << "P1        " << fmt_g6(s.p1) << "\n";
    out << "P2        " << fmt_g6(s.p2) << "\n";
    out << "var_y     " << fmt_g6(s.var_y) << "\n";
    out << "var_phi1  " << fmt_g6(s.var_phi1) << "\n";
    out << "var_phi2  " << fmt_g6(s.var_phi2) << "\n";
    out << "rho_pb1   " << fmt_g6(s.rho_pb1) << "\n";
    out << "rho_pb2   " << fmt_g6(s.rho_pb2) << "\n";
    out << "rho_phi   " << fmt_g6(s.rho_phi) << "\n";
    out << "source    " << (s.from_raw ? "raw units" : "summary only (no raw population available)")
        << "\n";
    return out.str();
}

std::string coefficients_to_text(const Coefficients& c, const SamplingDesign& design) {
    std::ostringstream out;
    out << "design    N=" << design.population_size << " n=" << design.sample_size;
    if (design.first_phase_size) out << " n'=" << *design.first_phase_size;
    out << "\n";
    out << "C_y       " << fmt_g6(c.c_y) << "\n";
    out << "C_p1      " << fmt_g6(c.c_p1) << "\n";
    out << "C_p2      " << fmt_g6(c.c_p2) << "\n";
    out << "K_pb1     " << fmt_g6(c.k_pb1) << "\n";
    out << "K_pb2     " << fmt_g6(c.k_pb2) << "\n";
    out << "K_phi     " << fmt_g6(c.k_phi) << "\n";
    out << "f1        " << fmt_g6(c.f1) << "\n";
    if (c.f2) out << "f2        " << fmt_g6(*c.f2) << "\n";
    if (c.f3) out << "f3        " << fmt_g6(*c.f3) << "\n";
    return out.str();
}

std::string theory_to_csv(const TheoryReport& report) {
    std::string out = "estimator,params,bias,mse,pre,flags\n";
    for (const TheoryRow& r : report.rows) {
        out += r.estimator;
        out += ",";
        out += csv_field(r.params);
        out += ",";
        out += fmt_full(r.bias);
        out += ",";
        out += fmt_full(r.mse);
        out += ",";
        out += fmt_full(r.pre);
        out += ",";
        out += csv_field(flags_joined(r.flags));
        out += "\n";
    }
    return out;
}

std::string theory_to_text(const TheoryReport& report) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"estimator", "params", "bias", "mse", "pre", "flags"});
    for (const TheoryRow& r : report.rows)
        rows.push_back({r.estimator, spec_params(r.spec, false), fmt_g6(r.bias),
                        fmt_g6(r.mse), fmt_g6(r.pre), flags_joined(r.flags)});
    return render_table(rows);
}

std::string simulation_to_csv(const SimulationReport& report) {
    std::string out = "estimator,R,failures,emp_bias,emp_mse,theory_bias,theory_mse,rel_gap\n";
    for (const SimRow& r : report.rows) {
        const std::string label =
            r.params.empty() ? r.estimator : r.estimator + "(" + r.params + ")";
        out += csv_field(label);
        out += ",";
        out += std::to_string(r.replicates);
        out += ",";
        out += std::to_string(r.failures);
        out += ",";
        out += fmt_full(r.emp_bias);
        out += ",";
        out += fmt_full(r.emp_mse);
        out += ",";
        out += fmt_full(r.theory_bias);
        out += ",";
        out += fmt_full(r.theory_mse);
        out += ",";
        out += fmt_full(r.rel_gap);
        out += "\n";
    }
    return out;
}

std::string simulation_to_text(const SimulationReport& report) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"estimator", "params", "R", "failures", "emp_bias", "emp_mse",
                    "theory_bias", "theory_mse", "rel_gap"});
    for (const SimRow& r : report.rows)
        rows.push_back({r.estimator, spec_params(r.spec, false), std::to_string(r.replicates),
                        std::to_string(r.failures), fmt_g6(r.emp_bias), fmt_g6(r.emp_mse),
                        fmt_g6(r.theory_bias), fmt_g6(r.theory_mse), fmt_g6(r.rel_gap)});
    std::string head = report.exact ? "exact enumeration over " : "monte carlo with ";
    head += std::to_string(report.replicates);
    head += report.exact ? " samples\n" : " replicates\n";
    return head + render_table(rows);
}

std::string comparison_to_text(const std::vector<ComparisonRow>& rows, double tolerance) {
    std::vector<std::vector<std::string>> table;
    table.push_back({"estimator", "params", "mse_gap", "bias_gap", "within_tol"});
    for (const ComparisonRow& r : rows)
        table.push_back({r.estimator, spec_params(r.spec, false), fmt_g6(r.mse_gap),
                         fmt_g6(r.bias_gap), r.pass ? "yes" : "NO"});
    return "theory comparison at tolerance " + fmt_g6(tolerance) + "\n" + render_table(table);
}

}  // namespace attrest
