// attrest: attribute-assisted finite-population mean estimation toolkit.
//
// Subcommands:
//   summarize  print population summary and derived coefficients
//   table      first-order bias / MSE / PRE table for a set of estimators
//   simulate   Monte Carlo (or exact enumeration) vs first-order theory
//   ledger     print the corrections ledger
//
// Exit codes: 0 success, 1 usage/parse/I-O, 2 validation/domain, 3 resource cap.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "attrest/io.hpp"
#include "attrest/ledger.hpp"
#include "attrest/simulation.hpp"
#include "attrest/theory.hpp"

namespace {

using namespace attrest;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case errc::parse_error:
        case errc::io_error:
            return 1;
        case errc::enumeration_too_large:
            return 3;
        default:
            return 2;
    }
}

struct CommonArgs {
    std::string input_csv;
    std::string summary_path;
    std::optional<std::int64_t> n;
    std::optional<std::int64_t> n_prime;
    std::string specs_arg;
    std::string format = "text";
    bool as_tabulated = false;
};

struct LoadedInput {
    PopulationSummary summary;
    std::optional<FinitePopulation> population;
    std::optional<std::int64_t> default_n;
    std::optional<std::int64_t> default_n_prime;
};

LoadedInput load_input(const CommonArgs& args) {
    if (args.input_csv.empty() == args.summary_path.empty())
        raise(errc::parse_error, "exactly one of --input / --summary is required");
    LoadedInput in;
    if (!args.input_csv.empty()) {
        FinitePopulation pop = read_population_csv(args.input_csv);
        const auto violations = validate_population(pop);
        if (!violations.empty()) {
            std::string msg = "population file '" + args.input_csv + "' is invalid:";
            for (const auto& v : violations) msg += "\n  " + v;
            raise(errc::degenerate_population, msg);
        }
        in.summary = summarize_population(pop);
        in.population = std::move(pop);
    } else {
        SummaryFile file = read_summary_file(args.summary_path);
        in.summary = file.summary;
        in.default_n = file.default_n;
        in.default_n_prime = file.default_n_prime;
    }
    return in;
}

SamplingDesign make_design(const LoadedInput& in, const CommonArgs& args) {
    SamplingDesign d;
    d.population_size = in.summary.n_units;
    if (args.n)
        d.sample_size = *args.n;
    else if (in.default_n)
        d.sample_size = *in.default_n;
    else
        raise(errc::invalid_design, "no sample size: pass --n or add 'n' to the summary file");
    if (args.n_prime)
        d.first_phase_size = *args.n_prime;
    else if (in.default_n_prime)
        d.first_phase_size = *in.default_n_prime;
    d.validate();
    return d;
}

std::vector<EstimatorSpec> load_specs(const std::string& arg) {
    if (arg.empty()) return {};
    if (std::filesystem::exists(arg)) {
        std::ifstream file(arg);
        if (!file) raise(errc::io_error, "cannot open spec file '" + arg + "'");
        std::string text;
        std::string line;
        while (std::getline(file, line)) {
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            text += line;
            text += "\n";
        }
        return parse_spec_list(text);
    }
    return parse_spec_list(arg);
}

int cmd_summarize(const CommonArgs& args) {
    const LoadedInput in = load_input(args);
    std::cout << summary_to_text(in.summary);
    const bool have_n = args.n || in.default_n;
    if (have_n) {
        const SamplingDesign design = make_design(in, args);
        const Coefficients coeffs = derived_coefficients(in.summary, design);
        std::cout << coefficients_to_text(coeffs, design);
    }
    return 0;
}

int cmd_table(const CommonArgs& args) {
    const LoadedInput in = load_input(args);
    const SamplingDesign design = make_design(in, args);
    const Coefficients coeffs = derived_coefficients(in.summary, design);
    const std::vector<EstimatorSpec> specs = load_specs(args.specs_arg);

    TheoryOptions opt;
    opt.as_tabulated = args.as_tabulated;
    opt.dataset_tag = in.summary.tag;
    const TheoryReport report = theory_table(coeffs, in.summary.mean_y, specs, opt);
    std::cout << (args.format == "csv" ? theory_to_csv(report) : theory_to_text(report));
    return 0;
}

struct SimulateArgs {
    CommonArgs common;
    std::int64_t replicates = 10000;
    std::uint64_t seed = 1;
    bool exact = false;
    std::int64_t cap = 2'000'000;
    double tolerance = 0.0;
    int threads = 0;
    std::string generator;
    std::string export_population;
};

GeneratorSpec parse_generator(const std::string& text, std::uint64_t seed) {
    GeneratorSpec g;
    g.seed = seed;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string token = text.substr(pos, end - pos);
        pos = end + 1;
        if (token.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const std::size_t eq = token.find('=');
        if (eq == std::string::npos)
            raise(errc::parse_error, "bad generator token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        auto num = [&]() -> double {
            double v = 0.0;
            std::size_t used = 0;
            try {
                v = std::stod(value, &used);
            } catch (...) {
                raise(errc::parse_error, "bad generator value '" + token + "'");
            }
            if (used != value.size())
                raise(errc::parse_error, "bad generator value '" + token + "'");
            return v;
        };
        if (key == "N") g.population_size = static_cast<std::int64_t>(num());
        else if (key == "p00") g.p00 = num();
        else if (key == "p01") g.p01 = num();
        else if (key == "p10") g.p10 = num();
        else if (key == "p11") g.p11 = num();
        else if (key == "a") g.intercept = num();
        else if (key == "b1") g.b1 = num();
        else if (key == "b2") g.b2 = num();
        else if (key == "sigma") g.sigma = num();
        else if (key == "noise") {
            if (value == "normal") g.noise = NoiseShape::normal;
            else if (value == "uniform") g.noise = NoiseShape::uniform;
            else raise(errc::parse_error, "bad generator value '" + token + "'");
        } else {
            raise(errc::parse_error, "bad generator token '" + token + "': unknown key");
        }
        if (end == text.size()) break;
    }
    return g;
}

int cmd_simulate(const SimulateArgs& args) {
    FinitePopulation pop;
    if (!args.generator.empty()) {
        if (!args.common.input_csv.empty() || !args.common.summary_path.empty())
            raise(errc::parse_error, "--gen excludes --input/--summary");
        pop = generate_population(parse_generator(args.generator, args.seed));
    } else {
        if (!args.common.summary_path.empty())
            raise(errc::degenerate_population,
                  "raw population required: a summary file cannot drive simulation");
        if (args.common.input_csv.empty())
            raise(errc::parse_error, "simulate needs --input <csv> or --gen <spec>");
        pop = read_population_csv(args.common.input_csv);
        const auto violations = validate_population(pop);
        if (!violations.empty()) {
            std::string msg = "population file '" + args.common.input_csv + "' is invalid:";
            for (const auto& v : violations) msg += "\n  " + v;
            raise(errc::degenerate_population, msg);
        }
    }

    if (!args.export_population.empty()) {
        std::ofstream out(args.export_population);
        if (!out)
            raise(errc::io_error,
                  "cannot write population CSV '" + args.export_population + "'");
        write_population_csv(out, pop);
    }

    LoadedInput in;
    in.summary = summarize_population(pop);
    const SamplingDesign design = make_design(in, args.common);
    const std::vector<EstimatorSpec> specs = load_specs(args.common.specs_arg);

    SimulationReport report;
    if (args.exact) {
        report = enumerate_exact(pop, design, specs, args.cap);
    } else {
        ReplicationPlan plan;
        plan.replicates = args.replicates;
        plan.design = design;
        plan.specs = specs;
        plan.seed = args.seed;
        plan.threads = args.threads;
        report = run_monte_carlo(pop, plan);
    }
    std::cout << (args.common.format == "csv" ? simulation_to_csv(report)
                                              : simulation_to_text(report));

    if (args.tolerance > 0.0 && args.common.format != "csv") {
        const Coefficients coeffs = derived_coefficients(in.summary, design);
        TheoryReport theory;
        {
            std::vector<EstimatorSpec> resolved;
            for (const auto& s : specs) resolved.push_back(resolve_auto_weights(s, coeffs));
            theory = theory_table(coeffs, in.summary.mean_y, resolved);
        }
        const auto rows = compare_theory_empirical(report, theory, args.tolerance);
        std::cout << comparison_to_text(rows, args.tolerance);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attribute-assisted finite-population mean estimation toolkit"};
    app.require_subcommand(1);

    CommonArgs common;
    SimulateArgs sim;
    std::string ledger_format = "text";

    auto add_common = [&](CLI::App* cmd, bool with_specs) {
        cmd->add_option("--input", common.input_csv, "population CSV (y,phi1,phi2)");
        cmd->add_option("--summary", common.summary_path, "summary key-value file");
        cmd->add_option("--n", common.n, "sample size n");
        cmd->add_option("--nprime", common.n_prime, "first-phase size n' (two-phase)");
        cmd->add_option("--format", common.format, "output format: text | csv")
            ->check(CLI::IsMember({"text", "csv"}));
        if (with_specs)
            cmd->add_option("--specs", common.specs_arg,
                            "estimator list (grammar string or file)");
    };

    CLI::App* c_sum = app.add_subcommand("summarize", "population summary and coefficients");
    add_common(c_sum, false);

    CLI::App* c_tab = app.add_subcommand("table", "first-order bias/MSE/PRE table");
    add_common(c_tab, true);
    c_tab->add_flag("--as-tabulated", common.as_tabulated,
                    "d-expproduct2 rows use the published f3 variant");

    CLI::App* c_sim = app.add_subcommand("simulate", "Monte Carlo or exact enumeration");
    add_common(c_sim, true);
    c_sim->add_option("--replicates", sim.replicates, "Monte Carlo replicate count");
    c_sim->add_option("--seed", sim.seed, "master seed");
    c_sim->add_flag("--exact", sim.exact, "exhaustive enumeration instead of Monte Carlo");
    c_sim->add_option("--cap", sim.cap, "max sample combinations for --exact");
    c_sim->add_option("--tolerance", sim.tolerance,
                      "append a theory-comparison table at this relative MSE tolerance");
    c_sim->add_option("--threads", sim.threads, "worker threads (0 = auto)");
    c_sim->add_option("--gen", sim.generator,
                      "synthesize population: N=..,p00=..,p01=..,p10=..,p11=..,a=..,"
                      "b1=..,b2=..,sigma=..,noise=normal|uniform");
    c_sim->add_option("--export-population", sim.export_population,
                      "write the population to this CSV for reuse");

    CLI::App* c_led = app.add_subcommand("ledger", "print the corrections ledger");
    c_led->add_option("--format", ledger_format, "output format: text | csv")
        ->check(CLI::IsMember({"text", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        if (c_sum->parsed()) return cmd_summarize(common);
        if (c_tab->parsed()) return cmd_table(common);
        if (c_sim->parsed()) {
            sim.common = common;
            return cmd_simulate(sim);
        }
        if (c_led->parsed()) {
            std::cout << (ledger_format == "csv" ? ledger_csv() : ledger_text());
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
