#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "attrest/io.hpp"
#include "attrest/simulation.hpp"
#include "test_helpers.hpp"

using namespace attrest;

namespace {

GeneratorSpec small_gen(std::int64_t n, std::uint64_t seed) {
    GeneratorSpec g;
    g.population_size = n;
    g.p00 = 0.35;
    g.p01 = 0.15;
    g.p10 = 0.15;
    g.p11 = 0.35;
    g.intercept = 3.0;
    g.b1 = 1.0;
    g.b2 = 0.8;
    g.sigma = 0.6;
    g.seed = seed;
    return g;
}

}  // namespace

TEST_CASE("generator apportionment is deterministic, example population") {
    GeneratorSpec g;
    g.population_size = 4;
    g.p00 = g.p01 = g.p10 = g.p11 = 0.25;
    g.intercept = 0.0;
    g.b1 = 1.0;
    g.b2 = 2.0;
    g.sigma = 0.0;
    g.seed = 99;
    const FinitePopulation pop = generate_population(g);
    REQUIRE(pop.size() == 4);
    // cells in order (0,0),(0,1),(1,0),(1,1) give y = 0, 2, 1, 3
    CHECK(pop.units[0].y == 0.0);
    CHECK(pop.units[1].y == 2.0);
    CHECK(pop.units[2].y == 1.0);
    CHECK(pop.units[3].y == 3.0);
    const PopulationSummary s = summarize_population(pop);
    CHECK(s.p1 == 0.5);
    CHECK(s.p2 == 0.5);
}

TEST_CASE("generator determinism and degenerate cells") {
    const FinitePopulation a = generate_population(small_gen(100, 7));
    const FinitePopulation b = generate_population(small_gen(100, 7));
    REQUIRE(a.size() == b.size());
    for (std::int64_t i = 0; i < a.size(); ++i) {
        CHECK(a.units[i].y == b.units[i].y);
        CHECK(a.units[i].phi1 == b.units[i].phi1);
    }
    const FinitePopulation c = generate_population(small_gen(100, 8));
    bool differs = false;
    for (std::int64_t i = 0; i < a.size(); ++i)
        if (a.units[i].y != c.units[i].y) differs = true;
    CHECK(differs);

    GeneratorSpec g = small_gen(10, 1);
    g.p00 = g.p01 = g.p10 = 0.0;
    g.p11 = 1.0;  // all units in cell (1,1): downstream summaries degenerate
    const FinitePopulation d = generate_population(g);
    CHECK_THROWS_AS(summarize_population(d), Error);

    g.p11 = 0.9;  // does not sum to 1 with the zero cells
    g.p00 = 0.05;
    g.p01 = 0.02;
    g.p10 = 0.02;
    CHECK_RAISES(generate_population(g), errc::invalid_generator_spec, "sum to 1");
}

TEST_CASE("draw_srswor: size, range, determinism") {
    const SampleDraw a = draw_srswor(50, 12, 4242);
    REQUIRE(a.second_phase.size() == 12);
    CHECK(std::is_sorted(a.second_phase.begin(), a.second_phase.end()));
    const std::set<std::int32_t> uniq(a.second_phase.begin(), a.second_phase.end());
    CHECK(uniq.size() == 12);
    for (auto i : a.second_phase) {
        CHECK(i >= 0);
        CHECK(i < 50);
    }
    const SampleDraw b = draw_srswor(50, 12, 4242);
    CHECK(a.second_phase == b.second_phase);
    const SampleDraw full = draw_srswor(7, 7, 1);
    CHECK(full.second_phase == std::vector<std::int32_t>{0, 1, 2, 3, 4, 5, 6});
}

TEST_CASE("draw_two_phase nests the second phase inside the first") {
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const SampleDraw d = draw_two_phase(40, 15, 6, seed);
        REQUIRE(d.first_phase.size() == 15);
        REQUIRE(d.second_phase.size() == 6);
        const std::set<std::int32_t> first(d.first_phase.begin(), d.first_phase.end());
        CHECK(first.size() == 15);
        for (auto i : d.second_phase) CHECK(first.count(i) == 1);
    }
    const SampleDraw x = draw_two_phase(40, 15, 6, 777);
    const SampleDraw y = draw_two_phase(40, 15, 6, 777);
    CHECK(x.first_phase == y.first_phase);
    CHECK(x.second_phase == y.second_phase);
    CHECK_THROWS_AS(draw_two_phase(40, 15, 15, 1), Error);
}

TEST_CASE("draw_srswor is approximately uniform over units") {
    // each unit should appear with frequency n/N
    const std::int64_t N = 20, n = 5;
    const int reps = 20000;
    std::vector<int> hits(N, 0);
    for (int r = 0; r < reps; ++r) {
        const SampleDraw d = draw_srswor(N, n, mix_seed(909, static_cast<std::uint64_t>(r)));
        for (auto i : d.second_phase) ++hits[static_cast<std::size_t>(i)];
    }
    const double expect = static_cast<double>(reps) * n / N;
    for (auto h : hits) CHECK(std::abs(h - expect) < 5.0 * std::sqrt(expect));
}

TEST_CASE("exact enumeration reproduces the SRSWOR identities") {
    const FinitePopulation pop = generate_population(small_gen(9, 31));
    const PopulationSummary s = summarize_population(pop);
    for (std::int64_t n = 2; n < 9; ++n) {
        SamplingDesign design;
        design.population_size = 9;
        design.sample_size = n;
        const auto report = enumerate_exact(pop, design, {EstimatorSpec::mean()});
        const double f1 = 1.0 / n - 1.0 / 9.0;
        // E(ybar) = Ybar and Var(ybar) = f1 S_y^2, exactly
        CHECK(helpers::close_rel(report.rows[0].emp_mean, s.mean_y, 1e-12));
        CHECK(helpers::close_rel(report.rows[0].emp_mse, f1 * s.var_y, 1e-12));
        CHECK(report.rows[0].failures == 0);
    }
}

TEST_CASE("nested two-phase enumeration: unbiasedness of both phase proportions") {
    const FinitePopulation pop = generate_population(small_gen(6, 17));
    const PopulationSummary s = summarize_population(pop);
    SamplingDesign design;
    design.population_size = 6;
    design.sample_size = 2;
    design.first_phase_size = 4;

    // accumulate by hand over all C(6,4) * C(4,2) nested pairs
    double sum_p1p = 0.0, sum_p1 = 0.0, sum_ybar = 0.0;
    std::int64_t count = 0;
    for_each_combination(6, 4, [&](const std::vector<std::int32_t>& first) {
        double fp = 0.0;
        for (auto i : first) fp += pop.units[static_cast<std::size_t>(i)].phi1;
        fp /= 4.0;
        for_each_combination(4, 2, [&](const std::vector<std::int32_t>& pos) {
            double sp = 0.0, sy = 0.0;
            for (auto p : pos) {
                const Unit& u = pop.units[static_cast<std::size_t>(first[static_cast<std::size_t>(p)])];
                sp += u.phi1;
                sy += u.y;
            }
            sum_p1p += fp;
            sum_p1 += sp / 2.0;
            sum_ybar += sy / 2.0;
            ++count;
        });
    });
    CHECK(count == 15 * 6);
    CHECK(helpers::close_rel(sum_p1p / count, s.p1, 1e-12));
    CHECK(helpers::close_rel(sum_p1 / count, s.p1, 1e-12));
    CHECK(helpers::close_rel(sum_ybar / count, s.mean_y, 1e-12));

    // the library's enumeration agrees with the hand loop
    const auto report = enumerate_exact(pop, design, {EstimatorSpec::mean()});
    CHECK(report.replicates == count);
    CHECK(helpers::close_rel(report.rows[0].emp_mean, s.mean_y, 1e-12));
}

TEST_CASE("enumeration cap raises enumeration_too_large") {
    const FinitePopulation pop = generate_population(small_gen(40, 5));
    SamplingDesign design;
    design.population_size = 40;
    design.sample_size = 20;
    CHECK_RAISES(enumerate_exact(pop, design, {EstimatorSpec::mean()}, 1000),
                 errc::enumeration_too_large, "cap");
}

TEST_CASE("monte carlo determinism across thread counts") {
    const FinitePopulation pop = generate_population(small_gen(400, 11));
    ReplicationPlan plan;
    plan.replicates = 9000;  // not a multiple of the chunk size
    plan.design.population_size = 400;
    plan.design.sample_size = 40;
    plan.design.first_phase_size = 120;
    plan.specs = {EstimatorSpec::mean(), EstimatorSpec::named(Family::ratio1),
                  EstimatorSpec::d_power_family(1, 1),
                  EstimatorSpec::d_composite_auto(1, 1, 1, 1)};
    plan.seed = 5150;

    plan.threads = 1;
    const SimulationReport one = run_monte_carlo(pop, plan);
    plan.threads = 4;
    const SimulationReport four = run_monte_carlo(pop, plan);

    REQUIRE(one.rows.size() == four.rows.size());
    for (std::size_t i = 0; i < one.rows.size(); ++i) {
        // bit-identical, not merely close
        CHECK(one.rows[i].emp_mean == four.rows[i].emp_mean);
        CHECK(one.rows[i].emp_mse == four.rows[i].emp_mse);
        CHECK(one.rows[i].failures == four.rows[i].failures);
    }
    CHECK(simulation_to_csv(one) == simulation_to_csv(four));
}

TEST_CASE("monte carlo matches exact enumeration on a small population") {
    const FinitePopulation pop = generate_population(small_gen(11, 23));
    SamplingDesign design;
    design.population_size = 11;
    design.sample_size = 4;
    const std::vector<EstimatorSpec> specs = {
        EstimatorSpec::mean(), EstimatorSpec::named(Family::ratio1),
        EstimatorSpec::named(Family::exp_ratio1), EstimatorSpec::composite_auto(1, 1, 1, 1)};

    const SimulationReport exact = enumerate_exact(pop, design, specs);

    ReplicationPlan plan;
    plan.replicates = 200000;
    plan.design = design;
    plan.specs = specs;
    plan.seed = 60601;
    const SimulationReport mc = run_monte_carlo(pop, plan);

    for (const SimRow& row : mc.rows)
        CHECK(row.emp_mse >= row.emp_bias * row.emp_bias - 1e-15);
    for (const SimRow& row : exact.rows)
        CHECK(row.emp_mse >= row.emp_bias * row.emp_bias - 1e-15);

    for (std::size_t i = 0; i < specs.size(); ++i) {
        CHECK_MESSAGE(helpers::close_rel(mc.rows[i].emp_mse, exact.rows[i].emp_mse, 0.02),
                      exact.rows[i].estimator, ": mc=", mc.rows[i].emp_mse,
                      " exact=", exact.rows[i].emp_mse);
        // failure rates agree in expectation: exact gives the true proportion
        const double exact_rate = static_cast<double>(exact.rows[i].failures) /
                                  static_cast<double>(exact.replicates);
        const double mc_rate = static_cast<double>(mc.rows[i].failures) /
                               static_cast<double>(mc.replicates);
        CHECK(std::abs(mc_rate - exact_rate) < 0.01);
    }
}

TEST_CASE("monte carlo on a single replicate is the squared error of one draw") {
    const FinitePopulation pop = generate_population(small_gen(50, 3));
    const PopulationSummary s = summarize_population(pop);
    ReplicationPlan plan;
    plan.replicates = 1;
    plan.design.population_size = 50;
    plan.design.sample_size = 10;
    plan.specs = {EstimatorSpec::mean()};
    plan.seed = 12;
    const SimulationReport r = run_monte_carlo(pop, plan);

    const SampleDraw d = draw_srswor(50, 10, mix_seed(12, 0));
    double ybar = 0.0;
    for (auto i : d.second_phase) ybar += pop.units[static_cast<std::size_t>(i)].y;
    ybar /= 10.0;
    CHECK(helpers::close_rel(r.rows[0].emp_mse, (ybar - s.mean_y) * (ybar - s.mean_y), 1e-12));
}

TEST_CASE("sample-mean variance identity via monte carlo") {
    GeneratorSpec g = small_gen(200, 77);
    const FinitePopulation pop = generate_population(g);
    const PopulationSummary s = summarize_population(pop);
    ReplicationPlan plan;
    plan.replicates = 100000;
    plan.design.population_size = 200;
    plan.design.sample_size = 20;
    plan.specs = {EstimatorSpec::mean()};
    plan.seed = 8080;
    const SimulationReport r = run_monte_carlo(pop, plan);
    const double f1 = 1.0 / 20.0 - 1.0 / 200.0;
    CHECK(helpers::close_rel(r.rows[0].emp_mse, f1 * s.var_y, 0.03));
    CHECK(helpers::close_rel(r.rows[0].theory_mse, f1 * s.var_y, 1e-12));
}

TEST_CASE("first-order gap shrinks from n=50 to n=400 for the ratio estimator") {
    GeneratorSpec g = small_gen(10000, 2024);
    g.intercept = 0.6;  // strong relative variation so curvature matters at n=50
    g.sigma = 1.0;
    const FinitePopulation pop = generate_population(g);

    auto gap_at = [&](std::int64_t n, std::uint64_t seed) {
        ReplicationPlan plan;
        plan.replicates = 20000;
        plan.design.population_size = 10000;
        plan.design.sample_size = n;
        plan.specs = {EstimatorSpec::named(Family::ratio1)};
        plan.seed = seed;
        const SimulationReport r = run_monte_carlo(pop, plan);
        return std::abs(r.rows[0].rel_gap);
    };

    double small_n = 0.0, large_n = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        small_n += gap_at(50, seed);
        large_n += gap_at(400, seed);
    }
    CHECK(large_n / 5.0 <= small_n / 5.0);
}

TEST_CASE("undefined replicates are excluded and counted") {
    // tiny attribute-1 count makes p1 = 0 likely at n = 3
    FinitePopulation pop;
    for (int i = 0; i < 12; ++i) {
        Unit u;
        u.phi1 = (i == 0) ? 1 : 0;
        u.phi2 = (i % 2 == 0) ? 1 : 0;
        u.y = 1.0 + i * 0.3 + ((i * 7) % 5) * 0.1;
        pop.units.push_back(u);
    }
    SamplingDesign design;
    design.population_size = 12;
    design.sample_size = 3;
    const auto exact = enumerate_exact(pop, design,
                                       {EstimatorSpec::mean(),
                                        EstimatorSpec::named(Family::ratio1)});
    CHECK(exact.rows[0].failures == 0);
    // samples that miss the single phi1 unit: C(11,3) of C(12,3)
    CHECK(exact.rows[1].failures == 165);
    CHECK(exact.replicates == 220);
    CHECK(exact.rows[1].replicates == 220);

    ReplicationPlan plan;
    plan.replicates = 2000;
    plan.design = design;
    plan.specs = {EstimatorSpec::named(Family::ratio1)};
    plan.seed = 4;
    const auto mc = run_monte_carlo(pop, plan);
    CHECK(mc.rows[0].failures > 0);
    CHECK(mc.rows[0].failures < 2000);
}

TEST_CASE("all replicates failing raises all_replicates_failed") {
    // One rare phi1 unit; a single replicate whose draw misses it leaves the
    // ratio estimator undefined on every (i.e. the only) replicate.
    FinitePopulation pop;
    for (int i = 0; i < 12; ++i) {
        Unit u;
        u.phi1 = (i == 0) ? 1 : 0;
        u.phi2 = (i % 2 == 0) ? 1 : 0;
        u.y = 1.0 + 0.25 * i;
        pop.units.push_back(u);
    }
    std::uint64_t missing_seed = 0;
    for (std::uint64_t seed = 1; seed < 200; ++seed) {
        const SampleDraw d = draw_srswor(12, 3, mix_seed(seed, 0));
        if (std::find(d.second_phase.begin(), d.second_phase.end(), 0) ==
            d.second_phase.end()) {
            missing_seed = seed;
            break;
        }
    }
    REQUIRE(missing_seed != 0);

    ReplicationPlan plan;
    plan.replicates = 1;
    plan.design.population_size = 12;
    plan.design.sample_size = 3;
    plan.specs = {EstimatorSpec::named(Family::ratio1)};
    plan.seed = missing_seed;
    CHECK_RAISES(run_monte_carlo(pop, plan), errc::all_replicates_failed, "undefined");
}

TEST_CASE("compare_theory_empirical pairs rows and applies the tolerance") {
    const FinitePopulation pop = generate_population(small_gen(300, 9));
    const PopulationSummary s = summarize_population(pop);
    SamplingDesign design;
    design.population_size = 300;
    design.sample_size = 30;
    const Coefficients c = derived_coefficients(s, design);

    ReplicationPlan plan;
    plan.replicates = 30000;
    plan.design = design;
    plan.specs = {EstimatorSpec::mean(), EstimatorSpec::named(Family::exp_ratio1)};
    plan.seed = 777;
    const SimulationReport sim = run_monte_carlo(pop, plan);
    const TheoryReport theory = theory_table(c, s.mean_y, plan.specs);

    // exp-ratio carries a visible second-order truncation gap at n = 30, so
    // the pass check uses a tolerance the first-order theory can meet
    const auto rows = compare_theory_empirical(sim, theory, 0.30);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) CHECK(r.pass);

    // the sample-mean row of an exact report has zero gap against theory
    SamplingDesign tiny;
    tiny.population_size = 300;
    tiny.sample_size = 298;
    const auto exact_mean =
        enumerate_exact(pop, tiny, {EstimatorSpec::mean()}, 5'000'000);
    const auto zero = compare_theory_empirical(
        exact_mean, theory_table(derived_coefficients(s, tiny), s.mean_y,
                                 {EstimatorSpec::mean()}),
        1e-9);
    CHECK(zero[0].pass);
    CHECK(std::abs(zero[0].mse_gap) < 1e-12);

    const auto strict = compare_theory_empirical(sim, theory, 1e-9);
    CHECK_FALSE(strict[1].pass);  // exp-ratio never matches theory to 1e-9

    const TheoryReport other = theory_table(c, s.mean_y, {EstimatorSpec::mean()});
    CHECK_THROWS_AS(compare_theory_empirical(sim, other, 0.1), Error);
}
