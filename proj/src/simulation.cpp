#include "attrest/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "attrest/rng.hpp"

namespace attrest {

void GeneratorSpec::validate() const {
    if (population_size < 2)
        raise(errc::invalid_generator_spec,
              "population size must be at least 2, got " + std::to_string(population_size));
    const double cells[4] = {p00, p01, p10, p11};
    double sum = 0.0;
    for (double p : cells) {
        if (p < 0.0)
            raise(errc::invalid_generator_spec, "cell probabilities must be nonnegative");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        raise(errc::invalid_generator_spec,
              "cell probabilities must sum to 1, got " + std::to_string(sum));
    if (sigma < 0.0)
        raise(errc::invalid_generator_spec, "noise scale must be nonnegative");
}

FinitePopulation generate_population(const GeneratorSpec& g) {
    g.validate();

    // Largest-remainder apportionment of N over the four cells, in the fixed
    // order (0,0),(0,1),(1,0),(1,1); ties broken by cell order. The joint
    // attribute distribution is therefore deterministic given the spec.
    const double targets[4] = {g.p00, g.p01, g.p10, g.p11};
    std::int64_t counts[4];
    double remainders[4];
    std::int64_t assigned = 0;
    for (int i = 0; i < 4; ++i) {
        const double exact = targets[i] * static_cast<double>(g.population_size);
        counts[i] = static_cast<std::int64_t>(std::floor(exact));
        remainders[i] = exact - std::floor(exact);
        assigned += counts[i];
    }
    int order[4] = {0, 1, 2, 3};
    std::stable_sort(order, order + 4,
                     [&](int a, int b) { return remainders[a] > remainders[b]; });
    for (int i = 0; assigned < g.population_size; ++i)
        ++counts[order[i % 4]], ++assigned;

    FinitePopulation pop;
    pop.units.reserve(static_cast<std::size_t>(g.population_size));
    SplitMix64 rng(g.seed);
    static constexpr int phis[4][2] = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    constexpr double sqrt3 = 1.7320508075688772935;
    for (int cell = 0; cell < 4; ++cell) {
        for (std::int64_t i = 0; i < counts[cell]; ++i) {
            Unit u;
            u.phi1 = phis[cell][0];
            u.phi2 = phis[cell][1];
            double noise = 0.0;
            if (g.sigma > 0.0)
                noise = (g.noise == NoiseShape::normal)
                            ? gaussian(rng)
                            : (2.0 * rng.next_unit() - 1.0) * sqrt3;
            u.y = g.intercept + g.b1 * u.phi1 + g.b2 * u.phi2 + g.sigma * noise;
            pop.units.push_back(u);
        }
    }
    return pop;
}

namespace {

// Floyd's subset sampling: n distinct indices from [0, N) with O(n) work.
// `stamp` is a generation-tagged membership array so no clearing is needed.
void floyd_sample(std::int64_t population_size, std::int64_t n, SplitMix64& rng,
                  std::vector<std::uint32_t>& stamp, std::uint32_t gen,
                  std::vector<std::int32_t>& out) {
    out.clear();
    for (std::int64_t j = population_size - n; j < population_size; ++j) {
        const auto t = static_cast<std::int64_t>(bounded(rng, static_cast<std::uint64_t>(j + 1)));
        if (stamp[static_cast<std::size_t>(t)] == gen) {
            stamp[static_cast<std::size_t>(j)] = gen;
            out.push_back(static_cast<std::int32_t>(j));
        } else {
            stamp[static_cast<std::size_t>(t)] = gen;
            out.push_back(static_cast<std::int32_t>(t));
        }
    }
    std::sort(out.begin(), out.end());
}

struct DrawScratch {
    std::vector<std::uint32_t> stamp;
    std::uint32_t gen = 0;
    std::vector<std::int32_t> first;
    std::vector<std::int32_t> positions;

    explicit DrawScratch(std::int64_t population_size)
        : stamp(static_cast<std::size_t>(population_size), 0) {}

    std::uint32_t next_gen() {
        if (++gen == 0) {  // wrapped: reset tags once
            std::fill(stamp.begin(), stamp.end(), 0);
            gen = 1;
        }
        return gen;
    }
};

void draw_design(const SamplingDesign& design, std::uint64_t seed, DrawScratch& scratch,
                 SampleDraw& out) {
    SplitMix64 rng(seed);
    if (!design.two_phase()) {
        out.first_phase.clear();
        floyd_sample(design.population_size, design.sample_size, rng, scratch.stamp,
                     scratch.next_gen(), out.second_phase);
        return;
    }
    const std::int64_t np = *design.first_phase_size;
    floyd_sample(design.population_size, np, rng, scratch.stamp, scratch.next_gen(),
                 out.first_phase);
    // Second phase: uniform n-subset of the first-phase positions.
    floyd_sample(np, design.sample_size, rng, scratch.stamp, scratch.next_gen(),
                 scratch.positions);
    out.second_phase.clear();
    for (std::int32_t pos : scratch.positions)
        out.second_phase.push_back(out.first_phase[static_cast<std::size_t>(pos)]);
}

struct SampleStats {
    double mean_y = 0.0;
    double p1 = 0.0, p2 = 0.0;        // second phase
    double p1p = 0.0, p2p = 0.0;      // first phase (two-phase only)
};

SampleStats compute_stats(const FinitePopulation& pop, const SampleDraw& draw) {
    SampleStats s;
    double sum_y = 0.0;
    std::int64_t c1 = 0, c2 = 0;
    for (std::int32_t i : draw.second_phase) {
        const Unit& u = pop.units[static_cast<std::size_t>(i)];
        sum_y += u.y;
        c1 += u.phi1;
        c2 += u.phi2;
    }
    const double n = static_cast<double>(draw.second_phase.size());
    s.mean_y = sum_y / n;
    s.p1 = static_cast<double>(c1) / n;
    s.p2 = static_cast<double>(c2) / n;
    if (!draw.first_phase.empty()) {
        std::int64_t f1 = 0, f2 = 0;
        for (std::int32_t i : draw.first_phase) {
            const Unit& u = pop.units[static_cast<std::size_t>(i)];
            f1 += u.phi1;
            f2 += u.phi2;
        }
        const double np = static_cast<double>(draw.first_phase.size());
        s.p1p = static_cast<double>(f1) / np;
        s.p2p = static_cast<double>(f2) / np;
    }
    return s;
}

struct Accumulator {
    std::int64_t used = 0;
    std::int64_t failures = 0;
    double sum_value = 0.0;
    double sum_sq_err = 0.0;

    void add(const Accumulator& other) {
        used += other.used;
        failures += other.failures;
        sum_value += other.sum_value;
        sum_sq_err += other.sum_sq_err;
    }
};

// Evaluates every spec on one sample, accumulating value and squared error
// around the realised mean; undefined estimators count as failures.
void accumulate_sample(const std::vector<EstimatorSpec>& specs, const SampleStats& s,
                       const KnownTruth& truth, double true_mean,
                       std::vector<Accumulator>& acc) {
    SampleData sd{s.mean_y, s.p1, s.p2};
    TwoPhaseSampleData td{s.mean_y, s.p1, s.p1p, s.p2p};
    for (std::size_t k = 0; k < specs.size(); ++k) {
        double value = 0.0;
        try {
            value = specs[k].two_phase() ? two_phase_estimate(specs[k], td, truth)
                                         : point_estimate(specs[k], sd, truth);
        } catch (const Error& e) {
            if (e.code() == errc::division_by_zero) {
                ++acc[k].failures;
                continue;
            }
            throw;
        }
        ++acc[k].used;
        acc[k].sum_value += value;
        const double err = value - true_mean;
        acc[k].sum_sq_err += err * err;
    }
}

std::vector<EstimatorSpec> resolve_specs(const std::vector<EstimatorSpec>& specs,
                                         const Coefficients& c) {
    std::vector<EstimatorSpec> out;
    out.reserve(specs.size());
    for (const EstimatorSpec& s : specs) out.push_back(resolve_auto_weights(s, c));
    return out;
}

SimulationReport make_report(const std::vector<EstimatorSpec>& specs,
                             const std::vector<Accumulator>& acc, const Coefficients& c,
                             double true_mean, std::int64_t replicates, bool exact) {
    SimulationReport report;
    report.replicates = replicates;
    report.exact = exact;
    for (std::size_t k = 0; k < specs.size(); ++k) {
        if (acc[k].used == 0)
            raise(errc::all_replicates_failed,
                  "estimator " + format_spec(specs[k]) + " was undefined on every sample");
        SimRow row;
        row.spec = specs[k];
        row.estimator = spec_label(specs[k]);
        row.params = spec_params(specs[k]);
        row.replicates = acc[k].used + acc[k].failures;
        row.failures = acc[k].failures;
        const double used = static_cast<double>(acc[k].used);
        row.emp_mean = acc[k].sum_value / used;
        row.emp_bias = row.emp_mean - true_mean;
        row.emp_mse = acc[k].sum_sq_err / used;
        row.theory_bias = first_order_bias(specs[k], c, true_mean);
        row.theory_mse = first_order_mse(specs[k], c, true_mean);
        row.rel_gap = (row.emp_mse - row.theory_mse) / row.theory_mse;
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace

SampleDraw draw_srswor(std::int64_t population_size, std::int64_t n, std::uint64_t seed) {
    if (n < 1 || n > population_size)
        raise(errc::invalid_design, "need 1 <= n <= N for a sample draw");
    SampleDraw out;
    DrawScratch scratch(population_size);
    SplitMix64 rng(seed);
    floyd_sample(population_size, n, rng, scratch.stamp, scratch.next_gen(),
                 out.second_phase);
    return out;
}

SampleDraw draw_two_phase(std::int64_t population_size, std::int64_t n_prime, std::int64_t n,
                          std::uint64_t seed) {
    if (n < 1 || n >= n_prime || n_prime > population_size)
        raise(errc::invalid_design, "need 1 <= n < n' <= N for a two-phase draw");
    SamplingDesign design;
    design.population_size = population_size;
    design.sample_size = n;
    design.first_phase_size = n_prime;
    SampleDraw out;
    DrawScratch scratch(population_size);
    draw_design(design, seed, scratch, out);
    return out;
}

SimulationReport run_monte_carlo(const FinitePopulation& pop, const ReplicationPlan& plan) {
    if (plan.replicates < 1)
        raise(errc::invalid_design, "replicate count must be at least 1");
    plan.design.validate();
    if (plan.design.population_size != pop.size())
        raise(errc::invalid_design, "design N does not match the population");

    const PopulationSummary summary = summarize_population(pop);
    const Coefficients coeffs = derived_coefficients(summary, plan.design);
    const std::vector<EstimatorSpec> specs = resolve_specs(plan.specs, coeffs);
    const KnownTruth truth{summary.p1, summary.p2};
    const bool two_phase = plan.design.two_phase();

    for (const EstimatorSpec& s : specs)
        if (s.two_phase() && !two_phase)
            raise(errc::missing_two_phase_factors,
                  "two-phase estimator " + format_spec(s) +
                      " requires a design with a first-phase size");

    // Fixed-size chunks are claimed by worker threads but reduced in chunk
    // order, so the accumulated sums are identical for any thread count.
    constexpr std::int64_t chunk_size = 4096;
    const std::int64_t n_chunks = (plan.replicates + chunk_size - 1) / chunk_size;
    std::vector<std::vector<Accumulator>> chunk_acc(
        static_cast<std::size_t>(n_chunks), std::vector<Accumulator>(specs.size()));

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned n_threads =
        plan.threads > 0 ? static_cast<unsigned>(plan.threads)
                         : std::min<unsigned>(hw, static_cast<unsigned>(n_chunks));

    std::atomic<std::int64_t> next_chunk{0};
    auto worker = [&] {
        DrawScratch scratch(plan.design.population_size);
        SampleDraw draw;
        while (true) {
            const std::int64_t chunk = next_chunk.fetch_add(1);
            if (chunk >= n_chunks) break;
            auto& acc = chunk_acc[static_cast<std::size_t>(chunk)];
            const std::int64_t begin = chunk * chunk_size;
            const std::int64_t end = std::min(begin + chunk_size, plan.replicates);
            for (std::int64_t r = begin; r < end; ++r) {
                draw_design(plan.design, mix_seed(plan.seed, static_cast<std::uint64_t>(r)),
                            scratch, draw);
                const SampleStats stats = compute_stats(pop, draw);
                accumulate_sample(specs, stats, truth, summary.mean_y, acc);
            }
        }
    };

    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::vector<Accumulator> total(specs.size());
    for (const auto& acc : chunk_acc)
        for (std::size_t k = 0; k < specs.size(); ++k) total[k].add(acc[k]);

    return make_report(specs, total, coeffs, summary.mean_y, plan.replicates, false);
}

std::int64_t binomial_capped(std::int64_t n, std::int64_t k, std::int64_t cap) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    std::int64_t result = 1;
    for (std::int64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i is always integral at this point
        const double estimate = static_cast<double>(result) *
                                static_cast<double>(n - k + i) / static_cast<double>(i);
        if (estimate > static_cast<double>(cap) * 1.5) return cap + 1;
        result = result * (n - k + i) / i;
        if (result > cap) return cap + 1;
    }
    return result;
}

void for_each_combination(std::int64_t population_size, std::int64_t n,
                          const std::function<void(const std::vector<std::int32_t>&)>& visit) {
    std::vector<std::int32_t> idx(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(i);
    while (true) {
        visit(idx);
        // advance to the next lexicographic combination
        std::int64_t i = n - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] ==
                             static_cast<std::int32_t>(population_size - n + i))
            --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (std::int64_t j = i + 1; j < n; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

SimulationReport enumerate_exact(const FinitePopulation& pop, const SamplingDesign& design,
                                 const std::vector<EstimatorSpec>& specs, std::int64_t cap) {
    design.validate();
    if (design.population_size != pop.size())
        raise(errc::invalid_design, "design N does not match the population");

    const std::int64_t N = design.population_size;
    const std::int64_t n = design.sample_size;
    std::int64_t combos;
    if (design.two_phase()) {
        const std::int64_t np = *design.first_phase_size;
        const std::int64_t outer = binomial_capped(N, np, cap);
        const std::int64_t inner = binomial_capped(np, n, cap);
        combos = (outer > cap || inner > cap || outer > cap / std::max<std::int64_t>(inner, 1))
                     ? cap + 1
                     : outer * inner;
    } else {
        combos = binomial_capped(N, n, cap);
    }
    if (combos > cap)
        raise(errc::enumeration_too_large,
              "sample space exceeds the enumeration cap of " + std::to_string(cap) +
                  " combinations; use Monte Carlo instead");

    const PopulationSummary summary = summarize_population(pop);
    const Coefficients coeffs = derived_coefficients(summary, design);
    const std::vector<EstimatorSpec> resolved = resolve_specs(specs, coeffs);
    const KnownTruth truth{summary.p1, summary.p2};

    for (const EstimatorSpec& s : resolved)
        if (s.two_phase() && !design.two_phase())
            raise(errc::missing_two_phase_factors,
                  "two-phase estimator " + format_spec(s) +
                      " requires a design with a first-phase size");

    std::vector<Accumulator> acc(resolved.size());
    std::int64_t visited = 0;

    if (!design.two_phase()) {
        for_each_combination(N, n, [&](const std::vector<std::int32_t>& idx) {
            SampleDraw draw;
            draw.second_phase = idx;
            const SampleStats stats = compute_stats(pop, draw);
            accumulate_sample(resolved, stats, truth, summary.mean_y, acc);
            ++visited;
        });
    } else {
        const std::int64_t np = *design.first_phase_size;
        for_each_combination(N, np, [&](const std::vector<std::int32_t>& first) {
            for_each_combination(np, n, [&](const std::vector<std::int32_t>& pos) {
                SampleDraw draw;
                draw.first_phase = first;
                draw.second_phase.reserve(static_cast<std::size_t>(n));
                for (std::int32_t p : pos)
                    draw.second_phase.push_back(first[static_cast<std::size_t>(p)]);
                const SampleStats stats = compute_stats(pop, draw);
                accumulate_sample(resolved, stats, truth, summary.mean_y, acc);
                ++visited;
            });
        });
    }

    return make_report(resolved, acc, coeffs, summary.mean_y, visited, true);
}

std::vector<ComparisonRow> compare_theory_empirical(const SimulationReport& sim,
                                                    const TheoryReport& theory,
                                                    double tolerance) {
    if (sim.rows.size() != theory.rows.size())
        raise(errc::mismatched_specs, "simulation and theory reports differ in size");
    std::vector<ComparisonRow> out;
    out.reserve(sim.rows.size());
    for (std::size_t i = 0; i < sim.rows.size(); ++i) {
        const SimRow& s = sim.rows[i];
        const TheoryRow& t = theory.rows[i];
        if (s.estimator != t.estimator || s.params != t.params)
            raise(errc::mismatched_specs,
                  "estimator lists differ at row " + std::to_string(i + 1) + ": " +
                      s.estimator + "(" + s.params + ") vs " + t.estimator + "(" + t.params +
                      ")");
        ComparisonRow row;
        row.spec = s.spec;
        row.estimator = s.estimator;
        row.params = s.params;
        row.mse_gap = (s.emp_mse - t.mse) / t.mse;
        row.bias_gap = std::abs(s.emp_bias - t.bias);
        row.pass = std::abs(row.mse_gap) <= tolerance;
        out.push_back(std::move(row));
    }
    return out;
}

}  // namespace attrest
