// Optimizer tests. Frozen targets come from closed forms verified with an
// independent eigensolver/search: single-pair xi maxima are +-1/sqrt(2); the
// summed operators over 2 and 4 heterosexual pairs have extreme eigenvalues
// +-1 and +-2; the biphoton-product family maxima are 2 + 9 sqrt(2)/16 (sum
// over four pairs), (10 + sqrt(2))/8 (sum over two), (2 + sqrt(2))/8
// (differentiation) and sqrt(2)/4 (cross-block pair xi).

#include "qglue/optimize.hpp"
#include "qglue/state_text.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace qglue;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

participant alice() { return {"Alice", 0, sex::first}; }
participant natalia() { return {"Natalia", 1, sex::first}; }
participant natasha() { return {"Natasha", 1, sex::first}; }
participant bob2() { return {"Bob", 1, sex::second}; }
participant bob3() { return {"Bob", 2, sex::second}; }
participant ivan() { return {"Ivan", 3, sex::second}; }

std::vector<pair_spec> quad_pairs() {
    return all_heterosexual_pairs({alice(), natasha(), bob3(), ivan()});
}

std::vector<pair_spec> trio_pairs() {
    return all_heterosexual_pairs({alice(), natalia(), bob3()});
}

block_partition quad_partition() {
    return block_partition{{{alice(), bob3()}, {natasha(), ivan()}}};
}

block_partition trio_partition() {
    return block_partition{{{alice(), bob3()}, {natalia()}}};
}

void expect_reproducible(const objective& obj, const optimization_result& r,
                         const convention_preset& preset) {
    ASSERT_TRUE(r.argmax_state.has_value());
    EXPECT_NEAR(evaluate_objective(obj, *r.argmax_state, preset), r.value, 1e-9) << r.method;
}

} // namespace

// ---------- objective plumbing ----------

TEST(Objective, ConstructionAndLabels) {
    const objective single = objective::single_pair_xi(make_pair(alice(), bob2()));
    EXPECT_TRUE(single.linear());
    EXPECT_EQ(single.label(), "single-pair-xi(Alice-Bob)");

    const objective sum = objective::sum_index(trio_pairs());
    EXPECT_TRUE(sum.linear());
    EXPECT_EQ(sum.label(), "sum-index(Alice-Bob,Natalia-Bob)");

    const objective diff = objective::differentiation(make_pair(alice(), bob3()),
                                                      {make_pair(natalia(), bob3())});
    EXPECT_FALSE(diff.linear());
    EXPECT_EQ(diff.label(), "differentiation(legal=Alice-Bob; illegal=Natalia-Bob)");

    EXPECT_FALSE(objective::min_max_index(quad_pairs()).linear());
    EXPECT_THROW(objective::sum_index({}), std::invalid_argument);
    EXPECT_THROW(objective::min_max_index({}), std::invalid_argument);
    EXPECT_THROW(objective::differentiation(make_pair(alice(), bob3()), {}), std::invalid_argument);
}

TEST(Objective, PartitionValidation) {
    EXPECT_NO_THROW(quad_partition());
    EXPECT_NO_THROW(trio_partition());
    EXPECT_THROW(block_partition({{alice(), natasha(), bob3()}}), std::invalid_argument);
    EXPECT_THROW(block_partition({{alice(), ivan()}, {natasha()}}), std::invalid_argument);  // gap at 2
    EXPECT_THROW(block_partition({{alice(), alice()}}), std::invalid_argument);
    EXPECT_EQ(quad_partition().label(), "{Alice,Bob},{Natasha,Ivan}");
}

// ---------- eigen-maximization ----------

TEST(MaxUnrestricted, SinglePairReachesTsirelsonForEveryPreset) {
    const objective obj = objective::single_pair_xi(make_pair(alice(), bob2()));
    for (const auto& preset : all_presets()) {
        const optimization_result r = max_unrestricted(obj, 2, preset);
        EXPECT_NEAR(r.value, kInvSqrt2, 1e-10) << preset.name;
        EXPECT_EQ(r.method, "eigensolver");
        EXPECT_LT(r.residual, 1e-9);
        expect_reproducible(obj, r, preset);
    }
}

TEST(MaxUnrestricted, SumOverOnePairIsIndexForm) {
    const objective obj = objective::sum_index({make_pair(alice(), bob2())});
    const optimization_result r = max_unrestricted(obj, 2, preset_triplet_cal());
    EXPECT_NEAR(r.value, 0.5 * (1.0 + kInvSqrt2), 1e-10);
}

TEST(MaxUnrestricted, SumOverTrioAndQuadPairs) {
    const optimization_result r3 =
        max_unrestricted(objective::sum_index(trio_pairs()), 3, preset_triplet_cal());
    EXPECT_NEAR(r3.value, 1.5, 1e-9);

    const optimization_result r4 =
        max_unrestricted(objective::sum_index(quad_pairs()), 4, preset_triplet_cal());
    EXPECT_NEAR(r4.value, 3.0, 1e-9);
    expect_reproducible(objective::sum_index(quad_pairs()), r4, preset_triplet_cal());
}

TEST(MaxUnrestricted, RejectsNonlinearObjectives) {
    EXPECT_THROW(max_unrestricted(objective::min_max_index(quad_pairs()), 4, preset_section2()),
                 std::invalid_argument);
    EXPECT_THROW(max_unrestricted(objective::differentiation(make_pair(alice(), bob3()),
                                                             {make_pair(natalia(), bob3())}),
                                  3, preset_section2()),
                 std::invalid_argument);
}

TEST(MaxUnrestricted, AscentRouteAgreesWithEigenRoute) {
    const std::vector<objective> cases{
        objective::single_pair_xi(make_pair(alice(), bob2())),
        objective::sum_index(trio_pairs()),
        objective::sum_index(quad_pairs()),
    };
    const std::vector<std::size_t> sizes{2, 3, 4};
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const optimization_result eig = max_unrestricted(cases[i], sizes[i], preset_triplet_cal());
        const optimization_result asc =
            max_unrestricted_ascent(cases[i], sizes[i], preset_triplet_cal());
        EXPECT_NEAR(eig.value, asc.value, 1e-6) << cases[i].label();
        EXPECT_EQ(asc.method, "power-ascent");
        expect_reproducible(cases[i], asc, preset_triplet_cal());
    }
}

// ---------- state parameterization ----------

TEST(Parameterization, RoundTripsRandomStates) {
    std::mt19937_64 rng(31);
    for (std::size_t dim : {2u, 4u, 8u, 16u}) {
        for (int rep = 0; rep < 10; ++rep) {
            const std::vector<cplx> amps = oracles::random_state(dim, rng);
            const std::vector<double> p = detail::params_from_amps(amps);
            ASSERT_EQ(p.size(), 2 * (dim - 1));
            const std::vector<cplx> back = detail::amps_from_params(p.data(), dim);
            // equality up to the fixed global phase gauge
            cplx gauge{1.0, 0.0};
            for (std::size_t i = 0; i < dim; ++i) {
                if (std::abs(amps[i]) > 1e-9) {
                    gauge = back[i] / amps[i];
                    break;
                }
            }
            EXPECT_NEAR(std::abs(gauge), 1.0, 1e-9);
            for (std::size_t i = 0; i < dim; ++i) {
                EXPECT_NEAR(std::abs(amps[i] * gauge - back[i]), 0.0, 1e-9);
            }
        }
    }
}

TEST(Parameterization, ProductAssemblyMatchesKroneckerPlacement) {
    // triplet block on (Alice,Bob) times triplet block on (Natasha,Ivan) with
    // interleaved qubits 0,2 / 1,3 lands on (1/2)(|0011>+|0110>+|1001>+|1100>)
    const std::vector<cplx> t{cplx{0, 0}, cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}, cplx{0, 0}};
    const pure_state got = detail::assemble_product_state(quad_partition(), {t, t});
    const pure_state want = parse_state("1/2|0011> + 1/2|0110> + 1/2|1001> + 1/2|1100>");
    for (std::size_t i = 0; i < 16; ++i) {
        EXPECT_NEAR(std::abs(got.amplitude(i) - want.amplitude(i)), 0.0, 1e-12);
    }
}

// ---------- biphoton-product family ----------

TEST(BiphotonFamily, ConfigValueAtBellBlocksIsTwoPlusInvSqrt2) {
    // the two-triplet configuration reproduces 2 + 1/sqrt(2); this is the
    // value of a specific configuration, not the family maximum
    const std::vector<cplx> t{cplx{0, 0}, cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}, cplx{0, 0}};
    const pure_state config = detail::assemble_product_state(quad_partition(), {t, t});
    const double v = evaluate_objective(objective::sum_index(quad_pairs()), config,
                                        preset_triplet_cal());
    EXPECT_NEAR(v, 2.7071067811865475, 1e-9);
}

TEST(BiphotonFamily, SumOverQuadPairsMaximum) {
    // the family maximum exceeds the two-triplet configuration: one block
    // tilted toward cos(pi/12)|01> + sin(pi/12)|10> trades in-block xi for
    // cross-block marginal correlation
    const optimization_result r = max_biphoton_family(objective::sum_index(quad_pairs()),
                                                      quad_partition(), preset_triplet_cal());
    EXPECT_NEAR(r.value, 2.7954951288348662, 1e-7);  // 2 + 9 sqrt(2)/16
    EXPECT_GT(r.value, 2.7071067811865475 + 0.08);
    EXPECT_EQ(r.method, "nelder-mead");
    EXPECT_EQ(r.restarts_used, 64u);
    expect_reproducible(objective::sum_index(quad_pairs()), r, preset_triplet_cal());
}

TEST(BiphotonFamily, SumOverTrioPairsMaximum) {
    const optimization_result r = max_biphoton_family(objective::sum_index(trio_pairs()),
                                                      trio_partition(), preset_triplet_cal());
    EXPECT_NEAR(r.value, 1.4267766952966369, 1e-7);  // (10 + sqrt(2))/8
    expect_reproducible(objective::sum_index(trio_pairs()), r, preset_triplet_cal());
}

TEST(BiphotonFamily, DifferentiationConfigAndMaximum) {
    const objective diff =
        objective::differentiation(make_pair(alice(), bob3(), true), {make_pair(natalia(), bob3())});

    // configuration value: triplet block, bystander at |0>: legal index
    // 0.8536, illegal exactly 0.5, differentiation 0.3536
    const std::vector<cplx> t{cplx{0, 0}, cplx{kInvSqrt2, 0}, cplx{kInvSqrt2, 0}, cplx{0, 0}};
    const std::vector<cplx> zero{cplx{1, 0}, cplx{0, 0}};
    const pure_state config = detail::assemble_product_state(trio_partition(), {t, zero});
    const objective_evaluator eval(diff, 3, preset_triplet_cal());
    const std::vector<double> xis = eval.pair_xis(config);
    EXPECT_NEAR(0.5 * (1.0 + xis[0]), 0.8535533905932737, 1e-12);
    EXPECT_NEAR(eval.value(config), 0.35355339059327373, 1e-12);

    // family maximum beats the configuration: (2 + sqrt(2))/8
    const optimization_result r =
        max_biphoton_family(diff, trio_partition(), preset_triplet_cal());
    EXPECT_NEAR(r.value, 0.42677669529663687, 1e-7);
    expect_reproducible(diff, r, preset_triplet_cal());
}

TEST(BiphotonFamily, CrossBlockPairStillCorrelatesThroughMarginals) {
    // pair members in different blocks: the family maximum of the pair xi is
    // sqrt(2)/4, attained by aligned Bloch vectors, e.g. |+> x |+> marginals
    const objective obj = objective::single_pair_xi(make_pair(alice(), ivan()));
    const optimization_result r =
        max_biphoton_family(obj, quad_partition(), preset_triplet_cal());
    EXPECT_NEAR(r.value, 0.35355339059327373, 1e-7);
    expect_reproducible(obj, r, preset_triplet_cal());
}

TEST(BiphotonFamily, InBlockPairReachesTsirelson) {
    const objective obj = objective::single_pair_xi(make_pair(alice(), bob2()));
    const block_partition single_block{{{alice(), bob2()}}};
    const optimization_result r = max_biphoton_family(obj, single_block, preset_section2());
    EXPECT_NEAR(r.value, kInvSqrt2, 1e-7);
}

TEST(BiphotonFamily, DeterministicAcrossWorkerCounts) {
    const objective obj = objective::sum_index(trio_pairs());
    search_options serial;
    serial.restarts = 16;
    search_options threaded = serial;
    threaded.workers = 2;
    const optimization_result a =
        max_biphoton_family(obj, trio_partition(), preset_triplet_cal(), serial);
    const optimization_result b =
        max_biphoton_family(obj, trio_partition(), preset_triplet_cal(), threaded);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.argmax_text, b.argmax_text);
}

// ---------- classical bounds ----------

TEST(ClassicalBound, SinglePairXiIsOneHalf) {
    const optimization_result r =
        classical_bound(objective::single_pair_xi(make_pair(alice(), bob2())), {alice(), bob2()});
    EXPECT_DOUBLE_EQ(r.value, 0.5);
    EXPECT_EQ(r.method, "enumeration");
    // lexicographically smallest maximizer: every response +1
    EXPECT_EQ(r.argmax_text, "Alice[first]: x->+1, z->+1; Bob[second]: X->+1, Y->+1");
}

TEST(ClassicalBound, SumIndexValues) {
    const optimization_result one =
        classical_bound(objective::sum_index({make_pair(alice(), bob2())}), {alice(), bob2()});
    EXPECT_DOUBLE_EQ(one.value, 0.75);

    const optimization_result three =
        classical_bound(objective::sum_index(trio_pairs()), {alice(), natalia(), bob3()});
    EXPECT_DOUBLE_EQ(three.value, 1.5);

    const optimization_result four =
        classical_bound(objective::sum_index(quad_pairs()), {alice(), natasha(), bob3(), ivan()});
    EXPECT_DOUBLE_EQ(four.value, 3.0);
}

TEST(ClassicalBound, DifferentiationMaximum) {
    const objective diff =
        objective::differentiation(make_pair(alice(), bob3()), {make_pair(natalia(), bob3())});
    const optimization_result r = classical_bound(diff, {alice(), natalia(), bob3()});
    EXPECT_DOUBLE_EQ(r.value, 0.5);  // legal 0.75 against illegal 0.25
    EXPECT_EQ(r.argmax_text,
              "Alice[first]: x->+1, z->+1; Natalia[first]: x->+1, z->-1; Bob[second]: X->+1, Y->-1");
}

TEST(ClassicalBound, RejectsOversizedRosters) {
    std::vector<participant> five{{"P0", 0, sex::first},
                                  {"P1", 1, sex::first},
                                  {"P2", 2, sex::second},
                                  {"P3", 3, sex::second},
                                  {"P4", 4, sex::second}};
    EXPECT_THROW(classical_bound(objective::single_pair_xi(make_pair(five[0], five[2])), five),
                 std::invalid_argument);
}

// ---------- min-max over all pairs ----------

TEST(MinAllPairs, UnrestrictedQuadReachesQuarter) {
    search_options opt;
    opt.restarts = 16;
    opt.max_iter = 1500;
    const optimization_result r =
        min_all_pairs(strategy_space::unrestricted(), quad_pairs(), preset_triplet_cal(), opt);
    // mean index over the four pairs is 1/2 + (sum xi)/8 >= 1/2 - 2/8, so the
    // max index cannot drop below 0.25; the bottom eigenvector attains it
    EXPECT_GE(r.value, 0.25 - 1e-9);
    EXPECT_NEAR(r.value, 0.25, 1e-6);
    expect_reproducible(objective::min_max_index(quad_pairs()), r, preset_triplet_cal());
}

TEST(MinAllPairs, UnrestrictedTrioReachesQuarter) {
    search_options opt;
    opt.restarts = 16;
    opt.max_iter = 1500;
    const optimization_result r =
        min_all_pairs(strategy_space::unrestricted(), trio_pairs(), preset_triplet_cal(), opt);
    EXPECT_GE(r.value, 0.25 - 1e-9);
    EXPECT_NEAR(r.value, 0.25, 1e-6);
}

TEST(MinAllPairs, ClassicalEnumerationReachesQuarterExactly) {
    const optimization_result r =
        min_all_pairs(strategy_space::classical(), quad_pairs(), preset_triplet_cal());
    EXPECT_DOUBLE_EQ(r.value, 0.25);
    EXPECT_EQ(r.method, "enumeration");
}

TEST(MinAllPairs, NoncreativeStateScoresOneHalf) {
    // the reference 4-qubit state keeps every pair at index exactly 1/2
    const pure_state s = parse_state("1/2|0000> + 1/2|0011> + 1/2|1100> + 1/2|1111>");
    const objective_evaluator eval(objective::min_max_index(quad_pairs()), 4, preset_triplet_cal());
    EXPECT_NEAR(eval.value(s), 0.5, 1e-12);
    for (double xi : eval.pair_xis(s)) EXPECT_NEAR(xi, 0.0, 1e-12);
}

// ---------- cross-space relations ----------

TEST(SpaceNesting, SinglePairChain) {
    const objective obj = objective::single_pair_xi(make_pair(alice(), bob2()));
    const double classical =
        classical_bound(obj, {alice(), bob2()}).value;
    const block_partition block{{{alice(), bob2()}}};
    const double family = max_biphoton_family(obj, block, preset_section2()).value;
    const double unrestricted = max_unrestricted(obj, 2, preset_section2()).value;
    EXPECT_LE(classical, family + 1e-9);
    EXPECT_LE(family, unrestricted + 1e-9);
}

TEST(SpaceNesting, SumOverQuadPairs) {
    const double family = max_biphoton_family(objective::sum_index(quad_pairs()),
                                              quad_partition(), preset_triplet_cal())
                              .value;
    const double unrestricted =
        max_unrestricted(objective::sum_index(quad_pairs()), 4, preset_triplet_cal()).value;
    EXPECT_LE(family, unrestricted + 1e-9);
}

// ---------- export ----------

TEST(Export, OptimizationJsonShape) {
    const objective obj = objective::single_pair_xi(make_pair(alice(), bob2()));
    const optimization_result r = max_unrestricted(obj, 2, preset_section2());
    const nlohmann::ordered_json j =
        optimization_json(obj, strategy_space::unrestricted(), preset_section2(), r);
    const std::vector<std::string> want{"objective", "space", "preset", "value",
                                        "argmax",    "restarts", "residual"};
    std::vector<std::string> got;
    for (auto it = j.begin(); it != j.end(); ++it) got.push_back(it.key());
    EXPECT_EQ(got, want);
    EXPECT_EQ(j["space"], "unrestricted-pure");
    EXPECT_EQ(j["preset"], "section2");
    EXPECT_NEAR(j["value"].get<double>(), kInvSqrt2, 1e-10);

    // the exported argmax parses back to a state that reproduces the value
    const pure_state back = parse_state(j["argmax"].get<std::string>());
    EXPECT_NEAR(evaluate_objective(obj, back, preset_section2()), r.value, 1e-9);
}
