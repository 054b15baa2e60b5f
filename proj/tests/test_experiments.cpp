#include <gtest/gtest.h>

#include <cmath>

#include "wfix/experiments.hpp"
#include "wfix/format.hpp"

using namespace wfix;

TEST(Oracle, StepCoefficients) {
    EXPECT_EQ(RationalOracle::step_coefficient(Scheme::implicit_mann, 2), Rational(2, 3));
    EXPECT_EQ(RationalOracle::step_coefficient(Scheme::implicit_ishikawa, 2), Rational(8, 13));
    EXPECT_EQ(RationalOracle::step_coefficient(Scheme::implicit_s, 2), Rational(4, 13));
}

TEST(Oracle, FrozenExactValues) {
    RationalOracle s(Scheme::implicit_s);
    EXPECT_EQ(s.exact(1), Rational(1));
    EXPECT_EQ(s.exact(5), Rational(15360, 696787));
    RationalOracle mann(Scheme::implicit_mann);
    EXPECT_EQ(mann.exact(4), Rational(16, 35));
}

TEST(Oracle, RoundHalfEven) {
    EXPECT_EQ(round_half_even(Rational(1, 8), 2), "0.12");
    EXPECT_EQ(round_half_even(Rational(3, 8), 2), "0.38");
    EXPECT_EQ(round_half_even(Rational(2, 3), 15), "0.666666666666667");
    EXPECT_EQ(round_half_even(Rational(-5, 2), 0), "-2");
    EXPECT_EQ(round_half_even(Rational(15360, 696787), 15), "0.022044039283167");
}

TEST(Oracle, ReferenceCellsFollowFromRationals) {
    RationalOracle imi(Scheme::implicit_mann), iii(Scheme::implicit_ishikawa), isi(Scheme::implicit_s);
    for (const auto& cell : reference_cells()) {
        EXPECT_EQ(round_half_even(imi.exact(cell.n), 15), cell.imi) << cell.n;
        EXPECT_EQ(round_half_even(iii.exact(cell.n), 15), cell.iii) << cell.n;
        EXPECT_EQ(round_half_even(isi.exact(cell.n), 15), cell.isi) << cell.n;
    }
}

TEST(Table, SelectedRows) {
    const auto table = reproduce_table(TableSetup::reference_defaults());
    ASSERT_EQ(table.rows.size(), 14u);
    const auto& r10 = table.rows[3];
    EXPECT_EQ(r10.n, 10u);
    EXPECT_EQ(format_fixed(r10.imi, 15), "0.283773192751521");
    EXPECT_EQ(format_fixed(r10.iii, 15), "0.240691952056443");
    EXPECT_EQ(format_fixed(r10.isi, 15), "0.000470101468860");
    EXPECT_EQ(format_fixed(table.rows[11].isi, 15), "0.000000000000026");
    EXPECT_EQ(format_fixed(table.rows[1].isi, 15), "0.022044039283167");
}

TEST(Table, VerifiesAgainstReferenceCells) {
    EXPECT_TRUE(verify_against_reference(reproduce_table(TableSetup::reference_defaults())).empty());
}

TEST(Table, OtherMappingMismatches) {
    auto setup = TableSetup::reference_defaults();
    setup.mapping = make_mapping("affine:0.9", setup.space);
    EXPECT_EQ(verify_against_reference(reproduce_table(setup)).size(), 42u);
}

TEST(Table, SingleInitialRow) {
    auto setup = TableSetup::reference_defaults();
    setup.n_max = 1;
    const auto table = reproduce_table(setup);
    ASSERT_EQ(table.rows.size(), 1u);
    EXPECT_EQ(table.rows[0].n, 1u);
    EXPECT_EQ(table.rows[0].isi, 1);
    EXPECT_EQ(verify_against_reference(table).size(), 42u);
}

TEST(Table, OrderingAtEveryRow) {
    auto setup = TableSetup::reference_defaults();
    setup.all_rows = true;
    for (const auto& row : reproduce_table(setup).rows) {
        EXPECT_LE(row.isi, row.iii) << row.n;
        EXPECT_LE(row.iii, row.imi) << row.n;
    }
}

TEST(Table, CsvLayout) {
    const std::string csv = table_csv(reproduce_table(TableSetup::reference_defaults()));
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,imi,iii,isi");
    EXPECT_NE(csv.find("\n2,0.666666666666667,0.615384615384615,0.307692307692308\n"), std::string::npos);
}

TEST(DataDep, IdenticalOperators) {
    auto space = make_space("euclidean:1");
    const auto t = make_mapping("halving", space);
    const auto s = perturb(*space, t, "0");
    DataDepConfig cfg;
    const auto r = run_datadep(*space, t, s, Schedule::harmonic(), scalar_point(1), scalar_point(1), cfg);
    EXPECT_EQ(r.bound, 0);
    EXPECT_LT(r.observed, 1e-12L);
    EXPECT_EQ(r.status, DataDepStatus::holds);
}

TEST(DataDep, HalvingShift) {
    auto space = make_space("euclidean:1");
    const auto t = make_mapping("halving", space);
    const auto s = perturb(*space, t, "0.01");
    const auto r = run_datadep(*space, t, s, Schedule::harmonic(), scalar_point(1), scalar_point(1), {});
    EXPECT_NEAR(r.bound, 0.08L, 1e-15L);
    EXPECT_NEAR(r.observed, 0.02L, 1e-6L);
    ASSERT_TRUE(r.observed_closed_form.has_value());
    EXPECT_NEAR(*r.observed_closed_form, 0.02L, 1e-15L);
    EXPECT_TRUE(r.recursion.hypothesis_holds());
    EXPECT_TRUE(r.tail_converged);
    EXPECT_EQ(r.status, DataDepStatus::holds);
}

TEST(DataDep, AffinePlaneClosedForm) {
    auto space = make_space("euclidean:2");
    const auto t = make_mapping("affine:0.5,0.1;0,0.4+1,0", space);
    const auto s = perturb(*space, t, "0.05;-0.02");
    DataDepConfig cfg;
    cfg.variant = DataDepVariant::proof;
    const auto r = run_datadep(*space, t, s, make_schedule("constant:0.5"), make_vector({0, 0}),
                               make_vector({0, 0}), cfg);
    ASSERT_TRUE(r.q_closed_form.has_value());
    EXPECT_LT(space->distance(r.q, *r.q_closed_form), 1e-9L);
    EXPECT_LE(r.observed, r.bound);
    EXPECT_EQ(r.status, DataDepStatus::holds);
}

TEST(DataDep, TVariantLimitDependsOnSchedule) {
    auto space = make_space("euclidean:2");
    const auto t = make_mapping("affine:0.5,0.1;0,0.4+1,0", space);
    const auto s = perturb(*space, t, "0.05;-0.02");
    const Point origin = make_vector({0, 0});
    const auto fixed = run_datadep(*space, t, s, make_schedule("constant:0.5"), origin, origin, {});
    EXPECT_GT(space->distance(fixed.q, *fixed.q_closed_form), 1e-3L);
    EXPECT_EQ(fixed.status, DataDepStatus::holds);
    const auto vanishing = run_datadep(*space, t, s, Schedule::harmonic(), origin, origin, {});
    EXPECT_LT(space->distance(vanishing.q, *vanishing.q_closed_form), 1e-5L);
}

TEST(DataDep, SVariantAlsoHolds) {
    auto space = make_space("tripod");
    const auto t = make_mapping("tripod-radial:0.5", space);
    const auto s = perturb(*space, t, "0.05");
    DataDepConfig cfg;
    cfg.variant = DataDepVariant::proof;
    const auto r = run_datadep(*space, t, s, make_schedule("constant:0.5"), make_tripod_point(1, 1),
                               make_tripod_point(1, 1), cfg);
    EXPECT_EQ(r.status, DataDepStatus::holds);
    EXPECT_GT(r.margin, 0);
}

TEST(DataDep, ShortRunIsInconclusive) {
    auto space = make_space("euclidean:1");
    const auto t = make_mapping("halving", space);
    const auto s = perturb(*space, t, "0.01");
    DataDepConfig cfg;
    cfg.n_max = 50;
    const auto r = run_datadep(*space, t, s, Schedule::harmonic(), scalar_point(1), scalar_point(1), cfg);
    EXPECT_FALSE(r.tail_converged);
    EXPECT_EQ(r.status, DataDepStatus::inconclusive);
}

TEST(Race, HalvingRun) {
    const auto d = TableSetup::reference_defaults();
    const auto r = rate_race(RaceSetup{d.space, d.mapping, d.schedule, d.x0});
    ASSERT_EQ(r.comparisons.size(), 2u);
    EXPECT_TRUE(r.all_faster());
    for (const auto& c : r.comparisons) {
        EXPECT_EQ(c.actual.verdict, Verdict::faster);
        EXPECT_EQ(c.envelope.verdict, Verdict::faster);
    }
}

TEST(Race, TripodMatchesScalar) {
    auto space = make_space("tripod");
    const auto r = rate_race(RaceSetup{space, make_mapping("tripod-radial:0.5", space), Schedule::harmonic(),
                                       make_tripod_point(2, 1)});
    const auto d = TableSetup::reference_defaults();
    const auto s = rate_race(RaceSetup{d.space, d.mapping, d.schedule, d.x0});
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(r.comparisons[i].actual.verdict, s.comparisons[i].actual.verdict);
        EXPECT_NEAR(r.comparisons[i].actual.final_ratio / s.comparisons[i].actual.final_ratio, 1, 1e-9L);
    }
}

TEST(Race, ConstantMapConvergesExactly) {
    auto space = make_space("euclidean:1");
    const auto r = rate_race(RaceSetup{space, make_mapping("constant:0.3", space), Schedule::harmonic(),
                                       scalar_point(1)});
    ASSERT_EQ(r.comparisons.size(), 2u);
    ASSERT_TRUE(r.comparisons[0].lhs_exact_at.has_value());
    EXPECT_EQ(*r.comparisons[0].lhs_exact_at, 2u);
    EXPECT_NE(race_text(r).find("converged-exactly"), std::string::npos);
}

TEST(Race, SameSchemeNotEstablished) {
    const auto d = TableSetup::reference_defaults();
    const auto r = compare_pair(RaceSetup{d.space, d.mapping, d.schedule, d.x0}, Scheme::implicit_s, Scheme::implicit_s);
    EXPECT_FALSE(r.all_faster());
    EXPECT_EQ(r.comparisons[0].actual.verdict, Verdict::not_established);
}
