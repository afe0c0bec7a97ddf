#include <doctest.h>

#include <cmath>

#include "vericlaim/eval.hpp"
#include "vericlaim/json_io.hpp"

#include "test_support.hpp"

using namespace vericlaim;
using vctest::make_claim;

namespace {

Prediction pred(const std::string& id, Label label) {
    Prediction p;
    p.claim_id = id;
    p.label = label;
    return p;
}

// Straight-line re-statement of the counting rules, kept independent of the
// library path it checks.
ConfusionMatrix brute_force_confusion(const std::vector<Prediction>& preds,
                                      const std::vector<Claim>& gold) {
    ConfusionMatrix cm;
    for (const auto& g : gold) {
        for (const auto& p : preds) {
            if (p.claim_id != g.id) continue;
            bool pp = p.label == Label::verifiable;
            bool gp = *g.gold_label == Label::verifiable;
            if (pp && gp) ++cm.tp;
            if (pp && !gp) ++cm.fp;
            if (!pp && gp) ++cm.fn;
            if (!pp && !gp) ++cm.tn;
        }
    }
    return cm;
}

// Simpson integration of the t density; the independent oracle for p-values.
double t_pdf(double x, double dof) {
    double c = std::exp(std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0)) /
               std::sqrt(dof * M_PI);
    return c * std::pow(1.0 + x * x / dof, -(dof + 1.0) / 2.0);
}

double numeric_two_sided_p(double t, double dof) {
    double a = 0.0, b = std::abs(t);
    const int steps = 20000;
    double h = (b - a) / steps;
    double sum = t_pdf(a, dof) + t_pdf(b, dof);
    for (int i = 1; i < steps; ++i) {
        sum += t_pdf(a + i * h, dof) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    double central = sum * h / 3.0;
    return 1.0 - 2.0 * central;
}

RatingsTable table_from(const std::vector<std::vector<int>>& rows) {
    RatingsTable t;
    for (size_t i = 0; i < rows.size(); ++i) t.item_ids.push_back("i" + std::to_string(i));
    for (size_t r = 0; r < rows[0].size(); ++r) t.rater_ids.push_back("r" + std::to_string(r));
    t.ratings = rows;
    return t;
}

// Textbook Fleiss computation used as the oracle for the hand tables.
double fleiss_oracle(const std::vector<std::vector<int>>& rows) {
    size_t N = rows.size(), n = rows[0].size();
    std::map<int, double> marginal;
    double p_bar = 0.0;
    for (const auto& row : rows) {
        std::map<int, double> counts;
        for (int r : row) counts[r] += 1.0;
        double agree = 0.0;
        for (auto& [cat, c] : counts) {
            agree += c * c;
            marginal[cat] += c;
        }
        p_bar += (agree - double(n)) / (double(n) * (double(n) - 1.0));
    }
    p_bar /= double(N);
    double pe = 0.0;
    for (auto& [cat, total] : marginal) {
        double share = total / (double(N) * double(n));
        pe += share * share;
    }
    return (p_bar - pe) / (1.0 - pe);
}

} // namespace

TEST_CASE("confusion: perfect predictions and hand fixture") {
    std::vector<Claim> gold = {
        make_claim("a", "x", Label::verifiable),     make_claim("b", "x", Label::verifiable),
        make_claim("c", "x", Label::non_verifiable), make_claim("d", "x", Label::non_verifiable),
        make_claim("e", "x", Label::verifiable),     make_claim("f", "x", Label::non_verifiable),
    };
    SUBCASE("perfect") {
        std::vector<Prediction> preds;
        for (const auto& g : gold) preds.push_back(pred(g.id, *g.gold_label));
        auto cm = confusion(preds, gold);
        CHECK(cm.fp == 0);
        CHECK(cm.fn == 0);
        CHECK(cm.tp == 3);
        CHECK(cm.tn == 3);
    }
    SUBCASE("six-item hand tally") {
        std::vector<Prediction> preds = {
            pred("a", Label::verifiable),     pred("b", Label::non_verifiable),
            pred("c", Label::verifiable),     pred("d", Label::non_verifiable),
            pred("e", Label::non_verifiable), pred("f", Label::verifiable),
        };
        auto cm = confusion(preds, gold);
        auto expected = brute_force_confusion(preds, gold);
        CHECK(cm.tp == expected.tp);
        CHECK(cm.fp == expected.fp);
        CHECK(cm.fn == expected.fn);
        CHECK(cm.tn == expected.tn);
        CHECK(cm.tp == 1);
        CHECK(cm.fp == 2);
        CHECK(cm.fn == 2);
        CHECK(cm.tn == 1);
    }
    SUBCASE("id mismatch and missing labels rejected") {
        std::vector<Prediction> preds;
        for (const auto& g : gold) preds.push_back(pred(g.id, Label::verifiable));
        preds[0].claim_id = "zz";
        CHECK_THROWS_AS(confusion(preds, gold), ConfigError);
        preds[0].claim_id = "a";
        gold[0].gold_label.reset();
        CHECK_THROWS_AS(confusion(preds, gold), ConfigError);
    }
}

TEST_CASE("metrics: hand arithmetic") {
    SUBCASE("tp3 fp1 fn2 tn4") {
        ConfusionMatrix cm{3, 1, 2, 4};
        auto m = metrics(cm);
        CHECK(m.precision == doctest::Approx(0.75).epsilon(1e-12));
        CHECK(m.recall == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(m.f1 == doctest::Approx(2.0 * 0.75 * 0.6 / 1.35).epsilon(1e-12));
        CHECK(m.accuracy == doctest::Approx(0.7).epsilon(1e-12));
        REQUIRE(m.fp_fn_ratio.has_value());
        CHECK(*m.fp_fn_ratio == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("paper error-table shape: fp 71, fn 23 of 251") {
        ConfusionMatrix cm{126, 71, 23, 31}; // tp+fn=149 verifiable, fp+tn=102
        CHECK(cm.total() == 251);
        auto m = metrics(cm);
        REQUIRE(m.fp_fn_ratio.has_value());
        CHECK(round_to(*m.fp_fn_ratio, 2) == doctest::Approx(3.09));
        auto e = error_distribution(cm);
        CHECK(round_to(e.fp_share * 100.0, 1) == doctest::Approx(28.3));
        CHECK(round_to(e.fn_share * 100.0, 1) == doctest::Approx(9.2));
        CHECK(e.total_errors == 94);
        CHECK(round_to(e.total_share * 100.0, 1) == doctest::Approx(37.5));
    }
    SUBCASE("majority baseline on the 149/251 split") {
        ConfusionMatrix cm{149, 102, 0, 0}; // everything predicted verifiable
        auto m = metrics(cm);
        CHECK(round_to(m.accuracy * 100.0, 2) == doctest::Approx(59.36));
        CHECK_FALSE(m.fp_fn_ratio.has_value()); // fn == 0 -> undefined
    }
    SUBCASE("macro f1 averages the two class scores") {
        ConfusionMatrix cm{3, 1, 2, 4};
        // verifiable class: P .75, R .6 -> F1 2/3
        // non-verifiable class: P 4/6, R 4/5 -> F1 32/44 = 8/11
        double expected = (2.0 / 3.0 + 8.0 / 11.0) / 2.0;
        CHECK(macro_f1(cm) == doctest::Approx(expected).epsilon(1e-12));
        ConfusionMatrix balanced{5, 0, 0, 5};
        CHECK(macro_f1(balanced) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("degenerate denominators") {
        ConfusionMatrix zero{0, 0, 0, 0};
        CHECK_THROWS_AS(metrics(zero), ConfigError);
        ConfusionMatrix no_pos{0, 0, 0, 5};
        auto m = metrics(no_pos);
        CHECK(m.precision == 0.0);
        CHECK(m.recall == 0.0);
        CHECK(m.f1 == 0.0);
    }
}

TEST_CASE("metrics equal an independent tally on random fixtures") {
    vctest::TestRng rng(71);
    for (int round = 0; round < 100; ++round) {
        size_t n = 2 + rng.index(40);
        std::vector<Claim> gold;
        std::vector<Prediction> preds;
        for (size_t i = 0; i < n; ++i) {
            auto id = "r" + std::to_string(i);
            gold.push_back(make_claim(id, "x",
                                      rng.coin() ? Label::verifiable : Label::non_verifiable));
            preds.push_back(pred(id, rng.coin() ? Label::verifiable : Label::non_verifiable));
        }
        auto cm = confusion(preds, gold);
        auto expected = brute_force_confusion(preds, gold);
        CHECK(cm.tp == expected.tp);
        CHECK(cm.fp == expected.fp);
        CHECK(cm.fn == expected.fn);
        CHECK(cm.tn == expected.tn);
        auto m = metrics(cm);
        CHECK(m.accuracy ==
              doctest::Approx(double(cm.tp + cm.tn) / double(n)).epsilon(1e-12));
    }
}

TEST_CASE("transitions on the bundled fixture pair") {
    auto gold = read_canonical_corpus(vctest::fixture("transitions/gold.jsonl"));
    auto baseline = read_predictions(vctest::fixture("transitions/baseline.jsonl"));
    auto system = read_predictions(vctest::fixture("transitions/system.jsonl"));

    auto base_cm = confusion(baseline, gold);
    CHECK(base_cm.fp == 71);
    CHECK(base_cm.fn == 23);
    CHECK(base_cm.total() == 251);

    auto report = transitions(baseline, system, gold);
    CHECK(report.n == 251);
    CHECK(report.fixed == 22);
    CHECK(report.regressed == 21);
    CHECK(report.fixed + report.regressed + report.both_right + report.both_wrong == report.n);
    CHECK(report.net_fp_delta == 15);
    CHECK(report.net_fn_delta == -16);
}

TEST_CASE("transitions: identical and hand-enumerated cases") {
    std::vector<Claim> gold = {
        make_claim("a", "x", Label::verifiable),     make_claim("b", "x", Label::verifiable),
        make_claim("c", "x", Label::non_verifiable), make_claim("d", "x", Label::non_verifiable),
        make_claim("e", "x", Label::verifiable),
    };
    std::vector<Prediction> base = {
        pred("a", Label::verifiable),     // right, stays right        -> both_right
        pred("b", Label::non_verifiable), // wrong (fn), system fixes  -> fixed
        pred("c", Label::verifiable),     // wrong (fp), stays wrong   -> both_wrong
        pred("d", Label::non_verifiable), // right, system breaks (fp) -> regressed
        pred("e", Label::verifiable),     // right, stays right        -> both_right
    };
    std::vector<Prediction> sys = {
        pred("a", Label::verifiable),  pred("b", Label::verifiable),
        pred("c", Label::verifiable),  pred("d", Label::verifiable),
        pred("e", Label::verifiable),
    };
    SUBCASE("identical files have no transitions") {
        auto report = transitions(base, base, gold);
        CHECK(report.fixed == 0);
        CHECK(report.regressed == 0);
        CHECK(report.net_fp_delta == 0);
        CHECK(report.net_fn_delta == 0);
    }
    SUBCASE("five-item manual labeling") {
        auto report = transitions(base, sys, gold);
        CHECK(report.fixed == 1);
        CHECK(report.regressed == 1);
        CHECK(report.both_right == 2);
        CHECK(report.both_wrong == 1);
        CHECK(report.net_fp_delta == 1);  // 1 -> 2
        CHECK(report.net_fn_delta == -1); // 1 -> 0
    }
    SUBCASE("misaligned ids rejected") {
        auto broken = base;
        broken.pop_back();
        CHECK_THROWS_AS(transitions(broken, sys, gold), ConfigError);
    }
}

TEST_CASE("transition categories always partition the sample") {
    vctest::TestRng rng(83);
    for (int round = 0; round < 50; ++round) {
        size_t n = 2 + rng.index(60);
        std::vector<Claim> gold;
        std::vector<Prediction> base, sys;
        for (size_t i = 0; i < n; ++i) {
            auto id = "p" + std::to_string(i);
            gold.push_back(make_claim(id, "x",
                                      rng.coin() ? Label::verifiable : Label::non_verifiable));
            base.push_back(pred(id, rng.coin() ? Label::verifiable : Label::non_verifiable));
            sys.push_back(pred(id, rng.coin() ? Label::verifiable : Label::non_verifiable));
        }
        auto report = transitions(base, sys, gold);
        CHECK(report.fixed + report.regressed + report.both_right + report.both_wrong == n);
    }
}

TEST_CASE("delta_table") {
    MetricReport a{0.70, 0.60, 0.80, 0.686};
    SUBCASE("identical reports: all zero, none flagged") {
        for (const auto& d : delta_table(a, a)) {
            CHECK(d.delta == 0.0);
            CHECK_FALSE(d.flagged);
        }
    }
    SUBCASE("large deltas are flagged against the default threshold") {
        MetricReport b = a;
        b.precision = a.precision + 0.0395; // +3.95 points
        b.recall = a.recall + 0.0349;       // +3.49 points
        auto deltas = delta_table(a, b);
        CHECK(deltas[1].metric == "precision");
        CHECK(deltas[1].delta == doctest::Approx(3.95).epsilon(1e-9));
        CHECK(deltas[1].flagged);
        CHECK(deltas[2].metric == "recall");
        CHECK_FALSE(deltas[2].flagged);
    }
    SUBCASE("flagging is strict at the boundary") {
        // dyadic values keep the delta exactly representable
        MetricReport x{0.5, 0.5, 0.5, 0.5};
        MetricReport y = x;
        y.f1 = 0.53125; // delta = exactly 3.125 points
        auto deltas = delta_table(x, y, /*flag_threshold=*/3.125);
        CHECK(deltas[3].delta == 3.125);
        CHECK_FALSE(deltas[3].flagged); // equality does not flag
        auto flagged = delta_table(x, y, /*flag_threshold=*/3.0);
        CHECK(flagged[3].flagged);
    }
    SUBCASE("antisymmetry") {
        vctest::TestRng rng(5);
        for (int round = 0; round < 50; ++round) {
            MetricReport x{rng.real(0, 1), rng.real(0, 1), rng.real(0, 1), rng.real(0, 1)};
            MetricReport y{rng.real(0, 1), rng.real(0, 1), rng.real(0, 1), rng.real(0, 1)};
            auto xy = delta_table(x, y);
            auto yx = delta_table(y, x);
            for (size_t i = 0; i < xy.size(); ++i) {
                CHECK(xy[i].delta == doctest::Approx(-yx[i].delta).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("fleiss_kappa") {
    SUBCASE("perfect agreement across distinct categories is exactly 1") {
        auto table = table_from({{1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {1, 1, 1}});
        CHECK(fleiss_kappa(table) == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("hand table: P=2/3, Pe=1/3, kappa=1/2") {
        auto table = table_from({{1, 1, 1}, {1, 2, 2}, {2, 2, 3}, {3, 3, 3}});
        CHECK(fleiss_kappa(table) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("matches the independent oracle on random tables") {
        vctest::TestRng rng(29);
        for (int round = 0; round < 60; ++round) {
            size_t items = 2 + rng.index(8), raters = 2 + rng.index(4);
            std::vector<std::vector<int>> rows(items, std::vector<int>(raters));
            bool varied = false;
            for (auto& row : rows) {
                for (int& cell : row) cell = 1 + static_cast<int>(rng.index(3));
            }
            for (auto& row : rows) {
                if (row != rows[0]) varied = true;
            }
            auto table = table_from(rows);
            try {
                double got = fleiss_kappa(table);
                CHECK(got == doctest::Approx(fleiss_oracle(rows)).epsilon(1e-12));
            } catch (const DegenerateStatistic&) {
                CHECK_FALSE(varied); // only the single-category table degenerates
            }
        }
    }
    SUBCASE("invariant under category relabeling") {
        vctest::TestRng rng(31);
        auto rows = std::vector<std::vector<int>>{{1, 2, 1}, {2, 2, 3}, {3, 1, 3}, {1, 1, 2}};
        double base = fleiss_kappa(table_from(rows));
        const int perms[6][3] = {{1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}};
        for (int round = 0; round < 100; ++round) {
            const int* p = perms[rng.index(6)];
            auto relabeled = rows;
            for (auto& row : relabeled) {
                for (int& cell : row) cell = p[cell - 1];
            }
            CHECK(fleiss_kappa(table_from(relabeled)) ==
                  doctest::Approx(base).epsilon(1e-12));
        }
    }
    SUBCASE("degenerate single-category table") {
        auto table = table_from({{2, 2, 2}, {2, 2, 2}});
        CHECK_THROWS_AS(fleiss_kappa(table), DegenerateStatistic);
    }
    SUBCASE("size preconditions") {
        CHECK_THROWS_AS(fleiss_kappa(table_from({{1, 2, 3}})), ConfigError);
    }
}

TEST_CASE("paired t-test against the numerical oracle") {
    SUBCASE("hand data") {
        std::vector<double> a = {1.2, 2.3, 3.1, 4.8, 5.0};
        std::vector<double> b = {1.0, 2.0, 3.5, 4.0, 4.6};
        auto result = paired_t_test(a, b);
        // d = {0.2, 0.3, -0.4, 0.8, 0.4}: mean 0.26, s^2 = 0.188
        double expected_t = 0.26 / std::sqrt(0.188 / 5.0);
        CHECK(result.t == doctest::Approx(expected_t).epsilon(1e-9));
        CHECK(result.dof == 4);
        CHECK(result.p == doctest::Approx(numeric_two_sided_p(result.t, 4)).epsilon(1e-6));
    }
    SUBCASE("more oracle points across dof") {
        vctest::TestRng rng(37);
        for (int round = 0; round < 20; ++round) {
            size_t n = 3 + rng.index(12);
            std::vector<double> a, b;
            for (size_t i = 0; i < n; ++i) {
                a.push_back(rng.real(0.0, 3.0));
                b.push_back(rng.real(0.0, 3.0));
            }
            TTestResult result;
            try {
                result = paired_t_test(a, b);
            } catch (const DegenerateStatistic&) {
                continue;
            }
            double oracle = numeric_two_sided_p(result.t, static_cast<double>(n - 1));
            CHECK(result.p == doctest::Approx(oracle).epsilon(1e-4));
        }
    }
    SUBCASE("identical samples degenerate as no-difference") {
        std::vector<double> a = {1.0, 2.0, 3.0};
        CHECK_THROWS_AS(paired_t_test(a, a), DegenerateStatistic);
    }
    SUBCASE("length and size preconditions") {
        CHECK_THROWS_AS(paired_t_test({1.0}, {2.0}), ConfigError);
        CHECK_THROWS_AS(paired_t_test({1.0, 2.0}, {1.0}), ConfigError);
    }
}

TEST_CASE("incomplete beta sanity") {
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    vctest::TestRng rng(41);
    for (int round = 0; round < 50; ++round) {
        double a = 0.5 + rng.real(0.0, 5.0), b = 0.5 + rng.real(0.0, 5.0);
        double x = rng.real(0.01, 0.99);
        CHECK(regularized_incomplete_beta(a, b, x) ==
              doctest::Approx(1.0 - regularized_incomplete_beta(b, a, 1.0 - x)).epsilon(1e-10));
    }
}

TEST_CASE("ratings csv loads per dimension") {
    auto tables = read_ratings_csv(vctest::fixture("ratings.csv"));
    REQUIRE(tables.count("relevance") == 1);
    REQUIRE(tables.count("clarity") == 1);
    const auto& relevance = tables.at("relevance");
    relevance.validate();
    CHECK(relevance.items() == 4);
    CHECK(relevance.raters() == 3);
    CHECK(fleiss_kappa(relevance) == doctest::Approx(0.5).epsilon(1e-12));

    SUBCASE("incomplete tables are rejected") {
        vctest::TempDir dir;
        atomic_write_file(dir / "bad.csv",
                          "item_id,rater_id,dimension,rating\ni1,r1,rel,1\ni1,r2,rel,2\n"
                          "i2,r1,rel,3\n");
        CHECK_THROWS_AS(read_ratings_csv(dir / "bad.csv"), IoError);
    }
    SUBCASE("off-scale ratings are rejected by validate") {
        auto bad = table_from({{1, 2}, {4, 1}});
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    }
}
