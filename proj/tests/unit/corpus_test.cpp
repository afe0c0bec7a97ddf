#include <doctest.h>

#include <algorithm>
#include <set>

#include "vericlaim/corpus.hpp"
#include "vericlaim/errors.hpp"
#include "vericlaim/json_io.hpp"

#include "test_support.hpp"

using namespace vericlaim;
using vctest::make_claim;

namespace {

LoadOptions csv_options() {
    LoadOptions options;
    options.format = CorpusFormat::delimited;
    options.dataset = Dataset::CT22;
    options.split = Split::train;
    options.schema.id_column = "id";
    return options;
}

std::vector<Claim> labeled_corpus(size_t verifiable, size_t non_verifiable) {
    std::vector<Claim> claims;
    for (size_t i = 0; i < verifiable + non_verifiable; ++i) {
        claims.push_back(make_claim("c" + std::to_string(i), "claim " + std::to_string(i),
                                    i < verifiable ? Label::verifiable : Label::non_verifiable));
    }
    return claims;
}

} // namespace

TEST_CASE("load_corpus: delimited fixture with malformed rows") {
    auto result = load_corpus(vctest::fixture("corpora/small.csv"), csv_options());
    CHECK(result.claims.size() == 8);
    REQUIRE(result.errors.size() == 2);
    CHECK(result.errors[0].line == 5); // empty text
    CHECK(result.errors[1].line == 8); // unknown label value
    // quoted field keeps its embedded comma
    auto t8 = std::find_if(result.claims.begin(), result.claims.end(),
                           [](const Claim& c) { return c.id == "t8"; });
    REQUIRE(t8 != result.claims.end());
    CHECK(t8->text == "Taxes rose, according to the report.");
    CHECK(t8->gold_label == Label::verifiable);
}

TEST_CASE("load_corpus: error cases") {
    CHECK_THROWS_AS(load_corpus(vctest::fixture("corpora/header_only.csv"), csv_options()),
                    IoError);
    CHECK_THROWS_AS(load_corpus(vctest::fixture("corpora/does_not_exist.csv"), csv_options()),
                    IoError);
    auto bad = csv_options();
    bad.schema.text_column = "tweet";
    CHECK_THROWS_AS(load_corpus(vctest::fixture("corpora/small.csv"), bad), IoError);
}

TEST_CASE("load_corpus: json-lines with Yes/No labels") {
    LoadOptions options;
    options.format = CorpusFormat::json_lines;
    options.dataset = Dataset::PoliClaim;
    options.split = Split::dev;
    auto result = load_corpus(vctest::fixture("corpora/claims.jsonl"), options);
    REQUIRE(result.claims.size() == 3);
    CHECK(result.errors.empty());
    CHECK(result.claims[0].id == "j1");
    CHECK(result.claims[0].gold_label == Label::verifiable);
    CHECK(result.claims[1].gold_label == Label::non_verifiable);
    CHECK(result.claims[2].split == Split::dev);
}

TEST_CASE("load_corpus: duplicate ids and synthesized ids") {
    vctest::TempDir dir;
    auto path = dir / "dup.csv";
    atomic_write_file(path, "id,text,label\nx,alpha,1\nx,beta,0\n");
    auto result = load_corpus(path, csv_options());
    CHECK(result.claims.size() == 1);
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].message.find("duplicate id") != std::string::npos);

    auto no_id = dir / "noid.tsv";
    atomic_write_file(no_id, "text\tlabel\nalpha one\t1\nbeta two\t0\n");
    LoadOptions options = csv_options();
    options.schema.id_column.clear();
    options.split = Split::test;
    auto synthesized = load_corpus(no_id, options);
    REQUIRE(synthesized.claims.size() == 2);
    CHECK(synthesized.claims[0].id == "test:1");
    CHECK(synthesized.claims[1].id == "test:2");
}

TEST_CASE("canonical corpus round-trips exactly") {
    auto loaded = load_corpus(vctest::fixture("corpora/small.csv"), csv_options()).claims;
    vctest::TempDir dir;
    auto path = dir / "canonical.jsonl";
    write_canonical_corpus(path, loaded);
    auto reloaded = read_canonical_corpus(path);
    CHECK(reloaded == loaded);
}

TEST_CASE("stratified_split matches the published split sizes") {
    // 1,953 records at 59/41 -> (1,757, 196) for dev_fraction 0.1
    auto claims = labeled_corpus(1152, 801);
    auto [train, dev] = stratified_split(claims, 0.1, 42);
    CHECK(train.size() == 1757);
    CHECK(dev.size() == 196);

    // identical membership across repeated runs
    auto [train2, dev2] = stratified_split(claims, 0.1, 42);
    auto ids = [](const std::vector<Claim>& v) {
        std::set<std::string> s;
        for (const auto& c : v) s.insert(c.id);
        return s;
    };
    CHECK(ids(train) == ids(train2));
    CHECK(ids(dev) == ids(dev2));

    // a different seed moves members around
    auto [train3, dev3] = stratified_split(claims, 0.1, 43);
    CHECK(ids(dev) != ids(dev3));
}

TEST_CASE("stratified_split: forced small case and errors") {
    auto claims = labeled_corpus(5, 5);
    auto [train, dev] = stratified_split(claims, 0.2, 1);
    CHECK(train.size() == 8);
    REQUIRE(dev.size() == 2);
    size_t dev_verifiable = 0;
    for (const auto& c : dev) {
        if (c.gold_label == Label::verifiable) ++dev_verifiable;
    }
    CHECK(dev_verifiable == 1); // stratification forces one per class

    CHECK_THROWS_AS(stratified_split(claims, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(stratified_split(claims, 1.0, 1), ConfigError);
    claims.push_back(make_claim("u", "unlabeled"));
    CHECK_THROWS_AS(stratified_split(claims, 0.2, 1), ConfigError);
}

TEST_CASE("stratified_split is a partition for random corpora") {
    vctest::TestRng rng(99);
    for (int round = 0; round < 40; ++round) {
        size_t verifiable = 1 + rng.index(80);
        size_t non_verifiable = 1 + rng.index(80);
        double fraction = 0.05 + rng.real(0.0, 0.85);
        auto claims = labeled_corpus(verifiable, non_verifiable);
        auto [train, dev] = stratified_split(claims, fraction, rng.gen());

        CHECK(train.size() + dev.size() == claims.size());
        std::set<std::string> seen;
        for (const auto& c : train) seen.insert(c.id);
        for (const auto& c : dev) seen.insert(c.id);
        CHECK(seen.size() == claims.size()); // no loss, no duplication

        // per-class dev count within one item of the exact proportion
        size_t dev_verifiable = 0;
        for (const auto& c : dev) {
            if (c.gold_label == Label::verifiable) ++dev_verifiable;
        }
        double exact = fraction * static_cast<double>(verifiable);
        CHECK(std::abs(static_cast<double>(dev_verifiable) - exact) <= 1.0 + 1e-9);
    }
}

TEST_CASE("corpus_stats") {
    SUBCASE("CT22 test split shape") {
        auto claims = labeled_corpus(149, 102); // 251 total
        for (auto& c : claims) c.split = Split::test;
        auto stats = corpus_stats(claims);
        const auto& test = stats.by_split.at(Split::test);
        CHECK(test.total == 251);
        CHECK(test.verifiable == 149);
        REQUIRE(test.verifiable_fraction.has_value());
        CHECK(*test.verifiable_fraction == doctest::Approx(149.0 / 251.0).epsilon(1e-12));
        // fraction x total reproduces the count exactly (before rounding)
        CHECK(*test.verifiable_fraction * static_cast<double>(test.total) ==
              doctest::Approx(149.0).epsilon(1e-12));
    }
    SUBCASE("empty corpus flagged") {
        auto stats = corpus_stats({});
        CHECK(stats.overall.total == 0);
        CHECK_FALSE(stats.overall.verifiable_fraction.has_value());
    }
    SUBCASE("hand tally") {
        auto stats = corpus_stats(labeled_corpus(3, 1));
        REQUIRE(stats.overall.verifiable_fraction.has_value());
        CHECK(*stats.overall.verifiable_fraction == doctest::Approx(0.75).epsilon(1e-12));
    }
}

TEST_CASE("dataset manifest loads every split") {
    vctest::TempDir dir;
    atomic_write_file(dir / "train.csv", "id,text,label\na1,Rates fell in May.,1\na2,lol ok,0\n");
    atomic_write_file(dir / "test.csv", "id,text,label\nb1,The dam opened in 1967.,1\n");
    nlohmann::json manifest = {
        {"dataset", "CT22"},
        {"schema", {{"id", "id"}, {"text", "text"}, {"label", "label"}}},
        {"splits",
         nlohmann::json::array({{{"split", "train"}, {"path", "train.csv"}},
                                {{"split", "test"}, {"path", "test.csv"}}})}};
    atomic_write_file(dir / "manifest.json", manifest.dump());
    auto result = load_dataset_manifest(dir / "manifest.json");
    CHECK(result.claims.size() == 3);
    auto stats = corpus_stats(result.claims);
    CHECK(stats.by_split.at(Split::train).total == 2);
    CHECK(stats.by_split.at(Split::test).total == 1);
    CHECK(result.claims[0].dataset == Dataset::CT22);
}

TEST_CASE("text is trimmed and composed on load") {
    vctest::TempDir dir;
    auto path = dir / "nfc.csv";
    atomic_write_file(path, std::string("id,text,label\nn1,  Ame\xcc\x81lie spoke.  ,1\n"));
    auto result = load_corpus(path, csv_options());
    REQUIRE(result.claims.size() == 1);
    CHECK(result.claims[0].text == "Am\xc3\xa9lie spoke.");
}
