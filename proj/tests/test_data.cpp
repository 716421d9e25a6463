#include <catch_amalgamated.hpp>

#include <sstream>

#include <nefrisk/data.hpp>

using namespace nefrisk;
using Catch::Approx;

namespace {

// Full factorial grid: 5 kilometre bands, 7 zones, 7 bonus classes, 9 makes.
std::string synthetic_table(char sep) {
    std::ostringstream os;
    os << "Kilometres" << sep << "Zone" << sep << "Bonus" << sep << "Make" << sep << "Insured" << sep << "Claims"
       << sep << "Payment\n";
    int i = 0;
    for (int k = 1; k <= 5; ++k)
        for (int z = 1; z <= 7; ++z)
            for (int b = 1; b <= 7; ++b)
                for (int m = 1; m <= 9; ++m, ++i) {
                    const int claims = (i * 37) % 101;
                    os << k << sep << z << sep << b << sep << m << sep << 100.5 + i << sep << claims << sep
                       << claims * 4123.25 + (i % 7) << "\n";
                }
    return os.str();
}

} // namespace

TEST_CASE("whitespace and comma tables parse the same") {
    std::istringstream ws(synthetic_table(' ')), cs(synthetic_table(','));
    const auto a = load_dataset(ws);
    const auto b = load_dataset(cs);
    REQUIRE(a.size() == 5 * 7 * 7 * 9);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].payment == b[i].payment);
        CHECK(a[i].claims == b[i].claims);
    }
    CHECK(a[0].kilometres == 1);
    CHECK(a.back().make == 9);
}

TEST_CASE("larger-cities filter keeps zones 1 and 2: 630 cells of a full grid") {
    std::istringstream in(synthetic_table('\t'));
    const auto recs = load_dataset(in);
    const auto sub = apply_filter(recs, larger_cities_filter());
    CHECK(sub.size() == 630);
    for (const auto& r : sub) CHECK((r.zone == 1 || r.zone == 2));
    CHECK(apply_filter(sub, larger_cities_filter()).size() == sub.size());
    CHECK(apply_filter(recs, all_records_filter()).size() == recs.size());
}

TEST_CASE("filter specs") {
    const auto f = parse_filter_spec("zone=1,2;bonus=7");
    std::istringstream in(synthetic_table(' '));
    const auto recs = load_dataset(in);
    const auto sub = apply_filter(recs, f);
    CHECK(sub.size() == 5 * 2 * 1 * 9);
    CHECK(apply_filter(sub, f).size() == sub.size());
    CHECK_THROWS_AS(parse_filter_spec("colour=1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_filter_spec("zone"), std::invalid_argument);
    CHECK_THROWS_AS(named_filter("smaller_cities"), std::invalid_argument);
    CHECK(named_filter("larger_cities").allowed.at("zone") == std::set<int>{1, 2});
}

TEST_CASE("scale divisor is lossless") {
    std::istringstream a(synthetic_table(' ')), b(synthetic_table(' '));
    const auto scaled = load_dataset(a, 1000.0);
    const auto raw = load_dataset(b, 1.0);
    double s1 = 0, s2 = 0;
    for (const auto& r : scaled) s1 += r.payment;
    for (const auto& r : raw) s2 += r.payment;
    CHECK(s1 * 1000.0 == Approx(s2).epsilon(1e-9));
}

TEST_CASE("empty input gives no records") {
    std::istringstream in("");
    CHECK(load_dataset(in).empty());
    std::istringstream only_header("Kilometres Zone Bonus Make Insured Claims Payment\n");
    CHECK(load_dataset(only_header).empty());
}

TEST_CASE("malformed rows name their line") {
    std::istringstream bad("Kilometres Zone Bonus Make Insured Claims Payment\n1 1 1 1 10 2 500\n1 1 1 2 10 2 abc\n");
    try {
        load_dataset(bad);
        FAIL("expected a data error");
    } catch (const DataError& e) {
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("line 3"));
    }
    std::istringstream short_row("1 1 1 1 10 2\n");
    CHECK_THROWS_AS(load_dataset(short_row), DataError);
    std::istringstream negative("1 1 1 1 10 -2 5\n");
    CHECK_THROWS_AS(load_dataset(negative), DataError);
    CHECK_THROWS_AS(load_dataset(std::string("/nonexistent/file.txt")), DataError);
}

TEST_CASE("zero-claim rows with payments are flagged, not rejected") {
    std::istringstream in("1 1 1 1 10 0 700\n1 1 1 2 10 3 900\n");
    const auto recs = load_dataset(in);
    REQUIRE(recs.size() == 2);
    CHECK(summarize(recs).zero_claim_payments == 1);
}

TEST_CASE("summary moments and totals") {
    std::istringstream in("1 1 1 1 10 2 1000\n1 1 1 2 10 4 3000\n1 1 1 3 10 9 2000\n");
    const auto s = summarize(load_dataset(in));
    CHECK(s.rows == 3);
    CHECK(s.total_claims == 15.0);
    CHECK(s.total_payment == Approx(6.0));
    CHECK(s.count_moments.mean == 5.0);
    CHECK(s.count_moments.variance == Approx(13.0));
    CHECK(s.aggregate_moments.mean == Approx(2.0));
    CHECK(s.aggregate_moments.variance == Approx(1.0));
}

TEST_CASE("two identical records have zero variance; one record is too few") {
    std::istringstream in("1 1 1 1 10 2 1000\n1 1 1 1 10 2 1000\n");
    const auto recs = load_dataset(in);
    CHECK(summarize(recs).count_moments.variance == 0.0);
    CHECK_THROWS_AS(summarize({recs[0]}), std::invalid_argument);
}
