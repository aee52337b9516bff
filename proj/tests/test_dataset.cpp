#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest/doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "proximix/dataset.hpp"
#include "proximix/errors.hpp"
#include "proximix/rng.hpp"
#include "proximix/schema.hpp"

using namespace proximix;

namespace {

DatasetSchema toy_schema() {
    DatasetSchema s;
    s.columns = {{"occupation", ColumnKind::Categorical},
                 {"age", ColumnKind::Continuous},
                 {"sex", ColumnKind::Categorical},
                 {"income", ColumnKind::Categorical}};
    s.label_column = "income";
    s.positive_label_value = ">50K";
    s.sensitive_column = "sex";
    s.privileged_value = "Male";
    s.validate();
    return s;
}

std::string toy_csv() {
    return "occupation,age,sex,income\n"
           "Officer,20,Male,>50K\n"
           "Manager,40,Female,<=50K\n"
           "Officer,60,Male,>50K\n"
           "Manager,30,Female,<=50K\n";
}

}  // namespace

TEST_CASE("csv parsing follows rfc 4180 quoting") {
    DatasetSchema s;
    s.columns = {{"name", ColumnKind::Categorical}, {"grade", ColumnKind::Categorical}};
    s.label_column = "grade";
    s.positive_label_value = "pass";
    s.sensitive_column = "name";
    s.privileged_value = "a";

    SUBCASE("quoted commas and doubled quotes") {
        RawTable t = parse_csv("name,grade\n\"a,b\",pass\n\"say \"\"hi\"\"\",fail\n", s);
        REQUIRE(t.size() == 2);
        CHECK(t.rows[0][0] == "a,b");
        CHECK(t.rows[1][0] == "say \"hi\"");
    }
    SUBCASE("crlf line endings and trailing blank lines") {
        RawTable t = parse_csv("name,grade\r\na,pass\r\nb,fail\r\n\r\n", s);
        REQUIRE(t.size() == 2);
        CHECK(t.rows[1][0] == "b");
    }
    SUBCASE("unquoted cells are trimmed") {
        RawTable t = parse_csv("name, grade\n a , pass \n", s);
        REQUIRE(t.size() == 1);
        CHECK(t.rows[0][0] == "a");
        CHECK(t.rows[0][1] == "pass");
    }
    SUBCASE("quoted newline stays inside the cell") {
        RawTable t = parse_csv("name,grade\n\"two\nlines\",pass\n", s);
        REQUIRE(t.size() == 1);
        CHECK(t.rows[0][0] == "two\nlines");
    }
}

TEST_CASE("loading projects onto schema columns and drops incomplete rows") {
    DatasetSchema s = toy_schema();

    SUBCASE("extra csv columns are omitted, header order-insensitive") {
        std::string text =
            "fnlwgt,income,age,sex,occupation\n"
            "77516,>50K,20,Male,Officer\n"
            "83311,<=50K,40,Female,Manager\n";
        RawTable t = parse_csv(text, s);
        REQUIRE(t.size() == 2);
        CHECK(t.header == std::vector<std::string>{"occupation", "age", "sex", "income"});
        CHECK(t.rows[0] == std::vector<std::string>{"Officer", "20", "Male", ">50K"});
    }
    SUBCASE("rows with empty or ? cells are dropped") {
        std::string text =
            "occupation,age,sex,income\n"
            "Officer,20,Male,>50K\n"
            "Manager,,Female,<=50K\n"
            "Officer,?,Male,>50K\n";
        CHECK(parse_csv(text, s).size() == 1);
    }
    SUBCASE("rows with unparseable continuous cells are dropped") {
        std::string text =
            "occupation,age,sex,income\n"
            "Officer,20,Male,>50K\n"
            "Manager,young,Female,<=50K\n";
        CHECK(parse_csv(text, s).size() == 1);
    }
    SUBCASE("missing schema column is an error naming the column") {
        try {
            parse_csv("occupation,age,sex\nOfficer,20,Male\n", s);
            FAIL("expected MissingColumnError");
        } catch (const MissingColumnError& e) {
            CHECK(e.column() == "income");
        }
    }
    SUBCASE("nothing surviving cleanup is an error") {
        CHECK_THROWS_AS(parse_csv("occupation,age,sex,income\nOfficer,?,Male,>50K\n", s),
                        EmptyAfterCleaningError);
    }
}

TEST_CASE("encoding one-hot expands and min-max scales") {
    DatasetSchema s = toy_schema();
    EncodedDataset ds = encode(parse_csv(toy_csv(), s), s);

    SUBCASE("categorical levels in first-appearance order: Officer -> (1,0)") {
        REQUIRE(ds.feature_names.size() == 5);
        CHECK(ds.feature_names[0] == "occupation=Officer");
        CHECK(ds.feature_names[1] == "occupation=Manager");
        CHECK(ds.features(0, 0) == 1.0);
        CHECK(ds.features(0, 1) == 0.0);
        CHECK(ds.features(1, 0) == 0.0);
        CHECK(ds.features(1, 1) == 1.0);
    }
    SUBCASE("age 20/40/60 scale to 0 / 0.5 / 1") {
        CHECK(ds.features(0, 2) == 0.0);
        CHECK(ds.features(1, 2) == 0.5);
        CHECK(ds.features(2, 2) == 1.0);
    }
    SUBCASE("label maps via positive_label_value, sensitive via privileged_value") {
        CHECK(ds.labels(0) == 1.0);
        CHECK(ds.labels(1) == 0.0);
        CHECK(ds.sensitive(0) == 1);
        CHECK(ds.sensitive(1) == 0);
    }
    SUBCASE("scale params round-trip continuous values") {
        REQUIRE(ds.scale_params.size() == 1);
        CHECK(ds.scale_params[0].column == "age");
        CHECK(decode_continuous(ds.scale_params[0], ds.features(1, 2)) ==
              doctest::Approx(40.0).epsilon(1e-9));
        CHECK(decode_continuous(ds.scale_params[0], ds.features(3, 2)) ==
              doctest::Approx(30.0).epsilon(1e-9));
    }
    SUBCASE("one indicator per categorical group per row") {
        for (Eigen::Index r = 0; r < ds.features.rows(); ++r) {
            CHECK(ds.features(r, 0) + ds.features(r, 1) == 1.0);  // occupation
            CHECK(ds.features(r, 3) + ds.features(r, 4) == 1.0);  // sex
        }
    }
}

TEST_CASE("constant continuous columns are dropped with a warning") {
    DatasetSchema s = toy_schema();
    std::string text =
        "occupation,age,sex,income\n"
        "Officer,35,Male,>50K\n"
        "Manager,35,Female,<=50K\n";
    EncodedDataset ds = encode(parse_csv(text, s), s);
    CHECK(ds.dim() == 4);  // occupation(2) + sex(2), no age column
    REQUIRE(ds.warnings.size() == 1);
    CHECK(ds.warnings[0].find("age") != std::string::npos);
    for (const auto& name : ds.feature_names) CHECK(name != "age");
}

TEST_CASE("predict-time encoding reuses the fitted layout") {
    DatasetSchema s = toy_schema();
    EncodedDataset train = encode(parse_csv(toy_csv(), s), s);

    std::string unseen =
        "occupation,age,sex,income\n"
        "Clerk,100,Male,>50K\n";
    EncodedDataset ds = encode_with(parse_csv(unseen, s), s, train.encoder);
    CHECK(ds.features(0, 0) == 0.0);  // unseen occupation -> all-zero group
    CHECK(ds.features(0, 1) == 0.0);
    CHECK(ds.features(0, 2) == 1.0);  // age 100 clamps to the fitted [20,60]
    CHECK(ds.encoder == train.encoder);
}

TEST_CASE("split sizes, determinism, and seed sensitivity") {
    Rng rng(11);
    EncodedDataset ds = testutil::random_dataset(rng, 10, 3);

    auto [train, test] = split(ds, 0.2, 42);
    CHECK(train.size() == 8);
    CHECK(test.size() == 2);

    auto [train2, test2] = split(ds, 0.2, 42);
    CHECK(train.features == train2.features);
    CHECK(test.features == test2.features);

    bool any_difference = false;
    for (std::uint64_t seed = 43; seed < 53 && !any_difference; ++seed) {
        auto [t3, e3] = split(ds, 0.2, seed);
        any_difference = e3.features != test.features;
    }
    CHECK(any_difference);

    CHECK_THROWS_AS(split(ds, 0.0, 1), ConfigError);
    CHECK_THROWS_AS(split(ds, 1.0, 1), ConfigError);
}

TEST_CASE("split partitions the rows for random (n, fraction, seed) triples") {
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform_index(60));
        double fraction = 0.1 + 0.8 * rng.uniform();
        std::uint64_t seed = rng.next();
        EncodedDataset ds = testutil::random_dataset(rng, n, 2);
        // tag rows through feature 0 so membership is checkable after the shuffle
        for (int r = 0; r < n; ++r) ds.features(r, 0) = r;

        auto [train, test] = split(ds, fraction, seed);
        CHECK(train.size() + test.size() == static_cast<std::size_t>(n));
        std::set<int> seen;
        for (Eigen::Index r = 0; r < train.features.rows(); ++r)
            seen.insert(static_cast<int>(train.features(r, 0)));
        for (Eigen::Index r = 0; r < test.features.rows(); ++r) {
            int tag = static_cast<int>(test.features(r, 0));
            CHECK(seen.count(tag) == 0);
            seen.insert(tag);
        }
        CHECK(seen.size() == static_cast<std::size_t>(n));
    }
}

TEST_CASE("subgroup selection matches its predicate") {
    Rng rng(5);
    EncodedDataset ds = testutil::random_dataset(rng, 40, 2);

    SUBCASE("z and y filter") {
        SubgroupSelector sel{0, 1};
        EncodedDataset sub = subgroup(ds, sel);
        auto idx = subgroup_indices(ds, sel);
        CHECK(sub.size() == idx.size());
        std::size_t matching = 0;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            auto r = static_cast<Eigen::Index>(i);
            bool match = ds.sensitive(r) == 0 && ds.labels(r) == 1.0;
            if (match) ++matching;
        }
        CHECK(matching == sub.size());
        for (Eigen::Index r = 0; r < sub.features.rows(); ++r) {
            CHECK(sub.sensitive(r) == 0);
            CHECK(sub.labels(r) == 1.0);
        }
        CHECK(std::is_sorted(idx.begin(), idx.end()));
    }
    SUBCASE("y-free selector keeps every row of the group") {
        EncodedDataset sub = subgroup(ds, {1, std::nullopt});
        std::size_t expected = 0;
        for (std::size_t i = 0; i < ds.size(); ++i)
            if (ds.sensitive(static_cast<Eigen::Index>(i)) == 1) ++expected;
        CHECK(sub.size() == expected);
    }
    SUBCASE("empty subgroup is an error") {
        Eigen::MatrixXd X(2, 1);
        X << 0, 1;
        Eigen::VectorXd y(2);
        y << 0, 0;
        Eigen::VectorXi z(2);
        z << 1, 1;
        EncodedDataset small = testutil::make_dataset(X, y, z);
        CHECK_THROWS_AS(subgroup(small, SubgroupSelector{0, std::nullopt}),
                        EmptySubgroupError);
    }
}

TEST_CASE("take_rows returns rows in the requested order") {
    Rng rng(17);
    EncodedDataset ds = testutil::random_dataset(rng, 6, 2);
    EncodedDataset picked = take_rows(ds, {4, 0, 2});
    REQUIRE(picked.size() == 3);
    CHECK(picked.features.row(0) == ds.features.row(4));
    CHECK(picked.features.row(1) == ds.features.row(0));
    CHECK(picked.features.row(2) == ds.features.row(2));
    CHECK(picked.labels(1) == ds.labels(0));
    CHECK(picked.sensitive(2) == ds.sensitive(2));
}

TEST_CASE("schema json round-trips and validates") {
    DatasetSchema s = toy_schema();
    DatasetSchema back = DatasetSchema::from_json(s.to_json());
    CHECK(back == s);

    SUBCASE("duplicate column names rejected") {
        DatasetSchema bad = s;
        bad.columns.push_back({"age", ColumnKind::Continuous});
        CHECK_THROWS_AS(bad.validate(), SchemaError);
    }
    SUBCASE("label column must exist and be categorical") {
        DatasetSchema bad = s;
        bad.label_column = "nope";
        CHECK_THROWS_AS(bad.validate(), SchemaError);
        DatasetSchema bad2 = s;
        bad2.label_column = "age";
        CHECK_THROWS_AS(bad2.validate(), SchemaError);
    }
    SUBCASE("empty designated values rejected") {
        DatasetSchema bad = s;
        bad.positive_label_value = "";
        CHECK_THROWS_AS(bad.validate(), SchemaError);
    }
}

TEST_CASE("encode rejects label or sensitive columns without two observed values") {
    DatasetSchema s = toy_schema();
    std::string one_label =
        "occupation,age,sex,income\n"
        "Officer,20,Male,>50K\n"
        "Manager,40,Female,>50K\n";
    CHECK_THROWS_AS(encode(parse_csv(one_label, s), s), EncodeError);

    std::string wrong_positive =
        "occupation,age,sex,income\n"
        "Officer,20,Male,high\n"
        "Manager,40,Female,low\n";
    CHECK_THROWS_AS(encode(parse_csv(wrong_positive, s), s), EncodeError);
}
