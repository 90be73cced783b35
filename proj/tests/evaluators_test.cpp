#include <acnf/oracle.hpp>
#include <acnf/synthetic.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace acnf;

namespace {

const std::string table1 = ACNF_DATA_DIR "/table1.csv";

OracleDataset parse(const std::string& text, std::vector<std::string>* warnings = nullptr) {
    std::istringstream in(text);
    return parse_oracle(in, "mem.csv", warnings);
}

Combination at(const SearchSpace& s, std::vector<std::string> labels) {
    auto c = s.find(labels);
    if (!c) throw std::logic_error("no such combination");
    return *c;
}

SearchSpace grid() {
    return SearchSpace({{"network", {"n0", "n1", "n2", "n3"}},
                        {"framework", {"f0", "f1", "f2"}},
                        {"compression", {"c0", "c1", "c2", "c3", "c4"}}});
}

} // namespace

TEST(Oracle, ShippedTableShape) {
    const auto ds = read_oracle(table1);
    EXPECT_EQ(ds.count(513, Status::ok), 12u);
    EXPECT_EQ(ds.count(284, Status::ok), 4u);
    EXPECT_EQ(ds.input_sizes(), (std::vector<int>{284, 513}));
    const auto load = load_oracle(table1, 513);
    EXPECT_EQ(load.space.combination_count(), 84u);
    EXPECT_TRUE(load.warnings.empty());
}

TEST(Oracle, EvaluatesRecordedRows) {
    const auto load = load_oracle(table1, 513);
    TableOracle oracle(load.space, load.dataset, 513);

    const auto e = oracle.evaluate(at(load.space, {"DeepLabV3-MobileNetV2", "TensorFlow Lite", "quant-int8"}));
    ASSERT_TRUE(e.ok());
    EXPECT_EQ(*e.accuracy(), 0.612);
    EXPECT_EQ(*e.time_s(), 1.63);

    const auto slow = oracle.evaluate(at(load.space, {"LRASPP-MobileNetV3-Large", "PyTorch", "none"}));
    EXPECT_EQ(*slow.accuracy(), 0.65);
    EXPECT_EQ(*slow.time_s(), 30.0);

    const auto missing = oracle.evaluate(at(load.space, {"DeepLabV3-MobileNetV2", "Apache TVM", "alds-45"}));
    EXPECT_EQ(missing.status(), Status::incompatible);
    EXPECT_FALSE(missing.m());
}

TEST(Oracle, SmallerInputIsItsOwnSpace) {
    const auto load = load_oracle(table1, 284);
    TableOracle oracle(load.space, load.dataset, 284);
    const auto e = oracle.evaluate(at(load.space, {"LRASPP-MobileNetV3-Small", "Apache TVM", "none"}));
    EXPECT_NEAR(*e.m(), 5.848, 1e-12);
    EXPECT_THROW(load_oracle(table1, 300), ParseError);
}

TEST(Oracle, IsReferentiallyTransparent) {
    const auto load = load_oracle(table1, 513);
    TableOracle oracle(load.space, load.dataset, 513);
    std::vector<Evaluation> first;
    for (std::size_t i = 0; i < load.space.combination_count(); ++i)
        first.push_back(oracle.evaluate(load.space.decode(i)));
    std::mt19937_64 rng(1);
    for (int k = 0; k < 1000; ++k) {
        const std::size_t i = rng() % load.space.combination_count();
        EXPECT_EQ(oracle.evaluate(load.space.decode(i)), first[i]);
    }
}

TEST(Oracle, RejectsEmptyAndHeaderOnly) {
    EXPECT_THROW(parse(""), ParseError);
    try {
        parse("a,b,input_size,accuracy,time_s,status\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("no rows"), std::string::npos);
    }
}

TEST(Oracle, DuplicateRowNamesBothLines) {
    try {
        parse("a,b,input_size,accuracy,time_s,status\n"
              "x,y,513,50%,1,ok\n"
              "x,z,513,50%,1,ok\n"
              "x,y,513,51%,2,ok\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4u);
        const std::string what = e.what();
        EXPECT_NE(what.find("(x, y)"), std::string::npos) << what;
        EXPECT_NE(what.find("line 2"), std::string::npos) << what;
    }
}

TEST(Oracle, MalformedRowsReportTheirLine) {
    const std::string head = "a,b,input_size,accuracy,time_s,status\n";
    const std::vector<std::string> bad = {
        "x,y,513,0.5,1\n",            // field count
        "x,y,513,0.5,1,exploded\n",   // status
        "x,y,513,0.5,0,ok\n",         // time
        "x,y,513,150,1,ok\n",         // accuracy
        "x,y,big,0.5,1,ok\n",         // input size
        ",y,513,0.5,1,ok\n",          // empty label
    };
    for (const auto& row : bad) {
        try {
            parse(head + row);
            ADD_FAILURE() << "accepted " << row;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), 2u) << row;
        }
    }
    EXPECT_THROW(parse("a,b,size,accuracy,time_s,status\nx,y,1,0.5,1,ok\n"), ParseError);
}

TEST(Oracle, BareAccuracyAboveOneIsAPercentWithWarning) {
    std::vector<std::string> warnings;
    const auto ds = parse("a,b,input_size,accuracy,time_s,status\nx,y,513,1.5,2,ok\nx,z,513,0.4,2,ok\n", &warnings);
    EXPECT_EQ(*ds.rows[0].accuracy, 0.015);
    EXPECT_EQ(*ds.rows[1].accuracy, 0.4);
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("mem.csv:2"), std::string::npos);
}

TEST(Oracle, FailureRowsNeedNoMeasurements) {
    const auto ds = parse("a,b,input_size,accuracy,time_s,status\nx,y,513,,,incompatible\nx,z,513,0.4,2,ok\n");
    EXPECT_EQ(ds.rows[0].status, Status::incompatible);
    EXPECT_FALSE(ds.rows[0].accuracy);
    const SearchSpace s = ds.infer_space();
    TableOracle oracle(s, ds, 513);
    EXPECT_EQ(oracle.evaluate(at(s, {"x", "y"})).status(), Status::incompatible);
}

TEST(Oracle, WriteThenReadRoundTrips) {
    const auto ds = read_oracle(table1);
    std::ostringstream out;
    write_oracle(out, ds);
    EXPECT_EQ(parse(out.str()), ds);
}

TEST(Oracle, MismatchedSpaceIsRejected) {
    const auto load = load_oracle(table1, 513);
    EXPECT_THROW(TableOracle(grid(), load.dataset, 513), SpaceError);
    const SearchSpace narrow({{"network", {"LRASPP-MobileNetV3-Small"}},
                              {"framework", {"Apache TVM"}},
                              {"compression", {"none"}}});
    EXPECT_THROW(TableOracle(narrow, load.dataset, 513), SpaceError);
}

TEST(Synthetic, FlatLandscapeIsUniform) {
    SyntheticLandscape land({grid(), 2.0, 0.0, {}, {}}, 1);
    for (std::size_t i = 0; i < 60; ++i) {
        const auto e = land.evaluate(grid().decode(i));
        ASSERT_TRUE(e.ok());
        EXPECT_DOUBLE_EQ(*e.m(), 2.0);
    }
}

TEST(Synthetic, PlantedPairsMultiplyAndFail) {
    LandscapeSpec spec{grid(), 1.0, 0.0, {}, {}};
    spec.good_pairs.push_back({"network", "n1", "framework", "f2", 4.0, 0.0});
    spec.bad_pairs.push_back({"framework", "f1", "compression", "c3", 1.0, 1.0});
    SyntheticLandscape land(spec, 9);
    const SearchSpace s = grid();
    EXPECT_DOUBLE_EQ(*land.evaluate(at(s, {"n1", "f2", "c0"})).m(), 4.0);
    EXPECT_DOUBLE_EQ(*land.evaluate(at(s, {"n0", "f2", "c0"})).m(), 1.0);
    for (const char* n : {"n0", "n1", "n2", "n3"})
        EXPECT_EQ(land.evaluate(at(s, {n, "f1", "c3"})).status(), Status::incompatible);
    EXPECT_TRUE(land.evaluate(at(s, {"n0", "f1", "c2"})).ok());
}

TEST(Synthetic, EvaluationMatchesClosedForm) {
    LandscapeSpec spec{grid(), 0.7, 1.3, {}, {}};
    spec.good_pairs.push_back({"network", "n2", "compression", "c1", 3.0, 0.0});
    spec.bad_pairs.push_back({"network", "n0", "framework", "f0", 0.5, 0.4});
    for (std::uint64_t seed : {0ULL, 1ULL, 77ULL}) {
        SyntheticLandscape land(spec, seed);
        double max_m = 0.0;
        for (std::size_t i = 0; i < 60; ++i) max_m = std::max(max_m, land.m(grid().decode(i)));
        for (std::size_t i = 0; i < 60; ++i) {
            const Combination c = grid().decode(i);
            const double z = 2.0 * detail::hash_unit(seed, i, 0) - 1.0;
            double expected = 0.7 * std::exp(1.3 * z);
            if (c[0] == 2 && c[2] == 1) expected *= 3.0;
            if (c[0] == 0 && c[1] == 0) expected *= 0.5;
            EXPECT_NEAR(land.m(c), expected, 1e-12 * expected);
            const auto e = land.evaluate(c);
            if (e.ok()) {
                EXPECT_NEAR(*e.m(), expected, 1e-12 * expected);
                EXPECT_LE(*e.accuracy(), 1.0);
            } else {
                EXPECT_TRUE(c[0] == 0 && c[1] == 0);
            }
            EXPECT_EQ(land.evaluate(c), e);
        }
        EXPECT_NEAR(land.t0(), 1.0 / max_m, 1e-15);
    }
}

TEST(Synthetic, RejectsBadSpecs) {
    EXPECT_THROW(SyntheticLandscape({grid(), 0.0, 0.0, {}, {}}, 0), ConfigError);
    LandscapeSpec spec{grid(), 1.0, 0.0, {}, {}};
    spec.good_pairs.push_back({"network", "n9", "framework", "f0", 2.0, 0.0});
    EXPECT_THROW(SyntheticLandscape(spec, 0), ConfigError);
    spec.good_pairs = {{"network", "n0", "network", "n1", 2.0, 0.0}};
    EXPECT_THROW(SyntheticLandscape(spec, 0), ConfigError);
}
