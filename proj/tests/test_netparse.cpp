#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "support.hpp"

using namespace crnlyap;
using namespace testing_support;

TEST(Parse, NetB) {
    const auto doc = parse_network("# NET-B\nS1 -> S2 ; k=1.0\n2 S2 -> 2 S1 ; k=1.0\n");
    const auto& n = doc.network;
    ASSERT_EQ(n.species_names(), (std::vector<std::string>{"S1", "S2"}));
    ASSERT_EQ(n.num_reactions(), 2u);
    EXPECT_EQ(n.reaction(0).reactant.coeffs, (std::vector<int>{1, 0}));
    EXPECT_EQ(n.reaction(0).product.coeffs, (std::vector<int>{0, 1}));
    EXPECT_EQ(n.reaction(1).reactant.coeffs, (std::vector<int>{0, 2}));
    EXPECT_EQ(n.reaction(1).product.coeffs, (std::vector<int>{2, 0}));
    EXPECT_EQ(n.rates(), (std::vector<double>{1.0, 1.0}));
    EXPECT_EQ(doc.header_comments, (std::vector<std::string>{" NET-B"}));
    EXPECT_FALSE(doc.initial_state.has_value());
}

TEST(Parse, ReversibleExpands) {
    const auto n = net("S1 <-> S2 ; k=2, krev=3\n");
    ASSERT_EQ(n.num_reactions(), 2u);
    EXPECT_EQ(n.reaction(0).reactant.coeffs, (std::vector<int>{1, 0}));
    EXPECT_EQ(n.reaction(0).rate_const, 2.0);
    EXPECT_EQ(n.reaction(1).reactant.coeffs, (std::vector<int>{0, 1}));
    EXPECT_EQ(n.reaction(1).rate_const, 3.0);
}

TEST(Parse, NetE) {
    const auto n = net("S1 + 2 S2 -> 3 S2 ; k=1\n2 S2 -> S1 + S2 ; k=1\n");
    EXPECT_EQ(n.reaction(0).reactant.coeffs, (std::vector<int>{1, 2}));
    EXPECT_EQ(n.reaction(0).product.coeffs, (std::vector<int>{0, 3}));
    EXPECT_EQ(n.reaction(1).reactant.coeffs, (std::vector<int>{0, 2}));
    EXPECT_EQ(n.reaction(1).product.coeffs, (std::vector<int>{1, 1}));
}

TEST(Parse, RepeatedSpeciesAccumulate) {
    const auto n = net("A + A -> B ; k=1\n");
    EXPECT_EQ(n.reaction(0).reactant.coeffs, (std::vector<int>{2, 0}));
}

TEST(Parse, ScientificRatesAndComments) {
    const auto doc = parse_network("A -> B ; k=2.5e-3   # slow\n\n  B -> A ; k=1E2\n@init A=1.5, B=0\n");
    EXPECT_EQ(doc.network.rates(), (std::vector<double>{2.5e-3, 100.0}));
    ASSERT_TRUE(doc.initial_state.has_value());
    EXPECT_EQ(*doc.initial_state, (StateVec{1.5, 0.0}));
    EXPECT_EQ(doc.positions[1].line, 3u);
    EXPECT_EQ(doc.positions[1].column, 3u);
}

TEST(Parse, EmptyComplex) {
    const auto n = net("0 -> X ; k=2\nX -> 0 ; k=1\n");
    EXPECT_TRUE(n.reaction(0).reactant.is_zero());
    EXPECT_TRUE(n.reaction(1).product.is_zero());
}

TEST(Parse, CrlfLineEndings) {
    const auto n = net("S1 -> S2 ; k=1\r\nS2 -> S1 ; k=4\r\n");
    EXPECT_EQ(n.rates(), (std::vector<double>{1.0, 4.0}));
}

TEST(Serialize, Idempotent) {
    for (const char* f : {"neta.crn", "netb.crn", "netc.crn", "netd.crn", "nete.crn", "triangle.crn", "birth_death.crn",
                          "reversible.crn"}) {
        const auto doc = load(f);
        const auto once = serialize_network(doc);
        const auto twice = serialize_network(parse_network(once));
        EXPECT_EQ(once, twice) << f;
    }
}

TEST(Serialize, RoundTripPreservesNetworkExactly) {
    for (const char* f : {"neta.crn", "netb.crn", "netc.crn", "netd.crn", "nete.crn", "triangle.crn", "birth_death.crn",
                          "reversible.crn"}) {
        const auto doc = load(f);
        const auto back = parse_network(serialize_network(doc));
        EXPECT_TRUE(back.network == doc.network) << f;
        EXPECT_EQ(back.initial_state, doc.initial_state) << f;
        EXPECT_EQ(back.header_comments, doc.header_comments) << f;
    }
}

TEST(Serialize, AwkwardRatesSurviveExactly) {
    for (double k : {0.1, 1.0 / 3.0, 6.02214076e23, 5e-324, 1.7976931348623157e308, 0.30000000000000004}) {
        const auto n = net("A -> B ; k=" + format_double(k) + "\n");
        EXPECT_EQ(parse_network(serialize_network(n)).network.reaction(0).rate_const, k);
    }
}

struct MalformedCase {
    const char* file;
    std::size_t line;
    std::size_t column;
};

void PrintTo(const MalformedCase& c, std::ostream* os) { *os << c.file; }

class Malformed : public ::testing::TestWithParam<MalformedCase> {};

TEST_P(Malformed, ReportsPosition) {
    const auto c = GetParam();
    try {
        load(std::string("malformed/") + c.file);
        FAIL() << "expected ParseError for " << c.file;
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), c.line) << c.file << ": " << e.what();
        EXPECT_EQ(e.column(), c.column) << c.file << ": " << e.what();
        EXPECT_FALSE(e.message().empty());
    }
}

INSTANTIATE_TEST_SUITE_P(Corpus, Malformed,
                         ::testing::Values(MalformedCase{"bad_arrow.crn", 2, 4}, MalformedCase{"bad_number.crn", 1, 14},
                                           MalformedCase{"bad_token.crn", 1, 9}, MalformedCase{"empty.crn", 2, 1},
                                           MalformedCase{"identical_sides.crn", 1, 1},
                                           MalformedCase{"krev_irreversible.crn", 1, 17},
                                           MalformedCase{"missing_krev.crn", 1, 16},
                                           MalformedCase{"missing_rate.crn", 1, 9},
                                           MalformedCase{"negative_rate.crn", 1, 14},
                                           MalformedCase{"unknown_init_species.crn", 2, 7},
                                           MalformedCase{"unknown_key.crn", 1, 12}, MalformedCase{"zero_coeff.crn", 1, 1}),
                         [](const auto& info) {
                             std::string s = info.param.file;
                             return s.substr(0, s.find('.'));
                         });

TEST(Parse, ErrorColumnLiesInsideTheLine) {
    for (const auto& entry : std::filesystem::directory_iterator(fixture_path("malformed"))) {
        std::ifstream in(entry.path());
        std::stringstream ss;
        ss << in.rdbuf();
        const auto text = ss.str();
        try {
            parse_network(text);
            ADD_FAILURE() << entry.path();
        } catch (const ParseError& e) {
            std::istringstream lines(text);
            std::string line;
            for (std::size_t i = 0; i < e.line(); ++i) std::getline(lines, line);
            EXPECT_GE(e.column(), 1u);
            EXPECT_LE(e.column(), line.size() + 1) << entry.path();
        }
    }
}

TEST(Parse, MissingFileIsError) { EXPECT_THROW(read_network_file(fixture_path("nope.crn")), Error); }
