#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "lexids/harness.hpp"
#include "lexids/population_io.hpp"
#include "lexids/synthetic.hpp"

using namespace lexids;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& hint) {
    static int counter = 0;
    const auto dir = fs::temp_directory_path() / "lexids_io_tests";
    fs::create_directories(dir);
    return dir / (hint + "_" + std::to_string(++counter));
}

fs::path write_text(const std::string& hint, const std::string& text) {
    const auto path = temp_file(hint);
    std::ofstream out(path);
    out << text;
    return path;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ResultRecord record(const std::string& pop, Method m, double rate, int rep, int idx,
                    std::uint64_t seed, int before, int loss) {
    ResultRecord r;
    r.population_id = pop;
    r.method = m;
    r.rate = rate;
    r.replicate = rep;
    r.rep_or_round = idx;
    r.seed = seed;
    r.coverage_before = before;
    r.coverage_after = before - loss;
    r.loss = loss;
    return r;
}

}  // namespace

TEST_CASE("format_double produces shortest round-trip strings") {
    CHECK(format_double(0.05) == "0.05");
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(0.2) == "0.2");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.0) == "0");
    CHECK(format_double(2.5) == "2.5");
}

TEST_CASE("population round trip keeps everything") {
    const auto pop = make_niche_population(NicheLayout{4, 6, 3});
    const auto path = temp_file("roundtrip");
    write_population(PopulationData{pop.matrix, pop.individual_niche, pop.case_niche},
                     path.string());

    const auto back = read_population(path.string());
    CHECK(back.matrix.individuals() == 24);
    CHECK(back.matrix.cases() == 12);
    CHECK(back.matrix.label() == "synthetic-niche");
    CHECK(back.matrix.solve_threshold() == 0.0);
    for (int i = 0; i < 24; ++i)
        for (int c = 0; c < 12; ++c) CHECK(back.matrix.error(i, c) == pop.matrix.error(i, c));
    CHECK(back.individual_niche == pop.individual_niche);
    CHECK(back.case_niche == pop.case_niche);

    // writing the re-read population reproduces the bytes
    const auto path2 = temp_file("roundtrip");
    write_population(PopulationData{back.matrix, back.individual_niche, back.case_niche},
                     path2.string());
    CHECK(slurp(path) == slurp(path2));
}

TEST_CASE("fractional errors and thresholds survive the round trip") {
    const ErrorMatrix m(2, 3, {0.25, 1e-9, 3.5, 0.125, 2.0, 97.3}, 0.5, "frac");
    const auto path = temp_file("frac");
    write_population(PopulationData{m, {}, {}}, path.string());
    const auto back = read_population(path.string());
    CHECK(back.matrix.solve_threshold() == 0.5);
    for (int i = 0; i < 2; ++i)
        for (int c = 0; c < 3; ++c) CHECK(back.matrix.error(i, c) == m.error(i, c));
    CHECK(back.individual_niche.empty());
    CHECK(back.case_niche.empty());
}

TEST_CASE("basic fixture file parses") {
    const auto path = write_text("tiny", "errmat,v1,2,2,0\n0,1\n1,0\n");
    const auto pop = read_population(path.string());
    CHECK(pop.matrix.individuals() == 2);
    CHECK(test_coverage(pop.matrix) == 2);
    CHECK(pop.matrix.label().empty());
}

TEST_CASE("crlf line endings are tolerated") {
    const auto path = write_text("crlf", "errmat,v1,2,2,0,win\r\n0,1\r\n1,0\r\n");
    const auto pop = read_population(path.string());
    CHECK(pop.matrix.label() == "win");
    CHECK(pop.matrix.error(0, 1) == 1.0);
}

TEST_CASE("header diagnostics") {
    CHECK_THROWS_AS(read_population(temp_file("missing").string()), ParseError);
    CHECK_THROWS_AS(read_population(write_text("h1", "").string()), ParseError);
    CHECK_THROWS_AS(read_population(write_text("h2", "wrong,v1,2,2,0\n").string()), ParseError);
    CHECK_THROWS_AS(read_population(write_text("h3", "errmat,v2,2,2,0\n").string()), ParseError);
    CHECK_THROWS_AS(read_population(write_text("h4", "errmat,v1,2\n").string()), ParseError);
    CHECK_THROWS_AS(read_population(write_text("h5", "errmat,v1,x,2,0\n").string()), ParseError);
    CHECK_THROWS_AS(read_population(write_text("h6", "errmat,v1,0,2,0\n").string()), ParseError);
    CHECK_THROWS_AS(read_population(write_text("h7", "errmat,v1,1,1,-1\n0\n").string()),
                    ParseError);

    try {
        read_population(write_text("h8", "errmat,v1,1,1,nope\n0\n").string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":1: ") != std::string::npos);
    }
}

TEST_CASE("row diagnostics name the offending line") {
    const auto long_row = write_text("r1", "errmat,v1,2,2,0\n0,1,1\n1,0\n");
    try {
        read_population(long_row.string());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        CHECK(msg.find(":2: ") != std::string::npos);
        CHECK(msg.find("row 1") != std::string::npos);
    }

    CHECK_THROWS_AS(read_population(write_text("r2", "errmat,v1,2,2,0\n0,abc\n1,0\n").string()),
                    ParseError);
    CHECK_THROWS_AS(read_population(write_text("r3", "errmat,v1,2,2,0\n0,-1\n1,0\n").string()),
                    ParseError);
    CHECK_THROWS_AS(read_population(write_text("r4", "errmat,v1,2,2,0\n0,inf\n1,0\n").string()),
                    ParseError);
    CHECK_THROWS_AS(read_population(write_text("r5", "errmat,v1,3,2,0\n0,1\n1,0\n").string()),
                    ParseError);  // truncated
}

TEST_CASE("niche map parsing") {
    const auto good = write_text(
        "n1", "errmat,v1,2,2,0\n0,1\n1,0\nindividual-niches,0,1\ncase-niches,0,1\n");
    const auto pop = read_population(good.string());
    CHECK(pop.individual_niche == std::vector<int>{0, 1});
    CHECK(pop.case_niche == std::vector<int>{0, 1});

    CHECK_THROWS_AS(
        read_population(
            write_text("n2", "errmat,v1,2,2,0\n0,1\n1,0\nindividual-niches,0\n").string()),
        ParseError);
    CHECK_THROWS_AS(
        read_population(
            write_text("n3", "errmat,v1,2,2,0\n0,1\n1,0\ncase-niches,0,-2\n").string()),
        ParseError);
    CHECK_THROWS_AS(
        read_population(write_text("n4", "errmat,v1,2,2,0\n0,1\n1,0\nwhatever,1\n").string()),
        ParseError);
    CHECK_THROWS_AS(
        read_population(write_text("n5", "errmat,v1,2,2,0\n0,1\n1,0\nindividual-niches,0,1\n"
                                         "individual-niches,0,1\n")
                            .string()),
        ParseError);
}

TEST_CASE("write_population validation") {
    const auto pop = make_niche_population(NicheLayout{2, 2, 2});
    CHECK_THROWS_AS(
        write_population(PopulationData{pop.matrix, {0}, {}}, temp_file("wv").string()),
        std::invalid_argument);
    const ErrorMatrix bad_label(1, 1, {0}, 0.0, "has,comma");
    CHECK_THROWS_AS(write_population(PopulationData{bad_label, {}, {}}, temp_file("wv").string()),
                    std::invalid_argument);
}

TEST_CASE("records round trip and canonical ordering") {
    std::vector<ResultRecord> records{
        record("pop-b", Method::rand, 0.1, 2, 2, 42, 20, 3),
        record("pop-a", Method::lex, 1.0, 1, 1, 7, 20, 0),
        record("pop-b", Method::rand, 0.1, 1, 5, 43, 20, 2),
        record("pop-b", Method::ids, 0.05, 1, 1, 44, 20, 1),
    };
    const auto path = temp_file("records");
    write_records(records, path.string());

    const auto text = slurp(path);
    CHECK(text.find("population_id,method,rate,rep_or_round,seed,coverage_before,"
                    "coverage_after,loss\n") == 0);
    // sorted by population, then method name, rate, replicate, index
    CHECK(text.find("pop-a,lex") < text.find("pop-b,ids"));
    CHECK(text.find("pop-b,ids") < text.find("pop-b,rand"));
    CHECK(text.find("pop-b,rand,0.1,5") < text.find("pop-b,rand,0.1,2"));  // replicate 1 first

    // shuffled input produces identical bytes
    std::vector<ResultRecord> shuffled{records[3], records[1], records[0], records[2]};
    const auto path2 = temp_file("records");
    write_records(shuffled, path2.string());
    CHECK(slurp(path) == slurp(path2));

    const auto back = read_records(path.string());
    REQUIRE(back.size() == 4);
    CHECK(back[0].population_id == "pop-a");
    CHECK(back[0].method == Method::lex);
    CHECK(back[0].rate == 1.0);
    CHECK(back[0].loss == 0);
    CHECK(back[1].method == Method::ids);
    CHECK(back[1].rate == 0.05);
    CHECK(back[1].seed == 44);
    CHECK(back[2].rep_or_round == 5);
    CHECK(back[3].rep_or_round == 2);
    CHECK(back[3].coverage_after == 17);
}

TEST_CASE("records writer rejects bad input") {
    CHECK_THROWS_AS(write_records(std::vector<ResultRecord>{}, temp_file("re").string()),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        write_records(std::vector<ResultRecord>{record("a,b", Method::lex, 1.0, 1, 1, 1, 5, 0)},
                      temp_file("re").string()),
        std::invalid_argument);
}

TEST_CASE("records reader diagnostics") {
    CHECK_THROWS_AS(read_records(write_text("c1", "wrong header\n").string()), ParseError);
    const std::string header =
        "population_id,method,rate,rep_or_round,seed,coverage_before,coverage_after,loss\n";
    CHECK_THROWS_AS(read_records(write_text("c2", header).string()), ParseError);  // no rows
    CHECK_THROWS_AS(read_records(write_text("c3", header + "p,nope,0.1,1,1,5,5,0\n").string()),
                    ParseError);
    CHECK_THROWS_AS(read_records(write_text("c4", header + "p,lex,0.1,1,1,5,5\n").string()),
                    ParseError);
    CHECK_THROWS_AS(read_records(write_text("c5", header + "p,lex,0.1,1,1,5,5,1\n").string()),
                    ParseError);  // loss != before - after
    CHECK_THROWS_AS(read_records(write_text("c6", header + "p,lex,2.0,1,1,5,5,0\n").string()),
                    ParseError);  // rate out of range
    const auto ok = read_records(write_text("c7", header + "p,lex,1,1,1,5,5,0\n").string());
    CHECK(ok.size() == 1);
}
