#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <sstream>

#include "pepbayes/dataset.hpp"

using namespace pepbayes;

namespace {

Peptide random_peptide(rng::Stream& stream, std::size_t length) {
    std::vector<std::uint8_t> idx(length);
    for (auto& r : idx)
        r = static_cast<std::uint8_t>(stream.uniform_int(Alphabet::canonical().size()));
    return Peptide::from_indices(std::move(idx));
}

PeptideDataset sequences_to_dataset(const std::vector<std::string>& seqs) {
    PeptideDataset data({}, "test");
    for (const auto& s : seqs) data.add({Peptide(s), std::nullopt, {}});
    return data;
}

std::map<std::string, std::size_t> sequence_multiset(const PeptideDataset& data) {
    std::map<std::string, std::size_t> counts;
    for (const auto& e : data.entries()) ++counts[e.peptide.str()];
    return counts;
}

} // namespace

TEST_CASE("canonical alphabet has 20 unique letters with total lookup") {
    const auto& ab = Alphabet::canonical();
    REQUIRE(ab.size() == 20);
    for (std::size_t i = 0; i < ab.size(); ++i) {
        REQUIRE(ab.index_of(ab.symbol(i)) == i);
    }
    REQUIRE_FALSE(ab.contains('B'));
    REQUIRE_FALSE(ab.contains('X'));
}

TEST_CASE("peptides round-trip through their string form") {
    REQUIRE(Peptide("EDGRT").str() == "EDGRT");
    REQUIRE(Peptide("edgrt").str() == "EDGRT"); // lowercase normalized on ingest

    auto stream = rng::derive(7, "roundtrip");
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_peptide(stream, 1 + stream.uniform_int(40));
        REQUIRE(Peptide(p.str()) == p);
    }

    REQUIRE_THROWS_AS(Peptide(""), ValidationError);
    REQUIRE_THROWS_AS(Peptide("ABC"), ValidationError);
}

TEST_CASE("parse_dataset reads header plus rows in order") {
    const std::string text = "sequence,net_charge,mass\nKKR,3,412.3\nAAA,0,213.1\n";
    const auto data = parse_dataset(text, DatasetSchema::with_descriptors);
    REQUIRE(data.size() == 2);
    REQUIRE(data.descriptor_names() == std::vector<std::string>{"net_charge", "mass"});
    REQUIRE(data[0].peptide.str() == "KKR");
    REQUIRE(data[0].descriptors == std::vector<double>{3.0, 412.3});
    REQUIRE(data[1].peptide.str() == "AAA");
}

TEST_CASE("parse_dataset reports bad letters with the line number") {
    const std::string text = "sequence\nAAA\nABA\n";
    try {
        parse_dataset(text, DatasetSchema::sequence_only);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("line 3") != std::string::npos);
        REQUIRE(msg.find("'B'") != std::string::npos);
    }
}

TEST_CASE("parse_dataset rejects ragged rows") {
    const std::string text = "sequence,mass\nAAA,213.1\nCCC\n";
    REQUIRE_THROWS_AS(parse_dataset(text, DatasetSchema::with_descriptors), FormatError);
}

TEST_CASE("parse_dataset keeps duplicate sequences (dedup is separate)") {
    const std::string text = "sequence\nAAA\nAAA\n";
    REQUIRE(parse_dataset(text, DatasetSchema::sequence_only).size() == 2);
}

TEST_CASE("parse_dataset accepts CRLF line endings") {
    const std::string text = "sequence,mass\r\nAAA,1.5\r\n";
    const auto data = parse_dataset(text, DatasetSchema::with_descriptors);
    REQUIRE(data.size() == 1);
    REQUIRE(data[0].descriptors[0] == 1.5);
}

TEST_CASE("dataset write/parse round-trips") {
    const std::string text = "sequence,mass\nKKR,412.25\nAAA,213.5\n";
    const auto data = parse_dataset(text, DatasetSchema::with_descriptors);
    std::ostringstream out;
    write_dataset(out, data);
    const auto again = parse_dataset(out.str(), DatasetSchema::with_descriptors);
    REQUIRE(again.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        REQUIRE(again[i].peptide == data[i].peptide);
        REQUIRE(again[i].descriptors == data[i].descriptors);
    }
}

TEST_CASE("dedup_similar drops sequences within two substitutions") {
    // EDGRT vs ADGRS differ at two positions, so they are similar.
    const auto out = dedup_similar(sequences_to_dataset({"EDGRT", "ADGRS"}));
    REQUIRE(out.size() == 1);
    REQUIRE(out[0].peptide.str() == "EDGRT");
}

TEST_CASE("dedup_similar keeps the first of an identical pair") {
    const auto out = dedup_similar(sequences_to_dataset({"KKAA", "KKAA"}));
    REQUIRE(out.size() == 1);
}

TEST_CASE("dedup_similar never compares across lengths") {
    const auto out = dedup_similar(sequences_to_dataset({"AAAA", "AAA"}));
    REQUIRE(out.size() == 2);
}

TEST_CASE("dedup_similar is idempotent and pairwise non-similar") {
    auto stream = rng::derive(11, "dedup");
    PeptideDataset data({}, "random");
    for (int i = 0; i < 300; ++i) {
        // short sequences over a small range of lengths force collisions
        data.add({random_peptide(stream, 3 + stream.uniform_int(3)), std::nullopt, {}});
    }
    const auto once = dedup_similar(data);
    const auto twice = dedup_similar(once);
    REQUIRE(once.size() == twice.size());
    for (std::size_t i = 0; i < once.size(); ++i) REQUIRE(once[i].peptide == twice[i].peptide);

    for (std::size_t i = 0; i < once.size(); ++i) {
        for (std::size_t j = i + 1; j < once.size(); ++j) {
            if (once[i].peptide.length() != once[j].peptide.length()) continue;
            REQUIRE(hamming_distance(once[i].peptide, once[j].peptide) > 2);
        }
    }
}

TEST_CASE("make_decoys preserves count and lengths") {
    const auto data = sequences_to_dataset({"KKR", "AAAAA", "EDGRT"});
    const auto decoys = make_decoys(data, pdb_residue_frequency(), 42);
    REQUIRE(decoys.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        REQUIRE(decoys[i].peptide.length() == data[i].peptide.length());
    REQUIRE(decoys.provenance() == "decoys");
}

TEST_CASE("make_decoys with a point mass produces a constant sequence") {
    std::vector<double> point(20, 0.0);
    point[0] = 1.0; // all mass on 'A'
    const ResidueFrequency freq(point);
    const auto decoys = make_decoys(sequences_to_dataset({"EDGRT"}), freq, 1);
    REQUIRE(decoys[0].peptide.str() == "AAAAA");
}

TEST_CASE("make_decoys matches the target composition over 1e5 residues") {
    const auto freq = pdb_residue_frequency();
    PeptideDataset data({}, "src");
    for (int i = 0; i < 2000; ++i) data.add({Peptide(std::string(50, 'A')), std::nullopt, {}});
    const auto decoys = make_decoys(data, freq, 9);

    std::vector<double> counts(20, 0.0);
    double total = 0.0;
    for (const auto& e : decoys.entries()) {
        for (auto r : e.peptide.residues()) {
            counts[r] += 1.0;
            total += 1.0;
        }
    }
    REQUIRE(total == 100000.0);
    for (std::size_t a = 0; a < 20; ++a) {
        REQUIRE(std::abs(counts[a] / total - freq[a]) < 0.01);
    }
}

TEST_CASE("make_decoys is deterministic given the seed") {
    const auto data = sequences_to_dataset({"EDGRT", "KKAA"});
    const auto first = make_decoys(data, pdb_residue_frequency(), 5);
    const auto second = make_decoys(data, pdb_residue_frequency(), 5);
    for (std::size_t i = 0; i < first.size(); ++i)
        REQUIRE(first[i].peptide == second[i].peptide);
}

TEST_CASE("split_dataset produces round(fraction*n) test entries") {
    PeptideDataset data({}, "d");
    auto stream = rng::derive(3, "split-data");
    for (int i = 0; i < 100; ++i) data.add({random_peptide(stream, 6), std::nullopt, {}});
    const auto [train, test] = split_dataset(data, 0.2, 17);
    REQUIRE(train.size() == 80);
    REQUIRE(test.size() == 20);
}

TEST_CASE("split_dataset is deterministic and partitions the input") {
    PeptideDataset data({}, "d");
    auto stream = rng::derive(4, "split-data");
    for (int i = 0; i < 57; ++i) data.add({random_peptide(stream, 8), std::nullopt, {}});

    const auto [train1, test1] = split_dataset(data, 0.2, 99);
    const auto [train2, test2] = split_dataset(data, 0.2, 99);
    REQUIRE(sequence_multiset(train1) == sequence_multiset(train2));
    REQUIRE(sequence_multiset(test1) == sequence_multiset(test2));

    auto combined = sequence_multiset(train1);
    for (const auto& [seq, count] : sequence_multiset(test1)) combined[seq] += count;
    REQUIRE(combined == sequence_multiset(data));
    REQUIRE(train1.size() + test1.size() == data.size());
}

TEST_CASE("split_dataset rejects tiny datasets and bad fractions") {
    const auto one = sequences_to_dataset({"AAA"});
    REQUIRE_THROWS_AS(split_dataset(one, 0.2, 1), ValidationError);
    const auto two = sequences_to_dataset({"AAA", "CCC"});
    REQUIRE_THROWS_AS(split_dataset(two, 0.0, 1), ValidationError);
    REQUIRE_THROWS_AS(split_dataset(two, 1.0, 1), ValidationError);
}

TEST_CASE("residue frequencies validate and normalize") {
    REQUIRE_THROWS_AS(ResidueFrequency(std::vector<double>(20, 0.1)), ValidationError);
    const auto uniform = ResidueFrequency::uniform();
    double sum = 0.0;
    for (double p : uniform.probabilities()) sum += p;
    REQUIRE(sum == Catch::Approx(1.0).margin(1e-12));

    std::istringstream table("symbol,probability\nA,2\nC,1\nD,1\nE,1\nF,1\nG,1\nH,1\nI,1\nK,1\n"
                             "L,1\nM,1\nN,1\nP,1\nQ,1\nR,1\nS,1\nT,1\nV,1\nW,1\nY,1\n");
    const auto freq = parse_frequency_table(table);
    REQUIRE(freq[0] == Catch::Approx(2.0 / 21.0));
}
