#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "pepbayes/properties.hpp"
#include "pepbayes/random.hpp"

using namespace pepbayes;

namespace {

const std::vector<std::string> kAllNames = descriptor_names_available();

Peptide random_peptide(rng::Stream& stream, std::size_t length) {
    std::vector<std::uint8_t> idx(length);
    for (auto& r : idx) r = static_cast<std::uint8_t>(stream.uniform_int(20));
    return Peptide::from_indices(std::move(idx));
}

/// Table whose mass column is constant and whose polar column has exactly
/// five ones; exercises the moment formulas at hand-checkable values.
ResiduePropertyTable synthetic_table() {
    std::vector<ResidueProperties> rows(20);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].mass = 7.5;
        rows[i].polar = i < 5 ? 1 : 0;
        rows[i].nonpolar = i < 5 ? 0 : 1;
    }
    return ResiduePropertyTable(std::move(rows));
}

} // namespace

TEST_CASE("a single residue reproduces its table row") {
    const auto& table = default_property_table();
    const auto dv = compute_descriptors(Peptide("K"), table, kAllNames);
    const auto k_row = table.row(*Alphabet::canonical().index_of('K'));
    REQUIRE(dv.value("charge") == k_row.charge);
    REQUIRE(dv.value("polar") == k_row.polar);
    REQUIRE(dv.value("nonpolar") == k_row.nonpolar);
    REQUIRE(dv.value("aromatic") == k_row.aromatic);
    REQUIRE(dv.value("hb_donors") == k_row.hb_donors);
    REQUIRE(dv.value("hb_acceptors") == k_row.hb_acceptors);
    REQUIRE(dv.value("mass") == k_row.mass);
    REQUIRE(dv.value("net_charge") == k_row.charge);
    REQUIRE(dv.value("n_charged") == 1.0);
}

TEST_CASE("descriptors are additive over concatenation") {
    const auto& table = default_property_table();
    auto stream = rng::derive(21, "concat");
    const std::vector<std::string> integer_names{"charge",    "polar",        "nonpolar",
                                                 "aromatic",  "hb_donors",    "hb_acceptors",
                                                 "net_charge", "n_charged"};
    for (int trial = 0; trial < 100; ++trial) {
        const auto s1 = random_peptide(stream, 1 + stream.uniform_int(15));
        const auto s2 = random_peptide(stream, 1 + stream.uniform_int(15));
        const auto joined = Peptide(s1.str() + s2.str());
        const auto d1 = compute_descriptors(s1, table, kAllNames);
        const auto d2 = compute_descriptors(s2, table, kAllNames);
        const auto dj = compute_descriptors(joined, table, kAllNames);
        for (const auto& name : integer_names) {
            REQUIRE(dj.value(name) == d1.value(name) + d2.value(name)); // exact: integer sums
        }
        REQUIRE(dj.value("mass") ==
                Catch::Approx(d1.value("mass") + d2.value("mass")).epsilon(1e-12));
    }
}

TEST_CASE("descriptors are invariant under residue permutation") {
    const auto& table = default_property_table();
    auto stream = rng::derive(22, "perm");
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_peptide(stream, 2 + stream.uniform_int(12));
        auto idx = p.residues();
        stream.shuffle(idx);
        const auto q = Peptide::from_indices(std::move(idx));
        const auto dp = compute_descriptors(p, table, kAllNames);
        const auto dq = compute_descriptors(q, table, kAllNames);
        for (const auto& name : kAllNames) {
            if (name == "mass") {
                REQUIRE(dp.value(name) == Catch::Approx(dq.value(name)).epsilon(1e-12));
            } else {
                REQUIRE(dp.value(name) == dq.value(name));
            }
        }
    }
}

TEST_CASE("KK has net_charge 2*charge(K) and n_charged 2 under the shipped table") {
    const auto& table = default_property_table();
    const auto dv = compute_descriptors(Peptide("KK"), table, {"net_charge", "n_charged"});
    const double k_charge = table.row(*Alphabet::canonical().index_of('K')).charge;
    REQUIRE(dv.value("net_charge") == 2.0 * k_charge);
    REQUIRE(dv.value("net_charge") == 2.0);
    REQUIRE(dv.value("n_charged") == 2.0);
}

TEST_CASE("n_charged dominates |net_charge| on random peptides") {
    const auto& table = default_property_table();
    auto stream = rng::derive(23, "ncharge");
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_peptide(stream, 1 + stream.uniform_int(30));
        const auto dv = compute_descriptors(p, table, {"net_charge", "n_charged"});
        REQUIRE(dv.value("n_charged") >= std::abs(dv.value("net_charge")));
    }
}

TEST_CASE("unknown descriptors list the available names; ALogP is called out") {
    const auto& table = default_property_table();
    try {
        compute_descriptors(Peptide("AA"), table, {"foo"});
        FAIL("expected an error");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        REQUIRE(msg.find("unknown descriptor 'foo'") != std::string::npos);
        REQUIRE(msg.find("net_charge") != std::string::npos);
        REQUIRE(msg.find("mass") != std::string::npos);
    }
    REQUIRE_THROWS_WITH(compute_descriptors(Peptide("AA"), table, {"ALogP"}),
                        Catch::Matchers::ContainsSubstring("unsupported"));
}

TEST_CASE("component moments: constant and indicator columns") {
    const auto table = synthetic_table();
    const auto [mass_mu, mass_var] = component_moments(table, "mass");
    REQUIRE(mass_mu == 7.5);
    REQUIRE(mass_var == 0.0);

    // indicator with exactly 5 of 20 ones: Bernoulli(0.25) population moments
    const auto [polar_mu, polar_var] = component_moments(table, "polar");
    REQUIRE(polar_mu == Catch::Approx(0.25).margin(1e-15));
    REQUIRE(polar_var == Catch::Approx(0.1875).margin(1e-15));
}

TEST_CASE("default-table mass moments match a brute-force recomputation") {
    const auto& table = default_property_table();
    const auto [mu, var] = component_moments(table, "mass");
    double mean = 0.0;
    for (std::size_t i = 0; i < 20; ++i) mean += table.row(i).mass;
    mean /= 20.0;
    double variance = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
        const double d = table.row(i).mass - mean;
        variance += d * d;
    }
    variance /= 20.0;
    REQUIRE(std::abs(mu - mean) < 1e-12);
    REQUIRE(std::abs(var - variance) < 1e-12);
}

TEST_CASE("property table CSV round-trips and validates") {
    const auto& table = default_property_table();
    std::ostringstream out;
    write_property_table(out, table);
    std::istringstream in(out.str());
    const auto again = parse_property_table(in);
    for (std::size_t i = 0; i < 20; ++i) {
        REQUIRE(again.row(i).charge == table.row(i).charge);
        REQUIRE(again.row(i).polar == table.row(i).polar);
        REQUIRE(again.row(i).mass == table.row(i).mass);
    }

    std::istringstream missing("symbol,charge,polar,nonpolar,aromatic,hb_donors,hb_acceptors,mass\n"
                               "A,0,0,1,0,0,0,71.03\n");
    REQUIRE_THROWS_AS(parse_property_table(missing), ValidationError);

    std::istringstream bad_header("symbol,charge\nA,0\n");
    REQUIRE_THROWS_AS(parse_property_table(bad_header), FormatError);
}

TEST_CASE("indicator and count invariants hold for the shipped table") {
    const auto& table = default_property_table();
    int aromatic_total = 0;
    for (std::size_t i = 0; i < 20; ++i) {
        const auto& r = table.row(i);
        REQUIRE((r.polar == 0 || r.polar == 1));
        REQUIRE((r.nonpolar == 0 || r.nonpolar == 1));
        REQUIRE((r.aromatic == 0 || r.aromatic == 1));
        REQUIRE(r.polar + r.nonpolar == 1); // shipped table partitions the alphabet
        REQUIRE(r.hb_donors >= 0);
        REQUIRE(r.hb_acceptors >= 0);
        REQUIRE(r.mass > 0.0);
        aromatic_total += r.aromatic;
    }
    REQUIRE(aromatic_total == 3); // F, W, Y
}
