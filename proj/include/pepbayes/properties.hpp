#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pepbayes/alphabet.hpp"
#include "pepbayes/csv.hpp"
#include "pepbayes/error.hpp"

namespace pepbayes {

/// Additive per-residue contributions for one amino acid. Charges are
/// side-chain charges in elementary units (terminal groups excluded);
/// masses are monoisotopic residue masses in Daltons.
struct ResidueProperties {
    double charge = 0.0;
    int polar = 0;
    int nonpolar = 0;
    int aromatic = 0;
    int hb_donors = 0;
    int hb_acceptors = 0;
    double mass = 0.0;
};

inline const std::vector<std::string>& property_column_names() {
    static const std::vector<std::string> names{
        "charge", "polar", "nonpolar", "aromatic", "hb_donors", "hb_acceptors", "mass"};
    return names;
}

inline const std::vector<std::string>& descriptor_names_available() {
    static const std::vector<std::string> names{
        "charge", "polar",     "nonpolar",     "aromatic", "hb_donors",
        "hb_acceptors", "mass", "net_charge", "n_charged"};
    return names;
}

/// Per-amino-acid property table with one row per alphabet symbol.
class ResiduePropertyTable {
public:
    ResiduePropertyTable(std::vector<ResidueProperties> rows,
                         const Alphabet& alphabet = Alphabet::canonical())
        : alphabet_(&alphabet), rows_(std::move(rows)) {
        if (rows_.size() != alphabet.size())
            throw ValidationError("property table must have one row per alphabet symbol");
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            const auto& r = rows_[i];
            const std::string sym(1, alphabet.symbol(i));
            auto indicator = [&](int v, const char* col) {
                if (v != 0 && v != 1)
                    throw ValidationError("row '" + sym + "': " + col + " must be 0 or 1");
            };
            indicator(r.polar, "polar");
            indicator(r.nonpolar, "nonpolar");
            indicator(r.aromatic, "aromatic");
            if (r.hb_donors < 0 || r.hb_acceptors < 0)
                throw ValidationError("row '" + sym + "': H-bond counts must be nonnegative");
            if (!(r.mass > 0.0))
                throw ValidationError("row '" + sym + "': mass must be positive");
        }
    }

    const Alphabet& alphabet() const { return *alphabet_; }
    const ResidueProperties& row(std::size_t residue) const { return rows_[residue]; }

    /// Per-residue contribution of a descriptor, including the derived names
    /// `net_charge` (signed charge sum) and `n_charged` (charged-residue count).
    double contribution(std::string_view name, std::size_t residue) const {
        const auto& r = rows_[residue];
        if (name == "charge" || name == "net_charge") return r.charge;
        if (name == "n_charged") return r.charge != 0.0 ? 1.0 : 0.0;
        if (name == "polar") return r.polar;
        if (name == "nonpolar") return r.nonpolar;
        if (name == "aromatic") return r.aromatic;
        if (name == "hb_donors") return r.hb_donors;
        if (name == "hb_acceptors") return r.hb_acceptors;
        if (name == "mass") return r.mass;
        throw_unknown(name);
    }

    [[noreturn]] static void throw_unknown(std::string_view name) {
        std::string lowered(name);
        std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (lowered == "alogp")
            throw ValidationError("descriptor 'ALogP' is unsupported (not additive over residues)");
        std::string msg = "unknown descriptor '" + std::string(name) + "'; available:";
        for (const auto& n : descriptor_names_available()) msg += " " + n;
        throw ValidationError(msg);
    }

private:
    const Alphabet* alphabet_;
    std::vector<ResidueProperties> rows_;
};

/// The shipped default table (editable copy in data/residue_properties.csv):
/// D/E carry charge -1 and K/R +1 (H neutral by default); F/W/Y are aromatic;
/// H-bond donors count side-chain N-H/O-H bonds and acceptors count side-chain
/// N/O atoms; masses are monoisotopic residue masses.
inline const ResiduePropertyTable& default_property_table() {
    static const ResiduePropertyTable table(
        {
            // charge polar nonpolar aromatic donors acceptors mass
            {0.0, 0, 1, 0, 0, 0, 71.03711},   // A
            {0.0, 1, 0, 0, 0, 0, 103.00919},  // C
            {-1.0, 1, 0, 0, 1, 2, 115.02694}, // D
            {-1.0, 1, 0, 0, 1, 2, 129.04259}, // E
            {0.0, 0, 1, 1, 0, 0, 147.06841},  // F
            {0.0, 0, 1, 0, 0, 0, 57.02146},   // G
            {0.0, 1, 0, 0, 1, 2, 137.05891},  // H
            {0.0, 0, 1, 0, 0, 0, 113.08406},  // I
            {1.0, 1, 0, 0, 2, 1, 128.09496},  // K
            {0.0, 0, 1, 0, 0, 0, 113.08406},  // L
            {0.0, 0, 1, 0, 0, 0, 131.04049},  // M
            {0.0, 1, 0, 0, 2, 2, 114.04293},  // N
            {0.0, 0, 1, 0, 0, 0, 97.05276},   // P
            {0.0, 1, 0, 0, 2, 2, 128.05858},  // Q
            {1.0, 1, 0, 0, 5, 3, 156.10111},  // R
            {0.0, 1, 0, 0, 1, 1, 87.03203},   // S
            {0.0, 1, 0, 0, 1, 1, 101.04768},  // T
            {0.0, 0, 1, 0, 0, 0, 99.06841},   // V
            {0.0, 0, 1, 1, 1, 1, 186.07931},  // W
            {0.0, 1, 0, 1, 1, 1, 163.06333},  // Y
        },
        Alphabet::canonical());
    return table;
}

/// Named descriptor values for one peptide.
struct DescriptorVector {
    std::vector<std::string> names;
    std::vector<double> values;

    double value(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return values[i];
        }
        throw ValidationError("descriptor '" + std::string(name) + "' not present");
    }
};

/// Group-wise additive descriptors: each value is the sum over residues of
/// that residue's table contribution.
inline DescriptorVector compute_descriptors(const Peptide& peptide,
                                            const ResiduePropertyTable& table,
                                            const std::vector<std::string>& names) {
    DescriptorVector out;
    out.names = names;
    out.values.reserve(names.size());
    for (const auto& name : names) {
        double sum = 0.0;
        for (auto residue : peptide.residues()) sum += table.contribution(name, residue);
        out.values.push_back(sum);
    }
    return out;
}

/// Population mean and variance (divide by A, not A-1) of a descriptor over
/// the alphabet's residues.
inline std::pair<double, double> component_moments(const ResiduePropertyTable& table,
                                                   std::string_view name) {
    const auto a = table.alphabet().size();
    double mean = 0.0;
    for (std::size_t i = 0; i < a; ++i) mean += table.contribution(name, i);
    mean /= static_cast<double>(a);
    double var = 0.0;
    for (std::size_t i = 0; i < a; ++i) {
        const double d = table.contribution(name, i) - mean;
        var += d * d;
    }
    var /= static_cast<double>(a);
    return {mean, var};
}

/// Property table file: `symbol,charge,polar,nonpolar,aromatic,hb_donors,hb_acceptors,mass`.
inline ResiduePropertyTable parse_property_table(std::istream& in,
                                                 const Alphabet& alphabet = Alphabet::canonical()) {
    const csv::Table table = csv::read(in);
    std::vector<std::string> expected{"symbol"};
    expected.insert(expected.end(), property_column_names().begin(), property_column_names().end());
    if (table.header != expected)
        throw FormatError("property table header must be "
                          "'symbol,charge,polar,nonpolar,aromatic,hb_donors,hb_acceptors,mass'");
    std::vector<ResidueProperties> rows(alphabet.size());
    std::vector<bool> seen(alphabet.size(), false);
    std::size_t line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        if (row[0].size() != 1 || !alphabet.contains(row[0][0]))
            throw ValidationError("line " + std::to_string(line_no) + ": unknown symbol '" +
                                  row[0] + "'");
        const auto idx = *alphabet.index_of(row[0][0]);
        ResidueProperties p;
        p.charge = csv::parse_real(row[1], line_no);
        p.polar = static_cast<int>(csv::parse_real(row[2], line_no));
        p.nonpolar = static_cast<int>(csv::parse_real(row[3], line_no));
        p.aromatic = static_cast<int>(csv::parse_real(row[4], line_no));
        p.hb_donors = static_cast<int>(csv::parse_real(row[5], line_no));
        p.hb_acceptors = static_cast<int>(csv::parse_real(row[6], line_no));
        p.mass = csv::parse_real(row[7], line_no);
        rows[idx] = p;
        seen[idx] = true;
    }
    for (std::size_t i = 0; i < seen.size(); ++i) {
        if (!seen[i])
            throw ValidationError(std::string("missing property row for symbol '") +
                                  alphabet.symbol(i) + "'");
    }
    return ResiduePropertyTable(std::move(rows), alphabet);
}

inline void write_property_table(std::ostream& out, const ResiduePropertyTable& table) {
    out << "symbol,charge,polar,nonpolar,aromatic,hb_donors,hb_acceptors,mass\n";
    std::ostringstream num;
    num.precision(17);
    for (std::size_t i = 0; i < table.alphabet().size(); ++i) {
        const auto& r = table.row(i);
        num.str({});
        num << r.charge;
        out << table.alphabet().symbol(i) << ',' << num.str() << ',' << r.polar << ','
            << r.nonpolar << ',' << r.aromatic << ',' << r.hb_donors << ',' << r.hb_acceptors
            << ',';
        num.str({});
        num << r.mass;
        out << num.str() << '\n';
    }
}

} // namespace pepbayes
