#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pepbayes/alphabet.hpp"
#include "pepbayes/csv.hpp"
#include "pepbayes/error.hpp"
#include "pepbayes/random.hpp"

namespace pepbayes {

struct DatasetEntry {
    Peptide peptide;
    std::optional<int> label;        // activity class, when known
    std::vector<double> descriptors; // aligned with PeptideDataset::descriptor_names
};

/// An ordered list of peptides with optional shared descriptor columns and a
/// provenance tag (e.g. "positives", "decoys"). Immutable by convention once
/// built; all operations below return new datasets.
class PeptideDataset {
public:
    PeptideDataset() = default;
    PeptideDataset(std::vector<std::string> descriptor_names, std::string provenance)
        : descriptor_names_(std::move(descriptor_names)), provenance_(std::move(provenance)) {}

    void add(DatasetEntry entry) {
        if (entry.descriptors.size() != descriptor_names_.size())
            throw ValidationError("entry descriptor count does not match dataset columns");
        entries_.push_back(std::move(entry));
    }

    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const DatasetEntry& operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<DatasetEntry>& entries() const { return entries_; }
    const std::vector<std::string>& descriptor_names() const { return descriptor_names_; }
    const std::string& provenance() const { return provenance_; }
    void set_provenance(std::string p) { provenance_ = std::move(p); }

    std::vector<std::string> sequences() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& e : entries_) out.push_back(e.peptide.str());
        return out;
    }

private:
    std::vector<std::string> descriptor_names_;
    std::string provenance_;
    std::vector<DatasetEntry> entries_;
};

enum class DatasetSchema { sequence_only, with_descriptors };

/// Parse a comma-separated dataset: header row, first column `sequence`,
/// remaining columns descriptor names. Order is preserved and duplicates are
/// kept (dedup is a separate pass).
inline PeptideDataset parse_dataset(std::istream& in, DatasetSchema schema,
                                    const Alphabet& alphabet = Alphabet::canonical(),
                                    std::string provenance = {}) {
    const csv::Table table = csv::read(in);
    if (table.header.empty() || table.header[0] != "sequence")
        throw FormatError("header must start with a 'sequence' column");
    std::vector<std::string> names(table.header.begin() + 1, table.header.end());
    if (schema == DatasetSchema::sequence_only && !names.empty())
        throw FormatError("expected a sequence-only file but found descriptor columns");
    if (schema == DatasetSchema::with_descriptors && names.empty())
        throw FormatError("expected descriptor columns but found none");

    PeptideDataset data(std::move(names), std::move(provenance));
    std::size_t line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        DatasetEntry entry{[&] {
                               try {
                                   return Peptide(row[0], alphabet);
                               } catch (const ValidationError& e) {
                                   throw ValidationError("line " + std::to_string(line_no) +
                                                         ": " + e.what());
                               }
                           }(),
                           std::nullopt,
                           {}};
        entry.descriptors.reserve(row.size() - 1);
        for (std::size_t c = 1; c < row.size(); ++c)
            entry.descriptors.push_back(csv::parse_real(row[c], line_no));
        data.add(std::move(entry));
    }
    return data;
}

inline PeptideDataset parse_dataset(const std::string& text, DatasetSchema schema,
                                    const Alphabet& alphabet = Alphabet::canonical(),
                                    std::string provenance = {}) {
    std::istringstream in(text);
    return parse_dataset(in, schema, alphabet, std::move(provenance));
}

inline void write_dataset(std::ostream& out, const PeptideDataset& data) {
    std::vector<std::string> header{"sequence"};
    header.insert(header.end(), data.descriptor_names().begin(), data.descriptor_names().end());
    csv::write_row(out, header);
    std::ostringstream num;
    num.precision(17);
    for (const auto& e : data.entries()) {
        std::vector<std::string> row{e.peptide.str()};
        for (double v : e.descriptors) {
            num.str({});
            num << v;
            row.push_back(num.str());
        }
        csv::write_row(out, row);
    }
}

/// Greedy similarity dedup: scan in input order; keep an entry iff no
/// already-kept entry of equal length is within Hamming distance max_subs.
inline PeptideDataset dedup_similar(const PeptideDataset& data, std::size_t max_subs = 2) {
    PeptideDataset kept(data.descriptor_names(), data.provenance());
    for (const auto& entry : data.entries()) {
        bool similar = false;
        for (const auto& other : kept.entries()) {
            if (other.peptide.length() != entry.peptide.length()) continue;
            if (hamming_distance(other.peptide, entry.peptide) <= max_subs) {
                similar = true;
                break;
            }
        }
        if (!similar) kept.add(entry);
    }
    return kept;
}

/// Per-symbol probability over an alphabet; entries are nonnegative and sum
/// to 1 (validated to 1e-9).
class ResidueFrequency {
public:
    ResidueFrequency(std::vector<double> probabilities,
                     const Alphabet& alphabet = Alphabet::canonical())
        : alphabet_(&alphabet), probabilities_(std::move(probabilities)) {
        if (probabilities_.size() != alphabet.size())
            throw ValidationError("frequency table size does not match alphabet");
        double sum = 0.0;
        for (double p : probabilities_) {
            if (p < 0.0) throw ValidationError("frequencies must be nonnegative");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw ValidationError("frequencies must sum to 1 (got " + std::to_string(sum) + ")");
    }

    /// Build from unnormalized nonnegative weights.
    static ResidueFrequency from_weights(std::vector<double> weights,
                                         const Alphabet& alphabet = Alphabet::canonical()) {
        double sum = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw ValidationError("weights must be nonnegative");
            sum += w;
        }
        if (!(sum > 0.0)) throw ValidationError("weights must not all be zero");
        for (double& w : weights) w /= sum;
        return ResidueFrequency(std::move(weights), alphabet);
    }

    static ResidueFrequency uniform(const Alphabet& alphabet = Alphabet::canonical()) {
        return ResidueFrequency(
            std::vector<double>(alphabet.size(), 1.0 / static_cast<double>(alphabet.size())),
            alphabet);
    }

    double operator[](std::size_t i) const { return probabilities_[i]; }
    const std::vector<double>& probabilities() const { return probabilities_; }
    const Alphabet& alphabet() const { return *alphabet_; }

private:
    const Alphabet* alphabet_;
    std::vector<double> probabilities_;
};

/// Amino-acid composition of Protein Data Bank entries. The exact values are
/// a configurable input, not a canonical constant; this is the shipped
/// default, editable via data/pdb_frequencies.csv.
inline ResidueFrequency pdb_residue_frequency(const Alphabet& alphabet = Alphabet::canonical()) {
    // Order follows the canonical alphabet ACDEFGHIKLMNPQRSTVWY.
    std::vector<double> weights{
        0.0858, 0.0127, 0.0584, 0.0668, 0.0402, 0.0755, 0.0236,
        0.0571, 0.0576, 0.0915, 0.0215, 0.0423, 0.0457, 0.0378,
        0.0496, 0.0602, 0.0546, 0.0704, 0.0135, 0.0346};
    if (alphabet.size() != weights.size())
        throw ValidationError("default PDB composition is defined for the canonical alphabet");
    return ResidueFrequency::from_weights(std::move(weights), alphabet);
}

/// Frequency table file: `symbol,probability`, one row per amino acid.
inline ResidueFrequency parse_frequency_table(std::istream& in,
                                              const Alphabet& alphabet = Alphabet::canonical()) {
    const csv::Table table = csv::read(in);
    if (table.header.size() != 2 || table.header[0] != "symbol" ||
        table.header[1] != "probability")
        throw FormatError("frequency table header must be 'symbol,probability'");
    std::vector<double> probs(alphabet.size(), -1.0);
    std::size_t line_no = 1;
    for (const auto& row : table.rows) {
        ++line_no;
        if (row[0].size() != 1 || !alphabet.contains(row[0][0]))
            throw ValidationError("line " + std::to_string(line_no) + ": unknown symbol '" +
                                  row[0] + "'");
        probs[*alphabet.index_of(row[0][0])] = csv::parse_real(row[1], line_no);
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < 0.0)
            throw ValidationError(std::string("missing frequency for symbol '") +
                                  alphabet.symbol(i) + "'");
    }
    return ResidueFrequency::from_weights(std::move(probs), alphabet);
}

inline void write_frequency_table(std::ostream& out, const ResidueFrequency& freq) {
    out << "symbol,probability\n";
    std::ostringstream num;
    num.precision(17);
    for (std::size_t i = 0; i < freq.alphabet().size(); ++i) {
        num.str({});
        num << freq[i];
        out << freq.alphabet().symbol(i) << ',' << num.str() << '\n';
    }
}

/// One decoy per input entry, same length, residues drawn independently from
/// freq. Deterministic given the seed. Descriptor columns are dropped (they
/// would describe the source sequence, not the decoy).
inline PeptideDataset make_decoys(const PeptideDataset& data, const ResidueFrequency& freq,
                                  std::uint64_t seed) {
    const Alphabet& alphabet = freq.alphabet();
    PeptideDataset decoys({}, "decoys");
    auto stream = rng::derive(seed, "decoys");
    for (const auto& entry : data.entries()) {
        std::vector<std::uint8_t> residues(entry.peptide.length());
        for (auto& r : residues)
            r = static_cast<std::uint8_t>(stream.categorical(freq.probabilities()));
        decoys.add({Peptide::from_indices(std::move(residues), alphabet), 0, {}});
    }
    return decoys;
}

/// Random partition into (train, test) with |test| = round(test_fraction*n).
/// Entries keep their original relative order inside each part.
inline std::pair<PeptideDataset, PeptideDataset> split_dataset(const PeptideDataset& data,
                                                               double test_fraction,
                                                               std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ValidationError("test_fraction must be in (0, 1)");
    if (data.size() < 2) throw ValidationError("cannot split a dataset with fewer than 2 entries");

    const auto n = data.size();
    const auto test_size =
        static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    auto stream = rng::derive(seed, "split");
    stream.shuffle(order);

    std::vector<bool> in_test(n, false);
    for (std::size_t i = 0; i < test_size; ++i) in_test[order[i]] = true;

    PeptideDataset train(data.descriptor_names(), data.provenance());
    PeptideDataset test(data.descriptor_names(), data.provenance());
    for (std::size_t i = 0; i < n; ++i) {
        (in_test[i] ? test : train).add(data[i]);
    }
    return {std::move(train), std::move(test)};
}

} // namespace pepbayes
