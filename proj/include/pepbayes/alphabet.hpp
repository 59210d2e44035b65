#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pepbayes/error.hpp"

namespace pepbayes {

/// Ordered set of single-letter residue codes. The default is the 20
/// canonical amino acids in alphabetical order.
class Alphabet {
public:
    explicit Alphabet(std::string_view symbols) : symbols_(symbols) {
        index_.fill(-1);
        if (symbols_.empty()) throw ValidationError("alphabet must not be empty");
        for (std::size_t i = 0; i < symbols_.size(); ++i) {
            const auto c = static_cast<unsigned char>(symbols_[i]);
            if (index_[c] != -1)
                throw ValidationError(std::string("duplicate alphabet symbol '") + symbols_[i] + "'");
            index_[c] = static_cast<int>(i);
        }
    }

    static const Alphabet& canonical() {
        static const Alphabet instance("ACDEFGHIKLMNPQRSTVWY");
        return instance;
    }

    std::size_t size() const { return symbols_.size(); }
    char symbol(std::size_t index) const { return symbols_[index]; }
    const std::string& symbols() const { return symbols_; }

    std::optional<std::size_t> index_of(char c) const {
        const int i = index_[static_cast<unsigned char>(c)];
        if (i < 0) return std::nullopt;
        return static_cast<std::size_t>(i);
    }

    bool contains(char c) const { return index_[static_cast<unsigned char>(c)] >= 0; }

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::string symbols_;
    std::array<int, 256> index_{};
};

/// A validated residue sequence. Stores alphabet indices; round-trips
/// losslessly through its single-letter string form. Lowercase input is
/// accepted and normalized to uppercase.
class Peptide {
public:
    Peptide(std::string_view sequence, const Alphabet& alphabet = Alphabet::canonical())
        : alphabet_(&alphabet) {
        if (sequence.empty()) throw ValidationError("peptide must have length >= 1");
        residues_.reserve(sequence.size());
        for (char raw : sequence) {
            const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
            const auto idx = alphabet.index_of(c);
            if (!idx) {
                throw ValidationError(std::string("letter '") + raw +
                                      "' is not in the alphabet");
            }
            residues_.push_back(static_cast<std::uint8_t>(*idx));
        }
    }

    static Peptide from_indices(std::vector<std::uint8_t> indices,
                                const Alphabet& alphabet = Alphabet::canonical()) {
        if (indices.empty()) throw ValidationError("peptide must have length >= 1");
        for (auto i : indices) {
            if (i >= alphabet.size()) throw ValidationError("residue index out of range");
        }
        Peptide p;
        p.alphabet_ = &alphabet;
        p.residues_ = std::move(indices);
        return p;
    }

    std::size_t length() const { return residues_.size(); }
    std::uint8_t operator[](std::size_t i) const { return residues_[i]; }
    const std::vector<std::uint8_t>& residues() const { return residues_; }
    const Alphabet& alphabet() const { return *alphabet_; }

    std::string str() const {
        std::string s;
        s.reserve(residues_.size());
        for (auto i : residues_) s.push_back(alphabet_->symbol(i));
        return s;
    }

    bool operator==(const Peptide& other) const { return residues_ == other.residues_; }

private:
    Peptide() = default;

    const Alphabet* alphabet_ = nullptr;
    std::vector<std::uint8_t> residues_;
};

/// Hamming distance; defined only for equal lengths (substitutions preserve
/// length), so unequal lengths are reported as "never similar" by callers.
inline std::size_t hamming_distance(const Peptide& a, const Peptide& b) {
    if (a.length() != b.length())
        throw ValidationError("hamming distance requires equal lengths");
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.length(); ++i) {
        if (a[i] != b[i]) ++d;
    }
    return d;
}

} // namespace pepbayes
