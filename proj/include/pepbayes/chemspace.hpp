#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "pepbayes/alphabet.hpp"
#include "pepbayes/error.hpp"
#include "pepbayes/properties.hpp"
#include "pepbayes/random.hpp"

namespace pepbayes {

/// Combinatorial peptide library: all sequences of the given lengths, with a
/// per-residue weight scheme. A compound's weight is the product of its
/// residue weights, so uniform weights give Z = A^l exactly.
class ChemicalSpace {
public:
    explicit ChemicalSpace(std::vector<std::size_t> lengths,
                           const Alphabet& alphabet = Alphabet::canonical(),
                           std::vector<double> residue_weights = {})
        : alphabet_(&alphabet), lengths_(std::move(lengths)),
          residue_weights_(std::move(residue_weights)) {
        if (lengths_.empty()) throw ValidationError("chemical space needs at least one length");
        for (auto l : lengths_) {
            if (l < 1) throw ValidationError("lengths must be >= 1");
        }
        std::sort(lengths_.begin(), lengths_.end());
        lengths_.erase(std::unique(lengths_.begin(), lengths_.end()), lengths_.end());
        if (residue_weights_.empty()) residue_weights_.assign(alphabet.size(), 1.0);
        if (residue_weights_.size() != alphabet.size())
            throw ValidationError("residue weight count must match the alphabet");
        double sum = 0.0;
        for (double w : residue_weights_) {
            if (w < 0.0) throw ValidationError("residue weights must be nonnegative");
            sum += w;
        }
        if (!(sum > 0.0)) throw ValidationError("residue weights must not all be zero");
    }

    explicit ChemicalSpace(std::size_t length, const Alphabet& alphabet = Alphabet::canonical(),
                           std::vector<double> residue_weights = {})
        : ChemicalSpace(std::vector<std::size_t>{length}, alphabet, std::move(residue_weights)) {}

    const Alphabet& alphabet() const { return *alphabet_; }
    const std::vector<std::size_t>& lengths() const { return lengths_; }
    const std::vector<double>& residue_weights() const { return residue_weights_; }
    bool single_length() const { return lengths_.size() == 1; }

    double residue_weight_sum() const {
        double sum = 0.0;
        for (double w : residue_weights_) sum += w;
        return sum;
    }

    /// Total weight of all compounds of one length: (sum of residue weights)^l.
    double length_weight(std::size_t length) const {
        const double base = residue_weight_sum();
        double z = 1.0;
        for (std::size_t i = 0; i < length; ++i) z *= base;
        return z;
    }

    /// Partition value Z = sum of all compound weights.
    double partition() const {
        double z = 0.0;
        for (auto l : lengths_) z += length_weight(l);
        return z;
    }

    /// Number of distinct sequences (A^l summed over lengths).
    double sequence_count() const {
        const auto a = static_cast<double>(alphabet_->size());
        double total = 0.0;
        for (auto l : lengths_) {
            double n = 1.0;
            for (std::size_t i = 0; i < l; ++i) n *= a;
            total += n;
        }
        return total;
    }

    /// Weight fraction carried by the longest two lengths (1 when fewer than
    /// two lengths exist). For lengths 1..L this is at least 1 - 1/A^2.
    double top_two_length_fraction() const {
        if (lengths_.size() < 2) return 1.0;
        const double top = length_weight(lengths_.back()) + length_weight(lengths_[lengths_.size() - 2]);
        return top / partition();
    }

private:
    const Alphabet* alphabet_;
    std::vector<std::size_t> lengths_;
    std::vector<double> residue_weights_;
};

inline constexpr double kEnumerationCap = 1e7;

enum class DistributionKind { exact, normal_approx, sampled };

/// Probability model of a descriptor over a chemical space, in one of three
/// forms, plus optional quantile boundaries used for ranking.
struct DescriptorDistribution {
    DistributionKind kind = DistributionKind::exact;
    std::string descriptor;

    // exact: sorted unique values with probability masses (sum 1).
    std::vector<double> support;
    std::vector<double> masses;

    // normal_approx: matched first two moments of the additive sum.
    double mean = 0.0;
    double variance = 0.0;
    double zero_fraction = 0.0; // weight share of residues contributing 0
    bool zero_warning = false;  // set when zero_fraction >= 0.5

    // sampled: sorted draws, each carrying mass 1/n.
    std::vector<double> sample;

    std::vector<double> boundaries; // b_1..b_Q, nondecreasing
    int quantile_count = 0;         // Q; 0 until quantile_boundaries() ran

    double cdf(double x) const {
        switch (kind) {
        case DistributionKind::exact: {
            double cum = 0.0;
            for (std::size_t i = 0; i < support.size() && support[i] <= x; ++i) cum += masses[i];
            return cum;
        }
        case DistributionKind::normal_approx: {
            const double sd = std::sqrt(variance);
            return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
        }
        case DistributionKind::sampled: {
            const auto it = std::upper_bound(sample.begin(), sample.end(), x);
            return static_cast<double>(it - sample.begin()) / static_cast<double>(sample.size());
        }
        }
        return 0.0;
    }
};

namespace detail {

/// Visit every residue multiset of the space with its descriptor value and
/// total weight. For additive descriptors the value is permutation-invariant,
/// so enumerating multisets with multinomial multiplicities is the same full
/// enumeration as visiting all A^l sequences, with canonical floating-point
/// sums. Multiplicities stay below the enumeration cap, so they are exact.
template <class Fn>
void enumerate_space(const ChemicalSpace& space, const ResiduePropertyTable& table,
                     std::string_view name, Fn&& visit) {
    const auto a = space.alphabet().size();
    std::vector<double> contrib(a);
    for (std::size_t i = 0; i < a; ++i) contrib[i] = table.contribution(name, i);

    auto binomial = [](std::size_t n, std::size_t k) {
        double r = 1.0;
        for (std::size_t i = 1; i <= k; ++i)
            r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
        return r;
    };

    for (auto length : space.lengths()) {
        std::vector<std::size_t> idx(length, 0);
        std::vector<std::size_t> counts(a);
        while (true) {
            double value = 0.0;
            for (auto i : idx) value += contrib[i];

            std::fill(counts.begin(), counts.end(), 0);
            for (auto i : idx) ++counts[i];
            double multiplicity = 1.0;
            std::size_t used = 0;
            double weight_product = 1.0;
            for (std::size_t s = 0; s < a; ++s) {
                if (counts[s] == 0) continue;
                used += counts[s];
                multiplicity *= binomial(used, counts[s]);
                for (std::size_t c = 0; c < counts[s]; ++c)
                    weight_product *= space.residue_weights()[s];
            }
            visit(value, multiplicity * weight_product);

            std::size_t pos = length;
            while (pos > 0 && idx[pos - 1] == a - 1) --pos;
            if (pos == 0) break;
            ++idx[pos - 1];
            for (std::size_t q = pos; q < length; ++q) idx[q] = idx[pos - 1];
        }
    }
}

inline void check_enumerable(const ChemicalSpace& space) {
    if (space.sequence_count() > kEnumerationCap) {
        throw CapacityError("space has more than 1e7 sequences; use sample_distribution");
    }
}

} // namespace detail

/// Pr(f(c) = x) over the space by full enumeration: (1/Z) * sum of compound
/// weights whose descriptor value equals x (exact floating-point equality on
/// canonically computed values).
inline double prob_mass(const ChemicalSpace& space, const ResiduePropertyTable& table,
                        std::string_view name, double x) {
    detail::check_enumerable(space);
    double hit = 0.0;
    detail::enumerate_space(space, table, name,
                            [&](double value, double weight) {
                                if (value == x) hit += weight;
                            });
    return hit / space.partition();
}

/// Full histogram of descriptor values over the space.
inline DescriptorDistribution exact_distribution(const ChemicalSpace& space,
                                                 const ResiduePropertyTable& table,
                                                 std::string_view name) {
    detail::check_enumerable(space);
    std::map<double, double> histogram;
    detail::enumerate_space(space, table, name,
                            [&](double value, double weight) { histogram[value] += weight; });
    const double z = space.partition();
    DescriptorDistribution dist;
    dist.kind = DistributionKind::exact;
    dist.descriptor = std::string(name);
    dist.support.reserve(histogram.size());
    dist.masses.reserve(histogram.size());
    for (const auto& [value, weight] : histogram) {
        dist.support.push_back(value);
        dist.masses.push_back(weight / z);
    }
    return dist;
}

/// Sum-of-identical-normals approximation with mean l*mu and variance
/// l*sigma^2 (weighted component moments). Flags a diagnostic when at least
/// half the residue weight contributes a zero descriptor value, which is the
/// regime where the approximation is known to break down.
inline DescriptorDistribution normal_approx(const ChemicalSpace& space,
                                            const ResiduePropertyTable& table,
                                            std::string_view name) {
    if (!space.single_length())
        throw ValidationError("normal approximation requires a single-length space");
    const auto a = space.alphabet().size();
    const double wsum = space.residue_weight_sum();
    double mu = 0.0;
    double zero_weight = 0.0;
    for (std::size_t i = 0; i < a; ++i) {
        const double f = table.contribution(name, i);
        mu += space.residue_weights()[i] * f;
        if (f == 0.0) zero_weight += space.residue_weights()[i];
    }
    mu /= wsum;
    double sigma2 = 0.0;
    for (std::size_t i = 0; i < a; ++i) {
        const double d = table.contribution(name, i) - mu;
        sigma2 += space.residue_weights()[i] * d * d;
    }
    sigma2 /= wsum;
    if (!(sigma2 > 0.0))
        throw ValidationError("descriptor '" + std::string(name) +
                              "' is constant across residues; normal approximation is degenerate");

    const auto l = static_cast<double>(space.lengths().front());
    DescriptorDistribution dist;
    dist.kind = DistributionKind::normal_approx;
    dist.descriptor = std::string(name);
    dist.mean = l * mu;
    dist.variance = l * sigma2;
    dist.zero_fraction = zero_weight / wsum;
    dist.zero_warning = dist.zero_fraction >= 0.5;
    return dist;
}

/// Monte Carlo estimate: n sequences drawn by the weight scheme (length
/// proportional to its total weight, residues independently by weight).
inline DescriptorDistribution sample_distribution(const ChemicalSpace& space,
                                                  const ResiduePropertyTable& table,
                                                  std::string_view name, std::size_t n,
                                                  std::uint64_t seed) {
    if (n < 1) throw ValidationError("sample size must be >= 1");
    const auto a = space.alphabet().size();
    std::vector<double> contrib(a);
    for (std::size_t i = 0; i < a; ++i) contrib[i] = table.contribution(name, i);
    std::vector<double> length_weights;
    length_weights.reserve(space.lengths().size());
    for (auto l : space.lengths()) length_weights.push_back(space.length_weight(l));

    auto stream = rng::derive(seed, "space-sample");
    DescriptorDistribution dist;
    dist.kind = DistributionKind::sampled;
    dist.descriptor = std::string(name);
    dist.sample.reserve(n);
    for (std::size_t draw = 0; draw < n; ++draw) {
        const auto length = space.lengths()[stream.categorical(length_weights)];
        double value = 0.0;
        for (std::size_t j = 0; j < length; ++j)
            value += contrib[stream.categorical(space.residue_weights())];
        dist.sample.push_back(value);
    }
    std::sort(dist.sample.begin(), dist.sample.end());
    return dist;
}

/// Inverse standard normal CDF (Acklam's rational approximation with one
/// Halley refinement; full double precision over (0, 1)).
inline double inverse_normal_cdf(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = err * std::sqrt(2.0 * 3.141592653589793238462643383) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

/// Attach quantile boundaries b_q (q = 1..Q): the smallest x with
/// CDF(x) >= q/Q for exact/sampled kinds, the analytic inverse for the
/// normal kind (b_Q is +infinity there).
inline DescriptorDistribution quantile_boundaries(const DescriptorDistribution& input,
                                                  int quantiles = 100) {
    if (quantiles < 1) throw ValidationError("quantile count must be >= 1");
    DescriptorDistribution dist = input;
    dist.quantile_count = quantiles;
    dist.boundaries.clear();
    dist.boundaries.reserve(static_cast<std::size_t>(quantiles));
    constexpr double kTol = 1e-9; // absorbs cumulative-sum roundoff at exact quantile hits

    switch (dist.kind) {
    case DistributionKind::exact: {
        double cum = 0.0;
        double compensation = 0.0;
        std::vector<double> cumulative(dist.support.size());
        for (std::size_t i = 0; i < dist.masses.size(); ++i) {
            const double y = dist.masses[i] - compensation;
            const double t = cum + y;
            compensation = (t - cum) - y;
            cum = t;
            cumulative[i] = cum;
        }
        std::size_t idx = 0;
        for (int q = 1; q <= quantiles; ++q) {
            const double target = static_cast<double>(q) / quantiles - kTol;
            while (idx + 1 < cumulative.size() && cumulative[idx] < target) ++idx;
            dist.boundaries.push_back(dist.support[idx]);
        }
        break;
    }
    case DistributionKind::sampled: {
        const auto n = dist.sample.size();
        for (int q = 1; q <= quantiles; ++q) {
            const double pos = static_cast<double>(n) * q / quantiles - kTol;
            auto i = static_cast<std::size_t>(std::ceil(pos));
            i = std::min(std::max<std::size_t>(i, 1), n) - 1;
            dist.boundaries.push_back(dist.sample[i]);
        }
        break;
    }
    case DistributionKind::normal_approx: {
        const double sd = std::sqrt(dist.variance);
        for (int q = 1; q <= quantiles; ++q) {
            const double p = static_cast<double>(q) / quantiles;
            dist.boundaries.push_back(dist.mean + sd * inverse_normal_cdf(p));
        }
        break;
    }
    }
    return dist;
}

/// Quantile rank of a value. Values above the top boundary get rank Q;
/// everything else gets the first boundary at or above x, capped at Q-1 —
/// the top two quantile buckets share a rank, matching the published worked
/// example (with 4-quantile boundaries 5,6,7,15: 3 -> 1, 7 -> 3, 13 -> 3).
inline int rank_of(const DescriptorDistribution& dist, double x) {
    if (dist.quantile_count == 0 || dist.boundaries.empty())
        throw ValidationError("quantile boundaries have not been computed");
    const int q_count = dist.quantile_count;
    if (x > dist.boundaries.back()) return q_count;
    const auto it = std::lower_bound(dist.boundaries.begin(), dist.boundaries.end(), x);
    const int first_at_or_above = static_cast<int>(it - dist.boundaries.begin()) + 1;
    return std::max(1, std::min(first_at_or_above, q_count - 1));
}

/// Named integer ranks in [1, Q] for one peptide.
struct RankVector {
    std::vector<std::string> names;
    std::vector<int> values;

    int value(std::string_view name) const {
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == name) return values[i];
        }
        throw ValidationError("rank for descriptor '" + std::string(name) + "' not present");
    }
};

/// Rank every descriptor of `dv` against the matching distribution (matched
/// by stored descriptor name).
inline RankVector make_rank_vector(const std::vector<DescriptorDistribution>& distributions,
                                   const DescriptorVector& dv) {
    RankVector out;
    out.names = dv.names;
    out.values.reserve(dv.names.size());
    for (std::size_t i = 0; i < dv.names.size(); ++i) {
        const DescriptorDistribution* match = nullptr;
        for (const auto& dist : distributions) {
            if (dist.descriptor == dv.names[i]) {
                match = &dist;
                break;
            }
        }
        if (!match)
            throw ValidationError("no distribution for descriptor '" + dv.names[i] + "'");
        out.values.push_back(rank_of(*match, dv.values[i]));
    }
    return out;
}

} // namespace pepbayes
