#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pepbayes/alphabet.hpp"
#include "pepbayes/dataset.hpp"
#include "pepbayes/error.hpp"
#include "pepbayes/random.hpp"

namespace pepbayes {

/// Latent motif assignment of one peptide: a motif class and a 0-based
/// window start. Background-only models (k = 0) assign no motif.
struct Assignment {
    int motif = -1;
    std::size_t start = 0;

    bool has_motif() const { return motif >= 0; }
};

/// Per-coordinate SGD state: accumulated squared gradients plus the
/// regularization and noise hyperparameters.
struct SgdState {
    std::vector<double> grad_sq;
    double lambda = 1.0;
    double noise_prob = 0.05;
    double epsilon = 1e-8;
    std::size_t resets = 0; // degenerate-update recoveries
};

/// One constrained AdaGrad-style step on a categorical distribution.
/// Gradient of the squared-count loss with L1 term: g = 2N(N*X - m) + lambda;
/// per-coordinate rate 1/sqrt(G + g^2 + eps); the result is projected back
/// onto the simplex by clipping negatives and renormalizing.
inline std::pair<std::vector<double>, SgdState> sgd_update(std::vector<double> x,
                                                           std::vector<double> observed,
                                                           double total, SgdState state,
                                                           rng::Stream& stream) {
    if (x.size() != observed.size()) throw ValidationError("sgd_update: size mismatch");
    if (!(total >= 1.0)) throw ValidationError("sgd_update: N must be >= 1");
    if (state.grad_sq.empty()) state.grad_sq.assign(x.size(), 0.0);
    if (state.grad_sq.size() != x.size())
        throw ValidationError("sgd_update: accumulator size mismatch");

    if (state.noise_prob > 0.0 && stream.u01() < state.noise_prob)
        observed[stream.uniform_int(observed.size())] += 1.0;

    double sum = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double g = 2.0 * total * (total * x[c] - observed[c]) + state.lambda;
        if (g != 0.0) {
            const double rate = 1.0 / std::sqrt(state.grad_sq[c] + g * g + state.epsilon);
            x[c] -= rate * g;
        }
        state.grad_sq[c] += g * g;
        if (x[c] < 0.0) x[c] = 0.0;
        sum += x[c];
    }
    if (sum == 0.0) {
        x.assign(x.size(), 1.0 / static_cast<double>(x.size()));
        ++state.resets;
    } else {
        for (double& v : x) v /= sum;
    }
    return {std::move(x), std::move(state)};
}

struct MotifTrainingInfo {
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::vector<double> loss_trace; // squared-count loss per sweep, pre-update
};

/// Sparse motif + tied-background sequence model: k motif classes of fixed
/// width w (each position a categorical over the alphabet), one background
/// distribution shared by all non-motif positions, and a class prior. The
/// k = 0, w = 0 model is the background-only limiting case and runs through
/// the same code paths.
class MotifModel {
public:
    MotifModel(int motif_count, int width, const Alphabet& alphabet = Alphabet::canonical(),
               double lambda = 1.0, double noise_prob = 0.05, bool train_class_prior = true)
        : motif_count_(motif_count), width_(width), alphabet_(&alphabet), lambda_(lambda),
          noise_prob_(noise_prob), train_class_prior_(train_class_prior) {
        if (motif_count_ < 0 || width_ < 0)
            throw ValidationError("motif count and width must be nonnegative");
        if ((motif_count_ == 0) != (width_ == 0))
            throw ValidationError("width must be 0 exactly when the motif count is 0");
        if (lambda_ < 0.0 || noise_prob_ < 0.0 || noise_prob_ > 1.0)
            throw ValidationError("bad regularization or noise setting");
        const auto a = alphabet.size();
        const double uniform = 1.0 / static_cast<double>(a);
        background_.assign(a, uniform);
        if (motif_count_ > 0) {
            class_prior_.assign(static_cast<std::size_t>(motif_count_),
                                1.0 / static_cast<double>(motif_count_));
            theta_.assign(static_cast<std::size_t>(motif_count_),
                          std::vector<std::vector<double>>(static_cast<std::size_t>(width_),
                                                           std::vector<double>(a, uniform)));
            theta_sgd_.assign(static_cast<std::size_t>(motif_count_),
                              std::vector<SgdState>(static_cast<std::size_t>(width_),
                                                    make_sgd_state()));
            pi_sgd_ = make_sgd_state();
        }
        phi_sgd_ = make_sgd_state();
    }

    int motif_count() const { return motif_count_; }
    int width() const { return width_; }
    const Alphabet& alphabet() const { return *alphabet_; }
    double lambda() const { return lambda_; }
    double noise_prob() const { return noise_prob_; }
    bool trains_class_prior() const { return train_class_prior_; }

    const std::vector<double>& background() const { return background_; }
    const std::vector<double>& class_prior() const { return class_prior_; }
    const std::vector<double>& motif_position(int m, int j) const {
        return theta_[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)];
    }

    std::vector<double>& background_mut() { return background_; }
    std::vector<double>& class_prior_mut() { return class_prior_; }
    std::vector<double>& motif_position_mut(int m, int j) {
        return theta_[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)];
    }

    SgdState& background_sgd() { return phi_sgd_; }
    SgdState& class_prior_sgd() { return pi_sgd_; }
    SgdState& motif_position_sgd(int m, int j) {
        return theta_sgd_[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)];
    }
    const SgdState& background_sgd() const { return phi_sgd_; }
    const SgdState& class_prior_sgd() const { return pi_sgd_; }
    const SgdState& motif_position_sgd(int m, int j) const {
        return theta_sgd_[static_cast<std::size_t>(m)][static_cast<std::size_t>(j)];
    }

    /// Trainable categoricals over the alphabet: k*w motif positions plus the
    /// single tied background.
    std::size_t alphabet_distribution_count() const {
        return static_cast<std::size_t>(motif_count_) * static_cast<std::size_t>(width_) + 1;
    }

    const MotifTrainingInfo& training_info() const { return info_; }
    MotifTrainingInfo& training_info() { return info_; }

    /// Consensus string: the argmax residue of each motif position.
    std::string consensus(int m) const {
        std::string s;
        for (int j = 0; j < width_; ++j) {
            const auto& dist = motif_position(m, j);
            const auto best = std::max_element(dist.begin(), dist.end()) - dist.begin();
            s.push_back(alphabet_->symbol(static_cast<std::size_t>(best)));
        }
        return s;
    }

private:
    SgdState make_sgd_state() const {
        SgdState s;
        s.lambda = lambda_;
        s.noise_prob = noise_prob_;
        return s;
    }

    int motif_count_;
    int width_;
    const Alphabet* alphabet_;
    double lambda_;
    double noise_prob_;
    bool train_class_prior_;
    std::vector<std::vector<std::vector<double>>> theta_; // [motif][position][symbol]
    std::vector<double> background_;
    std::vector<double> class_prior_;
    std::vector<std::vector<SgdState>> theta_sgd_;
    SgdState phi_sgd_;
    SgdState pi_sgd_;
    MotifTrainingInfo info_;
};

namespace detail {

inline double logsumexp(std::span<const double> terms) {
    double max_term = -std::numeric_limits<double>::infinity();
    for (double t : terms) max_term = std::max(max_term, t);
    if (!std::isfinite(max_term)) return max_term;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    return max_term + std::log(sum);
}

inline double safe_log(double p) {
    return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

/// Log weight of every (motif m, start i) assignment of a peptide:
/// log pi_m - log(l-w+1) + background outside the window + motif inside.
/// Index layout: m * (l-w+1) + i. Requires k > 0 and l >= w.
inline std::vector<double> assignment_log_terms(const MotifModel& model, const Peptide& p) {
    const auto l = p.length();
    const auto w = static_cast<std::size_t>(model.width());
    const auto k = model.motif_count();
    if (l < w)
        throw ValidationError("sequence of length " + std::to_string(l) +
                              " is shorter than the motif width " + std::to_string(w) +
                              "; motifs may not be partially expressed");
    const std::size_t starts = l - w + 1;

    // Background log-probabilities as prefix sums; -inf entries tracked by
    // count so window exclusion never subtracts infinities.
    std::vector<double> prefix(l + 1, 0.0);
    std::vector<std::size_t> inf_count(l + 1, 0);
    for (std::size_t j = 0; j < l; ++j) {
        const double lp = safe_log(model.background()[p[j]]);
        prefix[j + 1] = prefix[j] + (std::isfinite(lp) ? lp : 0.0);
        inf_count[j + 1] = inf_count[j] + (std::isfinite(lp) ? 0 : 1);
    }

    std::vector<double> terms(static_cast<std::size_t>(k) * starts);
    const double log_starts = std::log(static_cast<double>(starts));
    for (int m = 0; m < k; ++m) {
        const double log_pi = safe_log(model.class_prior()[static_cast<std::size_t>(m)]);
        for (std::size_t i = 0; i < starts; ++i) {
            double term = log_pi - log_starts;
            const std::size_t outside_inf =
                inf_count[l] - (inf_count[i + w] - inf_count[i]);
            if (outside_inf > 0) {
                term = -std::numeric_limits<double>::infinity();
            } else {
                term += prefix[l] - (prefix[i + w] - prefix[i]);
            }
            for (std::size_t j = 0; j < w && std::isfinite(term); ++j)
                term += safe_log(model.motif_position(m, static_cast<int>(j))[p[i + j]]);
            terms[static_cast<std::size_t>(m) * starts + i] = term;
        }
    }
    return terms;
}

} // namespace detail

/// Log-likelihood of a peptide: the mixture over motif classes and uniform
/// start positions, with the tied background generating everything outside
/// the window. For k = 0 this reduces exactly to the sum of background
/// log-probabilities.
inline double seq_log_likelihood(const MotifModel& model, const Peptide& p) {
    if (model.motif_count() == 0) {
        double total = 0.0;
        for (std::size_t j = 0; j < p.length(); ++j)
            total += detail::safe_log(model.background()[p[j]]);
        return total;
    }
    const auto terms = detail::assignment_log_terms(model, p);
    return detail::logsumexp(terms);
}

/// Sample a latent assignment proportionally to its likelihood term. When the
/// current model assigns zero mass to every assignment of this peptide, falls
/// back to a uniform draw so that training sweeps keep moving.
inline Assignment gibbs_assign(const MotifModel& model, const Peptide& p, rng::Stream& stream) {
    if (model.motif_count() == 0) return {};
    const auto terms = detail::assignment_log_terms(model, p);
    const std::size_t starts = p.length() - static_cast<std::size_t>(model.width()) + 1;
    double max_term = -std::numeric_limits<double>::infinity();
    for (double t : terms) max_term = std::max(max_term, t);

    std::size_t pick;
    if (!std::isfinite(max_term)) {
        pick = stream.uniform_int(terms.size());
    } else {
        std::vector<double> probs(terms.size());
        for (std::size_t i = 0; i < terms.size(); ++i) probs[i] = std::exp(terms[i] - max_term);
        pick = stream.categorical(probs);
    }
    return {static_cast<int>(pick / starts), pick % starts};
}

/// Most likely motif class for a peptide (per-class likelihood term, ties to
/// the lowest index). Errors for background-only models.
inline int best_motif(const MotifModel& model, const Peptide& p) {
    if (model.motif_count() == 0)
        throw ValidationError("best_motif is undefined for a background-only model");
    const auto terms = detail::assignment_log_terms(model, p);
    const std::size_t starts = p.length() - static_cast<std::size_t>(model.width()) + 1;
    int best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int m = 0; m < model.motif_count(); ++m) {
        const std::span<const double> block(terms.data() + static_cast<std::size_t>(m) * starts,
                                            starts);
        const double value = detail::logsumexp(block);
        if (value > best_value) {
            best_value = value;
            best = m;
        }
    }
    return best;
}

/// Number of dataset sequences containing `motif` as a contiguous substring
/// (each sequence counted at most once).
inline std::size_t count_containing(const PeptideDataset& data, std::string_view motif) {
    if (motif.empty()) throw ValidationError("motif string must not be empty");
    std::size_t count = 0;
    for (const auto& entry : data.entries()) {
        if (entry.peptide.str().find(motif) != std::string::npos) ++count;
    }
    return count;
}

/// Gibbs/SGD training: each sweep samples an assignment per peptide,
/// accumulates observed symbol counts per distribution, then applies one
/// sgd_update to every motif position, the background, and (optionally) the
/// class prior. Deterministic given (data, hyperparameters, seed).
inline MotifModel train_motif(const MotifModel& model, const PeptideDataset& data,
                              std::size_t iterations, std::uint64_t seed) {
    if (data.empty()) throw ValidationError("cannot train on an empty dataset");
    const auto k = model.motif_count();
    const auto w = static_cast<std::size_t>(model.width());
    if (k > 0) {
        for (const auto& entry : data.entries()) {
            if (entry.peptide.length() < w)
                throw ValidationError("sequence '" + entry.peptide.str() +
                                      "' is shorter than the motif width");
        }
    }

    MotifModel trained = model;
    auto& info = trained.training_info();
    info.seed = seed;
    const auto a = model.alphabet().size();

    std::vector<std::vector<std::vector<double>>> theta_counts;
    std::vector<double> phi_counts(a);
    std::vector<double> pi_counts;

    auto sweep_loss = [&](const std::vector<double>& x, const std::vector<double>& obs,
                          double total) {
        double loss = 0.0;
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double d = total * x[c] - obs[c];
            loss += d * d + trained.lambda() * std::abs(x[c]);
        }
        return loss;
    };

    for (std::size_t iter = 0; iter < iterations; ++iter) {
        if (k > 0) {
            theta_counts.assign(static_cast<std::size_t>(k),
                                std::vector<std::vector<double>>(w, std::vector<double>(a, 0.0)));
            pi_counts.assign(static_cast<std::size_t>(k), 0.0);
        }
        std::fill(phi_counts.begin(), phi_counts.end(), 0.0);

        for (std::size_t p_idx = 0; p_idx < data.size(); ++p_idx) {
            const auto& peptide = data[p_idx].peptide;
            auto stream = rng::derive(seed, "motif-gibbs", iter, p_idx);
            const Assignment assignment = gibbs_assign(trained, peptide, stream);
            if (assignment.has_motif()) {
                pi_counts[static_cast<std::size_t>(assignment.motif)] += 1.0;
                for (std::size_t j = 0; j < w; ++j)
                    theta_counts[static_cast<std::size_t>(assignment.motif)][j]
                                [peptide[assignment.start + j]] += 1.0;
                for (std::size_t j = 0; j < peptide.length(); ++j) {
                    if (j < assignment.start || j >= assignment.start + w)
                        phi_counts[peptide[j]] += 1.0;
                }
            } else {
                for (std::size_t j = 0; j < peptide.length(); ++j) phi_counts[peptide[j]] += 1.0;
            }
        }

        double loss = 0.0;
        std::uint64_t dist_index = 0;
        for (int m = 0; m < k; ++m) {
            const double assigned = pi_counts[static_cast<std::size_t>(m)];
            for (std::size_t j = 0; j < w; ++j, ++dist_index) {
                if (assigned < 1.0) continue; // class drew no peptides this sweep
                auto stream = rng::derive(seed, "motif-sgd", iter, dist_index);
                auto& x = trained.motif_position_mut(m, static_cast<int>(j));
                loss += sweep_loss(x, theta_counts[static_cast<std::size_t>(m)][j], assigned);
                auto [next, next_state] =
                    sgd_update(x, theta_counts[static_cast<std::size_t>(m)][j], assigned,
                               trained.motif_position_sgd(m, static_cast<int>(j)), stream);
                x = std::move(next);
                trained.motif_position_sgd(m, static_cast<int>(j)) = std::move(next_state);
            }
        }
        double background_total = 0.0;
        for (double c : phi_counts) background_total += c;
        ++dist_index;
        if (background_total >= 1.0) {
            auto stream = rng::derive(seed, "motif-sgd", iter, dist_index);
            loss += sweep_loss(trained.background_mut(), phi_counts, background_total);
            auto [next, next_state] = sgd_update(trained.background_mut(), phi_counts,
                                                 background_total, trained.background_sgd(),
                                                 stream);
            trained.background_mut() = std::move(next);
            trained.background_sgd() = std::move(next_state);
        }
        ++dist_index;
        if (k > 0 && trained.trains_class_prior()) {
            auto stream = rng::derive(seed, "motif-sgd", iter, dist_index);
            loss += sweep_loss(trained.class_prior_mut(), pi_counts,
                               static_cast<double>(data.size()));
            auto [next, next_state] =
                sgd_update(trained.class_prior_mut(), pi_counts,
                           static_cast<double>(data.size()), trained.class_prior_sgd(), stream);
            trained.class_prior_mut() = std::move(next);
            trained.class_prior_sgd() = std::move(next_state);
        }
        info.loss_trace.push_back(loss);
        ++info.iterations;
    }
    return trained;
}

} // namespace pepbayes
