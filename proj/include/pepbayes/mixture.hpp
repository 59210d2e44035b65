#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pepbayes/chemspace.hpp"
#include "pepbayes/error.hpp"
#include "pepbayes/mcmc.hpp"
#include "pepbayes/random.hpp"

namespace pepbayes {

struct GaussianKernel {
    double mean = 0.0;
    double sd = 1.0;
    double weight = 1.0;
};

/// Density of a weighted sum of Gaussian kernels at x.
inline double mixture_pdf(std::span<const GaussianKernel> kernels, double x) {
    constexpr double inv_sqrt_2pi = 0.3989422804014326779399460599344;
    double density = 0.0;
    for (const auto& k : kernels) {
        const double z = (x - k.mean) / k.sd;
        density += k.weight * inv_sqrt_2pi / k.sd * std::exp(-0.5 * z * z);
    }
    return density;
}

/// log mixture_pdf computed by logsumexp; stays finite far into the tails
/// where the plain density underflows.
inline double mixture_log_pdf(std::span<const GaussianKernel> kernels, double x) {
    constexpr double log_sqrt_2pi = 0.91893853320467274178032973640562;
    double max_term = -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(kernels.size());
    for (const auto& k : kernels) {
        const double z = (x - k.mean) / k.sd;
        const double t = (k.weight > 0.0 ? std::log(k.weight) : -std::numeric_limits<double>::infinity()) -
                         std::log(k.sd) - log_sqrt_2pi - 0.5 * z * z;
        terms.push_back(t);
        max_term = std::max(max_term, t);
    }
    if (!std::isfinite(max_term)) return max_term;
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - max_term);
    return max_term + std::log(sum);
}

struct MixtureTrainingInfo {
    std::size_t steps = 0;
    std::uint64_t seed = 0;
    double acceptance_rate = 0.0;
    std::vector<double> log_posterior_trace; // pooled across chains; not serialized
};

/// Two-state classifier: one k-kernel Gaussian mixture per (activity state,
/// descriptor), over rank values in [0, rank_scale].
class MixtureModel {
public:
    MixtureModel(int kernel_count, std::vector<std::string> names, double rank_scale = 100.0)
        : kernel_count_(kernel_count), names_(std::move(names)), rank_scale_(rank_scale) {
        if (kernel_count_ < 1 || kernel_count_ > 10)
            throw ValidationError("kernel count must be between 1 and 10");
        if (names_.empty()) throw ValidationError("mixture model needs at least one descriptor");
        if (!(rank_scale_ > 0.0)) throw ValidationError("rank scale must be positive");
        for (auto& state : kernels_)
            state.assign(names_.size(),
                         std::vector<GaussianKernel>(static_cast<std::size_t>(kernel_count_)));
    }

    int kernel_count() const { return kernel_count_; }
    double rank_scale() const { return rank_scale_; }
    const std::vector<std::string>& descriptor_names() const { return names_; }

    std::span<const GaussianKernel> kernels(int state, std::size_t descriptor) const {
        return kernels_[check_state(state)][descriptor];
    }
    std::vector<GaussianKernel>& kernels_mut(int state, std::size_t descriptor) {
        return kernels_[check_state(state)][descriptor];
    }

    const MixtureTrainingInfo& training_info() const { return info_; }
    MixtureTrainingInfo& training_info() { return info_; }

private:
    static std::size_t check_state(int state) {
        if (state != 0 && state != 1) throw ValidationError("state must be 0 or 1");
        return static_cast<std::size_t>(state);
    }

    int kernel_count_;
    std::vector<std::string> names_;
    double rank_scale_;
    std::vector<std::vector<GaussianKernel>> kernels_[2];
    MixtureTrainingInfo info_;
};

/// Uniform initialization: means on [0, Q], sds on (0, Q], weights 1/k.
inline MixtureModel init_mixture(int kernel_count, std::vector<std::string> names,
                                 std::uint64_t seed, double rank_scale = 100.0) {
    MixtureModel model(kernel_count, std::move(names), rank_scale);
    auto stream = rng::derive(seed, "qspr-init");
    for (int state = 0; state < 2; ++state) {
        for (std::size_t d = 0; d < model.descriptor_names().size(); ++d) {
            for (auto& kernel : model.kernels_mut(state, d)) {
                kernel.mean = stream.u01() * rank_scale;
                kernel.sd = stream.u01_open() * rank_scale;
                kernel.weight = 1.0 / kernel_count;
            }
        }
    }
    return model;
}

namespace detail {

// Chain state layout per (state, descriptor) block: k means, k log-sds,
// k-1 additive-logratio weight coordinates. Priors: means uniform on
// [0, Q], sds log-uniform on [0.1, Q], weights Dirichlet(1); the simplex is
// handled in logratio space with its Jacobian, so every visited state is a
// valid mixture by construction.
struct MixtureChainSpec {
    int k;
    double q_max;

    std::size_t dim() const { return static_cast<std::size_t>(3 * k - 1); }

    std::vector<double> pack(std::span<const GaussianKernel> kernels) const {
        std::vector<double> theta(dim());
        for (int j = 0; j < k; ++j) {
            theta[static_cast<std::size_t>(j)] = kernels[static_cast<std::size_t>(j)].mean;
            theta[static_cast<std::size_t>(k + j)] =
                std::log(kernels[static_cast<std::size_t>(j)].sd);
        }
        const double ref = kernels[static_cast<std::size_t>(k - 1)].weight;
        for (int j = 0; j + 1 < k; ++j)
            theta[static_cast<std::size_t>(2 * k + j)] =
                std::log(kernels[static_cast<std::size_t>(j)].weight / ref);
        return theta;
    }

    std::vector<GaussianKernel> unpack(std::span<const double> theta) const {
        std::vector<GaussianKernel> kernels(static_cast<std::size_t>(k));
        double max_y = 0.0;
        for (int j = 0; j + 1 < k; ++j)
            max_y = std::max(max_y, theta[static_cast<std::size_t>(2 * k + j)]);
        double denom = std::exp(0.0 - max_y);
        for (int j = 0; j + 1 < k; ++j)
            denom += std::exp(theta[static_cast<std::size_t>(2 * k + j)] - max_y);
        for (int j = 0; j < k; ++j) {
            const double y = (j + 1 < k) ? theta[static_cast<std::size_t>(2 * k + j)] : 0.0;
            kernels[static_cast<std::size_t>(j)].mean = theta[static_cast<std::size_t>(j)];
            kernels[static_cast<std::size_t>(j)].sd =
                std::exp(theta[static_cast<std::size_t>(k + j)]);
            kernels[static_cast<std::size_t>(j)].weight = std::exp(y - max_y) / denom;
        }
        return kernels;
    }

    double log_target(std::span<const double> theta, std::span<const double> data) const {
        const double log_sd_lo = std::log(0.1);
        const double log_sd_hi = std::log(q_max);
        for (int j = 0; j < k; ++j) {
            const double mean = theta[static_cast<std::size_t>(j)];
            if (mean < 0.0 || mean > q_max) return -std::numeric_limits<double>::infinity();
            const double log_sd = theta[static_cast<std::size_t>(k + j)];
            if (log_sd < log_sd_lo || log_sd > log_sd_hi)
                return -std::numeric_limits<double>::infinity();
        }
        const auto kernels = unpack(theta);
        double lp = 0.0;
        for (const auto& kernel : kernels) lp += std::log(kernel.weight); // simplex Jacobian
        for (double x : data) lp += mixture_log_pdf(kernels, x);
        return lp;
    }

    void propose(std::vector<double>& theta, rng::Stream& stream) const {
        for (int j = 0; j < k; ++j) {
            theta[static_cast<std::size_t>(j)] += stream.normal(0.0, 2.0);
            theta[static_cast<std::size_t>(k + j)] += stream.normal(0.0, 0.1);
        }
        for (int j = 0; j + 1 < k; ++j)
            theta[static_cast<std::size_t>(2 * k + j)] += stream.normal(0.0, 0.1);
    }
};

inline std::vector<double> extract_column(const std::vector<RankVector>& ranks,
                                          const std::string& name) {
    std::vector<double> column;
    column.reserve(ranks.size());
    for (const auto& r : ranks) column.push_back(static_cast<double>(r.value(name)));
    return column;
}

} // namespace detail

/// Random-walk Metropolis training. State-1 mixtures fit the positive ranks,
/// state-0 the negatives, one independent chain per (state, descriptor).
/// Returned kernels are posterior means over the second half of each chain.
inline MixtureModel mh_train(const MixtureModel& model, const std::vector<RankVector>& positives,
                             const std::vector<RankVector>& negatives, std::size_t steps,
                             std::uint64_t seed) {
    if (positives.empty() || negatives.empty())
        throw ValidationError("training requires nonempty positive and negative sets");

    MixtureModel trained = model;
    auto& info = trained.training_info();
    info.steps = steps;
    info.seed = seed;
    info.acceptance_rate = 0.0;
    info.log_posterior_trace.clear();
    if (steps == 0) return trained;

    const detail::MixtureChainSpec spec{model.kernel_count(), model.rank_scale()};
    std::size_t total_accepted = 0;
    std::size_t total_steps = 0;

    for (int state = 0; state < 2; ++state) {
        const auto& data_set = (state == 1) ? positives : negatives;
        for (std::size_t d = 0; d < model.descriptor_names().size(); ++d) {
            const auto column = detail::extract_column(data_set, model.descriptor_names()[d]);
            auto stream = rng::derive(seed, "qspr-mh", static_cast<std::uint64_t>(state), d);

            auto theta = spec.pack(model.kernels(state, d));
            int attempts = 0;
            while (!std::isfinite(spec.log_target(theta, column))) {
                if (++attempts > 10)
                    throw Error("non-finite posterior after 10 initialization attempts");
                for (int j = 0; j < spec.k; ++j) {
                    theta[static_cast<std::size_t>(j)] = stream.u01() * spec.q_max;
                    theta[static_cast<std::size_t>(spec.k + j)] =
                        std::log(stream.u01_open() * spec.q_max);
                }
            }

            const std::size_t keep_from = steps / 2;
            std::vector<double> mean_sum(static_cast<std::size_t>(spec.k), 0.0);
            std::vector<double> sd_sum(static_cast<std::size_t>(spec.k), 0.0);
            std::vector<double> weight_sum(static_cast<std::size_t>(spec.k), 0.0);
            std::size_t step_index = 0;
            std::size_t kept = 0;

            auto stats = run_metropolis(
                theta, [&](const std::vector<double>& t) { return spec.log_target(t, column); },
                [&](std::vector<double>& t, rng::Stream& s) { spec.propose(t, s); }, steps,
                stream, [&](const std::vector<double>& t) {
                    if (step_index++ >= keep_from) {
                        const auto kernels = spec.unpack(t);
                        for (int j = 0; j < spec.k; ++j) {
                            mean_sum[static_cast<std::size_t>(j)] +=
                                kernels[static_cast<std::size_t>(j)].mean;
                            sd_sum[static_cast<std::size_t>(j)] +=
                                kernels[static_cast<std::size_t>(j)].sd;
                            weight_sum[static_cast<std::size_t>(j)] +=
                                kernels[static_cast<std::size_t>(j)].weight;
                        }
                        ++kept;
                    }
                });

            auto& out = trained.kernels_mut(state, d);
            for (int j = 0; j < spec.k; ++j) {
                out[static_cast<std::size_t>(j)].mean =
                    mean_sum[static_cast<std::size_t>(j)] / static_cast<double>(kept);
                out[static_cast<std::size_t>(j)].sd =
                    sd_sum[static_cast<std::size_t>(j)] / static_cast<double>(kept);
                out[static_cast<std::size_t>(j)].weight =
                    weight_sum[static_cast<std::size_t>(j)] / static_cast<double>(kept);
            }
            total_accepted += stats.accepted;
            total_steps += steps;
            info.log_posterior_trace.insert(info.log_posterior_trace.end(),
                                            stats.log_posterior_trace.begin(),
                                            stats.log_posterior_trace.end());
        }
    }
    info.acceptance_rate = static_cast<double>(total_accepted) / static_cast<double>(total_steps);
    return trained;
}

/// Log-likelihood of a rank vector under one activity state: descriptors are
/// independent, so per-descriptor log densities add.
inline double qspr_log_likelihood(const MixtureModel& model, int state, const RankVector& ranks) {
    double total = 0.0;
    for (std::size_t d = 0; d < model.descriptor_names().size(); ++d) {
        const double x = ranks.value(model.descriptor_names()[d]);
        total += mixture_log_pdf(model.kernels(state, d), x);
    }
    return total;
}

/// Posterior probability of state 1 under equal state priors, in [0, 1].
inline double qspr_score(const MixtureModel& model, const RankVector& ranks) {
    const double l0 = qspr_log_likelihood(model, 0, ranks);
    const double l1 = qspr_log_likelihood(model, 1, ranks);
    if (l0 == l1) return 0.5; // covers identical mixtures and the double -inf corner
    return 1.0 / (1.0 + std::exp(l0 - l1));
}

} // namespace pepbayes
