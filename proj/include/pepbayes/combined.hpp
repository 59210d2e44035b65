#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "pepbayes/chemspace.hpp"
#include "pepbayes/error.hpp"
#include "pepbayes/eval.hpp"
#include "pepbayes/mixture.hpp"
#include "pepbayes/motif.hpp"

namespace pepbayes {

/// A peptide together with its descriptor ranks; the unit the combined model
/// consumes (the QSPR half reads the ranks, the motif half the sequence).
struct RankedPeptide {
    Peptide peptide;
    RankVector ranks;
};

/// Per-half normalizers: the maximum log-likelihood each half assigns to any
/// reference entry. Likelihood ratios are exponentiated against these, so
/// normalized likelihoods live in (0, 1] with the best reference entry at 1.
struct Normalizers {
    double qspr_log_max = 0.0;
    double motif_log_max = 0.0;
};

inline Normalizers calibrate(const MixtureModel& qspr, const MotifModel& motif,
                             std::span<const RankedPeptide> reference) {
    if (reference.empty()) throw ValidationError("calibration reference must not be empty");
    Normalizers norm{-std::numeric_limits<double>::infinity(),
                     -std::numeric_limits<double>::infinity()};
    for (const auto& entry : reference) {
        norm.qspr_log_max = std::max(norm.qspr_log_max, qspr_log_likelihood(qspr, 1, entry.ranks));
        norm.motif_log_max = std::max(norm.motif_log_max, seq_log_likelihood(motif, entry.peptide));
    }
    if (!std::isfinite(norm.qspr_log_max))
        throw Error("calibration failed: every QSPR likelihood is zero on the reference set");
    if (!std::isfinite(norm.motif_log_max))
        throw Error("calibration failed: every motif likelihood is zero on the reference set");
    return norm;
}

/// Weighted combination of the two trained halves. W is the motif weight;
/// 1-W goes to the QSPR half.
class CombinedModel {
public:
    CombinedModel(const MixtureModel& qspr, const MotifModel& motif, double weight)
        : qspr_(&qspr), motif_(&motif), weight_(weight) {
        if (weight_ < 0.0 || weight_ > 1.0)
            throw ValidationError("combined weight must be in [0, 1]");
    }

    void set_normalizers(const Normalizers& norm) {
        norm_ = norm;
        calibrated_ = true;
    }
    void calibrate_on(std::span<const RankedPeptide> reference) {
        set_normalizers(calibrate(*qspr_, *motif_, reference));
    }

    bool calibrated() const { return calibrated_; }
    double weight() const { return weight_; }
    void set_weight(double w) {
        if (w < 0.0 || w > 1.0) throw ValidationError("combined weight must be in [0, 1]");
        weight_ = w;
    }
    const Normalizers& normalizers() const { return norm_; }
    const MixtureModel& qspr() const { return *qspr_; }
    const MotifModel& motif() const { return *motif_; }

private:
    const MixtureModel* qspr_;
    const MotifModel* motif_;
    double weight_;
    Normalizers norm_{};
    bool calibrated_ = false;
};

inline double normalized_qspr_likelihood(const CombinedModel& model, const RankVector& ranks) {
    return std::exp(qspr_log_likelihood(model.qspr(), 1, ranks) - model.normalizers().qspr_log_max);
}

inline double normalized_motif_likelihood(const CombinedModel& model, const Peptide& p) {
    return std::exp(seq_log_likelihood(model.motif(), p) - model.normalizers().motif_log_max);
}

/// (1-W) * normalized QSPR likelihood + W * normalized motif likelihood.
inline double combined_score(const CombinedModel& model, const Peptide& p,
                             const RankVector& ranks) {
    if (!model.calibrated()) throw Error("combined model has not been calibrated");
    return (1.0 - model.weight()) * normalized_qspr_likelihood(model, ranks) +
           model.weight() * normalized_motif_likelihood(model, p);
}

inline double combined_score(const CombinedModel& model, const RankedPeptide& entry) {
    return combined_score(model, entry.peptide, entry.ranks);
}

struct SweepRow {
    double weight = 0.0;
    double cutoff = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
    double accuracy = 0.0;
    double mcc = 0.0;
};

/// Evaluate the combined classifier over a grid of weights: per W, build the
/// ROC from combined scores, select the best cutoff, and report the
/// confusion metrics there. Calibrates against `reference` when given,
/// otherwise against positives + negatives.
inline std::vector<SweepRow> weight_sweep(const MixtureModel& qspr, const MotifModel& motif,
                                          const std::vector<RankedPeptide>& positives,
                                          const std::vector<RankedPeptide>& negatives,
                                          const std::vector<double>& grid,
                                          const std::vector<RankedPeptide>* reference = nullptr,
                                          std::size_t n_cutoffs = 1000) {
    if (grid.empty()) throw ValidationError("weight grid must not be empty");
    for (double w : grid) {
        if (w < 0.0 || w > 1.0) throw ValidationError("weights must be in [0, 1]");
    }
    if (positives.empty() || negatives.empty())
        throw ValidationError("weight sweep requires nonempty evaluation sets");

    Normalizers norm;
    if (reference) {
        norm = calibrate(qspr, motif, *reference);
    } else {
        std::vector<RankedPeptide> pooled = positives;
        pooled.insert(pooled.end(), negatives.begin(), negatives.end());
        norm = calibrate(qspr, motif, pooled);
    }

    CombinedModel model(qspr, motif, 0.0);
    model.set_normalizers(norm);

    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (double w : grid) {
        model.set_weight(w);
        std::vector<double> pos_scores, neg_scores;
        pos_scores.reserve(positives.size());
        neg_scores.reserve(negatives.size());
        for (const auto& entry : positives) pos_scores.push_back(combined_score(model, entry));
        for (const auto& entry : negatives) neg_scores.push_back(combined_score(model, entry));
        const RocCurve curve = roc(pos_scores, neg_scores, n_cutoffs);
        const RocPoint best = best_cutoff(curve);
        const ConfusionSummary c = confusion(pos_scores, neg_scores, best.cutoff);
        rows.push_back({w, best.cutoff, best.fpr, best.tpr, c.accuracy, c.mcc});
    }
    return rows;
}

} // namespace pepbayes
