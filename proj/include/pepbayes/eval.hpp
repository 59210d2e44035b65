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
#include "pepbayes/random.hpp"

namespace pepbayes {

struct RocPoint {
    double cutoff = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

struct RocCurve {
    std::vector<RocPoint> points; // ordered by ascending cutoff
    double auc = 0.0;
};

namespace detail {

inline double fraction_at_or_above(const std::vector<double>& sorted, double cutoff) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), cutoff);
    return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

} // namespace detail

/// ROC curve from nonnegative scores: cutoffs evenly spaced on
/// [0, max(all scores)], a score at or above the cutoff predicting positive.
/// AUC is the trapezoidal area over (fpr, tpr) with the (0,0) limit anchored.
inline RocCurve roc(std::span<const double> pos_scores, std::span<const double> neg_scores,
                    std::size_t n_cutoffs = 1000) {
    if (pos_scores.empty() || neg_scores.empty())
        throw ValidationError("roc requires nonempty score lists");
    if (n_cutoffs < 2) throw ValidationError("roc needs at least 2 cutoffs");

    std::vector<double> pos(pos_scores.begin(), pos_scores.end());
    std::vector<double> neg(neg_scores.begin(), neg_scores.end());
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());
    const double max_score = std::max(pos.back(), neg.back());

    RocCurve curve;
    curve.points.reserve(n_cutoffs);
    for (std::size_t i = 0; i < n_cutoffs; ++i) {
        const double cutoff =
            max_score * static_cast<double>(i) / static_cast<double>(n_cutoffs - 1);
        curve.points.push_back({cutoff, detail::fraction_at_or_above(neg, cutoff),
                                detail::fraction_at_or_above(pos, cutoff)});
    }

    std::vector<std::pair<double, double>> xy;
    xy.reserve(curve.points.size() + 1);
    xy.emplace_back(0.0, 0.0);
    for (const auto& p : curve.points) xy.emplace_back(p.fpr, p.tpr);
    std::sort(xy.begin(), xy.end());
    double area = 0.0;
    for (std::size_t i = 1; i < xy.size(); ++i) {
        area += 0.5 * (xy[i].second + xy[i - 1].second) * (xy[i].first - xy[i - 1].first);
    }
    curve.auc = area;
    return curve;
}

/// The selection objective: sqrt(2*fpr^2 + (1-tpr)^2), weighting false
/// positives twice as heavily as missed positives.
inline double cutoff_objective(double fpr, double tpr) {
    return std::sqrt(2.0 * fpr * fpr + (1.0 - tpr) * (1.0 - tpr));
}

/// The ROC point minimizing the objective; ties broken by lower fpr, then by
/// higher cutoff.
inline RocPoint best_cutoff(const RocCurve& curve) {
    if (curve.points.empty()) throw ValidationError("best_cutoff on an empty curve");
    const RocPoint* best = &curve.points.front();
    double best_obj = cutoff_objective(best->fpr, best->tpr);
    for (const auto& p : curve.points) {
        const double obj = cutoff_objective(p.fpr, p.tpr);
        if (obj < best_obj ||
            (obj == best_obj &&
             (p.fpr < best->fpr || (p.fpr == best->fpr && p.cutoff > best->cutoff)))) {
            best = &p;
            best_obj = obj;
        }
    }
    return *best;
}

struct ConfusionSummary {
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double accuracy = 0.0;
    double mcc = 0.0;
};

/// Confusion counts at a cutoff (score >= cutoff predicts positive), with
/// accuracy and the Matthews correlation coefficient (0 when a marginal is
/// empty).
inline ConfusionSummary confusion(std::span<const double> pos_scores,
                                  std::span<const double> neg_scores, double cutoff) {
    if (pos_scores.empty() || neg_scores.empty())
        throw ValidationError("confusion requires nonempty score lists");
    ConfusionSummary c;
    for (double s : pos_scores) (s >= cutoff ? c.tp : c.fn) += 1;
    for (double s : neg_scores) (s >= cutoff ? c.fp : c.tn) += 1;
    const double total = static_cast<double>(c.tp + c.fp + c.tn + c.fn);
    c.accuracy = static_cast<double>(c.tp + c.tn) / total;
    const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
    const double tn = static_cast<double>(c.tn), fn = static_cast<double>(c.fn);
    const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    c.mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;
    return c;
}

/// Linear max-margin classifier over named rank vectors.
struct LinearSvm {
    std::vector<std::string> names;
    std::vector<double> weights; // one per descriptor
    double bias = 0.0;

    double decision(const RankVector& r) const {
        double d = bias;
        for (std::size_t i = 0; i < names.size(); ++i)
            d += weights[i] * static_cast<double>(r.value(names[i]));
        return d;
    }
};

/// Pegasos-style subgradient training of the hinge loss with L2 penalty.
inline LinearSvm train_linear_svm(const std::vector<RankVector>& train_pos,
                                  const std::vector<RankVector>& train_neg, std::size_t epochs,
                                  std::uint64_t seed, double regularization = 1e-3) {
    if (train_pos.empty() || train_neg.empty())
        throw ValidationError("svm training requires examples of both classes");

    const auto& names = train_pos.front().names;
    const std::size_t dim = names.size();
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto& r : train_pos) {
        std::vector<double> row(dim);
        for (std::size_t i = 0; i < dim; ++i) row[i] = r.value(names[i]);
        x.push_back(std::move(row));
        y.push_back(1.0);
    }
    for (const auto& r : train_neg) {
        std::vector<double> row(dim);
        for (std::size_t i = 0; i < dim; ++i) row[i] = r.value(names[i]);
        x.push_back(std::move(row));
        y.push_back(-1.0);
    }

    std::vector<double> w(dim + 1, 0.0); // last slot is the bias feature
    auto stream = rng::derive(seed, "svm");
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t t = 0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        stream.shuffle(order);
        for (auto idx : order) {
            ++t;
            const double eta = 1.0 / (regularization * static_cast<double>(t));
            double margin = w[dim];
            for (std::size_t i = 0; i < dim; ++i) margin += w[i] * x[idx][i];
            margin *= y[idx];
            const double shrink = 1.0 - eta * regularization;
            for (auto& wi : w) wi *= shrink;
            if (margin < 1.0) {
                for (std::size_t i = 0; i < dim; ++i) w[i] += eta * y[idx] * x[idx][i];
                w[dim] += eta * y[idx];
            }
        }
    }
    LinearSvm svm;
    svm.names = names;
    svm.weights.assign(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(dim));
    svm.bias = w[dim];
    return svm;
}

/// Train a linear SVM and evaluate it on the test split at its own best
/// cutoff over the decision values (shifted to be nonnegative, which leaves
/// the ranking unchanged).
inline ConfusionSummary svm_baseline(const std::vector<RankVector>& train_pos,
                                     const std::vector<RankVector>& train_neg,
                                     const std::vector<RankVector>& test_pos,
                                     const std::vector<RankVector>& test_neg,
                                     std::size_t epochs = 3000, std::uint64_t seed = 0) {
    const LinearSvm svm = train_linear_svm(train_pos, train_neg, epochs, seed);
    if (test_pos.empty() || test_neg.empty())
        throw ValidationError("svm evaluation requires nonempty test sets");

    std::vector<double> pos, neg;
    pos.reserve(test_pos.size());
    neg.reserve(test_neg.size());
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& r : test_pos) {
        pos.push_back(svm.decision(r));
        lowest = std::min(lowest, pos.back());
    }
    for (const auto& r : test_neg) {
        neg.push_back(svm.decision(r));
        lowest = std::min(lowest, neg.back());
    }
    for (auto& s : pos) s -= lowest;
    for (auto& s : neg) s -= lowest;

    const RocCurve curve = roc(pos, neg);
    const RocPoint best = best_cutoff(curve);
    return confusion(pos, neg, best.cutoff);
}

struct ScoredPeptide {
    std::string sequence;
    double score = 0.0;
};

/// Peptides scoring at or above the cutoff, sorted by descending score, with
/// an optional minimum-length filter.
inline std::vector<ScoredPeptide> screen(std::vector<ScoredPeptide> scored, double cutoff,
                                         std::size_t min_length = 0) {
    std::vector<ScoredPeptide> selected;
    for (auto& sp : scored) {
        if (sp.score >= cutoff && sp.sequence.size() >= min_length)
            selected.push_back(std::move(sp));
    }
    std::stable_sort(selected.begin(), selected.end(),
                     [](const ScoredPeptide& a, const ScoredPeptide& b) {
                         return a.score > b.score;
                     });
    return selected;
}

} // namespace pepbayes
