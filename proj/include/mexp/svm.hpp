#pragma once

#include <span>
#include <vector>

#include "mexp/core.hpp"

namespace mexp {

struct SvmOptions {
    double reg_c = 1.0;        // C of the hinge-loss term
    double gap_tol = 1e-4;     // stop when primal - dual <= gap_tol
    int max_epochs = 1000;
};

/// One binary classifier of the one-vs-one ensemble: score = w.x + bias,
/// positive scores vote for class `positive`.
struct PairwiseClassifier {
    int positive = 0;
    int negative = 1;
    std::vector<double> weights;
    double bias = 0.0;
    int epochs = 0;
    double duality_gap = 0.0;

    double score(std::span<const double> x) const;
};

struct SvmModel {
    int classes = 0;
    int dimension = 0;
    /// Pairs (a, b) with a < b, ordered lexicographically.
    std::vector<PairwiseClassifier> pairs;
};

/// One-vs-one L2-regularised hinge-loss linear SVMs, each trained by dual
/// coordinate descent in a fixed cyclic order. The bias is learned as the
/// weight of a constant unit feature. Rows are put into a canonical order
/// before training, so the model does not depend on the input order.
SvmModel train_linear_svm(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                          int classes, const SvmOptions& options = {});

/// Majority vote over the pairwise classifiers. A zero score casts no vote.
/// Ties go to the larger summed signed margin, then to the lowest class id.
int predict(const SvmModel& model, std::span<const double> x);

/// Vote counts and summed margins behind predict(), for inspection.
struct VoteTally {
    std::vector<int> votes;
    std::vector<double> margins;
};
VoteTally tally_votes(const SvmModel& model, std::span<const double> x);

}  // namespace mexp
