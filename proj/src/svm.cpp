#include "mexp/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mexp {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Dual coordinate descent for
//   min_a  0.5 a^T Q a - e^T a,  0 <= a_i <= C,  Q_ij = y_i y_j x_i.x_j
// with x augmented by a constant 1 (bias). w = sum a_i y_i x_i.
PairwiseClassifier train_pair(const std::vector<const std::vector<double>*>& xs, const std::vector<int>& ys,
                              int dim, const SvmOptions& opt) {
    const std::size_t n = xs.size();
    std::vector<double> w(static_cast<std::size_t>(dim) + 1, 0.0);
    std::vector<double> alpha(n, 0.0);
    std::vector<double> qd(n);
    for (std::size_t i = 0; i < n; ++i) qd[i] = dot(*xs[i], *xs[i]) + 1.0;

    auto margin = [&](std::size_t i) {
        return dot(std::span<const double>(w).first(dim), *xs[i]) + w[dim];
    };

    PairwiseClassifier out;
    double gap = std::numeric_limits<double>::infinity();
    int epoch = 0;
    while (epoch < opt.max_epochs) {
        ++epoch;
        for (std::size_t i = 0; i < n; ++i) {
            const double yi = ys[i];
            const double g = yi * margin(i) - 1.0;
            double pg = g;
            if (alpha[i] == 0.0)
                pg = std::min(g, 0.0);
            else if (alpha[i] == opt.reg_c)
                pg = std::max(g, 0.0);
            if (std::abs(pg) <= 1e-12) continue;
            const double old = alpha[i];
            alpha[i] = std::clamp(old - g / qd[i], 0.0, opt.reg_c);
            const double d = (alpha[i] - old) * yi;
            const auto& x = *xs[i];
            for (int k = 0; k < dim; ++k) w[k] += d * x[k];
            w[dim] += d;
        }

        const double wsq = dot(w, w);
        double hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i) hinge += std::max(0.0, 1.0 - ys[i] * margin(i));
        const double primal = 0.5 * wsq + opt.reg_c * hinge;
        const double dual = std::accumulate(alpha.begin(), alpha.end(), 0.0) - 0.5 * wsq;
        gap = primal - dual;
        if (gap <= opt.gap_tol) break;
    }
    out.weights.assign(w.begin(), w.begin() + dim);
    out.bias = w[dim];
    out.epochs = epoch;
    out.duality_gap = gap;
    return out;
}

}  // namespace

double PairwiseClassifier::score(std::span<const double> x) const { return dot(weights, x) + bias; }

SvmModel train_linear_svm(const std::vector<std::vector<double>>& rows, std::span<const int> labels,
                          int classes, const SvmOptions& options) {
    if (!(options.reg_c > 0.0)) throw ConfigError("train_linear_svm: reg_c must be positive");
    if (rows.size() != labels.size()) throw ShapeError("train_linear_svm: rows and labels differ in length");
    if (rows.empty()) throw TrainingError("train_linear_svm: no training samples");
    const int dim = static_cast<int>(rows.front().size());
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != dim) throw ShapeError("train_linear_svm: ragged feature rows");
        for (double v : r)
            if (!std::isfinite(v)) throw InputError("train_linear_svm: non-finite feature");
    }
    for (int y : labels)
        if (y < 0 || y >= classes) throw DomainError("train_linear_svm: label out of range");

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (labels[a] != labels[b]) return labels[a] < labels[b];
        return rows[a] < rows[b];
    });

    std::vector<int> present;
    for (int c = 0; c < classes; ++c)
        if (std::find(labels.begin(), labels.end(), c) != labels.end()) present.push_back(c);
    if (present.size() < 2) throw TrainingError("train_linear_svm: training data holds a single class");

    SvmModel model;
    model.classes = classes;
    model.dimension = dim;
    for (std::size_t a = 0; a < present.size(); ++a)
        for (std::size_t b = a + 1; b < present.size(); ++b) {
            std::vector<const std::vector<double>*> xs;
            std::vector<int> ys;
            for (std::size_t i : order) {
                if (labels[i] == present[a]) xs.push_back(&rows[i]), ys.push_back(+1);
                else if (labels[i] == present[b]) xs.push_back(&rows[i]), ys.push_back(-1);
            }
            PairwiseClassifier pc = train_pair(xs, ys, dim, options);
            pc.positive = present[a];
            pc.negative = present[b];
            model.pairs.push_back(std::move(pc));
        }
    return model;
}

VoteTally tally_votes(const SvmModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.dimension) throw ShapeError("predict: feature dimension mismatch");
    VoteTally t{std::vector<int>(static_cast<std::size_t>(model.classes), 0),
                std::vector<double>(static_cast<std::size_t>(model.classes), 0.0)};
    for (const auto& pc : model.pairs) {
        const double s = pc.score(x);
        if (s > 0.0) ++t.votes[pc.positive];
        else if (s < 0.0) ++t.votes[pc.negative];
        t.margins[pc.positive] += s;
        t.margins[pc.negative] -= s;
    }
    return t;
}

int predict(const SvmModel& model, std::span<const double> x) {
    const VoteTally t = tally_votes(model, x);
    int best = 0;
    for (int c = 1; c < model.classes; ++c) {
        if (t.votes[c] > t.votes[best] || (t.votes[c] == t.votes[best] && t.margins[c] > t.margins[best]))
            best = c;
    }
    return best;
}

}  // namespace mexp
