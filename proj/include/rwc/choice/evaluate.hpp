#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rwc/choice/model.hpp"
#include "rwc/csv.hpp"

namespace rwc {

using ConfusionMatrix = std::vector<std::vector<std::int64_t>>;  // [true][predicted]

struct ClassMetrics {
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
};

/// Precision/recall/F1 from a confusion matrix. Classes that are neither present nor
/// predicted are left out of the averages; undefined ratios count as zero.
inline ClassMetrics metrics_from_confusion(const ConfusionMatrix& cm) {
    const auto k = cm.size();
    std::vector<double> tp(k, 0), support(k, 0), predicted(k, 0);
    for (std::size_t t = 0; t < k; ++t)
        for (std::size_t p = 0; p < k; ++p) {
            const double v = static_cast<double>(cm[t].at(p));
            support[t] += v;
            predicted[p] += v;
            if (t == p) tp[t] += v;
        }
    ClassMetrics m;
    double labels = 0.0, total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        if (support[c] == 0 && predicted[c] == 0) continue;
        const double prec = predicted[c] > 0 ? tp[c] / predicted[c] : 0.0;
        const double rec = support[c] > 0 ? tp[c] / support[c] : 0.0;
        const double f1 = prec + rec > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
        labels += 1.0;
        total += support[c];
        m.macro_precision += prec;
        m.macro_recall += rec;
        m.macro_f1 += f1;
        m.weighted_precision += support[c] * prec;
        m.weighted_recall += support[c] * rec;
        m.weighted_f1 += support[c] * f1;
    }
    if (labels > 0) {
        m.macro_precision /= labels;
        m.macro_recall /= labels;
        m.macro_f1 /= labels;
    }
    if (total > 0) {
        m.weighted_precision /= total;
        m.weighted_recall /= total;
        m.weighted_f1 /= total;
    }
    return m;
}

struct FoldResult {
    double accuracy = 0.0;
    double top3_accuracy = 0.0;
    double top5_accuracy = 0.0;
    std::size_t test_size = 0;
};

struct EvalReport {
    std::string model_name;
    double accuracy = 0.0;  // from the summed confusion matrix
    std::optional<double> top3_accuracy;  // fold average; absent for point-mass models
    std::optional<double> top5_accuracy;
    ClassMetrics classes;
    std::vector<FoldResult> folds;
    ConfusionMatrix confusion;
    /// (fold, school) pairs where the school never appears among training labels.
    std::vector<std::pair<std::size_t, SchoolId>> absent_classes;
};

/// Produces a model from the training students of one fold.
using ModelFactory =
    std::function<std::unique_ptr<ChoiceModel>(const District&, std::span<const StudentId> training)>;

/// Random partition of students into `folds` near-equal test sets.
inline std::vector<std::vector<StudentId>> make_folds(std::size_t students, std::size_t folds, std::uint64_t seed) {
    if (folds < 2) throw DomainError("cross-validation needs at least 2 folds");
    if (folds > students) throw DomainError("more folds than students");
    std::vector<StudentId> order(students);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<StudentId>> out(folds);
    for (std::size_t k = 0; k < students; ++k) out[k % folds].push_back(order[k]);
    for (auto& f : out) std::sort(f.begin(), f.end());
    return out;
}

/// K-fold cross-validation against the labelled attendance, with each student's context
/// taken at their status-quo zoned school. Top-k accuracies are averaged over folds;
/// accuracy and class metrics come from the confusion matrix summed over folds.
inline EvalReport evaluate(const ModelFactory& factory, const District& d, std::size_t folds, std::uint64_t seed) {
    const auto ns = d.school_count();
    const auto parts = make_folds(d.students().size(), folds, seed);
    EvalReport rep;
    rep.confusion.assign(ns, std::vector<std::int64_t>(ns, 0));
    bool ranks = true;
    for (std::size_t f = 0; f < parts.size(); ++f) {
        std::vector<char> in_test(d.students().size(), 0);
        for (auto n : parts[f]) in_test[n] = 1;
        std::vector<StudentId> train;
        std::vector<char> seen(ns, 0);
        for (const auto& st : d.students())
            if (!in_test[st.id]) {
                train.push_back(st.id);
                seen[st.actual_school] = 1;
            }
        for (SchoolId s = 0; s < ns; ++s)
            if (!seen[s]) rep.absent_classes.emplace_back(f, s);
        const auto model = factory(d, train);
        if (rep.model_name.empty()) rep.model_name = model->name();
        ranks = ranks && model->ranks_schools();
        FoldResult fr;
        fr.test_size = parts[f].size();
        for (auto n : parts[f]) {
            const auto dist = model->distribution(d, n, d.status_quo_school_of(n));
            const auto order = dist.ranking();
            const SchoolId truth = d.student(n).actual_school;
            const auto pos = static_cast<std::size_t>(std::find(order.begin(), order.end(), truth) - order.begin());
            ++rep.confusion[truth][order.front()];
            fr.accuracy += pos == 0;
            fr.top3_accuracy += pos < 3;
            fr.top5_accuracy += pos < 5;
        }
        const double m = static_cast<double>(fr.test_size);
        fr.accuracy /= m;
        fr.top3_accuracy /= m;
        fr.top5_accuracy /= m;
        rep.folds.push_back(fr);
    }
    std::int64_t hits = 0, total = 0;
    for (std::size_t t = 0; t < ns; ++t)
        for (std::size_t p = 0; p < ns; ++p) {
            total += rep.confusion[t][p];
            if (t == p) hits += rep.confusion[t][p];
        }
    rep.accuracy = static_cast<double>(hits) / static_cast<double>(total);
    rep.classes = metrics_from_confusion(rep.confusion);
    if (ranks) {
        double t3 = 0.0, t5 = 0.0;
        for (const auto& fr : rep.folds) {
            t3 += fr.top3_accuracy;
            t5 += fr.top5_accuracy;
        }
        rep.top3_accuracy = t3 / static_cast<double>(rep.folds.size());
        rep.top5_accuracy = t5 / static_cast<double>(rep.folds.size());
    }
    return rep;
}

inline constexpr std::string_view kEvalHeader =
    "model,accuracy,top3_accuracy,top5_accuracy,macro_precision,macro_recall,macro_f1,weighted_precision,"
    "weighted_recall,weighted_f1";

/// One Table-2-style row; absent top-k cells are written as '-'.
inline std::string eval_row(const EvalReport& r) {
    auto num = [](double v) { return csv::format_fixed(v, 4); };
    auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string("-"); };
    const auto& c = r.classes;
    return r.model_name + "," + num(r.accuracy) + "," + opt(r.top3_accuracy) + "," + opt(r.top5_accuracy) + "," +
           num(c.macro_precision) + "," + num(c.macro_recall) + "," + num(c.macro_f1) + "," +
           num(c.weighted_precision) + "," + num(c.weighted_recall) + "," + num(c.weighted_f1);
}

}  // namespace rwc
