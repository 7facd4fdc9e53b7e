#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rwc/atomic_file.hpp"
#include "rwc/choice/features.hpp"
#include "rwc/choice/model.hpp"
#include "rwc/hash.hpp"

namespace rwc {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Multinomial logit over schools: softmax of per-school linear scores of z-scored features.
struct LogitModel {
    Eigen::MatrixXd weights;  // schools x features
    Eigen::VectorXd bias;     // schools
    Eigen::VectorXd mean;     // per feature, frozen at training time
    Eigen::VectorXd scale;    // per feature standard deviation (1 for constant features)
    std::vector<std::string> feature_names;

    [[nodiscard]] std::size_t school_count() const noexcept { return static_cast<std::size_t>(weights.rows()); }
    [[nodiscard]] std::size_t feature_count() const noexcept { return static_cast<std::size_t>(weights.cols()); }

    [[nodiscard]] std::uint64_t fingerprint() const {
        Fnv1a h;
        h.update("rwc-logit-v1");
        for (const auto& n : feature_names) h.update(n);
        auto mix = [&](const auto& m) {
            for (Eigen::Index i = 0; i < m.size(); ++i) h.update_double(m.data()[i]);
        };
        mix(weights);
        mix(bias);
        mix(mean);
        mix(scale);
        return h.digest();
    }
};

namespace detail {

inline void softmax_inplace(Eigen::Ref<Eigen::VectorXd> v) {
    v.array() -= v.maxCoeff();
    v = v.array().exp();
    v /= v.sum();
}

}  // namespace detail

inline ChoiceDistribution logit_predict(const LogitModel& model, std::span<const double> x) {
    if (x.size() != model.feature_count())
        throw DomainError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                          std::to_string(model.feature_count()));
    const Eigen::Map<const Eigen::VectorXd> raw(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd z = (raw - model.mean).cwiseQuotient(model.scale);
    Eigen::VectorXd scores = model.weights * z + model.bias;
    detail::softmax_inplace(scores);
    return ChoiceDistribution{std::vector<double>(scores.data(), scores.data() + scores.size())};
}

struct LogitConfig {
    double learning_rate = 1.0;  // initial step; adapted by backtracking
    double l2 = 1e-4;            // penalty (l2/2)||W||^2 on weights, not on biases
    std::size_t max_iter = 2000;
    double tolerance = 1e-9;  // stop when an accepted step improves the loss by less
};

struct LossGradient {
    double loss = 0.0;
    Eigen::MatrixXd grad_weights;
    Eigen::VectorXd grad_bias;
};

/// Mean multinomial log-loss plus (l2/2)||W||^2, and its gradient, on normalized features.
inline LossGradient logit_loss_gradient(const Eigen::MatrixXd& weights, const Eigen::VectorXd& bias,
                                        const RowMatrix& x, std::span<const int> labels, double l2) {
    const auto n = x.rows();
    RowMatrix probs = x * weights.transpose();
    probs.rowwise() += bias.transpose();
    double nll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto row = probs.row(i);
        const double mx = row.maxCoeff();
        row.array() = (row.array() - mx).exp();
        const double z = row.sum();
        row /= z;
        nll -= std::log(std::max(row(labels[static_cast<std::size_t>(i)]), 1e-300));
    }
    for (Eigen::Index i = 0; i < n; ++i) probs(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
    const double inv_n = 1.0 / static_cast<double>(n);
    LossGradient out;
    out.loss = nll * inv_n + 0.5 * l2 * weights.squaredNorm();
    out.grad_weights = (probs.transpose() * x) * inv_n + l2 * weights;
    out.grad_bias = probs.colwise().sum().transpose() * inv_n;
    return out;
}

struct TrainResult {
    LogitModel model;
    std::vector<double> loss_history;  // loss after each accepted step, starting at the initial loss
    std::size_t iterations = 0;
    std::size_t rejected_steps = 0;
};

/// Full-batch gradient descent with step backtracking: a step that raises the loss is
/// rejected and the step size halved, so the accepted loss sequence never increases.
/// Weights start at zero, so training is fully determined by the data and config.
inline TrainResult logit_train(const RowMatrix& features, std::span<const int> labels, std::size_t classes,
                               const LogitConfig& config, std::vector<std::string> feature_names = {}) {
    const auto n = features.rows();
    const auto f = features.cols();
    if (n == 0) throw DomainError("training set is empty");
    if (static_cast<std::size_t>(n) != labels.size()) throw DomainError("labels and features differ in length");
    for (int y : labels)
        if (y < 0 || static_cast<std::size_t>(y) >= classes) throw DomainError("label out of range");
    if (!feature_names.empty() && feature_names.size() != static_cast<std::size_t>(f))
        throw DomainError("feature name count does not match feature dimension");

    TrainResult res;
    LogitModel& m = res.model;
    m.feature_names = std::move(feature_names);
    m.mean = features.colwise().mean().transpose();
    m.scale.resize(f);
    for (Eigen::Index j = 0; j < f; ++j) {
        const double var = (features.col(j).array() - m.mean(j)).square().mean();
        m.scale(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    RowMatrix x = features;
    x.rowwise() -= m.mean.transpose();
    x.array().rowwise() /= m.scale.transpose().array();

    m.weights = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(classes), f);
    m.bias = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes));
    auto current = logit_loss_gradient(m.weights, m.bias, x, labels, config.l2);
    res.loss_history.push_back(current.loss);
    double step = config.learning_rate;
    for (std::size_t it = 0; it < config.max_iter; ++it) {
        res.iterations = it + 1;
        Eigen::MatrixXd w = m.weights - step * current.grad_weights;
        Eigen::VectorXd b = m.bias - step * current.grad_bias;
        auto next = logit_loss_gradient(w, b, x, labels, config.l2);
        if (!std::isfinite(next.loss)) {
            if (!std::isfinite(current.loss))
                throw TrainingError("non-finite loss at iteration " + std::to_string(it) +
                                    " (step " + std::to_string(step) + ")");
            ++res.rejected_steps;
            step *= 0.5;
            continue;
        }
        if (next.loss > current.loss) {
            ++res.rejected_steps;
            step *= 0.5;
            if (step < 1e-14)
                throw TrainingError("step size underflow at iteration " + std::to_string(it) + " with loss " +
                                    std::to_string(current.loss));
            continue;
        }
        const double improvement = current.loss - next.loss;
        m.weights = std::move(w);
        m.bias = std::move(b);
        current = std::move(next);
        res.loss_history.push_back(current.loss);
        step *= 1.1;
        if (improvement < config.tolerance) break;
    }
    if (!std::isfinite(current.loss) || !m.weights.allFinite())
        throw TrainingError("training produced non-finite weights (final loss " + std::to_string(current.loss) + ")");
    return res;
}

/// Training matrix for the given students, each featurized at their status-quo zoned
/// school and labelled with the school they attend.
inline std::pair<RowMatrix, std::vector<int>> training_set(const District& d, const Featurizer& fz,
                                                           std::span<const StudentId> students) {
    RowMatrix x(static_cast<Eigen::Index>(students.size()), static_cast<Eigen::Index>(fz.dimension()));
    std::vector<int> y(students.size());
    for (std::size_t k = 0; k < students.size(); ++k) {
        const auto v = fz(students[k], d.status_quo_school_of(students[k]));
        x.row(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        y[k] = static_cast<int>(d.student(students[k]).actual_school);
    }
    return {std::move(x), std::move(y)};
}

/// Binds a trained logit model to the district whose features it was trained on.
class LogitChoiceModel final : public ChoiceModel {
public:
    LogitChoiceModel(LogitModel model, const District& district)
        : model_(std::move(model)), featurizer_(district), district_(&district), fingerprint_(model_.fingerprint()) {
        if (model_.school_count() != district.school_count() || model_.feature_count() != featurizer_.dimension())
            throw ModelError("logit model shape (" + std::to_string(model_.school_count()) + " schools, " +
                             std::to_string(model_.feature_count()) + " features) does not match the district");
        if (!model_.feature_names.empty() && model_.feature_names != featurizer_.names())
            throw ModelError("logit model feature order does not match the district's features");
    }

    [[nodiscard]] ChoiceDistribution distribution(const District& d, StudentId n, SchoolId zoned) const override {
        if (&d != district_ && d.school_count() != district_->school_count())
            throw ModelError("logit model used with a district of a different shape");
        return logit_predict(model_, featurizer_(n, zoned));
    }
    [[nodiscard]] std::string name() const override { return "logit"; }
    [[nodiscard]] std::uint64_t fingerprint() const override { return fingerprint_; }
    [[nodiscard]] const LogitModel& model() const noexcept { return model_; }

private:
    LogitModel model_;
    Featurizer featurizer_;
    const District* district_;
    std::uint64_t fingerprint_;
};

// Model files are versioned JSON documents.

inline constexpr int kLogitFormatVersion = 1;

inline nlohmann::json logit_to_json(const LogitModel& m) {
    auto vec = [](const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index s = 0; s < m.weights.rows(); ++s) {
        Eigen::VectorXd r = m.weights.row(s).transpose();
        rows.push_back(vec(r));
    }
    return {{"format", "rwc-logit"},
            {"version", kLogitFormatVersion},
            {"schools", m.school_count()},
            {"features", m.feature_names},
            {"mean", vec(m.mean)},
            {"scale", vec(m.scale)},
            {"bias", vec(m.bias)},
            {"weights", rows}};
}

inline LogitModel logit_from_json(const nlohmann::json& j) {
    if (j.value("format", std::string{}) != "rwc-logit") throw FormatError("not a logit model file");
    if (j.value("version", 0) != kLogitFormatVersion)
        throw FormatError("unsupported logit model version " + std::to_string(j.value("version", 0)));
    auto vec = [](const nlohmann::json& a) {
        const auto v = a.get<std::vector<double>>();
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    LogitModel m;
    m.feature_names = j.at("features").get<std::vector<std::string>>();
    m.mean = vec(j.at("mean"));
    m.scale = vec(j.at("scale"));
    m.bias = vec(j.at("bias"));
    const auto& rows = j.at("weights");
    const auto s = static_cast<Eigen::Index>(rows.size());
    const auto f = m.mean.size();
    m.weights.resize(s, f);
    for (Eigen::Index r = 0; r < s; ++r) {
        const auto row = vec(rows.at(static_cast<std::size_t>(r)));
        if (row.size() != f) throw FormatError("weight row has the wrong width");
        m.weights.row(r) = row.transpose();
    }
    if (m.bias.size() != s || m.scale.size() != f ||
        (!m.feature_names.empty() && m.feature_names.size() != static_cast<std::size_t>(f)))
        throw FormatError("inconsistent logit model dimensions");
    return m;
}

}  // namespace rwc
