#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <vector>

#include "adast/experiment/folds.hpp"
#include "adast/model/model.hpp"
#include "adast/nn/adam.hpp"
#include "adast/nn/loss.hpp"

namespace adast::experiment {

struct TrainConfig {
    std::size_t epochs = 50;
    double lr = 1e-3;
    double weight_decay = 1e-5;
    double alpha = 0.1;
    std::size_t patience = 10;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    /// When false the domain head is never evaluated (plain regression training).
    bool use_domain_loss = true;

    void validate() const {
        if (epochs < 1) throw ParameterError("epochs must be at least 1");
        if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
        if (batch_size < 1) throw ParameterError("batch_size must be at least 1");
        if (patience < 1) throw ParameterError("patience must be at least 1");
    }
};

/// Per-step values passed to an observer after backward and before the optimizer update.
struct StepInfo {
    std::size_t epoch = 0;
    std::size_t batch = 0;
    double main_loss = 0.0;
    double domain_loss = 0.0;
    double total_loss = 0.0;
    model::Model* model = nullptr;
};

using StepObserver = std::function<void(const StepInfo&)>;

struct TrainHistory {
    std::vector<double> train_main;
    std::vector<double> train_domain;
    std::vector<double> val_main;
    std::vector<double> val_domain;
    double initial_train_main = 0.0;
    std::size_t best_epoch = 0;  // 1-based
    bool stopped_early = false;

    std::size_t epochs_completed() const { return train_main.size(); }
};

/// Stops once `patience` consecutive epochs fail to improve the best value.
class EarlyStopping {
public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

    /// Returns true if `value` is a new best.
    bool update(double value) {
        if (value < best_) {
            best_ = value;
            stale_ = 0;
            return true;
        }
        ++stale_;
        return false;
    }

    bool should_stop() const { return stale_ >= patience_; }
    double best() const { return best_; }

private:
    std::size_t patience_;
    std::size_t stale_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

/// Model predictions for a set of instances in eval mode, as [N, H].
inline Tensor predict(model::Model& model, const std::vector<windowing::WindowedInstance>& instances,
                      std::size_t chunk = 256) {
    if (instances.empty()) throw ParameterError("predict: empty instance set");
    const nn::Mode saved = model.mode();
    model.set_mode(nn::Mode::eval);
    const std::size_t h = instances.front().y.size();
    Tensor out({instances.size(), h});
    for (std::size_t i = 0; i < instances.size(); i += chunk) {
        std::vector<std::size_t> idx;
        for (std::size_t k = i; k < std::min(instances.size(), i + chunk); ++k) idx.push_back(k);
        const auto b = windowing::make_batch(instances, idx);
        const Tensor y = model.forward(b.x, false).y;
        std::copy(y.ptr(), y.ptr() + y.size(), out.ptr() + i * h);
    }
    model.set_mode(saved);
    return out;
}

/// Plain RMSE over every predicted entry (no smoothing term).
inline double rmse(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw DimensionError("rmse: length mismatch");
    if (pred.empty()) throw ParameterError("rmse: empty input");
    double sse = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        sse += d * d;
    }
    return std::sqrt(sse / static_cast<double>(pred.size()));
}

inline Tensor stack_targets(const std::vector<windowing::WindowedInstance>& instances) {
    const std::size_t h = instances.front().y.size();
    Tensor y({instances.size(), h});
    for (std::size_t i = 0; i < instances.size(); ++i)
        std::copy(instances[i].y.ptr(), instances[i].y.ptr() + h, y.ptr() + i * h);
    return y;
}

/// RMSE of the model over all H entries of all instances, in normalized units.
inline double evaluate(model::Model& model, const std::vector<windowing::WindowedInstance>& instances) {
    if (instances.empty()) throw ParameterError("evaluate: empty instance set");
    const Tensor pred = predict(model, instances);
    const Tensor target = stack_targets(instances);
    return rmse(pred.data(), target.data());
}

/// Mean domain cross-entropy in eval mode.
inline double evaluate_domain_loss(model::Model& model, const std::vector<windowing::WindowedInstance>& instances,
                                   const DomainMap& domains, std::size_t chunk = 256) {
    const nn::Mode saved = model.mode();
    model.set_mode(nn::Mode::eval);
    double total = 0.0;
    for (std::size_t i = 0; i < instances.size(); i += chunk) {
        std::vector<std::size_t> idx;
        for (std::size_t k = i; k < std::min(instances.size(), i + chunk); ++k) idx.push_back(k);
        const auto b = windowing::make_batch(instances, idx);
        const auto labels = domains.labels(b.subjects);
        total += nn::softmax_cross_entropy(*model.forward(b.x, true).domain_logits, labels).value *
                 static_cast<double>(idx.size());
    }
    model.set_mode(saved);
    return total / static_cast<double>(instances.size());
}

namespace detail {
struct Snapshot {
    std::vector<Tensor> params;
    std::vector<std::pair<Tensor, Tensor>> buffers;

    static Snapshot take(model::Model& m) {
        Snapshot s;
        for (const nn::Parameter* p : m.parameters()) s.params.push_back(p->value);
        for (const nn::RunningStats* b : m.buffers()) s.buffers.emplace_back(b->mean, b->var);
        return s;
    }

    void restore(model::Model& m) const {
        const auto params = m.parameters();
        for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = this->params[i];
        const auto bufs = m.buffers();
        for (std::size_t i = 0; i < bufs.size(); ++i) {
            bufs[i]->mean = buffers[i].first;
            bufs[i]->var = buffers[i].second;
        }
    }
};
}  // namespace detail

/// Trains with L = L_main + alpha * L_dom and Adam, validating after every epoch.
/// The parameters with the lowest validation L_main are restored at the end
/// (training L_main is used when the validation split is empty).
inline TrainHistory train(model::Model& model, const std::vector<windowing::WindowedInstance>& train_set,
                          const std::vector<windowing::WindowedInstance>& val_set, const TrainConfig& cfg,
                          const DomainMap& domains, std::ostream* log = nullptr, const StepObserver& observer = {}) {
    cfg.validate();
    if (train_set.empty()) throw ParameterError("train: empty training set");
    const bool with_domain = cfg.use_domain_loss && model.has_domain_head();
    if (with_domain && domains.size() != model.dims().domains)
        throw DimensionError("train: domain map has " + std::to_string(domains.size()) + " classes, model expects " +
                             std::to_string(model.dims().domains));

    Rng shuffle_rng(cfg.seed);
    const nn::ParameterRefs params = model.parameters();
    nn::AdamState state = nn::make_adam_state(params);
    const nn::AdamOptions adam{cfg.lr, 0.9, 0.999, 1e-8, cfg.weight_decay};

    TrainHistory hist;
    hist.initial_train_main = evaluate(model, train_set);
    EarlyStopping stopper(cfg.patience);
    detail::Snapshot best = detail::Snapshot::take(model);

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        model.set_mode(nn::Mode::train);
        double sum_main = 0.0, sum_dom = 0.0;
        std::size_t seen = 0, batch_index = 0;
        for (const auto& b : windowing::batch(train_set, cfg.batch_size, shuffle_rng, true)) {
            model.zero_grad();
            model::ForwardResult out = model.forward(b.x, with_domain);
            nn::LossResult main = nn::rmse_loss(out.y, b.y);
            double dom_value = 0.0;
            Tensor d_domain;
            if (with_domain) {
                nn::LossResult dom = nn::softmax_cross_entropy(*out.domain_logits, domains.labels(b.subjects));
                dom_value = dom.value;
                d_domain = std::move(dom.grad);
                d_domain *= cfg.alpha;
            }
            const double total = main.value + cfg.alpha * dom_value;
            if (!std::isfinite(total)) throw TrainingDivergence(epoch, batch_index, total);
            model.backward(main.grad, with_domain ? &d_domain : nullptr);
            if (observer) observer(StepInfo{epoch, batch_index, main.value, dom_value, total, &model});
            nn::adam_step(params, state, adam);
            sum_main += main.value * static_cast<double>(b.size());
            sum_dom += dom_value * static_cast<double>(b.size());
            seen += b.size();
            ++batch_index;
        }
        hist.train_main.push_back(sum_main / static_cast<double>(seen));
        hist.train_domain.push_back(sum_dom / static_cast<double>(seen));

        const bool has_val = !val_set.empty();
        const double val_main = has_val ? evaluate(model, val_set) : std::numeric_limits<double>::quiet_NaN();
        const double val_dom = (has_val && with_domain) ? evaluate_domain_loss(model, val_set, domains) : 0.0;
        hist.val_main.push_back(val_main);
        hist.val_domain.push_back(val_dom);

        if (stopper.update(has_val ? val_main : hist.train_main.back())) {
            best = detail::Snapshot::take(model);
            hist.best_epoch = epoch;
        }
        if (log)
            *log << "epoch " << epoch << "/" << cfg.epochs << "  train_main=" << hist.train_main.back()
                 << "  train_dom=" << hist.train_domain.back() << "  val_main=" << val_main << "  val_dom=" << val_dom
                 << '\n';
        if (stopper.should_stop() && epoch < cfg.epochs) {
            hist.stopped_early = true;
            break;
        }
    }
    best.restore(model);
    model.set_mode(nn::Mode::eval);
    return hist;
}

}  // namespace adast::experiment
