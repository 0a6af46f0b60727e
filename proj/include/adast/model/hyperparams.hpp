#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adast/errors.hpp"
#include "adast/rng.hpp"

namespace adast::model {

struct HyperParams {
    int num_conv_layers = 1;
    int num_lstm_layers = 1;
    int cnn_hidden_size = 16;
    int lstm_hidden_size = 64;
    double dropout_cnn = 0.1;
    double dropout_lstm = 0.1;
    int batch_size = 32;
    double alpha = 0.1;
    bool use_batchnorm = false;

    friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

/// Discrete search space; every field of a valid HyperParams is one of these values.
struct SearchSpace {
    std::vector<int> num_conv_layers{1, 2};
    std::vector<int> num_lstm_layers{1, 2, 3};
    std::vector<int> cnn_hidden_size{16, 32, 64};
    std::vector<int> lstm_hidden_size{64, 128, 256};
    std::vector<double> dropout_cnn{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> dropout_lstm{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<int> batch_size{8, 16, 32};
    std::vector<double> alpha{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<bool> use_batchnorm{false, true};

    std::size_t cardinality() const {
        return num_conv_layers.size() * num_lstm_layers.size() * cnn_hidden_size.size() * lstm_hidden_size.size() *
               dropout_cnn.size() * dropout_lstm.size() * batch_size.size() * alpha.size() * use_batchnorm.size();
    }

    /// One independent uniform draw per field.
    HyperParams sample(Rng& rng) const {
        auto pick = [&rng](const auto& choices) { return choices[static_cast<std::size_t>(rng.uniform_index(choices.size()))]; };
        HyperParams hp;
        hp.num_conv_layers = pick(num_conv_layers);
        hp.num_lstm_layers = pick(num_lstm_layers);
        hp.cnn_hidden_size = pick(cnn_hidden_size);
        hp.lstm_hidden_size = pick(lstm_hidden_size);
        hp.dropout_cnn = pick(dropout_cnn);
        hp.dropout_lstm = pick(dropout_lstm);
        hp.batch_size = pick(batch_size);
        hp.alpha = pick(alpha);
        hp.use_batchnorm = pick(use_batchnorm);
        return hp;
    }

    bool contains(const HyperParams& hp) const {
        auto has = [](const auto& choices, auto v) {
            return std::any_of(choices.begin(), choices.end(), [v](auto c) {
                if constexpr (std::is_floating_point_v<decltype(c)>)
                    return std::abs(c - v) < 1e-9;
                else
                    return c == v;
            });
        };
        return has(num_conv_layers, hp.num_conv_layers) && has(num_lstm_layers, hp.num_lstm_layers) &&
               has(cnn_hidden_size, hp.cnn_hidden_size) && has(lstm_hidden_size, hp.lstm_hidden_size) &&
               has(dropout_cnn, hp.dropout_cnn) && has(dropout_lstm, hp.dropout_lstm) &&
               has(batch_size, hp.batch_size) && has(alpha, hp.alpha) &&
               std::find(use_batchnorm.begin(), use_batchnorm.end(), hp.use_batchnorm) != use_batchnorm.end();
    }
};

/// Structural checks always apply; `enforce_grid` additionally requires membership in the search space.
inline void validate(const HyperParams& hp, bool enforce_grid) {
    if (hp.num_conv_layers < 1 || hp.num_conv_layers > 2)
        throw ParameterError("num_conv_layers must be 1 or 2, got " + std::to_string(hp.num_conv_layers));
    if (hp.num_lstm_layers < 1) throw ParameterError("num_lstm_layers must be positive");
    if (hp.cnn_hidden_size < 1 || hp.lstm_hidden_size < 1) throw ParameterError("hidden sizes must be positive");
    if (!(hp.dropout_cnn >= 0.0 && hp.dropout_cnn < 1.0) || !(hp.dropout_lstm >= 0.0 && hp.dropout_lstm < 1.0))
        throw ParameterError("dropout rates must lie in [0, 1)");
    if (hp.batch_size < 1) throw ParameterError("batch_size must be positive");
    if (!(hp.alpha >= 0.0 && hp.alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
    if (enforce_grid && !SearchSpace{}.contains(hp)) throw ParameterError("hyperparameters outside the search grid");
}

inline void to_json(nlohmann::json& j, const HyperParams& hp) {
    j = nlohmann::json{{"num_conv_layers", hp.num_conv_layers}, {"num_lstm_layers", hp.num_lstm_layers},
                       {"cnn_hidden_size", hp.cnn_hidden_size}, {"lstm_hidden_size", hp.lstm_hidden_size},
                       {"dropout_cnn", hp.dropout_cnn},         {"dropout_lstm", hp.dropout_lstm},
                       {"batch_size", hp.batch_size},           {"alpha", hp.alpha},
                       {"use_batchnorm", hp.use_batchnorm}};
}

/// Keys absent from `j` keep their current value; unknown keys are rejected.
inline void from_json(const nlohmann::json& j, HyperParams& hp) {
    if (!j.is_object()) throw ConfigError("hyperparams must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "num_conv_layers") hp.num_conv_layers = value.get<int>();
        else if (key == "num_lstm_layers") hp.num_lstm_layers = value.get<int>();
        else if (key == "cnn_hidden_size") hp.cnn_hidden_size = value.get<int>();
        else if (key == "lstm_hidden_size") hp.lstm_hidden_size = value.get<int>();
        else if (key == "dropout_cnn") hp.dropout_cnn = value.get<double>();
        else if (key == "dropout_lstm") hp.dropout_lstm = value.get<double>();
        else if (key == "batch_size") hp.batch_size = value.get<int>();
        else if (key == "alpha") hp.alpha = value.get<double>();
        else if (key == "use_batchnorm") hp.use_batchnorm = value.get<bool>();
        else throw ConfigError("unknown hyperparameter key '" + key + "'");
    }
}

}  // namespace adast::model
