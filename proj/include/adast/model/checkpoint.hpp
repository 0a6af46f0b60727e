#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "adast/model/baselines.hpp"

namespace adast::model {

inline constexpr const char* kCheckpointFormat = "adast-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    std::unique_ptr<Model> model;
    std::vector<std::string> feature_names;
    std::vector<int> domain_ids;  // subject id of each domain-head class
};

namespace detail {
inline nlohmann::json tensor_json(const Tensor& t) { return {{"shape", t.shape()}, {"data", t.values()}}; }

inline void assign_tensor(Tensor& dst, const nlohmann::json& j, const std::string& what) {
    const auto shape = j.at("shape").get<Shape>();
    if (shape != dst.shape())
        throw ParseError("checkpoint: " + what + " has shape " + shape_string(shape) + ", model expects " +
                         shape_string(dst.shape()));
    dst = Tensor(shape, j.at("data").get<std::vector<double>>());
}
}  // namespace detail

inline nlohmann::json checkpoint_json(Model& model, const std::vector<std::string>& feature_names,
                                      const std::vector<int>& domain_ids) {
    nlohmann::json params = nlohmann::json::array();
    for (const nn::Parameter* p : model.parameters()) {
        nlohmann::json entry = detail::tensor_json(p->value);
        entry["name"] = p->name;
        params.push_back(std::move(entry));
    }
    nlohmann::json buffers = nlohmann::json::array();
    for (const nn::RunningStats* s : model.buffers())
        buffers.push_back({{"mean", detail::tensor_json(s->mean)}, {"var", detail::tensor_json(s->var)}});
    const ModelDims& d = model.dims();
    return {{"format", kCheckpointFormat},
            {"version", kCheckpointVersion},
            {"kind", to_string(model.kind())},
            {"hyperparams", model.hyperparams()},
            {"dims", {{"features", d.features}, {"window", d.window}, {"horizon", d.horizon}, {"domains", d.domains}}},
            {"options",
             {{"enforce_grid", model.options().enforce_grid}, {"gradient_reversal", model.options().gradient_reversal}}},
            {"feature_names", feature_names},
            {"domain_ids", domain_ids},
            {"parameters", std::move(params)},
            {"buffers", std::move(buffers)}};
}

inline Checkpoint checkpoint_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != kCheckpointFormat) throw ParseError("not an adast checkpoint");
        if (j.at("version").get<int>() != kCheckpointVersion)
            throw ParseError("unsupported checkpoint version " + j.at("version").dump());
        const ModelKind kind = parse_model_kind(j.at("kind").get<std::string>());
        HyperParams hp;
        from_json(j.at("hyperparams"), hp);
        const auto& jd = j.at("dims");
        const ModelDims dims{jd.at("features").get<std::size_t>(), jd.at("window").get<std::size_t>(),
                             jd.at("horizon").get<std::size_t>(), jd.at("domains").get<std::size_t>()};
        const ModelOptions options{j.at("options").at("enforce_grid").get<bool>(),
                                   j.at("options").at("gradient_reversal").get<bool>()};
        Rng rng(0);
        Checkpoint cp{build_model(kind, hp, dims, rng, options), j.at("feature_names").get<std::vector<std::string>>(),
                      j.at("domain_ids").get<std::vector<int>>()};
        const auto params = cp.model->parameters();
        const auto& jp = j.at("parameters");
        if (jp.size() != params.size())
            throw ParseError("checkpoint holds " + std::to_string(jp.size()) + " parameters, model has " +
                             std::to_string(params.size()));
        for (std::size_t i = 0; i < params.size(); ++i) {
            if (jp[i].at("name").get<std::string>() != params[i]->name)
                throw ParseError("checkpoint parameter " + std::to_string(i) + " name mismatch");
            detail::assign_tensor(params[i]->value, jp[i], "parameter " + std::to_string(i));
            params[i]->grad = Tensor::zeros_like(params[i]->value);
        }
        const auto buffers = cp.model->buffers();
        const auto& jb = j.at("buffers");
        if (jb.size() != buffers.size()) throw ParseError("checkpoint buffer count mismatch");
        for (std::size_t i = 0; i < buffers.size(); ++i) {
            detail::assign_tensor(buffers[i]->mean, jb[i].at("mean"), "running mean");
            detail::assign_tensor(buffers[i]->var, jb[i].at("var"), "running var");
        }
        cp.model->set_mode(nn::Mode::eval);
        return cp;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed checkpoint: ") + e.what());
    }
}

inline void save_checkpoint(const std::string& path, Model& model, const std::vector<std::string>& feature_names,
                            const std::vector<int>& domain_ids) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write checkpoint '" + path + "'");
    out << checkpoint_json(model, feature_names, domain_ids).dump() << '\n';
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open checkpoint '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("checkpoint '" + path + "' is not valid JSON: " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace adast::model
