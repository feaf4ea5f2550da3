#include "linksim/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace linksim {

namespace {

using nlohmann::json;

json layer_to_json(const nn::Layer& layer) {
    json j;
    j["activation"] = nn::to_string(layer.activation);
    if (const auto* dense = std::get_if<nn::DenseLayer>(&layer.op)) {
        j["kind"] = "dense";
        j["in"] = dense->weights.cols();
        j["out"] = dense->weights.rows();
        std::vector<double> weights;
        weights.reserve(static_cast<std::size_t>(dense->weights.size()));
        for (Eigen::Index r = 0; r < dense->weights.rows(); ++r)
            for (Eigen::Index c = 0; c < dense->weights.cols(); ++c)
                weights.push_back(dense->weights(r, c));
        j["weights"] = weights;
        j["bias"] = std::vector<double>(dense->bias.data(), dense->bias.data() + dense->bias.size());
    } else {
        const auto& conv = std::get<nn::Conv1dLayer>(layer.op);
        j["kind"] = "conv1d";
        j["in"] = conv.in_channels;
        j["out"] = conv.out_channels;
        j["kernel"] = conv.kernel_size;
        std::vector<double> weights;
        weights.reserve(static_cast<std::size_t>(conv.kernels.size()));
        for (Eigen::Index r = 0; r < conv.kernels.rows(); ++r)
            for (Eigen::Index c = 0; c < conv.kernels.cols(); ++c)
                weights.push_back(conv.kernels(r, c));
        j["weights"] = weights;
        j["bias"] = std::vector<double>(conv.bias.data(), conv.bias.data() + conv.bias.size());
    }
    return j;
}

nn::Layer layer_from_json(const json& j) {
    nn::Layer layer;
    layer.activation = nn::activation_from_string(j.at("activation").get<std::string>());
    const std::string kind = j.at("kind").get<std::string>();
    const auto weights = j.at("weights").get<std::vector<double>>();
    const auto bias = j.at("bias").get<std::vector<double>>();
    const int in = j.at("in").get<int>();
    const int out = j.at("out").get<int>();
    if (kind == "dense") {
        if (weights.size() != static_cast<std::size_t>(in) * static_cast<std::size_t>(out) ||
            bias.size() != static_cast<std::size_t>(out))
            throw ShapeMismatch("model load: dense layer weight/bias count mismatch");
        nn::DenseLayer dense;
        dense.weights.resize(out, in);
        std::size_t idx = 0;
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < in; ++c) dense.weights(r, c) = weights[idx++];
        dense.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(),
                                                       static_cast<Eigen::Index>(bias.size()));
        layer.op = std::move(dense);
    } else if (kind == "conv1d") {
        const int kernel = j.at("kernel").get<int>();
        if (weights.size() != static_cast<std::size_t>(in) * static_cast<std::size_t>(out) *
                                  static_cast<std::size_t>(kernel) ||
            bias.size() != static_cast<std::size_t>(out))
            throw ShapeMismatch("model load: conv1d layer weight/bias count mismatch");
        nn::Conv1dLayer conv;
        conv.in_channels = in;
        conv.out_channels = out;
        conv.kernel_size = kernel;
        conv.kernels.resize(out, in * kernel);
        std::size_t idx = 0;
        for (Eigen::Index r = 0; r < out; ++r)
            for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(in) * kernel; ++c)
                conv.kernels(r, c) = weights[idx++];
        conv.bias = Eigen::Map<const Eigen::VectorXd>(bias.data(),
                                                      static_cast<Eigen::Index>(bias.size()));
        layer.op = std::move(conv);
    } else {
        throw ModelLoadError("model load: unknown layer kind '" + kind + "'");
    }
    return layer;
}

json model_to_json(const nn::NeuralModel& model) {
    json layers = json::array();
    for (const auto& layer : model.layers) layers.push_back(layer_to_json(layer));
    return layers;
}

nn::NeuralModel model_from_json(const json& j) {
    nn::NeuralModel model;
    for (const auto& layer : j) model.layers.push_back(layer_from_json(layer));
    return model;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ModelLoadError("cannot parse '" + path + "': " + e.what());
    }
    if (!j.contains("format_version"))
        throw ModelLoadError("'" + path + "' is missing format_version");
    if (j.at("format_version").get<int>() != kModelFormatVersion)
        throw FormatVersionMismatch("'" + path + "' has format_version " +
                                    j.at("format_version").dump() + ", expected " +
                                    std::to_string(kModelFormatVersion));
    return j;
}

void expect_model_kind(const json& j, const std::string& path, const std::string& kind) {
    if (j.at("model").get<std::string>() != kind)
        throw ModelLoadError("'" + path + "' is not a " + kind + " model");
}

}  // namespace

void save_model(const std::string& path, const DemapperModel& model) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["model"] = "demapper";
    j["order"] = model.order;
    j["train_ebn0_db"] = model.train_ebn0_db;
    j["layers"] = model_to_json(model.net);
    write_json(path, j);
}

void save_model(const std::string& path, const AeEncoder& encoder) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["model"] = "ae";
    j["component"] = "enc";
    j["variant"] = to_string(encoder.variant);
    j["order"] = encoder.order;
    j["train_ebn0_db"] = encoder.train_ebn0_db;
    j["layers"] = model_to_json(encoder.net);
    write_json(path, j);
}

void save_model(const std::string& path, const AeDecoder& decoder) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["model"] = "ae";
    j["component"] = "dec";
    j["variant"] = to_string(decoder.variant);
    j["order"] = decoder.order;
    j["train_ebn0_db"] = decoder.train_ebn0_db;
    j["layers"] = model_to_json(decoder.net);
    write_json(path, j);
}

DemapperModel load_demapper(const std::string& path) {
    const json j = read_json(path);
    expect_model_kind(j, path, "demapper");
    try {
        DemapperModel model;
        model.order = j.at("order").get<int>();
        model.train_ebn0_db = j.at("train_ebn0_db").get<double>();
        model.net = model_from_json(j.at("layers"));
        model.net.output_size(2);  // validate composition
        return model;
    } catch (const json::exception& e) {
        throw ModelLoadError("'" + path + "': " + e.what());
    }
}

namespace {

template <typename ModelT>
ModelT load_ae_component(const std::string& path, const std::string& component, int input_rows) {
    const json j = read_json(path);
    expect_model_kind(j, path, "ae");
    try {
        if (j.at("component").get<std::string>() != component)
            throw ModelLoadError("'" + path + "' holds component '" +
                                 j.at("component").get<std::string>() + "', expected '" +
                                 component + "'");
        ModelT model;
        model.order = j.at("order").get<int>();
        model.variant = ae_variant_from_string(j.at("variant").get<std::string>());
        model.train_ebn0_db = j.at("train_ebn0_db").get<double>();
        model.net = model_from_json(j.at("layers"));
        model.net.output_size(input_rows == 0 ? model.order : input_rows);
        return model;
    } catch (const json::exception& e) {
        throw ModelLoadError("'" + path + "': " + e.what());
    }
}

}  // namespace

AeEncoder load_ae_encoder(const std::string& path) {
    return load_ae_component<AeEncoder>(path, "enc", 0);
}

AeDecoder load_ae_decoder(const std::string& path) {
    return load_ae_component<AeDecoder>(path, "dec", 2);
}

}  // namespace linksim
