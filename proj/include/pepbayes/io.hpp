#pragma once

#include <fstream>
#include <limits>
#include <string>

#include <json.hpp>

#include "pepbayes/chemspace.hpp"
#include "pepbayes/error.hpp"
#include "pepbayes/mixture.hpp"
#include "pepbayes/motif.hpp"

// JSON model/distribution files. Doubles round-trip exactly (shortest
// round-trip serialization); infinities are encoded as the strings "inf"
// and "-inf" since JSON numbers cannot carry them.

namespace pepbayes::io {

using nlohmann::json;

inline json encode_real(double v) {
    if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
    return json(v);
}

inline double decode_real(const json& j) {
    if (j.is_string()) {
        const auto& s = j.get_ref<const std::string&>();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw FormatError("bad numeric field '" + s + "'");
    }
    return j.get<double>();
}

inline json encode_real_array(const std::vector<double>& values) {
    json arr = json::array();
    for (double v : values) arr.push_back(encode_real(v));
    return arr;
}

inline std::vector<double> decode_real_array(const json& j) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) out.push_back(decode_real(v));
    return out;
}

// --- descriptor distributions ------------------------------------------------

inline json to_json(const DescriptorDistribution& dist) {
    json j;
    j["format"] = "pepbayes.distribution/1";
    j["descriptor"] = dist.descriptor;
    switch (dist.kind) {
    case DistributionKind::exact:
        j["kind"] = "exact";
        j["support"] = encode_real_array(dist.support);
        j["masses"] = encode_real_array(dist.masses);
        break;
    case DistributionKind::normal_approx:
        j["kind"] = "normal";
        j["mean"] = dist.mean;
        j["variance"] = dist.variance;
        j["zero_fraction"] = dist.zero_fraction;
        j["zero_warning"] = dist.zero_warning;
        break;
    case DistributionKind::sampled:
        j["kind"] = "sampled";
        j["sample"] = encode_real_array(dist.sample);
        break;
    }
    if (dist.quantile_count > 0) {
        j["quantiles"] = {{"q", dist.quantile_count},
                          {"boundaries", encode_real_array(dist.boundaries)}};
    }
    return j;
}

inline DescriptorDistribution distribution_from_json(const json& j) {
    if (j.value("format", "") != "pepbayes.distribution/1")
        throw FormatError("not a pepbayes distribution file");
    DescriptorDistribution dist;
    dist.descriptor = j.at("descriptor").get<std::string>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "exact") {
        dist.kind = DistributionKind::exact;
        dist.support = decode_real_array(j.at("support"));
        dist.masses = decode_real_array(j.at("masses"));
    } else if (kind == "normal") {
        dist.kind = DistributionKind::normal_approx;
        dist.mean = j.at("mean").get<double>();
        dist.variance = j.at("variance").get<double>();
        dist.zero_fraction = j.value("zero_fraction", 0.0);
        dist.zero_warning = j.value("zero_warning", false);
    } else if (kind == "sampled") {
        dist.kind = DistributionKind::sampled;
        dist.sample = decode_real_array(j.at("sample"));
    } else {
        throw FormatError("unknown distribution kind '" + kind + "'");
    }
    if (j.contains("quantiles")) {
        dist.quantile_count = j["quantiles"].at("q").get<int>();
        dist.boundaries = decode_real_array(j["quantiles"].at("boundaries"));
    }
    return dist;
}

// --- QSPR mixture models ------------------------------------------------------

inline json to_json(const MixtureModel& model) {
    json j;
    j["format"] = "pepbayes.qspr/1";
    j["kernels"] = model.kernel_count();
    j["rank_scale"] = model.rank_scale();
    j["descriptors"] = model.descriptor_names();
    for (int state = 0; state < 2; ++state) {
        json per_state = json::array();
        for (std::size_t d = 0; d < model.descriptor_names().size(); ++d) {
            json kernels = json::array();
            for (const auto& k : model.kernels(state, d)) {
                kernels.push_back({{"mean", k.mean}, {"sd", k.sd}, {"weight", k.weight}});
            }
            per_state.push_back(std::move(kernels));
        }
        j[state == 0 ? "state0" : "state1"] = std::move(per_state);
    }
    j["training"] = {{"steps", model.training_info().steps},
                     {"seed", model.training_info().seed},
                     {"acceptance_rate", model.training_info().acceptance_rate}};
    return j;
}

inline MixtureModel mixture_from_json(const json& j) {
    if (j.value("format", "") != "pepbayes.qspr/1") throw FormatError("not a pepbayes QSPR file");
    MixtureModel model(j.at("kernels").get<int>(),
                       j.at("descriptors").get<std::vector<std::string>>(),
                       j.at("rank_scale").get<double>());
    for (int state = 0; state < 2; ++state) {
        const auto& per_state = j.at(state == 0 ? "state0" : "state1");
        for (std::size_t d = 0; d < model.descriptor_names().size(); ++d) {
            auto& kernels = model.kernels_mut(state, d);
            for (std::size_t i = 0; i < kernels.size(); ++i) {
                const auto& k = per_state.at(d).at(i);
                kernels[i] = {k.at("mean").get<double>(), k.at("sd").get<double>(),
                              k.at("weight").get<double>()};
            }
        }
    }
    auto& info = model.training_info();
    info.steps = j.at("training").at("steps").get<std::size_t>();
    info.seed = j.at("training").at("seed").get<std::uint64_t>();
    info.acceptance_rate = j.at("training").at("acceptance_rate").get<double>();
    return model;
}

// --- motif models ---------------------------------------------------------------

inline json to_json(const MotifModel& model) {
    json j;
    j["format"] = "pepbayes.motif/1";
    j["motifs"] = model.motif_count();
    j["width"] = model.width();
    j["alphabet"] = model.alphabet().symbols();
    j["lambda"] = model.lambda();
    j["noise_prob"] = model.noise_prob();
    j["train_class_prior"] = model.trains_class_prior();
    j["background"] = encode_real_array(model.background());
    j["class_prior"] = encode_real_array(model.class_prior());
    json theta = json::array();
    for (int m = 0; m < model.motif_count(); ++m) {
        json positions = json::array();
        for (int w = 0; w < model.width(); ++w)
            positions.push_back(encode_real_array(model.motif_position(m, w)));
        theta.push_back(std::move(positions));
    }
    j["theta"] = std::move(theta);
    j["training"] = {{"iterations", model.training_info().iterations},
                     {"seed", model.training_info().seed},
                     {"loss", encode_real_array(model.training_info().loss_trace)}};

    json sgd;
    sgd["epsilon"] = model.background_sgd().epsilon;
    sgd["background"] = encode_real_array(model.background_sgd().grad_sq);
    if (model.motif_count() > 0) {
        sgd["class_prior"] = encode_real_array(model.class_prior_sgd().grad_sq);
        json theta_sgd = json::array();
        for (int m = 0; m < model.motif_count(); ++m) {
            json positions = json::array();
            for (int w = 0; w < model.width(); ++w)
                positions.push_back(encode_real_array(model.motif_position_sgd(m, w).grad_sq));
            theta_sgd.push_back(std::move(positions));
        }
        sgd["theta"] = std::move(theta_sgd);
    }
    j["sgd"] = std::move(sgd);
    return j;
}

inline MotifModel motif_from_json(const json& j,
                                  const Alphabet& alphabet = Alphabet::canonical()) {
    if (j.value("format", "") != "pepbayes.motif/1") throw FormatError("not a pepbayes motif file");
    if (j.at("alphabet").get<std::string>() != alphabet.symbols())
        throw ValidationError("motif file alphabet does not match the supplied alphabet");
    MotifModel model(j.at("motifs").get<int>(), j.at("width").get<int>(), alphabet,
                     j.at("lambda").get<double>(), j.at("noise_prob").get<double>(),
                     j.at("train_class_prior").get<bool>());
    model.background_mut() = decode_real_array(j.at("background"));
    if (model.motif_count() > 0) {
        model.class_prior_mut() = decode_real_array(j.at("class_prior"));
        for (int m = 0; m < model.motif_count(); ++m) {
            for (int w = 0; w < model.width(); ++w)
                model.motif_position_mut(m, w) = decode_real_array(j.at("theta").at(m).at(w));
        }
    }
    auto& info = model.training_info();
    info.iterations = j.at("training").at("iterations").get<std::size_t>();
    info.seed = j.at("training").at("seed").get<std::uint64_t>();
    info.loss_trace = decode_real_array(j.at("training").at("loss"));

    const auto& sgd = j.at("sgd");
    const double epsilon = sgd.at("epsilon").get<double>();
    auto restore = [&](SgdState& state, const json& grads) {
        state.epsilon = epsilon;
        state.grad_sq = decode_real_array(grads);
    };
    restore(model.background_sgd(), sgd.at("background"));
    if (model.motif_count() > 0) {
        restore(model.class_prior_sgd(), sgd.at("class_prior"));
        for (int m = 0; m < model.motif_count(); ++m) {
            for (int w = 0; w < model.width(); ++w)
                restore(model.motif_position_sgd(m, w), sgd.at("theta").at(m).at(w));
        }
    }
    return model;
}

// --- file helpers ---------------------------------------------------------------

inline void save_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    json j;
    in >> j;
    return j;
}

} // namespace pepbayes::io
