// Copyright 2026 The qgnn-tracking Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "qgnn/autodiff.hpp"

#include <fstream>
#include "json.hpp"

namespace qgnn::ad {

using nlohmann::json;

Checkpoint snapshot(const ParamStore &store, std::string meta_json) {
    Checkpoint ckpt;
    ckpt.meta_json = std::move(meta_json);
    for (const auto &p : store) {
        ckpt.tensors.emplace_back(p.name, p.value);
    }
    return ckpt;
}

void write_checkpoint(const std::string &path, const Checkpoint &ckpt) {
    json doc;
    doc["format"] = "qgnn-checkpoint/1";
    doc["meta"] = json::parse(ckpt.meta_json);
    json params = json::object();
    for (const auto &[name, t] : ckpt.tensors) {
        params[name] = {{"shape", {t.rows(), t.cols()}},
                        {"values", std::vector<double>(t.values().begin(), t.values().end())}};
    }
    doc["params"] = std::move(params);
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write checkpoint: " + path);
    }
    out << doc.dump(1) << '\n';
    if (!out) {
        throw std::runtime_error("failed writing checkpoint: " + path);
    }
}

Checkpoint read_checkpoint(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open checkpoint: " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error &e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    }
    if (doc.value("format", "") != "qgnn-checkpoint/1") {
        throw std::runtime_error("unrecognized checkpoint format in " + path);
    }
    Checkpoint ckpt;
    ckpt.meta_json = doc.at("meta").dump();
    for (const auto &[name, entry] : doc.at("params").items()) {
        const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
        auto values = entry.at("values").get<std::vector<double>>();
        if (shape.size() != 2) {
            throw std::runtime_error("checkpoint tensor " + name + " is not 2-D");
        }
        ckpt.tensors.emplace_back(name, Tensor(shape[0], shape[1], std::move(values)));
    }
    return ckpt;
}

void restore(ParamStore &store, const Checkpoint &ckpt) {
    std::unordered_map<std::string, const Tensor *> by_name;
    for (const auto &[name, t] : ckpt.tensors) {
        by_name.emplace(name, &t);
    }
    if (by_name.size() != store.size()) {
        throw ShapeError("checkpoint has " + std::to_string(by_name.size()) +
                         " tensors, model expects " + std::to_string(store.size()));
    }
    for (auto &p : store) {
        auto it = by_name.find(p.name);
        if (it == by_name.end()) {
            throw ShapeError("checkpoint lacks parameter " + p.name);
        }
        if (!it->second->same_shape(p.value)) {
            throw ShapeError("checkpoint shape mismatch for " + p.name);
        }
        p.value = *it->second;
    }
}

} // namespace qgnn::ad
