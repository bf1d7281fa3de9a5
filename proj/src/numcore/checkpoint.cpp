// Copyright 2026 The mqa Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mqa/numcore/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "mqa/errors.hpp"

namespace mqa::numcore {

namespace {

constexpr char kMagic[4] = {'M', 'Q', 'A', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    put_u64(os, bits);
}

std::uint32_t get_u32(std::istream& is, const std::string& what) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) {
        throw IoError("checkpoint: truncated while reading " + what);
    }
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

std::uint64_t get_u64(std::istream& is, const std::string& what) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) {
        throw IoError("checkpoint: truncated while reading " + what);
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& is, const std::string& what) {
    const std::uint64_t bits = get_u64(is, what);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

}  // namespace

void save_checkpoint(const std::string& path, const ParameterSet& params,
                     const std::string& hyperparams_json) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("checkpoint: cannot open for writing: " + path);
    os.write(kMagic, 4);
    put_u32(os, kVersion);
    put_u64(os, hyperparams_json.size());
    os.write(hyperparams_json.data(),
             static_cast<std::streamsize>(hyperparams_json.size()));
    put_u64(os, params.size());
    for (const Parameter& p : params) {
        put_u64(os, p.name.size());
        os.write(p.name.data(), static_cast<std::streamsize>(p.name.size()));
        put_u64(os, p.value.ndim());
        for (std::size_t i = 0; i < p.value.ndim(); ++i) put_u64(os, p.value.dim(i));
        for (double d : p.value.data()) put_f64(os, d);
    }
    if (!os) throw IoError("checkpoint: write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("checkpoint: cannot open for reading: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw ParseError("checkpoint: bad magic in " + path);
    }
    const std::uint32_t version = get_u32(is, "version");
    if (version != kVersion) {
        throw ParseError("checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint out;
    const std::uint64_t json_len = get_u64(is, "hyperparameter length");
    out.hyperparams_json.resize(json_len);
    if (json_len > 0 &&
        !is.read(out.hyperparams_json.data(), static_cast<std::streamsize>(json_len))) {
        throw IoError("checkpoint: truncated hyperparameter record");
    }
    const std::uint64_t count = get_u64(is, "parameter count");
    out.params.reserve(count);
    for (std::uint64_t p = 0; p < count; ++p) {
        const std::uint64_t name_len = get_u64(is, "name length");
        std::string name(name_len, '\0');
        if (name_len > 0 && !is.read(name.data(), static_cast<std::streamsize>(name_len))) {
            throw IoError("checkpoint: truncated parameter name");
        }
        const std::uint64_t ndim = get_u64(is, "rank of " + name);
        std::vector<std::size_t> shape(ndim);
        std::uint64_t total = 1;
        for (std::uint64_t i = 0; i < ndim; ++i) {
            shape[i] = static_cast<std::size_t>(get_u64(is, "dims of " + name));
            total *= shape[i];
        }
        std::vector<double> data(total);
        for (std::uint64_t i = 0; i < total; ++i) data[i] = get_f64(is, "payload of " + name);
        out.params.emplace_back(std::move(name),
                                Tensor::from_data(std::move(shape), std::move(data)));
    }
    return out;
}

void restore_parameters(ParameterSet& params, const Checkpoint& ckpt) {
    if (ckpt.params.size() != params.size()) {
        throw ParameterError("checkpoint: holds " + std::to_string(ckpt.params.size()) +
                             " parameters, model has " + std::to_string(params.size()));
    }
    for (const auto& [name, tensor] : ckpt.params) {
        Parameter* p = params.find(name);
        if (p == nullptr) {
            throw ParameterError("checkpoint: model has no parameter named " + name);
        }
        if (!p->value.same_shape(tensor)) {
            throw ParameterError("checkpoint: shape mismatch for " + name + ": file " +
                                 shape_string(tensor) + ", model " + shape_string(p->value));
        }
        p->value = tensor;
    }
}

}  // namespace mqa::numcore
