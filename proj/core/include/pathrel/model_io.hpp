#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pathrel/tensor.hpp"

namespace pathrel {

// Versioned binary model container:
//   bytes 0..7    magic "PRELMDL1"
//   bytes 8..15   uint64 little-endian header byte length H
//   bytes 16..    UTF-8 JSON header
//   then          for each header["tensors"] entry, in order, the raw
//                 little-endian float64 values (row-major)
// The JSON header carries format_version, kind, config, and all string tables;
// tensor shapes live in header["tensors"] as {"name","shape"} records.
struct ModelFile {
    static constexpr char kMagic[9] = "PRELMDL1";
    static constexpr int kFormatVersion = 1;

    nlohmann::json header;
    std::vector<std::pair<std::string, Tensor>> tensors;

    void add_tensor(const std::string& name, const Tensor& t) {
        tensors.emplace_back(name, t);
    }
    const Tensor& tensor(const std::string& name) const;

    void save(const std::string& path) const;
    static ModelFile load(const std::string& path);
};

}  // namespace pathrel
