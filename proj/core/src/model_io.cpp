#include "pathrel/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

namespace pathrel {

const Tensor& ModelFile::tensor(const std::string& name) const {
    for (const auto& [n, t] : tensors) {
        if (n == name) return t;
    }
    throw DataError("model file: missing tensor '" + name + "'");
}

void ModelFile::save(const std::string& path) const {
    nlohmann::json full = header;
    full["format_version"] = kFormatVersion;
    full["real"] = "float64";
    nlohmann::json tlist = nlohmann::json::array();
    for (const auto& [name, t] : tensors) {
        tlist.push_back({{"name", name}, {"shape", t.shape}});
    }
    full["tensors"] = tlist;
    const std::string head = full.dump();

    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write model file: " + path);
    os.write(kMagic, 8);
    const std::uint64_t hlen = head.size();
    os.write(reinterpret_cast<const char*>(&hlen), 8);
    os.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto& [name, t] : tensors) {
        check_finite(t, "tensor '" + name + "' while saving");
        std::vector<double> buf(t.v.begin(), t.v.end());
        os.write(reinterpret_cast<const char*>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(double)));
    }
    if (!os) throw DataError("I/O failure writing model file: " + path);
}

ModelFile ModelFile::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open model file: " + path);
    char magic[8];
    is.read(magic, 8);
    if (!is || std::memcmp(magic, kMagic, 8) != 0) {
        throw DataError("not a model file (bad magic): " + path);
    }
    std::uint64_t hlen = 0;
    is.read(reinterpret_cast<char*>(&hlen), 8);
    std::string head(hlen, '\0');
    is.read(head.data(), static_cast<std::streamsize>(hlen));
    if (!is) throw DataError("truncated model header: " + path);

    ModelFile mf;
    mf.header = nlohmann::json::parse(head);
    if (mf.header.value("format_version", -1) != kFormatVersion) {
        throw DataError("unsupported model format version in " + path);
    }
    for (const auto& entry : mf.header.at("tensors")) {
        const std::string name = entry.at("name");
        std::vector<std::int64_t> shape = entry.at("shape").get<std::vector<std::int64_t>>();
        Tensor t = Tensor::zeros(shape);
        std::vector<double> buf(static_cast<std::size_t>(t.numel()));
        is.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(double)));
        if (!is) throw DataError("truncated tensor '" + name + "' in " + path);
        for (std::size_t i = 0; i < buf.size(); ++i) t.v[i] = static_cast<Real>(buf[i]);
        mf.tensors.emplace_back(name, std::move(t));
    }
    return mf;
}

}  // namespace pathrel
