#include "gel/io/container.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "gel/errors.hpp"

namespace gel::io {

static_assert(std::endian::native == std::endian::little, "container I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'G', 'E', 'L', 'T', 'E', 'N', 'S', '1'};

} // namespace

void write_container(const std::filesystem::path& path, nlohmann::json header,
                     const std::vector<NamedMatrix>& tensors) {
    nlohmann::json listing = nlohmann::json::array();
    for (const auto& t : tensors) {
        listing.push_back({{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}});
    }
    header["tensors"] = std::move(listing);
    const std::string text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(kMagic, sizeof kMagic);
    const std::uint64_t length = text.size();
    out.write(reinterpret_cast<const char*>(&length), sizeof length);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& t : tensors) {
        out.write(reinterpret_cast<const char*>(t.value.data()),
                  static_cast<std::streamsize>(t.value.size() * sizeof(double)));
    }
    if (!out) throw IoError("write failed for " + path.string());
}

Container read_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
        throw IoError(path.string() + ": not a tensor container");
    }
    std::uint64_t length = 0;
    in.read(reinterpret_cast<char*>(&length), sizeof length);
    if (!in || length > (1ULL << 32)) throw IoError(path.string() + ": bad header length");
    std::string text(length, '\0');
    in.read(text.data(), static_cast<std::streamsize>(length));
    if (!in) throw IoError(path.string() + ": truncated header");

    Container c;
    try {
        c.header = nlohmann::json::parse(text);
        for (const auto& entry : c.header.at("tensors")) {
            NamedMatrix t{entry.at("name").get<std::string>(),
                          DenseMatrix(entry.at("rows").get<Index>(), entry.at("cols").get<Index>())};
            in.read(reinterpret_cast<char*>(t.value.data()),
                    static_cast<std::streamsize>(t.value.size() * sizeof(double)));
            if (!in) throw IoError(path.string() + ": truncated payload for " + t.name);
            c.tensors.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": malformed header: " + e.what());
    }
    return c;
}

const DenseMatrix& Container::tensor(const std::string& name) const {
    for (const auto& t : tensors) {
        if (t.name == name) return t.value;
    }
    throw IoError("container has no tensor '" + name + "'");
}

} // namespace gel::io
