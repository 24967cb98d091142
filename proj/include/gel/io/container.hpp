#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gel/numeric/dense.hpp"

namespace gel::io {

struct NamedMatrix {
    std::string name;
    DenseMatrix value;
};

/// Tensor container layout:
///
///   bytes 0..7    magic "GELTENS1"
///   bytes 8..15   header length L, uint64 little-endian
///   next L bytes  UTF-8 JSON header; header["tensors"] lists
///                 {"name", "rows", "cols"} in payload order
///   payload       each tensor's values as float64 little-endian, row-major
///
/// Caller-supplied header fields are kept verbatim; "tensors" is overwritten.
void write_container(const std::filesystem::path& path, nlohmann::json header,
                     const std::vector<NamedMatrix>& tensors);

struct Container {
    nlohmann::json header;
    std::vector<NamedMatrix> tensors;

    /// Throws IoError when `name` is absent.
    const DenseMatrix& tensor(const std::string& name) const;
};

/// Throws IoError on a bad magic, truncated payload or malformed header.
Container read_container(const std::filesystem::path& path);

} // namespace gel::io
