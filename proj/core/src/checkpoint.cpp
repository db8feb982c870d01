#include "nfsim/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace nfsim {

namespace {

constexpr char kMagic[4] = {'N', 'F', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, const T& x) {
    out.write(reinterpret_cast<const char*>(&x), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T x{};
    in.read(reinterpret_cast<char*>(&x), sizeof(T));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
    return x;
}

} // namespace

void save_params(const std::filesystem::path& path, const ParamStore& params) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path.string() + " for writing");
    out.write(kMagic, 4);
    write_pod(out, kVersion);
    write_pod(out, static_cast<std::uint64_t>(params.count()));
    for (std::size_t i = 0; i < params.count(); ++i) {
        const auto& s = params.slot(i);
        write_pod(out, static_cast<std::uint32_t>(s.name.size()));
        out.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
        write_pod(out, static_cast<std::uint32_t>(s.value.rank()));
        for (auto d : s.value.shape) write_pod(out, static_cast<std::uint64_t>(d));
        out.write(reinterpret_cast<const char*>(s.value.v.data()),
                  static_cast<std::streamsize>(s.value.size() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path.string());
}

void load_params(const std::filesystem::path& path, ParamStore& params) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    }
    const auto version = read_pod<std::uint32_t>(in);
    if (version != kVersion) throw std::runtime_error("checkpoint: unsupported version");
    const auto count = read_pod<std::uint64_t>(in);
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto name_len = read_pod<std::uint32_t>(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const auto rank = read_pod<std::uint32_t>(in);
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) d = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
        auto* slot = params.find(name);
        if (!slot) throw std::runtime_error("checkpoint: unknown tensor " + name);
        if (slot->value.shape != shape) throw std::runtime_error("checkpoint: shape mismatch for " + name);
        in.read(reinterpret_cast<char*>(slot->value.v.data()),
                static_cast<std::streamsize>(slot->value.size() * sizeof(double)));
        if (!in) throw std::runtime_error("checkpoint: truncated data for " + name);
    }
}

} // namespace nfsim
