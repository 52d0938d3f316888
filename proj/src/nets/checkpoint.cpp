#include "cir/nets/checkpoint.hpp"

#include "cir/util/io.hpp"

#include <cstdint>
#include <cstring>
#include <stdexcept>

namespace cir::nets {

namespace {

constexpr char kMagic[8] = {'C', 'I', 'R', 'C', 'K', 'P', 'T', '1'};

template <typename T>
void append(std::string& buf, const T& v) {
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T consume(const std::string& buf, size_t& off) {
    if (off + sizeof(T) > buf.size()) {
        throw std::runtime_error("checkpoint: truncated file");
    }
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

} // namespace

void save_checkpoint(const std::string& path, const std::vector<ad::NodePtr>& params) {
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    append<std::uint64_t>(buf, params.size());
    for (const auto& p : params) {
        append<std::uint32_t>(buf, static_cast<std::uint32_t>(p->name.size()));
        buf.append(p->name);
        append<std::int64_t>(buf, p->value.rows());
        append<std::int64_t>(buf, p->value.cols());
        buf.append(reinterpret_cast<const char*>(p->value.data()),
                   sizeof(double) * static_cast<size_t>(p->value.size()));
    }
    util::atomic_write_file(path, buf);
}

void load_checkpoint(const std::string& path, const std::vector<ad::NodePtr>& params) {
    const std::string buf = util::read_file(path);
    size_t off = 0;
    if (buf.size() < sizeof(kMagic) || std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("checkpoint: bad magic in " + path);
    }
    off = sizeof(kMagic);
    const auto count = consume<std::uint64_t>(buf, off);
    if (count != params.size()) {
        throw std::runtime_error("checkpoint: has " + std::to_string(count) +
                                 " tensors, expected " + std::to_string(params.size()));
    }
    for (const auto& p : params) {
        const auto name_len = consume<std::uint32_t>(buf, off);
        if (off + name_len > buf.size()) {
            throw std::runtime_error("checkpoint: truncated name");
        }
        const std::string name = buf.substr(off, name_len);
        off += name_len;
        if (name != p->name) {
            throw std::runtime_error("checkpoint: tensor '" + name + "' where '" + p->name +
                                     "' was expected");
        }
        const auto rows = consume<std::int64_t>(buf, off);
        const auto cols = consume<std::int64_t>(buf, off);
        if (rows != p->value.rows() || cols != p->value.cols()) {
            throw std::runtime_error("checkpoint: shape mismatch for '" + name + "'");
        }
        const size_t bytes = sizeof(double) * static_cast<size_t>(rows * cols);
        if (off + bytes > buf.size()) {
            throw std::runtime_error("checkpoint: truncated data for '" + name + "'");
        }
        std::memcpy(p->value.data(), buf.data() + off, bytes);
        off += bytes;
    }
}

} // namespace cir::nets
