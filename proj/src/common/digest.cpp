#include "wot/common/digest.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>
#include <vector>

namespace wot {

std::string sha256_hex(std::span<const std::uint8_t> data) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
    SHA256(data.data(), data.size(), md.data());
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(md.size() * 2);
    for (unsigned char c : md) {
        out.push_back(kHex[c >> 4]);
        out.push_back(kHex[c & 0xf]);
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    return sha256_hex(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

std::string base64_encode(std::span<const std::uint8_t> data) {
    std::vector<unsigned char> buf(4 * ((data.size() + 2) / 3) + 1);
    const int n = EVP_EncodeBlock(buf.data(), data.data(), static_cast<int>(data.size()));
    return {reinterpret_cast<const char*>(buf.data()), static_cast<std::size_t>(n)};
}

}  // namespace wot
