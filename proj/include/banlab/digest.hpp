#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

namespace banlab::digest {

/// FNV-1a accumulator for reproducible input fingerprints in reports.
class Fnv1a {
public:
    void bytes(const void* data, size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }
    void add(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        bytes(&bits, sizeof bits);
    }
    void add(std::uint64_t v) { bytes(&v, sizeof v); }
    void add(int v) { add(static_cast<std::uint64_t>(v)); }
    void add(const std::string& s) { bytes(s.data(), s.size()); }
    void add(const std::vector<double>& v) {
        for (double x : v) add(x);
    }

    std::string hex() const {
        static const char* digits = "0123456789abcdef";
        std::string out(16, '0');
        std::uint64_t h = hash_;
        for (int i = 15; i >= 0; --i) {
            out[static_cast<size_t>(i)] = digits[h & 0xf];
            h >>= 4;
        }
        return out;
    }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

} // namespace banlab::digest
