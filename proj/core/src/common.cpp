#include "vplan/common.hpp"

#include <array>
#include <cmath>

namespace vplan {

std::string u64_hex(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::string Digest::hex() const { return u64_hex(state_); }

std::string digest_hex(std::string_view payload) {
    Digest d;
    d.update(payload);
    return d.hex();
}

}  // namespace vplan
