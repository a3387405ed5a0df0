#include "joaicl/utf8.hpp"

namespace joaicl::utf8 {

namespace {

// Length in bytes of the sequence starting with `lead`, or 1 for invalid leads.
std::size_t seq_len(unsigned char lead) {
    if (lead < 0x80) return 1;
    if ((lead & 0xE0) == 0xC0) return 2;
    if ((lead & 0xF0) == 0xE0) return 3;
    if ((lead & 0xF8) == 0xF0) return 4;
    return 1;
}

} // namespace

std::size_t length(std::string_view s) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t len = seq_len(static_cast<unsigned char>(s[i]));
        if (i + len > s.size()) len = 1;
        i += len;
        ++n;
    }
    return n;
}

std::size_t byte_offset(std::string_view s, std::size_t cp) {
    std::size_t i = 0;
    while (cp > 0 && i < s.size()) {
        std::size_t len = seq_len(static_cast<unsigned char>(s[i]));
        if (i + len > s.size()) len = 1;
        i += len;
        --cp;
    }
    return i;
}

std::string_view substr(std::string_view s, std::size_t cp_start, std::size_t cp_end) {
    if (cp_end < cp_start) cp_end = cp_start;
    std::size_t b0 = byte_offset(s, cp_start);
    std::size_t b1 = byte_offset(s, cp_end);
    return s.substr(b0, b1 - b0);
}

char32_t decode(std::string_view s, std::size_t& pos) {
    unsigned char lead = static_cast<unsigned char>(s[pos]);
    std::size_t len = seq_len(lead);
    if (pos + len > s.size()) len = 1;
    char32_t cp = 0;
    switch (len) {
    case 1:
        cp = lead;
        break;
    case 2:
        cp = lead & 0x1F;
        break;
    case 3:
        cp = lead & 0x0F;
        break;
    default:
        cp = lead & 0x07;
        break;
    }
    for (std::size_t k = 1; k < len; ++k) {
        unsigned char c = static_cast<unsigned char>(s[pos + k]);
        if ((c & 0xC0) != 0x80) { // broken tail: treat lead as a lone byte
            cp = lead;
            len = 1;
            break;
        }
        cp = (cp << 6) | (c & 0x3F);
    }
    pos += len;
    return cp;
}

bool is_space(char32_t cp) {
    switch (cp) {
    case U' ':
    case U'\t':
    case U'\n':
    case U'\r':
    case U'\f':
    case U'\v':
    case U' ':
    case U'　':
        return true;
    default:
        return false;
    }
}

std::size_t non_space_count(std::string_view s) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if (!is_space(decode(s, i))) ++n;
    }
    return n;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

} // namespace joaicl::utf8
