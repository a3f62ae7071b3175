/// @file digest.cpp

#include "groundeval/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <stdexcept>

namespace groundeval {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int md_len = 0;
    if (EVP_Digest(data.data(), data.size(), md.data(), &md_len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: EVP_Digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * md_len);
    for (unsigned int i = 0; i < md_len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0x0F]);
    }
    return out;
}

std::string normalize_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            // CRLF collapses to LF; a bare CR also becomes LF.
            if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
            out.push_back('\n');
        } else {
            out.push_back(text[i]);
        }
    }
    while (!out.empty()) {
        const char c = out.back();
        if (c == ' ' || c == '\t' || c == '\n' || c == '\v' || c == '\f') {
            out.pop_back();
        } else {
            break;
        }
    }
    return out;
}

namespace {

void append_length_prefixed(std::string& buffer, std::string_view field) {
    char len[32];
    std::snprintf(len, sizeof len, "%zu:", field.size());
    buffer.append(len);
    buffer.append(field);
    buffer.push_back('\n');
}

} // namespace

std::string content_digest(std::string_view question, std::string_view document) {
    const std::string q = normalize_text(question);
    const std::string d = normalize_text(document);
    std::string buffer;
    buffer.reserve(q.size() + d.size() + 64);
    append_length_prefixed(buffer, q);
    append_length_prefixed(buffer, d);
    return sha256_hex(buffer);
}

std::string request_digest(std::string_view endpoint_name, std::string_view prompt,
                           double temperature, std::string_view decode_params_canonical) {
    char temp[64];
    // %.17g round-trips doubles exactly, so equal temperatures always format
    // identically and the digest stays stable across platforms.
    std::snprintf(temp, sizeof temp, "%.17g", temperature);
    std::string buffer;
    buffer.reserve(prompt.size() + decode_params_canonical.size() + endpoint_name.size() + 96);
    append_length_prefixed(buffer, endpoint_name);
    append_length_prefixed(buffer, prompt);
    append_length_prefixed(buffer, temp);
    append_length_prefixed(buffer, decode_params_canonical);
    return sha256_hex(buffer);
}

} // namespace groundeval
