/// @file digest.hpp
/// @brief Content digests for items, requests, and store manifests.
///
/// Items are matched across runs "by question text and document content", so
/// the digest is the pairing key and must be stable across platforms and
/// incidental whitespace differences. Normalization is deliberately minimal:
/// CRLF to LF plus a trailing-whitespace strip, nothing else, because more
/// aggressive canonicalization risks merging genuinely different documents.

#pragma once

#include <string>
#include <string_view>

namespace groundeval {

/// Hex-encoded SHA-256 of raw bytes.
std::string sha256_hex(std::string_view data);

/// CRLF (and lone CR) to LF, then strip trailing whitespace from the end of
/// the text. Interior whitespace is untouched.
std::string normalize_text(std::string_view text);

/// Digest of a (question, context document) pair after normalization.
/// Fields are length-prefixed before hashing so ("ab","c") and ("a","bc")
/// cannot collide.
std::string content_digest(std::string_view question, std::string_view document);

/// Cache key for one completion request. Any change to the endpoint name,
/// prompt, temperature, or decode parameters yields a new digest.
/// `decode_params_canonical` must already be a canonical serialization
/// (sorted-key JSON in practice).
std::string request_digest(std::string_view endpoint_name, std::string_view prompt,
                           double temperature, std::string_view decode_params_canonical);

} // namespace groundeval
