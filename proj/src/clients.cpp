/// @file clients.cpp

#include "groundeval/clients.hpp"

#include "groundeval/digest.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

namespace groundeval::clients {

using nlohmann::json;

double default_judge_temperature(std::string_view family) {
    std::string f(family);
    for (char& c : f) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return f.rfind("claude", 0) == 0 ? 1.0 : 0.0;
}

std::string canonical_decode_params(const DecodeParams& decode) {
    json params = json::object();
    if (decode.top_p) params["top_p"] = *decode.top_p;
    if (decode.max_tokens) params["max_tokens"] = *decode.max_tokens;
    return params.dump(); // nlohmann objects serialize with sorted keys
}

namespace {

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json record_to_json(const CompletionRecord& record) {
    return json{{"request_digest", record.request_digest},
                {"endpoint", record.endpoint},
                {"model", record.model},
                {"prompt", record.prompt},
                {"completion", record.completion},
                {"input_tokens", record.input_tokens},
                {"output_tokens", record.output_tokens},
                {"timestamp", record.timestamp},
                {"attempts", record.attempts}};
}

CompletionRecord record_from_json(const json& doc) {
    CompletionRecord record;
    record.request_digest = doc.at("request_digest").get<std::string>();
    record.endpoint = doc.at("endpoint").get<std::string>();
    record.model = doc.value("model", "");
    record.prompt = doc.at("prompt").get<std::string>();
    record.completion = doc.at("completion").get<std::string>();
    record.input_tokens = doc.value("input_tokens", 0L);
    record.output_tokens = doc.value("output_tokens", 0L);
    record.timestamp = doc.value("timestamp", "");
    record.attempts = doc.value("attempts", 0);
    return record;
}

/// Identity of a record for store hashing: everything except the
/// operational fields (timestamp, attempts).
std::string canonical_record(const CompletionRecord& record) {
    json doc = record_to_json(record);
    doc.erase("timestamp");
    doc.erase("attempts");
    return doc.dump();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw ConfigError("store: cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

CompletionStore::CompletionStore(std::filesystem::path dir, bool create) : dir_(std::move(dir)) {
    const auto records = dir_ / "records";
    if (create) {
        std::filesystem::create_directories(records);
    } else if (!std::filesystem::is_directory(records)) {
        throw ConfigError("store: no records directory under " + dir_.string());
    }
}

std::filesystem::path CompletionStore::record_path(const std::string& digest) const {
    return dir_ / "records" / (digest + ".json");
}

std::optional<CompletionRecord> CompletionStore::find(const std::string& digest) const {
    std::lock_guard lock(mutex_);
    std::ifstream in(record_path(digest), std::ios::binary);
    if (!in) return std::nullopt;
    json doc;
    try {
        in >> doc;
        return record_from_json(doc);
    } catch (const json::exception& e) {
        throw ConfigError("store: corrupt record " + digest + ": " + e.what());
    }
}

void CompletionStore::append(const CompletionRecord& record) {
    if (record.request_digest.empty()) {
        throw ConfigError("store: record without request digest");
    }
    std::lock_guard lock(mutex_);
    if (sealed()) {
        throw ConfigError("store: sealed, no further appends: " + dir_.string());
    }
    const auto path = record_path(record.request_digest);
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        json existing;
        in >> existing;
        CompletionRecord current = record_from_json(existing);
        if (canonical_record(current) != canonical_record(record)) {
            throw ConfigError("store: digest collision with different content: " +
                              record.request_digest);
        }
        return; // identical content, append is a no-op
    }
    write_file_atomic(path, record_to_json(record).dump(2) + "\n");
}

std::vector<std::string> CompletionStore::digests() const {
    std::vector<std::string> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir_ / "records")) {
        if (entry.path().extension() == ".json") {
            out.push_back(entry.path().stem().string());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string CompletionStore::content_digest() const {
    std::string buffer;
    for (const auto& digest : digests()) {
        const auto record = find(digest);
        buffer += canonical_record(*record);
        buffer += '\n';
    }
    return sha256_hex(buffer);
}

void CompletionStore::seal(const std::string& metadata_json) {
    const std::string content = content_digest();
    const auto manifest_path = dir_ / "manifest.json";
    if (std::filesystem::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        json existing;
        in >> existing;
        if (existing.value("content_digest", "") != content) {
            throw ConfigError("store: already sealed with different content: " + dir_.string());
        }
        return;
    }
    json manifest{{"sealed", true},
                  {"record_count", digests().size()},
                  {"content_digest", content},
                  {"metadata", json::parse(metadata_json)}};
    write_file_atomic(manifest_path, manifest.dump(2) + "\n");
}

bool CompletionStore::sealed() const {
    return std::filesystem::exists(dir_ / "manifest.json");
}

Client::Client(ClientMode mode, CompletionStore& store, HttpOptions options)
    : mode_(mode), store_(store), options_(options) {}

CompletionRecord Client::complete(const ModelEndpoint& endpoint, const std::string& prompt,
                                  const DecodeParams& decode) {
    const std::string digest = request_digest(endpoint.name, prompt, decode.temperature,
                                              canonical_decode_params(decode));
    if (auto cached = store_.find(digest)) return *cached;

    // Single-flight: exactly one caller fetches a given digest; the others
    // wait and read the stored result.
    {
        std::unique_lock lock(flight_mutex_);
        while (inflight_.count(digest)) flight_cv_.wait(lock);
        if (auto cached = store_.find(digest)) return *cached;
        inflight_.insert(digest);
    }
    struct FlightGuard {
        Client& client;
        const std::string& digest;
        ~FlightGuard() {
            std::lock_guard lock(client.flight_mutex_);
            client.inflight_.erase(digest);
            client.flight_cv_.notify_all();
        }
    } guard{*this, digest};

    if (mode_ == ClientMode::replay) {
        throw ReplayMissError("replay miss: digest " + digest + " for endpoint " + endpoint.name +
                              " not in store " + store_.dir().string());
    }

    CompletionRecord record = fetch_http(endpoint, prompt, decode, digest);
    store_.append(record);
    return record;
}

void Client::rate_limit(const ModelEndpoint& endpoint) {
    using clock = std::chrono::steady_clock;
    for (;;) {
        double wait_s = 0.0;
        {
            std::lock_guard lock(bucket_mutex_);
            auto [it, inserted] = buckets_.try_emplace(endpoint.name);
            Bucket& bucket = it->second;
            if (inserted) {
                bucket.capacity = std::max(1.0, endpoint.requests_per_minute / 60.0);
                bucket.tokens = bucket.capacity;
                bucket.refill_per_s = endpoint.requests_per_minute / 60.0;
                bucket.last = clock::now();
            }
            const auto now = clock::now();
            const double elapsed = std::chrono::duration<double>(now - bucket.last).count();
            bucket.tokens = std::min(bucket.capacity, bucket.tokens + elapsed * bucket.refill_per_s);
            bucket.last = now;
            if (bucket.tokens >= 1.0) {
                bucket.tokens -= 1.0;
                return;
            }
            wait_s = (1.0 - bucket.tokens) / bucket.refill_per_s;
        }
        std::this_thread::sleep_for(std::chrono::duration<double>(wait_s));
    }
}

CompletionRecord Client::fetch_http(const ModelEndpoint& endpoint, const std::string& prompt,
                                    const DecodeParams& decode, const std::string& digest) {
    if (endpoint.base_url.empty()) {
        throw ConfigError("endpoint " + endpoint.name + " has no base_url configured");
    }

    json request{{"model", endpoint.name},
                 {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
                 {"temperature", decode.temperature}};
    if (decode.top_p) request["top_p"] = *decode.top_p;
    if (decode.max_tokens) request["max_tokens"] = *decode.max_tokens;
    const std::string body = request.dump();

    httplib::Client http(endpoint.base_url);
    http.set_connection_timeout(std::chrono::duration<double>(endpoint.request_timeout_s));
    http.set_read_timeout(std::chrono::duration<double>(endpoint.request_timeout_s));
    httplib::Headers headers;
    if (!endpoint.auth_env.empty()) {
        if (const char* token = std::getenv(endpoint.auth_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + token);
        }
    }

    std::string last_error;
    double backoff = options_.backoff_initial_s;
    const int attempts_allowed = std::max(1, endpoint.max_retries);
    for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
        rate_limit(endpoint);
        auto response = http.Post("/v1/chat/completions", headers, body, "application/json");
        if (response && response->status == 200) {
            try {
                const json doc = json::parse(response->body);
                CompletionRecord record;
                record.request_digest = digest;
                record.endpoint = endpoint.name;
                record.model = endpoint.family;
                record.prompt = prompt;
                record.completion =
                    doc.at("choices").at(0).at("message").at("content").get<std::string>();
                if (doc.contains("usage")) {
                    record.input_tokens = doc["usage"].value("prompt_tokens", 0L);
                    record.output_tokens = doc["usage"].value("completion_tokens", 0L);
                }
                record.timestamp = iso_utc_now();
                record.attempts = attempt;
                return record;
            } catch (const json::exception& e) {
                last_error = std::string("malformed response body: ") + e.what();
            }
        } else if (response) {
            last_error = "HTTP status " + std::to_string(response->status);
            // Client errors other than rate limiting will not improve with
            // retries.
            if (response->status >= 400 && response->status < 500 && response->status != 429) {
                throw NetworkError("endpoint " + endpoint.name + ": " + last_error + ": " +
                                   response->body);
            }
        } else {
            last_error = "transport error: " + httplib::to_string(response.error());
        }
        if (attempt < attempts_allowed) {
            std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
            backoff = std::min(backoff * 2.0, options_.backoff_cap_s);
        }
    }
    throw NetworkError("endpoint " + endpoint.name + " failed after " +
                       std::to_string(attempts_allowed) + " attempts: " + last_error);
}

JudgeTemplate parse_judge_template(std::string_view text) {
    JudgeTemplate tmpl;
    tmpl.extract_rule.clear();
    std::string current;
    std::istringstream lines{std::string(text)};
    std::string line;
    std::string body;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line == "[template]" || line == "[extract]") {
            current = line.substr(1, line.size() - 2);
            continue;
        }
        if (current == "template") {
            body += line;
            body += '\n';
        } else if (current == "extract") {
            if (!line.empty()) tmpl.extract_rule = line;
        } else if (!line.empty()) {
            throw ConfigError("judge template: content before [template] section");
        }
    }
    while (!body.empty() && body.back() == '\n') body.pop_back();
    if (body.empty()) throw ConfigError("judge template: missing [template] body");
    if (tmpl.extract_rule.empty()) {
        throw ConfigError("judge template: missing [extract] rule");
    }
    if (tmpl.extract_rule != "first_token_boolean" &&
        tmpl.extract_rule.rfind("json_field:", 0) != 0) {
        throw ConfigError("judge template: unknown extraction rule \"" + tmpl.extract_rule + "\"");
    }
    tmpl.body = std::move(body);
    return tmpl;
}

JudgeTemplate load_judge_template(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("judge template not found: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_judge_template(buffer.str());
}

namespace {

void replace_all(std::string& text, std::string_view key, std::string_view value) {
    size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
}

} // namespace

std::string render_judge_prompt(const JudgeTemplate& tmpl, const dataset::EvalItem& item,
                                const protocol::AnonymizedPresentation& presentation) {
    std::string prompt = tmpl.body;
    replace_all(prompt, "{{question}}", item.question);
    replace_all(prompt, "{{context}}", item.context_document);
    replace_all(prompt, "{{presentation}}", protocol::render_presentation(presentation));
    return prompt;
}

protocol::JudgeVerdict extract_verdict(const JudgeTemplate& tmpl, const std::string& judge_id,
                                       const std::string& raw) {
    std::string token;
    if (tmpl.extract_rule == "first_token_boolean") {
        std::istringstream stream(raw);
        stream >> token;
    } else { // json_field:<name>, validated at parse time
        const std::string field = tmpl.extract_rule.substr(std::string("json_field:").size());
        try {
            token = json::parse(raw).at(field).get<std::string>();
        } catch (const json::exception&) {
            throw JudgeParseError("judge " + judge_id + ": output is not JSON with field \"" +
                                      field + "\"",
                                  raw);
        }
    }
    while (!token.empty() && std::ispunct(static_cast<unsigned char>(token.back()))) {
        token.pop_back();
    }
    for (char& c : token) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));

    protocol::JudgeVerdict verdict;
    verdict.judge_id = judge_id;
    verdict.raw_judgment = raw;
    if (token == "TRUE") {
        verdict.verdict = true;
        verdict.eligible = true;
    } else if (token == "FALSE") {
        verdict.verdict = false;
        verdict.eligible = true;
    } else if (token == "INELIGIBLE") {
        verdict.verdict = false;
        verdict.eligible = false;
    } else {
        throw JudgeParseError("judge " + judge_id + ": unparseable verdict token \"" + token + "\"",
                              raw);
    }
    return verdict;
}

protocol::JudgeVerdict judge_query(Client& client, const ModelEndpoint& judge,
                                   const dataset::EvalItem& item,
                                   const protocol::AnonymizedPresentation& presentation,
                                   const JudgeTemplate& judge_template) {
    if (judge.role != EndpointRole::judge) {
        throw ConfigError("judge_query: endpoint " + judge.name + " does not have the judge role");
    }
    const std::string prompt = render_judge_prompt(judge_template, item, presentation);
    DecodeParams decode;
    decode.temperature = judge.temperature;
    const CompletionRecord record = client.complete(judge, prompt, decode);
    return extract_verdict(judge_template, judge.name, record.completion);
}

} // namespace groundeval::clients
