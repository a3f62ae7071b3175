/// @file dataset.cpp

#include "groundeval/dataset.hpp"

#include "groundeval/digest.hpp"
#include "groundeval/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace groundeval::dataset {

using nlohmann::json;

EvalSubset load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("corpus file not found: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    return parse_corpus(text, "corpus-" + sha256_hex(text).substr(0, 16));
}

EvalSubset parse_corpus(std::string_view text, const std::string& corpus_id) {
    EvalSubset subset;
    subset.kind = SelectionKind::full;
    subset.source_corpus_id = corpus_id;

    std::unordered_set<std::string> seen_ids;
    std::istringstream lines{std::string(text)};
    std::string line;
    long line_number = 0;
    long sequence = 0;

    while (std::getline(lines, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ConfigError("corpus line " + std::to_string(line_number) +
                              ": malformed record: " + e.what());
        }
        if (!record.is_object() || !record.contains("question") || !record.contains("context")) {
            throw ConfigError("corpus line " + std::to_string(line_number) +
                              ": record must be an object with question and context");
        }

        EvalItem item;
        item.sequence_index = ++sequence;
        item.question = record.at("question").get<std::string>();
        item.context_document = record.at("context").get<std::string>();
        if (record.contains("domain")) item.domain_tag = record.at("domain").get<std::string>();
        item.id = record.contains("id") ? record.at("id").get<std::string>()
                                        : "q" + std::to_string(sequence);
        if (!seen_ids.insert(item.id).second) {
            throw ConfigError("corpus line " + std::to_string(line_number) + ": duplicate id \"" +
                              item.id + "\"");
        }
        item.content_digest = content_digest(item.question, item.context_document);
        subset.items.push_back(std::move(item));
    }

    if (subset.items.empty()) {
        throw ConfigError("empty corpus: " + corpus_id);
    }
    subset.n = static_cast<long>(subset.items.size());
    return subset;
}

EvalSubset select_first_n(const EvalSubset& corpus, long n) {
    const long size = static_cast<long>(corpus.items.size());
    if (n < 1 || n > size) {
        throw ConfigError("select_first_n: n=" + std::to_string(n) + " out of range [1, " +
                          std::to_string(size) + "]");
    }
    EvalSubset subset;
    subset.items.assign(corpus.items.begin(), corpus.items.begin() + n);
    subset.kind = SelectionKind::first_n;
    subset.n = n;
    subset.source_corpus_id = corpus.source_corpus_id;
    return subset;
}

namespace {

std::unordered_map<std::string, const ModelResponse*> index_by_digest(
    const std::vector<ModelResponse>& run, const char* side) {
    std::unordered_map<std::string, const ModelResponse*> index;
    index.reserve(run.size());
    for (const auto& response : run) {
        if (!index.emplace(response.item_digest, &response).second) {
            throw ConfigError(std::string("align_pairs: duplicate digest in run ") + side + ": " +
                              response.item_digest);
        }
    }
    return index;
}

} // namespace

AlignmentResult align_pairs(const EvalSubset& items, const std::vector<ModelResponse>& run_a,
                            const std::vector<ModelResponse>& run_b) {
    const auto index_a = index_by_digest(run_a, "a");
    const auto index_b = index_by_digest(run_b, "b");

    std::unordered_set<std::string> known_digests;
    known_digests.reserve(items.items.size());
    for (const auto& item : items.items) known_digests.insert(item.content_digest);

    AlignmentResult result;
    for (const auto& item : items.items) {
        const auto a = index_a.find(item.content_digest);
        const auto b = index_b.find(item.content_digest);
        if (a != index_a.end() && b != index_b.end()) {
            result.pairs.push_back(PairedRecord{item, *a->second, *b->second});
        } else if (a != index_a.end()) {
            result.unmatched.push_back({"a", item.content_digest, "missing_counterpart"});
        } else if (b != index_b.end()) {
            result.unmatched.push_back({"b", item.content_digest, "missing_counterpart"});
        }
    }
    for (const auto& response : run_a) {
        if (!known_digests.count(response.item_digest)) {
            result.unmatched.push_back({"a", response.item_digest, "unknown_item"});
        }
    }
    for (const auto& response : run_b) {
        if (!known_digests.count(response.item_digest)) {
            result.unmatched.push_back({"b", response.item_digest, "unknown_item"});
        }
    }
    return result;
}

} // namespace groundeval::dataset
