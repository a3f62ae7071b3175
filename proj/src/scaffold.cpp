/// @file scaffold.cpp

#include "groundeval/scaffold.hpp"

#include "groundeval/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace groundeval::scaffold {

namespace {

std::string trim(std::string_view s) {
    size_t begin = 0;
    size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return std::string(s.substr(begin, end - begin));
}

std::string normalize_family(std::string_view family) {
    std::string out;
    out.reserve(family.size());
    for (char c : family) {
        if (c == ' ' || c == '_') {
            out.push_back('-');
        } else {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    return out;
}

} // namespace

void validate(const ScaffoldConfig& config) {
    if (config.few_shot_count != 1 && config.few_shot_count != 3) {
        throw ConfigError("scaffold config: few_shot_count must be 1 or 3, got " +
                          std::to_string(config.few_shot_count));
    }
    if (config.mode == DeploymentMode::safety_override && !config.safety_exception_text) {
        throw ConfigError("scaffold config: safety_override mode requires safety_exception_text");
    }
    if (config.mode == DeploymentMode::balanced_authority) {
        if (!config.context_confidence_threshold) {
            throw ConfigError(
                "scaffold config: balanced_authority mode requires context_confidence_threshold");
        }
        const double t = *config.context_confidence_threshold;
        if (!(t >= 0.0 && t <= 1.0)) {
            throw ConfigError("scaffold config: context_confidence_threshold must be in [0,1]");
        }
    }
    if (config.temperature < 0.0) {
        throw ConfigError("scaffold config: temperature must be nonnegative");
    }
}

ScaffoldTemplate parse_template(std::string_view text) {
    // Sections keyed by header name, collected line by line. A header is a
    // whole line of the form [name]; anything else is content.
    std::map<std::string, std::string> sections;
    std::string current;
    std::istringstream lines{std::string(text)};
    std::string line;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.size() >= 2 && line.front() == '[' && line.back() == ']') {
            current = line.substr(1, line.size() - 2);
            if (sections.count(current)) {
                throw ConfigError("scaffold template: duplicate section [" + current + "]");
            }
            sections[current] = "";
            continue;
        }
        if (current.empty()) {
            if (trim(line).empty()) continue;
            throw ConfigError("scaffold template: content before first section header");
        }
        sections[current] += line;
        sections[current] += '\n';
    }

    auto take = [&sections](const std::string& name) -> std::string {
        auto it = sections.find(name);
        if (it == sections.end()) return "";
        std::string value = it->second;
        while (!value.empty() && value.back() == '\n') value.pop_back();
        sections.erase(it);
        return value;
    };

    ScaffoldTemplate tmpl;
    if (!sections.count("base")) {
        throw ConfigError("scaffold template: missing [base] section");
    }
    tmpl.base_system_prompt = take("base");
    tmpl.scaffold_body = take("body");
    tmpl.format_rules = take("rules");

    for (int n = 1;; ++n) {
        const std::string prefix = "example." + std::to_string(n) + ".";
        if (!sections.count(prefix + "client")) break;
        FewShotExample example;
        example.client_turn = take(prefix + "client");
        example.context_block = take(prefix + "context");
        example.analysis = take(prefix + "analysis");
        example.response = take(prefix + "response");
        tmpl.few_shot_examples.push_back(std::move(example));
    }

    if (!sections.empty()) {
        throw ConfigError("scaffold template: unknown or out-of-order section [" +
                          sections.begin()->first + "]");
    }
    return tmpl;
}

ScaffoldTemplate load_template(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("scaffold template not found: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_template(buffer.str());
}

std::string serialize_template(const ScaffoldTemplate& tmpl) {
    std::ostringstream out;
    out << "[base]\n" << tmpl.base_system_prompt << "\n\n";
    out << "[body]\n" << tmpl.scaffold_body << "\n\n";
    out << "[rules]\n" << tmpl.format_rules << "\n";
    for (size_t i = 0; i < tmpl.few_shot_examples.size(); ++i) {
        const auto& example = tmpl.few_shot_examples[i];
        const std::string prefix = "\n[example." + std::to_string(i + 1) + ".";
        out << prefix << "client]\n" << example.client_turn << "\n";
        out << prefix << "context]\n" << example.context_block << "\n";
        out << prefix << "analysis]\n" << example.analysis << "\n";
        out << prefix << "response]\n" << example.response << "\n";
    }
    return out.str();
}

namespace {

void append_block(std::string& out, std::string_view block) {
    if (block.empty()) return;
    if (!out.empty()) out += "\n\n";
    out += block;
}

std::string render_item_block(const dataset::EvalItem& item) {
    std::string out = "Client: " + item.question;
    out += "\n\nContext:\n" + item.context_document;
    return out;
}

std::string render_example(const FewShotExample& example, int number) {
    std::string out = "Example " + std::to_string(number) + ":\n";
    out += "Client: " + example.client_turn;
    out += "\n\nContext:\n" + example.context_block;
    out += "\n\nAnalysis: " + example.analysis;
    out += "\nResponse: " + example.response;
    return out;
}

} // namespace

AssembledPrompt assemble_prompt(const dataset::EvalItem& item, const ScaffoldTemplate& tmpl,
                                const ScaffoldConfig& config,
                                std::optional<double> context_confidence) {
    validate(config);

    AssembledPrompt result;
    bool use_scaffold = config.enabled;

    if (use_scaffold && config.mode == DeploymentMode::balanced_authority && context_confidence &&
        *context_confidence < *config.context_confidence_threshold) {
        use_scaffold = false;
        std::ostringstream note;
        note << "balanced_authority: context confidence " << *context_confidence
             << " below threshold " << *config.context_confidence_threshold
             << ", scaffold disabled for item " << item.id;
        result.routing_note = note.str();
    }

    std::string text;
    append_block(text, tmpl.base_system_prompt);

    if (use_scaffold) {
        const int k = config.few_shot_count;
        if (k > static_cast<int>(tmpl.few_shot_examples.size())) {
            throw ConfigError("assemble_prompt: few_shot_count " + std::to_string(k) +
                              " exceeds available examples (" +
                              std::to_string(tmpl.few_shot_examples.size()) + ")");
        }
        append_block(text, tmpl.scaffold_body);

        std::string rules = tmpl.format_rules;
        if (config.mode == DeploymentMode::safety_override) {
            if (!rules.empty()) rules += "\n";
            rules += *config.safety_exception_text;
        }
        append_block(text, rules);

        for (int i = 0; i < k; ++i) {
            append_block(text, render_example(tmpl.few_shot_examples[i], i + 1));
        }
        result.few_shot_used = k;
    }

    append_block(text, render_item_block(item));

    result.text = std::move(text);
    result.used_scaffold = use_scaffold;
    return result;
}

namespace {

/// Finds the first line whose content (after optional indentation) starts
/// with `marker`. Returns the index just past the marker, or npos.
size_t find_line_marker(std::string_view text, std::string_view marker, size_t from,
                        size_t* marker_begin) {
    size_t line_start = from;
    while (line_start <= text.size()) {
        size_t p = line_start;
        while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
        if (text.compare(p, marker.size(), marker) == 0) {
            if (marker_begin) *marker_begin = line_start;
            return p + marker.size();
        }
        const size_t nl = text.find('\n', line_start);
        if (nl == std::string_view::npos) break;
        line_start = nl + 1;
    }
    return std::string_view::npos;
}

} // namespace

StructuredResponse parse_structured(std::string_view raw) {
    if (raw.empty()) {
        throw ConfigError("parse_structured: empty input");
    }

    StructuredResponse out;
    out.raw = std::string(raw);

    size_t analysis_begin = 0;
    const size_t analysis_content = find_line_marker(raw, "Analysis:", 0, &analysis_begin);
    if (analysis_content != std::string_view::npos) {
        size_t response_begin = 0;
        const size_t response_content =
            find_line_marker(raw, "Response:", analysis_content, &response_begin);
        if (response_content != std::string_view::npos) {
            const std::string answer = trim(raw.substr(response_content));
            if (!answer.empty()) {
                out.analysis =
                    trim(raw.substr(analysis_content, response_begin - analysis_content));
                out.answer = answer;
                out.parse_status = ParseStatus::structured;
                return out;
            }
        }
    }

    // Marker pair absent or incomplete: keep the whole text so nothing is
    // dropped; downstream records the parse status.
    out.answer = out.raw;
    out.parse_status = ParseStatus::unstructured_fallback;
    return out;
}

FewShotChoice few_shot_for_family(std::string_view family) {
    const std::string f = normalize_family(family);
    if (f == "gpt-4o" || f == "claude-3.5-sonnet") {
        return {3, false};
    }
    if (f == "gemini-2.5-pro" || f == "phi-3.5-instruct" || f == "humains-junior" ||
        f == "humains-medium" || f == "gpt-4o-mini" || f == "claude-3.7-sonnet") {
        return {1, false};
    }
    return {1, true};
}

double default_temperature(std::string_view family) {
    const std::string f = normalize_family(family);
    if (f == "phi-3.5-instruct" || f == "humains-junior" || f == "humains-medium" ||
        f == "gpt-4o-mini") {
        return 0.3;
    }
    return 1.0;
}

double scaffold_token_overhead(long base_prompt_tokens, long scaffolded_prompt_tokens) {
    if (base_prompt_tokens <= 0) {
        throw ConfigError("scaffold_token_overhead: base_prompt_tokens must be positive");
    }
    return static_cast<double>(scaffolded_prompt_tokens - base_prompt_tokens) /
           static_cast<double>(base_prompt_tokens);
}

} // namespace groundeval::scaffold
