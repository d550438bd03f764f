#pragma once

// Deep scan: walk every scannable file under the root (pom.xml excluded)
// and report each occurrence of a vulnerable class reference, in dotted or
// slash form, with exact file:line:column evidence.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "log4shield/filter.hpp"
#include "log4shield/kb.hpp"
#include "log4shield/version.hpp"

namespace log4shield {

enum class MatchForm : std::uint8_t {
    Dotted,          // org.apache.log4j.net.JMSAppender
    PathForm,        // org/apache/log4j/net/JMSAppender
    ConfigReference, // either form inside a configuration file
};

inline std::string_view to_string(MatchForm f) {
    switch (f) {
    case MatchForm::Dotted: return "dotted";
    case MatchForm::PathForm: return "path";
    case MatchForm::ConfigReference: return "config_reference";
    }
    return "?";
}

struct PatternHit {
    PatternId pattern_id{};
    std::string file; // root-relative, '/'-separated
    int line = 0;     // 1-based
    int column = 0;   // 1-based byte offset of the match start within the line
    std::string matched_text;
    MatchForm form = MatchForm::Dotted;
};

/// One match inside a single piece of content (no file attached yet).
struct MatchSpan {
    PatternId pattern_id{};
    int line = 0;
    int column = 0;
    std::string matched_text;
    MatchForm form = MatchForm::Dotted;
};

/// Exact, case-sensitive substring search for every rule's dotted and path
/// forms. Overlapping occurrences of different rules are all reported.
/// `config_context` marks matches as configuration references (the caller
/// decides from the file type).
inline std::vector<MatchSpan> match_patterns(std::string_view content, const std::vector<PatternRule>& rules,
                                             bool config_context = false) {
    std::vector<MatchSpan> spans;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        std::size_t eol = content.find('\n', pos);
        std::string_view line = (eol == std::string_view::npos) ? content.substr(pos) : content.substr(pos, eol - pos);
        ++line_no;
        if (!line.empty()) {
            for (const PatternRule& rule : rules) {
                for (int which = 0; which < 2; ++which) {
                    const std::string& needle = which == 0 ? rule.dotted_form : rule.path_form;
                    MatchForm form = config_context ? MatchForm::ConfigReference
                                                    : (which == 0 ? MatchForm::Dotted : MatchForm::PathForm);
                    std::size_t at = 0;
                    while ((at = line.find(needle, at)) != std::string_view::npos) {
                        spans.push_back({rule.pattern_id, line_no, static_cast<int>(at) + 1, needle, form});
                        ++at; // step one byte so no occurrence is skipped
                    }
                }
            }
        }
        if (eol == std::string_view::npos) break;
        pos = eol + 1;
    }
    std::sort(spans.begin(), spans.end(), [](const MatchSpan& a, const MatchSpan& b) {
        if (a.line != b.line) return a.line < b.line;
        if (a.column != b.column) return a.column < b.column;
        if (a.pattern_id != b.pattern_id) return static_cast<int>(a.pattern_id) < static_cast<int>(b.pattern_id);
        return static_cast<int>(a.form) < static_cast<int>(b.form);
    });
    return spans;
}

/// A file is worth reading when it is not too large, not binary (NUL byte in
/// the sampled prefix) and not inside an ignored directory.
inline bool is_scannable(const std::filesystem::path& file, std::string_view first_bytes, const ScanFilter& filter) {
    std::error_code ec;
    const auto size = std::filesystem::file_size(file, ec);
    if (!ec && size > filter.max_file_bytes) return false;
    if (filter.binary_detection && first_bytes.find('\0') != std::string_view::npos) return false;
    for (const auto& part : file)
        if (filter.dir_ignored(part.string())) return false;
    return true;
}

namespace scandetail {

inline bool config_file(const std::filesystem::path& p) {
    static const std::set<std::string> exts = {".properties", ".xml", ".yml", ".yaml",
                                               ".json",       ".conf", ".cfg", ".ini"};
    std::string ext = detail::lower(p.extension().string());
    return exts.count(ext) > 0;
}

} // namespace scandetail

struct DeepScanResult {
    std::vector<PatternHit> hits;    // sorted by (file, line, column)
    int files_scanned = 0;           // files whose content was searched
    std::vector<std::string> warnings;
};

/// Algorithm core: every file under root except files named pom.xml, every
/// pattern occurrence reported. Unreadable files become warnings, never
/// aborts. Hit order is deterministic regardless of traversal details.
inline DeepScanResult deep_scan_collect(const std::filesystem::path& root, const ScanFilter& filter,
                                        const std::vector<PatternRule>& rules) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw scan_error("no such directory: " + root.string());

    DeepScanResult result;
    walk_files(root, filter, [&](const fs::path& abs, const std::string& rel) {
        std::size_t slash = rel.rfind('/');
        std::string_view name = slash == std::string::npos ? std::string_view(rel)
                                                           : std::string_view(rel).substr(slash + 1);
        if (name == "pom.xml") return;

        std::ifstream in(abs, std::ios::binary);
        if (!in) {
            result.warnings.push_back(rel + ": cannot open file, skipped");
            return;
        }
        char prefix[4096];
        in.read(prefix, sizeof prefix);
        const auto prefix_len = static_cast<std::size_t>(in.gcount());
        if (!is_scannable(abs, std::string_view(prefix, prefix_len), filter)) return;

        std::string content(prefix, prefix_len);
        if (!in.eof()) {
            std::ostringstream rest;
            rest << in.rdbuf();
            content += rest.str();
        }
        if (in.bad()) {
            result.warnings.push_back(rel + ": read error, skipped");
            return;
        }
        ++result.files_scanned;
        for (MatchSpan& span : match_patterns(content, rules, scandetail::config_file(abs))) {
            PatternHit hit;
            hit.pattern_id = span.pattern_id;
            hit.file = rel;
            hit.line = span.line;
            hit.column = span.column;
            hit.matched_text = std::move(span.matched_text);
            hit.form = span.form;
            result.hits.push_back(std::move(hit));
        }
    });

    std::sort(result.hits.begin(), result.hits.end(), [](const PatternHit& a, const PatternHit& b) {
        if (a.file != b.file) return a.file < b.file;
        if (a.line != b.line) return a.line < b.line;
        if (a.column != b.column) return a.column < b.column;
        if (a.pattern_id != b.pattern_id) return static_cast<int>(a.pattern_id) < static_cast<int>(b.pattern_id);
        return static_cast<int>(a.form) < static_cast<int>(b.form);
    });
    return result;
}

inline std::vector<PatternHit> deep_scan(const std::filesystem::path& root, const ScanFilter& filter,
                                         const std::vector<PatternRule>& rules) {
    return deep_scan_collect(root, filter, rules).hits;
}

/// Seed for the "Potential misconfiguration" finding: at least one appender
/// class referenced, yet no Log4j version could be determined from any pom.
struct MisconfigSeed {
    std::vector<PatternHit> evidence; // the appender hits
};

inline std::optional<MisconfigSeed> detect_misconfiguration(const std::vector<PatternHit>& hits,
                                                            std::optional<VulnClass> version_evidence) {
    if (version_evidence) return std::nullopt;
    MisconfigSeed seed;
    for (const PatternHit& h : hits)
        if (is_appender_pattern(h.pattern_id)) seed.evidence.push_back(h);
    if (seed.evidence.empty()) return std::nullopt;
    return seed;
}

} // namespace log4shield
