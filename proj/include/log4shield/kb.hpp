#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "log4shield/errors.hpp"
#include "log4shield/version.hpp"

namespace log4shield {

/// The class-reference detectors the deep scan knows about. Six come from
/// the Log4j CVE write-ups; Chainsaw covers the CVE-2022-23307 dependency.
enum class PatternId : std::uint8_t {
    JndiLookup,
    SocketServer,
    SMTPAppender,
    JMSAppender,
    JMSSink,
    JDBCAppender,
    Chainsaw,
};

inline constexpr std::array<PatternId, 7> all_pattern_ids = {
    PatternId::JndiLookup,   PatternId::SocketServer, PatternId::SMTPAppender, PatternId::JMSAppender,
    PatternId::JMSSink,      PatternId::JDBCAppender, PatternId::Chainsaw,
};

inline std::string_view to_string(PatternId p) {
    switch (p) {
    case PatternId::JndiLookup: return "JndiLookup";
    case PatternId::SocketServer: return "SocketServer";
    case PatternId::SMTPAppender: return "SMTPAppender";
    case PatternId::JMSAppender: return "JMSAppender";
    case PatternId::JMSSink: return "JMSSink";
    case PatternId::JDBCAppender: return "JDBCAppender";
    case PatternId::Chainsaw: return "Chainsaw";
    }
    return "?";
}

inline std::optional<PatternId> pattern_id_from_string(std::string_view s) {
    for (PatternId p : all_pattern_ids)
        if (to_string(p) == s) return p;
    return std::nullopt;
}

/// Appender-style detectors; a hit on one of these without any version
/// evidence raises the "Potential misconfiguration" finding.
inline bool is_appender_pattern(PatternId p) {
    switch (p) {
    case PatternId::SMTPAppender:
    case PatternId::JMSAppender:
    case PatternId::JMSSink:
    case PatternId::JDBCAppender:
    case PatternId::Chainsaw: return true;
    case PatternId::JndiLookup:
    case PatternId::SocketServer: return false;
    }
    return false;
}

enum class Generation : std::uint8_t { V1, V2, Both };

inline std::string_view to_string(Generation g) {
    switch (g) {
    case Generation::V1: return "v1";
    case Generation::V2: return "v2";
    case Generation::Both: return "both";
    }
    return "?";
}

/// One deep-scan detector: a fully qualified class (or package) reference in
/// dotted form plus the slash-separated variant found in paths and jar
/// listings. path_form is derived from dotted_form so the two always denote
/// the same class.
struct PatternRule {
    PatternId pattern_id;
    std::string dotted_form;
    std::string path_form;
    std::vector<std::string> linked_cves; // ordered as in the KB (score desc)

    static std::string derive_path_form(std::string_view dotted) {
        std::string out(dotted);
        std::replace(out.begin(), out.end(), '.', '/');
        return out;
    }
};

/// One knowledge-base entry. `affected` is absent for entries that are not
/// version-triggered (the misconfiguration record). `patterns` is empty for
/// version-only CVEs.
struct CveRecord {
    std::string id;
    int score_tenths = 0; // CVSS base score * 10, exact
    Generation generation = Generation::Both;
    std::optional<VersionRange> affected;
    std::vector<PatternId> patterns;
    std::string recommendation;

    double base_score() const noexcept { return score_tenths / 10.0; }

    /// "10.0", "9.8", ...: one decimal digit, always.
    std::string score_text() const {
        return std::to_string(score_tenths / 10) + "." + std::to_string(score_tenths % 10);
    }

    /// v1 CVEs tied to a specific appender class: a v1 version alone yields
    /// them only at "version-only" confidence, and strict mode drops them.
    bool pattern_gated() const noexcept { return generation == Generation::V1 && !patterns.empty(); }
};

inline constexpr std::string_view misconfiguration_id = "Potential misconfiguration";

/// Inputs to the base-score formula.
struct CvssInputs {
    double impact = 0.0;
    double exploitability = 0.0;
};

/// Base score = impact + exploitability, rounded UP to one decimal place and
/// clamped to 10.0. The sum is snapped at five decimals first so that binary
/// floating point noise (0.1 + 0.2) cannot push a value over a tenth
/// boundary.
inline double compute_base_score(const CvssInputs& in) {
    if (!(std::isfinite(in.impact) && std::isfinite(in.exploitability)))
        throw std::invalid_argument("base score inputs must be finite");
    if (in.impact < 0.0 || in.exploitability < 0.0)
        throw std::invalid_argument("base score inputs must be non-negative");
    const double sum = in.impact + in.exploitability;
    const long long scaled = std::llround(sum * 100000.0); // 5-decimal snap
    long long tenths = scaled / 10000;
    if (scaled % 10000 != 0) ++tenths; // round up
    if (tenths > 100) tenths = 100;
    return static_cast<double>(tenths) / 10.0;
}

/// Immutable CVE knowledge base: records sorted by score (descending, id
/// ascending on ties) plus the pattern-rule table. Loaded once, read-only
/// afterwards.
class Kb {
public:
    const std::vector<CveRecord>& records() const noexcept { return records_; }
    const std::vector<PatternRule>& pattern_rules() const noexcept { return rules_; }

    bool contains(std::string_view id) const { return find(id) != nullptr; }

    const CveRecord& record(std::string_view id) const {
        if (const CveRecord* r = find(id)) return *r;
        throw error("unknown CVE identifier: " + std::string(id));
    }

    const PatternRule& rule(PatternId p) const {
        for (const auto& r : rules_)
            if (r.pattern_id == p) return r;
        throw error("unknown pattern: " + std::string(to_string(p)));
    }

    /// All records whose affected range contains v, most severe first.
    std::vector<CveRecord> cves_for_version(const Log4jVersion& v) const {
        std::vector<CveRecord> out;
        for (const auto& r : records_)
            if (r.affected && r.affected->contains(v)) out.push_back(r);
        return out;
    }

    /// CVEs linked to a pattern, optionally narrowed to those applicable to
    /// a detected version. With no version every linked CVE is returned.
    std::vector<CveRecord> cves_for_pattern(PatternId p, const std::optional<Log4jVersion>& v = std::nullopt) const {
        const PatternRule& r = rule(p);
        std::vector<CveRecord> out;
        for (const auto& id : r.linked_cves) {
            const CveRecord& rec = record(id);
            if (v && !(rec.affected && rec.affected->contains(*v))) continue;
            out.push_back(rec);
        }
        return out;
    }

    const std::string& recommendation_for(std::string_view id) const { return record(id).recommendation; }

    /// Loader entry points. `source_name` only labels error messages.
    static Kb from_text(std::string_view text, std::string source_name = "<kb>");
    static Kb from_file(const std::filesystem::path& file);

private:
    const CveRecord* find(std::string_view id) const {
        for (const auto& r : records_)
            if (r.id == id) return &r;
        return nullptr;
    }

    std::vector<CveRecord> records_;
    std::vector<PatternRule> rules_;
};

// ---------------------------------------------------------------------------
// KB file parsing (format documented in docs/kb-format.md)

namespace kbdetail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string> split_list(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t comma = s.find(',', start);
        std::string_view item = (comma == std::string_view::npos) ? s.substr(start) : s.substr(start, comma - start);
        item = trim(item);
        if (!item.empty()) out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct Field {
    std::string value;
    int line = 0;
};

struct Block {
    std::string kind; // "cve" or "pattern"
    int line = 0;
    std::map<std::string, Field> fields;
    std::vector<std::string> recommendation;
    int recommendation_line = 0;
};

inline Log4jVersion parse_version_at(const std::string& file, int line, std::string_view text) {
    auto v = parse_version(text);
    if (!v) throw kb_error(file, line, "malformed version '" + std::string(text) + "'");
    return *v;
}

} // namespace kbdetail

inline Kb Kb::from_text(std::string_view text, std::string source_name) {
    using kbdetail::Block;
    using kbdetail::trim;

    std::vector<Block> blocks;
    Block* current = nullptr;
    bool in_recommendation = false;
    bool schema_seen = false;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view raw_line = (eol == std::string_view::npos) ? text.substr(pos) : text.substr(pos, eol - pos);
        ++line_no;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        if (eol == std::string_view::npos && raw_line.empty()) break;

        if (in_recommendation) {
            if (raw_line.size() >= 2 && raw_line[0] == ' ' && raw_line[1] == ' ') {
                current->recommendation.emplace_back(trim(raw_line));
                continue;
            }
            in_recommendation = false; // any non-indented line ends the block
        }

        std::string_view line = trim(raw_line);
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            if (line == "[cve]" || line == "[pattern]") {
                blocks.emplace_back();
                current = &blocks.back();
                current->kind = std::string(line.substr(1, line.size() - 2));
                current->line = line_no;
                continue;
            }
            throw kb_error(source_name, line_no, "unknown block '" + std::string(line) + "'");
        }

        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos)
            throw kb_error(source_name, line_no, "expected 'key: value'");
        std::string key{trim(line.substr(0, colon))};
        std::string value{trim(line.substr(colon + 1))};

        if (!current) {
            if (key == "schema") {
                if (value != "1") throw kb_error(source_name, line_no, "unsupported schema '" + value + "'");
                schema_seen = true;
                continue;
            }
            throw kb_error(source_name, line_no, "'" + key + "' outside any [cve]/[pattern] block");
        }
        if (key == "recommendation") {
            if (!value.empty())
                throw kb_error(source_name, line_no, "recommendation text belongs on indented lines");
            in_recommendation = true;
            current->recommendation_line = line_no;
            continue;
        }
        if (current->fields.count(key))
            throw kb_error(source_name, line_no, "duplicate key '" + key + "'");
        current->fields[key] = {value, line_no};
    }

    if (!schema_seen) throw kb_error(source_name, 1, "missing 'schema: 1' header");

    // Second pass: build typed records.
    Kb kb;
    auto take = [&](Block& b, const char* key, bool required) -> std::optional<kbdetail::Field> {
        auto it = b.fields.find(key);
        if (it == b.fields.end()) {
            if (required) throw kb_error(source_name, b.line, std::string(b.kind) + " block missing '" + key + "'");
            return std::nullopt;
        }
        kbdetail::Field f = it->second;
        b.fields.erase(it);
        return f;
    };

    for (Block& b : blocks) {
        if (b.kind == "cve") {
            CveRecord rec;
            rec.id = take(b, "id", true)->value;
            if (rec.id.empty()) throw kb_error(source_name, b.line, "empty CVE id");

            auto score = *take(b, "score", true);
            {
                // require one decimal digit: "D.D" with 0.0 <= value <= 10.0
                std::size_t dot = score.value.find('.');
                int whole = 0, frac = 0;
                bool ok = dot != std::string::npos && dot + 2 == score.value.size() &&
                          detail::parse_uint(std::string_view(score.value).substr(0, dot), whole) &&
                          detail::parse_uint(std::string_view(score.value).substr(dot + 1), frac);
                if (!ok) throw kb_error(source_name, score.line, "score must look like '9.8', got '" + score.value + "'");
                rec.score_tenths = whole * 10 + frac;
                if (rec.score_tenths < 0 || rec.score_tenths > 100)
                    throw kb_error(source_name, score.line, "score out of range [0.0, 10.0]");
            }

            auto gen = *take(b, "generation", true);
            if (gen.value == "v1") rec.generation = Generation::V1;
            else if (gen.value == "v2") rec.generation = Generation::V2;
            else if (gen.value == "both") rec.generation = Generation::Both;
            else throw kb_error(source_name, gen.line, "generation must be v1, v2 or both");

            auto affected = *take(b, "affected", true);
            if (affected.value != "none") {
                std::size_t sep = affected.value.find("..");
                if (sep == std::string::npos)
                    throw kb_error(source_name, affected.line, "affected must be 'LOW .. HIGH' or 'none'");
                VersionRange range;
                range.low = kbdetail::parse_version_at(source_name, affected.line,
                                                       kbdetail::trim(std::string_view(affected.value).substr(0, sep)));
                range.high = kbdetail::parse_version_at(source_name, affected.line,
                                                        kbdetail::trim(std::string_view(affected.value).substr(sep + 2)));
                if (range.high < range.low)
                    throw kb_error(source_name, affected.line, "affected range has low > high");
                rec.affected = std::move(range);
            }

            if (auto excludes = take(b, "excludes", false)) {
                if (!rec.affected)
                    throw kb_error(source_name, excludes->line, "excludes requires an affected range");
                for (const auto& item : kbdetail::split_list(excludes->value)) {
                    Log4jVersion v = kbdetail::parse_version_at(source_name, excludes->line, item);
                    if (v < rec.affected->low || rec.affected->high < v)
                        throw kb_error(source_name, excludes->line, "excluded version " + item + " outside affected range");
                    rec.affected->exclusions.push_back(std::move(v));
                }
            }

            if (auto patterns = take(b, "patterns", false)) {
                for (const auto& item : kbdetail::split_list(patterns->value)) {
                    auto p = pattern_id_from_string(item);
                    if (!p) throw kb_error(source_name, patterns->line, "unknown pattern id '" + item + "'");
                    rec.patterns.push_back(*p);
                }
            }

            for (const auto& l : b.recommendation) {
                if (!rec.recommendation.empty()) rec.recommendation += ' ';
                rec.recommendation += l;
            }
            if (rec.recommendation.empty())
                throw kb_error(source_name, b.line, "CVE record '" + rec.id + "' has no recommendation");

            if (!b.fields.empty())
                throw kb_error(source_name, b.fields.begin()->second.line,
                               "unknown key '" + b.fields.begin()->first + "' in [cve] block");

            for (const auto& existing : kb.records_)
                if (existing.id == rec.id) throw kb_error(source_name, b.line, "duplicate CVE id '" + rec.id + "'");
            kb.records_.push_back(std::move(rec));
        } else {
            PatternRule rule;
            auto id = *take(b, "id", true);
            auto p = pattern_id_from_string(id.value);
            if (!p) throw kb_error(source_name, id.line, "unknown pattern id '" + id.value + "'");
            rule.pattern_id = *p;
            rule.dotted_form = take(b, "class", true)->value;
            if (rule.dotted_form.empty()) throw kb_error(source_name, b.line, "empty class name");
            rule.path_form = PatternRule::derive_path_form(rule.dotted_form);
            auto cves = *take(b, "cves", true);
            rule.linked_cves = kbdetail::split_list(cves.value);
            if (rule.linked_cves.empty())
                throw kb_error(source_name, cves.line, "pattern rule must link at least one CVE");
            if (!b.fields.empty())
                throw kb_error(source_name, b.fields.begin()->second.line,
                               "unknown key '" + b.fields.begin()->first + "' in [pattern] block");
            for (const auto& existing : kb.rules_)
                if (existing.pattern_id == rule.pattern_id)
                    throw kb_error(source_name, b.line, "duplicate pattern rule '" + id.value + "'");
            kb.rules_.push_back(std::move(rule));
        }
    }

    // Cross-record closure checks.
    for (const auto& rule : kb.rules_)
        for (const auto& id : rule.linked_cves) {
            if (!kb.contains(id))
                throw kb_error(source_name, 0, "pattern " + std::string(to_string(rule.pattern_id)) +
                                                   " links unknown CVE '" + id + "'");
            const auto& pats = kb.record(id).patterns;
            if (std::find(pats.begin(), pats.end(), rule.pattern_id) == pats.end())
                throw kb_error(source_name, 0, "pattern " + std::string(to_string(rule.pattern_id)) + " links " + id +
                                                   " but that record does not list the pattern");
        }
    for (const auto& rec : kb.records_)
        for (PatternId p : rec.patterns) {
            bool found = false;
            for (const auto& rule : kb.rules_)
                if (rule.pattern_id == p) {
                    found = std::find(rule.linked_cves.begin(), rule.linked_cves.end(), rec.id) !=
                            rule.linked_cves.end();
                    break;
                }
            if (!found)
                throw kb_error(source_name, 0, rec.id + " references pattern " + std::string(to_string(p)) +
                                                   " without a matching [pattern] rule entry");
        }

    std::stable_sort(kb.records_.begin(), kb.records_.end(), [](const CveRecord& a, const CveRecord& b) {
        if (a.score_tenths != b.score_tenths) return a.score_tenths > b.score_tenths;
        return a.id < b.id;
    });
    std::stable_sort(kb.rules_.begin(), kb.rules_.end(), [](const PatternRule& a, const PatternRule& b) {
        return static_cast<int>(a.pattern_id) < static_cast<int>(b.pattern_id);
    });
    return kb;
}

inline Kb Kb::from_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw error("cannot open KB file: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str(), file.string());
}

} // namespace log4shield
