#pragma once

// Report rendering: deterministic text for humans (every line <= 120
// columns) and versioned JSON for CI consumers, plus the exit-code mapping.
// The JSON schema is documented in docs/report-schema.md.

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "log4shield/pipeline.hpp"

namespace log4shield {

inline constexpr std::string_view report_schema_version = "1";
inline constexpr std::size_t text_max_columns = 120;

enum class ReportFormat : std::uint8_t { Text, Json };

struct RenderedReport {
    ReportFormat format = ReportFormat::Text;
    std::string body; // UTF-8
    std::string schema_version{report_schema_version};
};

namespace repdetail {

/// Emit `text` indented by `indent`, hard-wrapped so no output line exceeds
/// text_max_columns bytes. Wraps at spaces where possible.
inline void emit_wrapped(std::string& out, std::string_view text, std::size_t indent, std::size_t width) {
    const std::string pad(indent, ' ');
    while (!text.empty()) {
        std::size_t room = width > indent ? width - indent : 16;
        if (text.size() <= room) {
            out += pad;
            out += text;
            out += '\n';
            return;
        }
        std::size_t cut = text.rfind(' ', room);
        if (cut == std::string_view::npos || cut == 0) cut = room; // no space: hard cut
        out += pad;
        out += text.substr(0, cut);
        out += '\n';
        text.remove_prefix(cut);
        while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    }
}

inline std::string severity_upper(SeverityBand b) {
    std::string s(to_string(b));
    for (char& c : s)
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    return s;
}

} // namespace repdetail

/// `color` adds ANSI styling to the verdict and severity tokens; the CLI
/// enables it only on a terminal and only when NO_COLOR is unset.
inline RenderedReport render_text(const ScanReport& r, bool color = false) {
    const char* red = color ? "\033[31;1m" : "";
    const char* green = color ? "\033[32;1m" : "";
    const char* reset = color ? "\033[0m" : "";

    std::string out;
    out += "log4shield scan report (tool " + r.tool_version + ")\n";
    out += "root:          " + r.root + "\n";
    out += "verdict:       ";
    out += (r.verdict == Verdict::Vulnerable ? red + std::string("VULNERABLE")
                                             : green + std::string("NOT VULNERABLE")) +
           reset;
    out += "\n";
    out += "mode reached:  ";
    out += (r.mode_reached == ScanMode::DeepScan ? "deep scan" : "initial scan only");
    out += "\n";
    out += "files scanned: " + std::to_string(r.files_scanned) + "\n";
    int log4j_deps = 0;
    for (const auto& d : r.dependencies_seen)
        if (d.is_log4j_artifact()) ++log4j_deps;
    out += "dependencies:  " + std::to_string(r.dependencies_seen.size()) + " (" + std::to_string(log4j_deps) +
           " log4j)\n";
    out += "findings:      " + std::to_string(r.findings.size()) + "\n";

    if (r.findings.empty()) {
        out += "\nNo vulnerabilities found.\n";
    } else {
        int index = 0;
        for (const Finding& f : r.findings) {
            ++index;
            const std::string primary = f.evidence.empty()
                                            ? std::string()
                                            : f.evidence.front().file + ":" + std::to_string(f.evidence.front().line);
            repdetail::emit_wrapped(out,
                                    "[" + std::to_string(index) + "] " + f.cve_id + "  " + f.score_text() + " " +
                                        repdetail::severity_upper(f.severity_band()) + "  (" +
                                        std::string(to_string(f.confidence) == "version_only" ? "version only"
                                                                                              : "confirmed usage") +
                                        ")  " + primary,
                                    0, text_max_columns);
            repdetail::emit_wrapped(out, f.affected_versions_note, 4, text_max_columns);
            out += "    evidence:\n";
            for (const Evidence& e : f.evidence)
                repdetail::emit_wrapped(out, e.file + ":" + std::to_string(e.line) + "  [" +
                                                 std::string(to_string(e.kind)) + "]  " + e.detail,
                                        6, text_max_columns);
            out += "    recommendation:\n";
            repdetail::emit_wrapped(out, f.recommendation, 6, 100);
            out += "\n";
        }
    }

    if (!r.warnings.empty()) {
        out += "warnings:\n";
        for (const auto& w : r.warnings) repdetail::emit_wrapped(out, w, 2, text_max_columns);
    }
    return RenderedReport{ReportFormat::Text, std::move(out)};
}

inline nlohmann::ordered_json report_to_json(const ScanReport& r) {
    nlohmann::ordered_json j;
    j["schema_version"] = report_schema_version;
    j["tool_version"] = r.tool_version;
    j["root"] = r.root;
    j["verdict"] = to_string(r.verdict);
    j["mode_reached"] = to_string(r.mode_reached);
    j["started"] = r.started;
    j["finished"] = r.finished;
    j["files_scanned"] = r.files_scanned;
    j["warnings"] = r.warnings;

    j["dependencies"] = nlohmann::ordered_json::array();
    for (const DependencyDecl& d : r.dependencies_seen) {
        nlohmann::ordered_json dep;
        dep["group_id"] = d.group_id;
        dep["artifact_id"] = d.artifact_id;
        if (d.version_text) dep["version_text"] = *d.version_text;
        if (d.resolved_version) dep["resolved_version"] = d.resolved_version->raw;
        dep["provenance"] = to_string(d.provenance);
        dep["source_file"] = d.source_file;
        if (d.line) dep["line"] = *d.line;
        if (d.scope) dep["scope"] = *d.scope;
        dep["optional"] = d.optional_dep;
        dep["dependency_management"] = d.dependency_management;
        j["dependencies"].push_back(std::move(dep));
    }

    j["findings"] = nlohmann::ordered_json::array();
    for (const Finding& f : r.findings) {
        nlohmann::ordered_json jf;
        jf["cve_id"] = f.cve_id;
        jf["base_score"] = f.base_score();
        jf["score"] = f.score_text();
        jf["severity_band"] = to_string(f.severity_band());
        jf["confidence"] = to_string(f.confidence);
        jf["affected_versions"] = f.affected_versions_note;
        jf["evidence"] = nlohmann::ordered_json::array();
        for (const Evidence& e : f.evidence) {
            nlohmann::ordered_json je;
            je["file"] = e.file;
            je["line"] = e.line;
            je["kind"] = to_string(e.kind);
            je["detail"] = e.detail;
            jf["evidence"].push_back(std::move(je));
        }
        jf["recommendation"] = f.recommendation;
        j["findings"].push_back(std::move(jf));
    }
    return j;
}

inline RenderedReport render_json(const ScanReport& r) {
    return RenderedReport{ReportFormat::Json, report_to_json(r).dump(2) + "\n"};
}

namespace repdetail {

template <typename T>
T enum_from_string(std::string_view s, std::initializer_list<std::pair<std::string_view, T>> table, const char* what) {
    for (const auto& [name, value] : table)
        if (name == s) return value;
    throw error("unknown " + std::string(what) + ": '" + std::string(s) + "'");
}

} // namespace repdetail

/// Rebuild a ScanReport from rendered JSON. Unknown fields are ignored so
/// newer producers stay readable.
inline ScanReport report_from_json(std::string_view body) {
    nlohmann::json j = nlohmann::json::parse(body);
    ScanReport r;
    r.tool_version = j.value("tool_version", "");
    r.root = j.value("root", "");
    r.verdict = repdetail::enum_from_string<Verdict>(
        j.at("verdict").get<std::string>(),
        {{"vulnerable", Verdict::Vulnerable}, {"not_vulnerable", Verdict::NotVulnerable}}, "verdict");
    r.mode_reached = repdetail::enum_from_string<ScanMode>(
        j.at("mode_reached").get<std::string>(),
        {{"initial_only", ScanMode::InitialOnly}, {"deep_scan", ScanMode::DeepScan}}, "mode");
    r.started = j.value("started", "");
    r.finished = j.value("finished", "");
    r.files_scanned = j.value("files_scanned", 0);
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();

    for (const auto& dep : j.value("dependencies", nlohmann::json::array())) {
        DependencyDecl d;
        d.group_id = dep.value("group_id", "");
        d.artifact_id = dep.value("artifact_id", "");
        if (dep.contains("version_text")) d.version_text = dep["version_text"].get<std::string>();
        if (dep.contains("resolved_version")) d.resolved_version = parse_version(dep["resolved_version"].get<std::string>());
        d.provenance = repdetail::enum_from_string<Provenance>(dep.value("provenance", "unresolved"),
                                                               {{"literal", Provenance::Literal},
                                                                {"property_resolved", Provenance::PropertyResolved},
                                                                {"unresolved", Provenance::Unresolved}},
                                                               "provenance");
        d.source_file = dep.value("source_file", "");
        if (dep.contains("line")) d.line = dep["line"].get<int>();
        if (dep.contains("scope")) d.scope = dep["scope"].get<std::string>();
        d.optional_dep = dep.value("optional", false);
        d.dependency_management = dep.value("dependency_management", false);
        r.dependencies_seen.push_back(std::move(d));
    }

    for (const auto& jf : j.value("findings", nlohmann::json::array())) {
        Finding f;
        f.cve_id = jf.at("cve_id").get<std::string>();
        {
            const std::string score = jf.value("score", "0.0");
            std::size_t dot = score.find('.');
            f.score_tenths = std::stoi(score.substr(0, dot)) * 10 + std::stoi(score.substr(dot + 1));
        }
        f.confidence = repdetail::enum_from_string<Confidence>(
            jf.value("confidence", "version_only"),
            {{"version_only", Confidence::VersionOnly}, {"confirmed_usage", Confidence::ConfirmedUsage}}, "confidence");
        f.affected_versions_note = jf.value("affected_versions", "");
        for (const auto& je : jf.value("evidence", nlohmann::json::array())) {
            Evidence e;
            e.file = je.value("file", "");
            e.line = je.value("line", 0);
            e.kind = repdetail::enum_from_string<EvidenceKind>(je.value("kind", "pattern_hit"),
                                                               {{"dependency_version", EvidenceKind::DependencyVersion},
                                                                {"pattern_hit", EvidenceKind::PatternHit},
                                                                {"config_reference", EvidenceKind::ConfigReference}},
                                                               "evidence kind");
            e.detail = je.value("detail", "");
            f.evidence.push_back(std::move(e));
        }
        f.recommendation = jf.value("recommendation", "");
        r.findings.push_back(std::move(f));
    }
    return r;
}

/// CI gate: 0 when no finding reaches the threshold, 1 when one does.
/// 2 is reserved for scan errors and set by the caller.
inline int exit_code(const ScanReport& r, double threshold) {
    for (const Finding& f : r.findings)
        if (f.base_score() >= threshold) return 1;
    return 0;
}

} // namespace log4shield
