#pragma once

// Scanner flow: initial pom scan, conditional deep scan, CVE enrichment
// from the knowledge base, severity ranking and recommendation attachment.

#include <algorithm>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "log4shield/deep_scan.hpp"
#include "log4shield/kb.hpp"
#include "log4shield/pom.hpp"

namespace log4shield {

inline constexpr std::string_view tool_version = "0.1.0";

enum class EvidenceKind : std::uint8_t { DependencyVersion, PatternHit, ConfigReference };

inline std::string_view to_string(EvidenceKind k) {
    switch (k) {
    case EvidenceKind::DependencyVersion: return "dependency_version";
    case EvidenceKind::PatternHit: return "pattern_hit";
    case EvidenceKind::ConfigReference: return "config_reference";
    }
    return "?";
}

enum class Confidence : std::uint8_t {
    VersionOnly,    // applicable version found, the triggering class was not seen
    ConfirmedUsage, // the vulnerable class itself is referenced
};

inline std::string_view to_string(Confidence c) {
    return c == Confidence::VersionOnly ? "version_only" : "confirmed_usage";
}

enum class SeverityBand : std::uint8_t { Critical, High, Medium, Low };

inline std::string_view to_string(SeverityBand b) {
    switch (b) {
    case SeverityBand::Critical: return "critical";
    case SeverityBand::High: return "high";
    case SeverityBand::Medium: return "medium";
    case SeverityBand::Low: return "low";
    }
    return "?";
}

inline SeverityBand severity_band_for(int score_tenths) {
    if (score_tenths >= 90) return SeverityBand::Critical;
    if (score_tenths >= 70) return SeverityBand::High;
    if (score_tenths >= 40) return SeverityBand::Medium;
    return SeverityBand::Low;
}

struct Evidence {
    std::string file; // root-relative
    int line = 0;
    EvidenceKind kind = EvidenceKind::PatternHit;
    std::string detail;

    friend bool operator==(const Evidence& a, const Evidence& b) {
        return a.file == b.file && a.line == b.line && a.kind == b.kind;
    }
};

struct Finding {
    std::string cve_id;
    int score_tenths = 0;
    Confidence confidence = Confidence::VersionOnly;
    std::string affected_versions_note;
    std::vector<Evidence> evidence;
    std::string recommendation;

    double base_score() const noexcept { return score_tenths / 10.0; }
    std::string score_text() const {
        return std::to_string(score_tenths / 10) + "." + std::to_string(score_tenths % 10);
    }
    SeverityBand severity_band() const { return severity_band_for(score_tenths); }
};

enum class Verdict : std::uint8_t { NotVulnerable, Vulnerable };

inline std::string_view to_string(Verdict v) { return v == Verdict::Vulnerable ? "vulnerable" : "not_vulnerable"; }

enum class ScanMode : std::uint8_t { InitialOnly, DeepScan };

inline std::string_view to_string(ScanMode m) { return m == ScanMode::DeepScan ? "deep_scan" : "initial_only"; }

struct ScanReport {
    std::string root;
    Verdict verdict = Verdict::NotVulnerable;
    ScanMode mode_reached = ScanMode::InitialOnly;
    std::vector<Finding> findings; // sorted: score desc, id asc
    std::vector<DependencyDecl> dependencies_seen;
    int files_scanned = 0;
    std::vector<std::string> warnings;
    std::string started;  // RFC-3339 UTC
    std::string finished; // RFC-3339 UTC
    std::string tool_version;
};

struct ScanConfig {
    bool strict = false; // drop version-only findings for pattern-gated v1 CVEs
    std::vector<std::string> ignore_globs;
    std::set<std::string> excluded_artifacts; // shim allowlist, empty by default
    ScanFilter filter;
};

inline std::string now_rfc3339() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Stable severity ranking: base score descending, CVE id ascending on ties.
inline std::vector<Finding> rank_findings(std::vector<Finding> findings) {
    std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        if (a.score_tenths != b.score_tenths) return a.score_tenths > b.score_tenths;
        return a.cve_id < b.cve_id;
    });
    return findings;
}

/// Collapse findings to one per CVE id. Evidence lists are concatenated,
/// deduplicated by (file, line, kind) and sorted; a confirmed-usage mention
/// wins over version-only.
inline std::vector<Finding> merge_evidence(const std::vector<Finding>& version_findings,
                                           const std::vector<Finding>& pattern_findings) {
    std::vector<Finding> merged;
    auto absorb = [&](const Finding& f) {
        for (Finding& m : merged) {
            if (m.cve_id != f.cve_id) continue;
            for (const Evidence& e : f.evidence)
                if (std::find(m.evidence.begin(), m.evidence.end(), e) == m.evidence.end()) m.evidence.push_back(e);
            if (f.confidence == Confidence::ConfirmedUsage) m.confidence = Confidence::ConfirmedUsage;
            return;
        }
        Finding fresh = f;
        std::vector<Evidence> dedup;
        for (const Evidence& e : fresh.evidence)
            if (std::find(dedup.begin(), dedup.end(), e) == dedup.end()) dedup.push_back(e);
        fresh.evidence = std::move(dedup);
        merged.push_back(std::move(fresh));
    };
    for (const Finding& f : version_findings) absorb(f);
    for (const Finding& f : pattern_findings) absorb(f);
    for (Finding& m : merged) {
        std::sort(m.evidence.begin(), m.evidence.end(), [](const Evidence& a, const Evidence& b) {
            if (a.file != b.file) return a.file < b.file;
            if (a.line != b.line) return a.line < b.line;
            return static_cast<int>(a.kind) < static_cast<int>(b.kind);
        });
    }
    return merged;
}

namespace pipedetail {

inline std::string affected_note(const CveRecord& rec) {
    if (!rec.affected) return "not tied to a specific version";
    return "affects Log4j " + rec.affected->low.raw + " to " + rec.affected->high.raw;
}

inline Finding finding_from_record(const CveRecord& rec, Confidence confidence) {
    Finding f;
    f.cve_id = rec.id;
    f.score_tenths = rec.score_tenths;
    f.confidence = confidence;
    f.affected_versions_note = affected_note(rec);
    f.recommendation = rec.recommendation;
    return f;
}

inline EvidenceKind kind_from_form(MatchForm form) {
    return form == MatchForm::ConfigReference ? EvidenceKind::ConfigReference : EvidenceKind::PatternHit;
}

} // namespace pipedetail

/// Run the whole scanner flow over a directory tree.
///
/// The deep scan runs when the initial scan found a vulnerable dependency,
/// when a pom failed to parse, when a log4j version could not be determined,
/// or when no pom exists at all; otherwise the scan stops after the pom
/// pass. Findings come from two routes: every KB entry applicable to a
/// flagged dependency version, and every pattern hit's linked CVEs filtered
/// by the detected versions (unfiltered when no version is known).
inline ScanReport run_scan(const std::filesystem::path& root, const ScanConfig& config, const Kb& kb) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw scan_error("scan root is not a directory: " + root.string());

    ScanReport report;
    report.root = root.generic_string();
    report.tool_version = std::string(tool_version);
    report.started = now_rfc3339();

    ScanFilter filter = config.filter;
    for (const auto& g : load_ignore_file(root)) filter.ignore_globs.push_back(g);
    for (const auto& g : config.ignore_globs) filter.ignore_globs.push_back(g);

    const std::vector<fs::path> poms = discover_poms(root, filter);
    std::vector<std::pair<DependencyDecl, VulnClass>> vulnerable;
    bool parse_failed = false;
    for (const fs::path& rel : poms) {
        InitialScanResult r = scan_pom(root / rel, config.excluded_artifacts, rel.generic_string());
        parse_failed = parse_failed || r.parse_failed;
        for (auto& w : r.warnings) report.warnings.push_back(std::move(w));
        for (auto& d : r.dependencies) report.dependencies_seen.push_back(std::move(d));
        for (auto& v : r.vulnerable) vulnerable.push_back(std::move(v));
    }
    report.files_scanned = static_cast<int>(poms.size());

    std::vector<Log4jVersion> detected_versions;
    bool undetermined = false;
    for (const auto& d : report.dependencies_seen) {
        if (!d.is_log4j_artifact() || config.excluded_artifacts.count(d.artifact_id)) continue;
        if (d.resolved_version) detected_versions.push_back(*d.resolved_version);
        else undetermined = true;
    }

    const bool need_deep = poms.empty() || parse_failed || !vulnerable.empty() || undetermined;
    DeepScanResult deep;
    if (need_deep) {
        deep = deep_scan_collect(root, filter, kb.pattern_rules());
        report.files_scanned += deep.files_scanned;
        for (auto& w : deep.warnings) report.warnings.push_back(std::move(w));
    }
    report.mode_reached = need_deep ? ScanMode::DeepScan : ScanMode::InitialOnly;

    // Route 1: CVEs applicable to each flagged dependency version.
    std::vector<Finding> version_findings;
    for (const auto& [dep, cls] : vulnerable) {
        for (const CveRecord& rec : kb.cves_for_version(*dep.resolved_version)) {
            Finding f = pipedetail::finding_from_record(rec, Confidence::VersionOnly);
            f.evidence.push_back({dep.source_file, dep.line.value_or(0), EvidenceKind::DependencyVersion,
                                  "dependency " + dep.describe()});
            version_findings.push_back(std::move(f));
        }
    }

    // Route 2: CVEs linked to pattern hits, narrowed by detected versions.
    std::vector<Finding> pattern_findings;
    for (const PatternHit& hit : deep.hits) {
        for (const CveRecord& rec : kb.cves_for_pattern(hit.pattern_id)) {
            if (!detected_versions.empty()) {
                bool applicable = false;
                for (const Log4jVersion& v : detected_versions)
                    if (rec.affected && rec.affected->contains(v)) { applicable = true; break; }
                if (!applicable) continue;
            }
            Finding f = pipedetail::finding_from_record(rec, Confidence::ConfirmedUsage);
            f.evidence.push_back({hit.file, hit.line, pipedetail::kind_from_form(hit.form), hit.matched_text});
            pattern_findings.push_back(std::move(f));
        }
    }

    std::vector<Finding> findings = merge_evidence(version_findings, pattern_findings);

    std::optional<VulnClass> version_evidence;
    if (!detected_versions.empty()) version_evidence = classify_version(detected_versions.front());
    if (auto seed = detect_misconfiguration(deep.hits, version_evidence)) {
        Finding f = pipedetail::finding_from_record(kb.record(misconfiguration_id), Confidence::ConfirmedUsage);
        for (const PatternHit& hit : seed->evidence)
            f.evidence.push_back({hit.file, hit.line, pipedetail::kind_from_form(hit.form), hit.matched_text});
        findings = merge_evidence(findings, {std::move(f)});
    }

    if (config.strict) {
        findings.erase(std::remove_if(findings.begin(), findings.end(),
                                      [&](const Finding& f) {
                                          return f.confidence == Confidence::VersionOnly &&
                                                 kb.record(f.cve_id).pattern_gated();
                                      }),
                       findings.end());
    }

    report.findings = rank_findings(std::move(findings));
    report.verdict = report.findings.empty() ? Verdict::NotVulnerable : Verdict::Vulnerable;
    report.finished = now_rfc3339();
    return report;
}

} // namespace log4shield
