#pragma once

// Offline evaluation harness: run the scanner over a manifest of fixture
// trees with expected verdicts (and optionally expected CVE sets), then
// tally correct / false-positive / false-negative / wrong-CVE counts and
// accuracy. Manifest format: docs/corpus-manifest.md.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "log4shield/report.hpp"

namespace log4shield {

struct CorpusEntry {
    std::string name;
    std::string project; // optional grouping key (releases of one project)
    std::filesystem::path path; // relative to the manifest file's directory
    Verdict expected = Verdict::NotVulnerable;
    std::optional<std::set<std::string>> expected_cves;
    std::string notes;
    int line = 0; // manifest line, for error messages
};

struct CorpusManifest {
    std::filesystem::path base_dir;
    std::vector<CorpusEntry> entries;
};

enum class Outcome : std::uint8_t { Correct, FalsePositive, FalseNegative, WrongCves, Errored };

inline std::string_view to_string(Outcome o) {
    switch (o) {
    case Outcome::Correct: return "correct";
    case Outcome::FalsePositive: return "false_positive";
    case Outcome::FalseNegative: return "false_negative";
    case Outcome::WrongCves: return "wrong_cves";
    case Outcome::Errored: return "errored";
    }
    return "?";
}

struct EntryResult {
    std::string name;
    Verdict expected = Verdict::NotVulnerable;
    Verdict actual = Verdict::NotVulnerable;
    Outcome outcome = Outcome::Correct;
    std::vector<std::string> cves_missing;    // expected but not reported
    std::vector<std::string> cves_unexpected; // reported but not expected
    std::string error; // set for Errored entries
};

struct EvalResult {
    int total = 0; // scored entries (errored ones are excluded)
    int correct = 0;
    int false_positives = 0;
    int false_negatives = 0;
    int wrong_cves = 0;
    int errored = 0;
    double accuracy = 0.0; // correct / total, exactly
    std::vector<EntryResult> per_entry;
};

/// Pure arithmetic over per-entry outcomes; also used to re-check recorded
/// result sets without scanning anything.
inline EvalResult tally(std::vector<EntryResult> entries) {
    EvalResult r;
    r.per_entry = std::move(entries);
    for (const EntryResult& e : r.per_entry) {
        switch (e.outcome) {
        case Outcome::Correct: ++r.correct; ++r.total; break;
        case Outcome::FalsePositive: ++r.false_positives; ++r.total; break;
        case Outcome::FalseNegative: ++r.false_negatives; ++r.total; break;
        case Outcome::WrongCves: ++r.wrong_cves; ++r.total; break;
        case Outcome::Errored: ++r.errored; break;
        }
    }
    r.accuracy = r.total > 0 ? static_cast<double>(r.correct) / r.total : 0.0;
    return r;
}

inline CorpusManifest load_manifest(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw scan_error("cannot open manifest: " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    CorpusManifest manifest;
    manifest.base_dir = file.parent_path();

    auto fail = [&](int line, const std::string& msg) -> void {
        throw scan_error(file.string() + ":" + std::to_string(line) + ": " + msg);
    };

    CorpusEntry* current = nullptr;
    int line_no = 0;
    std::istringstream lines(text);
    std::string raw;
    while (std::getline(lines, raw)) {
        ++line_no;
        std::string_view line = kbdetail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line == "[entry]") {
            manifest.entries.emplace_back();
            current = &manifest.entries.back();
            current->line = line_no;
            continue;
        }
        std::size_t colon = line.find(':');
        if (colon == std::string_view::npos) fail(line_no, "expected 'key: value'");
        std::string key{kbdetail::trim(line.substr(0, colon))};
        std::string value{kbdetail::trim(line.substr(colon + 1))};
        if (!current) fail(line_no, "'" + key + "' outside any [entry] block");
        if (key == "name") current->name = value;
        else if (key == "project") current->project = value;
        else if (key == "path") current->path = value;
        else if (key == "expect") {
            if (value == "vulnerable") current->expected = Verdict::Vulnerable;
            else if (value == "not_vulnerable") current->expected = Verdict::NotVulnerable;
            else fail(line_no, "expect must be 'vulnerable' or 'not_vulnerable'");
        } else if (key == "cves") {
            std::set<std::string> set;
            for (const auto& id : kbdetail::split_list(value)) set.insert(id);
            current->expected_cves = std::move(set);
        } else if (key == "notes") current->notes = value;
        else fail(line_no, "unknown key '" + key + "'");
    }

    std::set<std::string> names;
    for (const CorpusEntry& e : manifest.entries) {
        if (e.name.empty()) throw scan_error(file.string() + ":" + std::to_string(e.line) + ": entry without a name");
        if (e.path.empty())
            throw scan_error(file.string() + ":" + std::to_string(e.line) + ": entry '" + e.name + "' without a path");
        if (!names.insert(e.name).second)
            throw scan_error(file.string() + ":" + std::to_string(e.line) + ": duplicate entry name '" + e.name + "'");
    }
    return manifest;
}

/// Scan every manifest entry and classify the result. A missing fixture path
/// marks the entry errored and leaves the accuracy denominator untouched.
inline EvalResult run_corpus(const CorpusManifest& manifest, const ScanConfig& config, const Kb& kb) {
    std::vector<EntryResult> entries;
    for (const CorpusEntry& e : manifest.entries) {
        EntryResult res;
        res.name = e.name;
        res.expected = e.expected;
        const std::filesystem::path root = e.path.is_absolute() ? e.path : manifest.base_dir / e.path;
        std::error_code ec;
        if (!std::filesystem::is_directory(root, ec)) {
            res.outcome = Outcome::Errored;
            res.error = "missing path: " + root.generic_string();
            entries.push_back(std::move(res));
            continue;
        }
        ScanReport report = run_scan(root, config, kb);
        res.actual = report.verdict;
        if (res.actual != res.expected) {
            res.outcome = res.actual == Verdict::Vulnerable ? Outcome::FalsePositive : Outcome::FalseNegative;
        } else if (e.expected_cves) {
            std::set<std::string> actual_cves;
            for (const Finding& f : report.findings) actual_cves.insert(f.cve_id);
            for (const auto& id : *e.expected_cves)
                if (!actual_cves.count(id)) res.cves_missing.push_back(id);
            for (const auto& id : actual_cves)
                if (!e.expected_cves->count(id)) res.cves_unexpected.push_back(id);
            res.outcome = (res.cves_missing.empty() && res.cves_unexpected.empty()) ? Outcome::Correct
                                                                                    : Outcome::WrongCves;
        } else {
            res.outcome = Outcome::Correct;
        }
        entries.push_back(std::move(res));
    }
    return tally(std::move(entries));
}

/// "91.4%" style percentage with one decimal.
inline std::string percent_text(double fraction) {
    const long long tenths = std::llround(fraction * 1000.0);
    return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

/// "0.914" style, three decimals.
inline std::string accuracy_text(double fraction) {
    const long long millis = std::llround(fraction * 1000.0);
    std::string frac = std::to_string(millis % 1000);
    while (frac.size() < 3) frac.insert(frac.begin(), '0');
    return std::to_string(millis / 1000) + "." + frac;
}

inline std::string render_eval_text(const EvalResult& r) {
    std::string out;
    if (r.total == 0) {
        out += "error: empty corpus, nothing to evaluate\n";
        if (r.errored > 0) out += std::to_string(r.errored) + " entries errored\n";
        for (const EntryResult& e : r.per_entry)
            if (e.outcome == Outcome::Errored) out += "  " + e.name + ": " + e.error + "\n";
        return out;
    }
    out += "entries:         " + std::to_string(r.total) + "\n";
    out += "correct:         " + std::to_string(r.correct) + "\n";
    out += "false positives: " + std::to_string(r.false_positives) + "\n";
    out += "false negatives: " + std::to_string(r.false_negatives) + "\n";
    out += "wrong CVEs:      " + std::to_string(r.wrong_cves) + "\n";
    if (r.errored > 0) out += "errored:         " + std::to_string(r.errored) + " (excluded from accuracy)\n";
    out += "accuracy:        " + percent_text(r.accuracy) + " (" + accuracy_text(r.accuracy) + ")\n";
    out += "\n";
    for (const EntryResult& e : r.per_entry) {
        out += e.name + ": " + std::string(to_string(e.outcome));
        if (e.outcome == Outcome::Errored) {
            out += " (" + e.error + ")";
        } else if (e.outcome != Outcome::Correct) {
            out += " (expected " + std::string(to_string(e.expected)) + ", got " + std::string(to_string(e.actual)) + ")";
        }
        if (!e.cves_missing.empty()) {
            out += " missing:";
            for (const auto& id : e.cves_missing) out += " " + id;
        }
        if (!e.cves_unexpected.empty()) {
            out += " unexpected:";
            for (const auto& id : e.cves_unexpected) out += " " + id;
        }
        out += "\n";
    }
    return out;
}

inline std::string render_eval_json(const EvalResult& r) {
    nlohmann::ordered_json j;
    j["total"] = r.total;
    j["correct"] = r.correct;
    j["false_positives"] = r.false_positives;
    j["false_negatives"] = r.false_negatives;
    j["wrong_cves"] = r.wrong_cves;
    j["errored"] = r.errored;
    j["accuracy"] = r.total > 0 ? std::llround(r.accuracy * 1000.0) / 1000.0 : 0.0;
    j["per_entry"] = nlohmann::ordered_json::array();
    for (const EntryResult& e : r.per_entry) {
        nlohmann::ordered_json je;
        je["name"] = e.name;
        je["expected"] = to_string(e.expected);
        je["actual"] = to_string(e.actual);
        je["outcome"] = to_string(e.outcome);
        if (!e.cves_missing.empty()) je["cves_missing"] = e.cves_missing;
        if (!e.cves_unexpected.empty()) je["cves_unexpected"] = e.cves_unexpected;
        if (!e.error.empty()) je["error"] = e.error;
        j["per_entry"].push_back(std::move(je));
    }
    return j.dump(2) + "\n";
}

inline std::string render_eval(const EvalResult& r, ReportFormat format) {
    return format == ReportFormat::Json ? render_eval_json(r) : render_eval_text(r);
}

} // namespace log4shield
